#include "ccge/stream_order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ccge/errors.hpp"

namespace ccge {

IncidenceMatrix::IncidenceMatrix(std::size_t n) : n_(n), cells_(n * n, 0), primary_(n, 1) {}

IncidenceMatrix IncidenceMatrix::perfectly_triangular(std::size_t n) {
  IncidenceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, true);
  return m;
}

IncidenceMatrix IncidenceMatrix::permuted(const std::vector<std::size_t>& perm) const {
  if (perm.size() != n_) throw ValidationError("permutation size does not match incidence");
  IncidenceMatrix out(n_);
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = 0; b < n_; ++b) out.set(a, b, (*this)(perm[a], perm[b]));
  return out;
}

IncidenceMatrix build_incidence(const LinkedIOTables& tables, IncidenceSource source) {
  const auto n = tables.n_sectors();
  IncidenceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      const bool in0 = tables[0].flows(ii, jj) > 0.0;
      const bool in1 = tables[1].flows(ii, jj) > 0.0;
      switch (source) {
        case IncidenceSource::Period0: m.set(i, j, in0); break;
        case IncidenceSource::Period1: m.set(i, j, in1); break;
        case IncidenceSource::Union: m.set(i, j, in0 || in1); break;
      }
    }
  }
  return m;
}

IncidenceMatrix transitive_closure(const IncidenceMatrix& m) {
  const auto n = m.size();
  IncidenceMatrix out = m;
  for (std::size_t i = 0; i < n; ++i) out.set(i, i, true);
  // Warshall
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (out(i, k))
        for (std::size_t j = 0; j < n; ++j)
          if (out(k, j)) out.set(i, j, true);
  return out;
}

std::vector<double> degree_ratios(const IncidenceMatrix& m) {
  const auto n = m.size();
  std::vector<double> ratios(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t indegree = 0, outdegree = 0;
    for (std::size_t i = 0; i < n; ++i) indegree += m(i, k) ? 1 : 0;
    for (std::size_t j = 0; j < n; ++j) outdegree += m(k, j) ? 1 : 0;
    ratios[k] = outdegree == 0 ? std::numeric_limits<double>::infinity()
                               : static_cast<double>(indegree) / static_cast<double>(outdegree);
  }
  return ratios;
}

std::vector<std::size_t> StreamOrder::ranks() const {
  std::vector<std::size_t> rank(permutation.size());
  for (std::size_t k = 0; k < permutation.size(); ++k) rank[permutation[k]] = k;
  return rank;
}

std::size_t count_triangularity_violations(const IncidenceMatrix& m, const std::vector<std::size_t>& permutation) {
  const auto n = m.size();
  if (permutation.size() != n) throw ValidationError("permutation size does not match incidence");
  std::size_t violations = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (m(permutation[a], permutation[b])) ++violations;
  return violations;
}

StreamOrder derive_stream_order(const IncidenceMatrix& m) {
  const auto n = m.size();
  const auto ratio = degree_ratios(m);
  StreamOrder order;
  order.permutation.resize(n);
  std::iota(order.permutation.begin(), order.permutation.end(), std::size_t{0});
  std::stable_sort(order.permutation.begin(), order.permutation.end(),
                   [&](std::size_t a, std::size_t b) { return ratio[a] < ratio[b]; });
  order.ratios.reserve(n);
  order.ranking_index.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    order.ratios.push_back(ratio[order.permutation[k]]);
    order.ranking_index.push_back(static_cast<double>(n - k) / static_cast<double>(n));
  }
  order.triangularity_violations = count_triangularity_violations(m, order.permutation);
  return order;
}

std::vector<CcdfPoint> ccdf_export(const StreamOrder& order) {
  std::vector<CcdfPoint> points;
  points.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    CcdfPoint pt;
    pt.rank = k + 1;
    pt.sector = order.permutation[k];
    pt.ratio = order.ratios[k];
    pt.ranking_index = order.ranking_index[k];
    pt.log_ratio = std::log(pt.ratio);
    pt.log_ranking_index = std::log(pt.ranking_index);
    points.push_back(pt);
  }
  return points;
}

}  // namespace ccge
