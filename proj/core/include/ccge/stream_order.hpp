#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ccge/iot_data.hpp"

namespace ccge {

/// Binary incidence of commodities (rows) in sectors (columns), 0-based.
/// The primary-factor pseudo-row is kept separately and is 1 for every sector.
class IncidenceMatrix {
 public:
  IncidenceMatrix() = default;
  explicit IncidenceMatrix(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  bool operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool value) { cells_[i * n_ + j] = value ? 1 : 0; }
  bool primary(std::size_t j) const { return primary_.at(j) != 0; }

  /// phi(i,j) = 1 iff i <= j: the incidence of an ideal cascade.
  static IncidenceMatrix perfectly_triangular(std::size_t n);
  /// Relabels so that new index k holds old index perm[k].
  IncidenceMatrix permuted(const std::vector<std::size_t>& perm) const;

  friend bool operator==(const IncidenceMatrix&, const IncidenceMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> cells_;
  std::vector<std::uint8_t> primary_;
};

enum class IncidenceSource { Period0, Period1, Union };

/// phi(i,j) = 1 iff X(i,j) > 0 in the selected period(s).
IncidenceMatrix build_incidence(const LinkedIOTables& tables, IncidenceSource source = IncidenceSource::Period0);

/// Reflexive-transitive closure: i reaches j directly or indirectly.
IncidenceMatrix transitive_closure(const IncidenceMatrix& m);

/// Indegree / outdegree per sector over commodity rows; +inf when outdegree is 0.
std::vector<double> degree_ratios(const IncidenceMatrix& m);

struct StreamOrder {
  std::vector<std::size_t> permutation;  ///< sector indices, upstream first
  std::vector<double> ratios;            ///< ratio of permutation[k]
  std::vector<double> ranking_index;     ///< (N - k + 1) / N for 1-based rank k
  std::size_t triangularity_violations = 0;

  std::size_t size() const { return permutation.size(); }
  /// 0-based rank of a sector.
  std::vector<std::size_t> ranks() const;
};

/// Sorts sectors by ascending degree ratio; ties by sector index.
StreamOrder derive_stream_order(const IncidenceMatrix& m);

/// Number of (rank(i) > rank(j), phi(i,j) = 1) pairs with i != j.
std::size_t count_triangularity_violations(const IncidenceMatrix& m, const std::vector<std::size_t>& permutation);

struct CcdfPoint {
  std::size_t rank = 0;  ///< 1-based
  std::size_t sector = 0;
  double ratio = 0.0;
  double ranking_index = 0.0;
  double log_ratio = 0.0;
  double log_ranking_index = 0.0;
};

std::vector<CcdfPoint> ccdf_export(const StreamOrder& order);

}  // namespace ccge
