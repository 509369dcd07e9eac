#include "ccge/errors.hpp"

#include <sstream>

namespace ccge {

namespace {

std::string describe(const std::string& what, int iterations, double residual) {
  std::ostringstream os;
  os << what << " (iterations=" << iterations << ", residual=" << residual << ")";
  return os.str();
}

}  // namespace

ConvergenceError::ConvergenceError(const std::string& what, int iterations, double residual)
    : Error(describe(what, iterations, residual)), iterations_(iterations), residual_(residual) {}

}  // namespace ccge
