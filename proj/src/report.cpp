#include "bkm/report.hpp"

#include <cmath>
#include <limits>

#include "bkm/errors.hpp"

namespace bkm {

double InequalityReport::rhs_sum() const {
  double s = 0.0;
  for (const auto& [name, v] : rhs_terms) s += v;
  return s;
}

void InequalityReport::finalize() {
  if (!std::isfinite(lhs) || lhs < 0.0) throw NumericError(inequality_id + ": lhs is not a finite nonnegative number");
  for (const auto& [name, v] : rhs_terms) {
    if (!std::isfinite(v) || v < 0.0) throw NumericError(inequality_id + ": rhs term " + name + " is not finite and >= 0");
  }
  const double s = rhs_sum();
  if (lhs == 0.0) {
    ratio = 0.0;
  } else if (s == 0.0) {
    ratio = std::numeric_limits<double>::infinity();
  } else {
    ratio = lhs / s;
  }
}

}  // namespace bkm
