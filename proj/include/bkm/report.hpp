#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace bkm {

/// Measured sides of one inequality instance. rhs_terms carry each term of
/// the right-hand side without its unknown constant; ratio = lhs / sum.
struct InequalityReport {
  std::string inequality_id;
  std::string member;
  double lhs = 0.0;
  std::vector<std::pair<std::string, double>> rhs_terms;
  double ratio = 0.0;
  std::map<std::string, double> params;

  double rhs_sum() const;
  /// Validates terms (finite, >= 0) and sets ratio; ratio = 0 when lhs = 0,
  /// +inf when lhs > 0 but every term vanishes.
  void finalize();
};

}  // namespace bkm
