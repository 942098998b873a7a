#pragma once

#include <map>
#include <string>
#include <vector>

#include "bkm/analytic.hpp"
#include "bkm/ball_norms.hpp"
#include "bkm/grid.hpp"
#include "bkm/report.hpp"
#include "json.hpp"

namespace bkm {

// Every checker measures both sides with internal constants set to 1.
// Weighted norms ||f psi^m||_p are taken over the support ball of psi (so
// psi^0 means "on that ball"); BMO norms of cutoff products are seminorms
// over a ball padded by kLabPadding around the support.
inline constexpr double kLabPadding = 1.1;

/// Known inequality ids in canonical order, with a short title each.
const std::vector<std::pair<std::string, std::string>>& inequality_catalog();
bool is_known_inequality(const std::string& id);

InequalityReport check_log_sobolev(const ScalarField3& u, double r, double q, const BmoConfig& cfg);

InequalityReport check_gradient_curl_lq(const VectorField3& u, const CutoffFunction& psi, double m, double q);
InequalityReport check_u_psi_interpolation(const VectorField3& u, const CutoffFunction& psi, double m, double k,
                                           double q);
InequalityReport check_grad_bmo(const VectorField3& u, const CutoffFunction& psi, double r, const BmoConfig& cfg);
InequalityReport check_curl_cutoff_bmo(const VectorField3& u, const CutoffFunction& psi, double r,
                                       const BmoConfig& cfg);
InequalityReport check_grad_bmo_combined(const VectorField3& u, const CutoffFunction& psi, double r,
                                         const BmoConfig& cfg);
/// id selects the sub-inequality: "8.16", "8.17", "8.17a" or "8.22" (k only).
InequalityReport check_second_gradient(const VectorField3& u, const CutoffFunction& psi, double m, double k, double q,
                                       const std::string& id);
InequalityReport check_kozono_taniuchi_product(const ScalarField3& f, const ScalarField3& g, double r, double q,
                                               const BmoConfig& cfg);
/// id "B.1" (any field, gradient on the right) or "B.2" (divergence-free, sup norm on the left).
InequalityReport check_gn_cutoff(const FieldView& u, const CutoffFunction& psi, double m, double k, double q,
                                 const std::string& id);
InequalityReport check_bmo_embedding(const ScalarField3& u, double r, double q, const BmoConfig& cfg);

struct LabMember {
  std::string name;
  AnalyticFunction f;
  bool smooth = true;  // refinement drift is tracked for smooth members only
};

struct TestFamily {
  std::vector<LabMember> members;
  /// trig, Gaussian, truncated logs (eps 0.2, 0.05, 0.01), divergence-free
  /// trig vector fields; everything periodic on a box of side box_length.
  static TestFamily default_family(double box_length = 4.0);
};

/// Exponents and geometry used by the sweep. Checkers on balls use B(0, r)
/// and psi = cutoff(r/2, r); the extension ids use radius r/2.
struct LabParams {
  double r = 1.0;
  double q = 4.0;
  double m = 3.0;         // multiplicative inequalities
  double k_interp = 1.0;  // interpolation with cutoff
  double m_second = 3.0;  // second-gradient group
  double k_second = 6.0;
  double m_gn = 2.0;  // GN with cutoff (k = 1)
  double m_sup = 2.0;
  double ratio_cap = 50.0;  // family cap (a tripwire, not the unknown constant)
  BmoConfig bmo;
};

struct SkippedCase {
  std::string inequality_id;
  std::string member;
  std::size_t grid_n = 0;
  double lambda = 1.0;
  std::string reason;
};

struct IdSummary {
  std::size_t reports = 0;
  double max_ratio = 0.0;
  double refinement_drift = 0.0;  // max relative change coarsest -> finest grid, smooth members
  double scale_drift = 0.0;       // max over (member, grid) of (max - min) / min across lambda
  bool below_cap = true;
};

struct SweepResult {
  std::vector<InequalityReport> reports;
  std::vector<SkippedCase> skipped;
  std::map<std::string, IdSummary> summary;  // sorted by id
};

/// Cartesian sweep over ids x members x grids x lambda. Scaling by lambda
/// keeps the node values and shrinks the box (and r) by 1/lambda. Members
/// that violate a checker precondition are skipped and listed.
SweepResult run_family_sweep(const std::vector<std::string>& ids, const TestFamily& family,
                             const std::vector<Grid3>& grids, const std::vector<double>& scales,
                             const LabParams& params = {});

nlohmann::ordered_json to_json(const InequalityReport& r);
nlohmann::ordered_json to_json(const SweepResult& s);

}  // namespace bkm
