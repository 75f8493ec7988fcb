#pragma once

// Static advertising duopoly with a continuum of consumers: parameter and
// distribution types, the three cost functionals, the consumer best response
// and the clipped mean-field fixed point.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mfd {

enum class Firm { One = 1, Two = 2 };

inline Firm other(Firm f) { return f == Firm::One ? Firm::Two : Firm::One; }

/// Scalar model constants. Defaults are the canonical point at which the
/// closed-form solvers are valid; only `c` and `alpha` are free there.
struct ModelParams {
  double c = 1.0;        // unit advertising cost
  double alpha = 0.0;    // common true product quality
  double epsilon = 1.0;  // offset in the relative-advertising ratio
  double rho1 = 1.0;
  double rho2 = 1.0;
  double beta = 1.0;     // consumer loyalty weight
  double eta = 1.0;      // consumer conformity weight
  double gamma = 0.0;    // substitutability degree

  static ModelParams with_cost(double c, double alpha = 0.0) {
    ModelParams p;
    p.c = c;
    p.alpha = alpha;
    return p;
  }

  /// Throws InputError naming the first violated constraint.
  void validate() const;

  /// beta = eta = rho1 = rho2 = epsilon = 1 and gamma = 0.
  bool canonical() const;
};

struct Atom {
  double value = 0.0;
  double weight = 0.0;
};

/// Law of the consumers' initial preference on [0,1]. Either only its mean is
/// known, or it is a finite set of weighted atoms.
class InitialDistribution {
 public:
  static InitialDistribution mean_only(double mean);
  /// Weights must sum to 1 within 1e-12.
  static InitialDistribution atoms(std::vector<Atom> atoms);
  static InitialDistribution point_mass(double value);
  /// CSV with header `value,weight`. Weights are renormalized when their sum
  /// is within 1e-6 of 1, otherwise the file is rejected.
  static InitialDistribution load_csv(const std::filesystem::path& path);

  bool is_mean_only() const;
  double mean() const;

  /// Stored atoms; throws UnsupportedDistributionError for a mean-only law.
  std::span<const Atom> atoms() const;

  /// Atoms used when a concrete law is required: the stored atoms, or a
  /// point mass at the mean for a mean-only law.
  std::vector<Atom> support() const;

  /// Law of 1 - u0.
  InitialDistribution reflected() const;

 private:
  struct MeanOnly {
    double mean;
  };
  explicit InitialDistribution(std::variant<MeanOnly, std::vector<Atom>> v)
      : data_(std::move(v)) {}

  std::variant<MeanOnly, std::vector<Atom>> data_;
};

/// Consumer feedback rule u0 -> clip((mu_bar + u1 - u2 + u0 + 1) / 4).
struct MinorPolicy {
  double mu_bar = 0.5;
  double u1 = 0.0;
  double u2 = 0.0;

  double unclipped(double u0) const;
  double operator()(double u0) const;
};

/// Probability mass of initial preferences whose unconstrained response falls
/// below 0 (lower) or above 1 (upper).
struct ClippingMasses {
  double lower = 0.0;
  double upper = 0.0;
};

enum class EquilibriumKind { NE, MLFNE };
enum class SolveMethod { ClosedForm, Bisection, BestResponseIteration };

const char* to_string(EquilibriumKind k);
const char* to_string(SolveMethod m);
std::optional<EquilibriumKind> parse_kind(std::string_view s);

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;
  double tolerance = 0.0;
  SolveMethod method = SolveMethod::ClosedForm;
  bool converged = false;
  std::optional<std::pair<double, double>> bracket;
};

struct Equilibrium {
  EquilibriumKind kind = EquilibriumKind::NE;
  double u1 = 0.0;
  double u2 = 0.0;
  double mu_bar = 0.5;
  MinorPolicy policy;
  std::vector<double> residuals;
  SolveReport report;

  double max_residual() const;
};

// Cost functionals ----------------------------------------------------------

/// Representative consumer's cost at preference u_c, pointwise in u0.
double minor_cost(double u_c, double u0, double mu_bar, double u1, double u2,
                  const ModelParams& params);
/// d/du_c of minor_cost.
double minor_cost_derivative(double u_c, double u0, double mu_bar, double u1,
                             double u2, const ModelParams& params);

/// Firm `which`'s cost given its own control, the rival's, and the market
/// share mu_bar of product 1.
double major_cost(Firm which, double own_u, double other_u, double mu_bar,
                  const ModelParams& params);
/// d/d(own_u) of major_cost at a fixed mean field.
double major_cost_derivative(Firm which, double own_u, double other_u,
                             double mu_bar, const ModelParams& params);

// Consumer response ---------------------------------------------------------

/// Canonical closed-form consumer response clip((mu_bar+u1-u2+u0+1)/4).
double minor_best_response(double mu_bar, double u1, double u2, double u0);

/// Minimizer of minor_cost over [0,1] for arbitrary admissible parameters.
double minor_best_response(double mu_bar, double u1, double u2, double u0,
                           const ModelParams& params);

/// Requires atoms.
ClippingMasses clipping_masses(double mu_bar, double u1, double u2,
                               const InitialDistribution& dist);

/// E[best response] for a given mean field.
double mean_field_map(double mu_bar, double u1, double u2,
                      const InitialDistribution& dist,
                      const ModelParams& params = {});

struct MeanFieldSolution {
  double mu_bar = 0.5;
  ClippingMasses masses;
  int iterations = 0;
  double residual = 0.0;
};

inline constexpr double kFixedPointTol = 1e-12;
inline constexpr int kFixedPointMaxIter = 200;

/// Consumers' equilibrium market share for fixed firm controls, by bisection
/// on mu - E[clip(...)] over [0,1]. Mean-only laws act as a point mass at
/// their mean; masses are reported for that support.
MeanFieldSolution mean_field_fixed_point(double u1, double u2,
                                         const InitialDistribution& dist,
                                         double tol = kFixedPointTol,
                                         const ModelParams& params = {});

}  // namespace mfd
