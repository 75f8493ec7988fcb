#include "mfduopoly/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfduopoly/errors.hpp"
#include "numeric.hpp"

namespace mfd {

using detail::clip01;
using detail::require_nonnegative;
using detail::require_positive;
using detail::require_unit;

void ModelParams::validate() const {
  require_positive(c, "c");
  require_nonnegative(alpha, "alpha");
  require_positive(epsilon, "epsilon");
  require_positive(rho1, "rho1");
  require_positive(rho2, "rho2");
  require_positive(beta, "beta");
  require_positive(eta, "eta");
  require_unit(gamma, "gamma");
}

bool ModelParams::canonical() const {
  return beta == 1.0 && eta == 1.0 && rho1 == 1.0 && rho2 == 1.0 &&
         epsilon == 1.0 && gamma == 0.0;
}

const char* to_string(EquilibriumKind k) {
  return k == EquilibriumKind::NE ? "NE" : "MLFNE";
}

const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::ClosedForm:
      return "closed-form";
    case SolveMethod::Bisection:
      return "bisection";
    case SolveMethod::BestResponseIteration:
      return "best-response-iteration";
  }
  return "?";
}

std::optional<EquilibriumKind> parse_kind(std::string_view s) {
  if (s == "NE" || s == "ne") return EquilibriumKind::NE;
  if (s == "MLFNE" || s == "mlfne") return EquilibriumKind::MLFNE;
  return std::nullopt;
}

double Equilibrium::max_residual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, std::abs(r));
  return m;
}

double MinorPolicy::unclipped(double u0) const {
  return (mu_bar + (u1 - u2) + u0 + 1.0) / 4.0;
}

double MinorPolicy::operator()(double u0) const { return clip01(unclipped(u0)); }

namespace {

// Stationary point of the strictly convex consumer cost, before projection
// onto [0,1].
double unclipped_response(double mu_bar, double u1, double u2, double u0,
                          const ModelParams& p);

void check_minor_args(double u_c, double u0, double mu_bar, double u1, double u2) {
  require_unit(u_c, "u_c");
  require_unit(u0, "u0");
  require_unit(mu_bar, "mu_bar");
  require_nonnegative(u1, "u1");
  require_nonnegative(u2, "u2");
}

}  // namespace

double minor_cost(double u_c, double u0, double mu_bar, double u1, double u2,
                  const ModelParams& p) {
  check_minor_args(u_c, u0, mu_bar, u1, u2);
  const double v = 1.0 - u_c;
  const double loyalty = 0.5 * p.beta * (u_c - u0) * (u_c - u0);
  const double conformity = 0.5 * p.eta * (u_c - mu_bar) * (u_c - mu_bar);
  const double utility = (p.alpha + u1) * u_c + (p.alpha + u2) * v -
                         0.5 * (u_c * u_c + v * v - 2.0 * p.gamma * v * u_c);
  return loyalty + conformity - utility;
}

double minor_cost_derivative(double u_c, double u0, double mu_bar, double u1,
                             double u2, const ModelParams& p) {
  check_minor_args(u_c, u0, mu_bar, u1, u2);
  return p.beta * (u_c - u0) + p.eta * (u_c - mu_bar) - (u1 - u2) +
         (1.0 + p.gamma) * (2.0 * u_c - 1.0);
}

double major_cost(Firm which, double own_u, double other_u, double mu_bar,
                  const ModelParams& p) {
  require_nonnegative(own_u, "own_u");
  require_nonnegative(other_u, "other_u");
  require_unit(mu_bar, "mu_bar");
  const double ratio = (own_u + p.epsilon) / (other_u + p.epsilon);
  const double spend = 0.5 * p.c * own_u * own_u;
  if (which == Firm::One) {
    return -(p.rho1 * own_u * (1.0 - mu_bar) - p.rho2 * other_u * mu_bar) - ratio +
           spend;
  }
  return -(p.rho2 * own_u * mu_bar - p.rho1 * other_u * (1.0 - mu_bar)) - ratio +
         spend;
}

double major_cost_derivative(Firm which, double own_u, double other_u,
                             double mu_bar, const ModelParams& p) {
  require_nonnegative(own_u, "own_u");
  require_nonnegative(other_u, "other_u");
  require_unit(mu_bar, "mu_bar");
  const double share = which == Firm::One ? p.rho1 * (1.0 - mu_bar) : p.rho2 * mu_bar;
  return -share - 1.0 / (other_u + p.epsilon) + p.c * own_u;
}

double minor_best_response(double mu_bar, double u1, double u2, double u0) {
  require_unit(mu_bar, "mu_bar");
  require_nonnegative(u1, "u1");
  require_nonnegative(u2, "u2");
  require_unit(u0, "u0");
  return MinorPolicy{mu_bar, u1, u2}(u0);
}

double minor_best_response(double mu_bar, double u1, double u2, double u0,
                           const ModelParams& p) {
  if (p.canonical()) return minor_best_response(mu_bar, u1, u2, u0);
  require_unit(mu_bar, "mu_bar");
  require_nonnegative(u1, "u1");
  require_nonnegative(u2, "u2");
  require_unit(u0, "u0");
  return clip01(unclipped_response(mu_bar, u1, u2, u0, p));
}

ClippingMasses clipping_masses(double mu_bar, double u1, double u2,
                               const InitialDistribution& dist) {
  if (dist.is_mean_only()) {
    throw UnsupportedDistributionError(
        "clipping masses need an atomic initial distribution");
  }
  require_unit(mu_bar, "mu_bar");
  require_nonnegative(u1, "u1");
  require_nonnegative(u2, "u2");
  const MinorPolicy policy{mu_bar, u1, u2};
  ClippingMasses m;
  for (const Atom& a : dist.atoms()) {
    const double x = policy.unclipped(a.value);
    if (x < 0.0) m.lower += a.weight;
    if (x > 1.0) m.upper += a.weight;
  }
  return m;
}

namespace {

double unclipped_response(double mu_bar, double u1, double u2, double u0,
                          const ModelParams& p) {
  if (p.canonical()) return MinorPolicy{mu_bar, u1, u2}.unclipped(u0);
  const double curvature = p.beta + p.eta + 2.0 * (1.0 + p.gamma);
  return (p.beta * u0 + p.eta * mu_bar + (u1 - u2) + (1.0 + p.gamma)) / curvature;
}

double expected_response(double mu_bar, double u1, double u2,
                         const std::vector<Atom>& support, const ModelParams& p) {
  double acc = 0.0;
  if (p.canonical()) {
    const MinorPolicy policy{mu_bar, u1, u2};
    for (const Atom& a : support) acc += a.weight * policy(a.value);
  } else {
    for (const Atom& a : support) {
      acc += a.weight * minor_best_response(mu_bar, u1, u2, a.value, p);
    }
  }
  return acc;
}

}  // namespace

double mean_field_map(double mu_bar, double u1, double u2,
                      const InitialDistribution& dist, const ModelParams& p) {
  require_unit(mu_bar, "mu_bar");
  require_nonnegative(u1, "u1");
  require_nonnegative(u2, "u2");
  return expected_response(mu_bar, u1, u2, dist.support(), p);
}

MeanFieldSolution mean_field_fixed_point(double u1, double u2,
                                         const InitialDistribution& dist,
                                         double tol, const ModelParams& p) {
  require_nonnegative(u1, "u1");
  require_nonnegative(u2, "u2");
  require_positive(tol, "tol");
  const std::vector<Atom> support = dist.support();

  // Strictly increasing: slope is at least 1 - eta/(beta+eta+2+2gamma) > 0.
  auto gap = [&](double mu) { return mu - expected_response(mu, u1, u2, support, p); };

  // Saturated populations put the root on an endpoint, where rounding in the
  // weights can leave no sign change.
  detail::BisectResult br;
  const double g0 = gap(0.0);
  const double g1 = gap(1.0);
  if (g0 >= 0.0) {
    br = {0.0, 0.0, 0.0, 0};
  } else if (g1 <= 0.0) {
    br = {1.0, 1.0, 1.0, 0};
  } else {
    br = detail::bisect_increasing(gap, 0.0, 1.0, kFixedPointMaxIter);
  }

  MeanFieldSolution s;
  s.mu_bar = clip01(br.root);
  s.iterations = br.iterations;
  s.residual = std::abs(gap(s.mu_bar));
  if (s.residual > tol) {
    std::ostringstream os;
    os << "mean-field fixed point did not converge: residual " << s.residual
       << " > tol " << tol << " after " << br.iterations << " iterations, bracket ["
       << br.lo << ", " << br.hi << "], u1=" << u1 << ", u2=" << u2;
    throw SolverError(os.str());
  }
  for (const Atom& a : support) {
    const double x = unclipped_response(s.mu_bar, u1, u2, a.value, p);
    if (x < 0.0) s.masses.lower += a.weight;
    if (x > 1.0) s.masses.upper += a.weight;
  }
  return s;
}

}  // namespace mfd
