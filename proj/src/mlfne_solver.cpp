#include "mfduopoly/mlfne_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfduopoly/errors.hpp"
#include "numeric.hpp"

namespace mfd {

namespace {

constexpr int kNumericalMaxIter = 10000;

void require_cost(double c) {
  detail::require_finite(c, "c");
  if (!(c >= kMinCost)) {
    std::ostringstream os;
    os << "c = " << c << " below the supported minimum " << kMinCost;
    throw InputError(os.str());
  }
}

// Canonical firm cost without the mean-field domain check, so the linear
// anticipated share can be substituted even where it leaves [0,1].
double firm_cost_raw(Firm which, double own, double other, double mu, double c) {
  const double share = which == Firm::One ? own * (1.0 - mu) - other * mu
                                          : own * mu - other * (1.0 - mu);
  return -share - (own + 1.0) / (other + 1.0) + 0.5 * c * own * own;
}

// No control beyond this bound can beat zero advertising.
double deviation_bound(Firm which, double other, const ModelParams& p) {
  const double rho_own = which == Firm::One ? p.rho1 : p.rho2;
  const double rho_other = which == Firm::One ? p.rho2 : p.rho1;
  const double a = rho_own + 1.0 / p.epsilon;
  return (a + std::sqrt(a * a + 2.0 * p.c * (1.0 + rho_other * other))) / p.c;
}

double numerical_br(Firm which, double other, const ModelParams& p,
                    const InitialDistribution& dist) {
  auto cost = [&](double u) {
    return reequilibrated_firm_cost(which, u, other, p, dist);
  };
  return detail::minimize_on_interval(cost, 0.0, deviation_bound(which, other, p)).x;
}

Equilibrium solve_mlfne_numerical(const ModelParams& p, const InitialDistribution& dist,
                                  double tol) {
  const double eff_tol = std::max(tol, kNumericalMlfTolFloor);
  constexpr double kDamping = 0.5;
  double u1 = 1.0;
  double u2 = 1.0;
  int it = 0;
  double change = 0.0;
  for (; it < kNumericalMaxIter; ++it) {
    const double n1 = numerical_br(Firm::One, u2, p, dist);
    const double n2 = numerical_br(Firm::Two, u1, p, dist);
    change = std::max(std::abs(n1 - u1), std::abs(n2 - u2));
    if (change <= 0.1 * eff_tol) break;
    u1 += kDamping * (n1 - u1);
    u2 += kDamping * (n2 - u2);
  }

  Equilibrium eq;
  eq.kind = EquilibriumKind::MLFNE;
  eq.u1 = u1;
  eq.u2 = u2;
  eq.mu_bar = mean_field_fixed_point(u1, u2, dist, kFixedPointTol, p).mu_bar;
  eq.policy = MinorPolicy{eq.mu_bar, u1, u2};
  eq.residuals = {
      u1 - numerical_br(Firm::One, u2, p, dist),
      u2 - numerical_br(Firm::Two, u1, p, dist),
      eq.mu_bar - mean_field_map(eq.mu_bar, u1, u2, dist, p),
  };
  eq.report.method = SolveMethod::BestResponseIteration;
  eq.report.iterations = it;
  eq.report.tolerance = eff_tol;
  eq.report.final_residual = eq.max_residual();
  eq.report.converged = eq.report.final_residual <= eff_tol;
  if (!eq.report.converged) {
    std::ostringstream os;
    os << "numerical MLF-NE did not converge: residual " << eq.report.final_residual
       << " > " << eff_tol << " after " << it << " iterations (last change " << change
       << ")";
    throw SolverError(os.str());
  }
  return eq;
}

}  // namespace

double anticipated_mean_field(double u1, double u2, double u0_mean) {
  detail::require_nonnegative(u1, "u1");
  detail::require_nonnegative(u2, "u2");
  detail::require_unit(u0_mean, "u0_mean");
  return (u1 - u2 + 1.0 + u0_mean) / 3.0;
}

double major_br_mlf(Firm which, double other, double c, double u0_mean) {
  require_cost(c);
  detail::require_nonnegative(other, "other_u");
  detail::require_unit(u0_mean, "u0_mean");
  const double e = u0_mean;
  const double den = 3.0 * c * other + 3.0 * c + 2.0 * other + 2.0;
  const double num = which == Firm::One ? 2.0 * other - e * other - e + 5.0
                                        : other + e * other + e + 4.0;
  return std::max(0.0, num / den);
}

double major_br_mlf_clipped(Firm which, double other, double c, double u0_mean,
                            const ClippingMasses& m) {
  require_cost(c);
  detail::require_nonnegative(other, "other_u");
  detail::require_unit(u0_mean, "u0_mean");
  detail::require_unit(m.lower, "p1");
  detail::require_unit(m.upper, "p2");
  if (m.lower + m.upper > 1.0 + 1e-12) throw InputError("p1 + p2 exceeds 1");
  const double q = 1.0 - m.lower - m.upper;  // unclipped mass
  const double k = q / (4.0 - q);             // d mu / d u1
  const double curvature = c + 2.0 * k;
  const double drift = which == Firm::One
                           ? (4.0 * (1.0 - m.upper) - q * (2.0 + u0_mean)) / (4.0 - q)
                           : (4.0 * m.upper + q * (1.0 + u0_mean)) / (4.0 - q);
  return std::max(0.0, (1.0 / (other + 1.0) + drift) / curvature);
}

double anticipated_firm_cost(Firm which, double own, double other, double c,
                             double u0_mean) {
  require_cost(c);
  detail::require_nonnegative(own, "own_u");
  const double mu = which == Firm::One ? anticipated_mean_field(own, other, u0_mean)
                                       : anticipated_mean_field(other, own, u0_mean);
  return firm_cost_raw(which, own, other, mu, c);
}

double reequilibrated_firm_cost(Firm which, double own, double other,
                                const ModelParams& p, const InitialDistribution& dist) {
  const double u1 = which == Firm::One ? own : other;
  const double u2 = which == Firm::One ? other : own;
  const double mu = mean_field_fixed_point(u1, u2, dist, kFixedPointTol, p).mu_bar;
  return major_cost(which, own, other, mu, p);
}

MlfneClosedForm mlfne_closed_form(double c, double u0_mean) {
  require_cost(c);
  detail::require_unit(u0_mean, "u0_mean");
  const double e = u0_mean;
  const double denom = 4.0 + 3.0 * c - e;
  if (!(denom > 0.0)) {
    throw SolverError("closed form precondition 4 + 3c - u0_mean > 0 violated");
  }
  const double delta =
      std::sqrt((3.0 + 3.0 * c + e) * (36.0 + 57.0 * c + 9.0 * c * c + e - e * e) / denom);
  MlfneClosedForm s;
  s.delta = delta;
  s.u1_star = (1.0 - 2.0 * e +
               (1.0 + 3.0 * c - e - delta) * (e - 3.0 * c - 4.0) / (2.0 * (2.0 + 3.0 * c))) /
              (3.0 + 3.0 * c + e);
  s.u2_star = (-1.0 - 3.0 * c + e + delta) / (2.0 * (2.0 + 3.0 * c));
  s.mu_bar = (s.u1_star - s.u2_star + 1.0 + e) / 3.0;
  return s;
}

MlfIterationResult iterate_mlf_best_responses(double c, double u0_mean,
                                              const MlfIterationOptions& o) {
  require_cost(c);
  if (!(o.damping > 0.0 && o.damping <= 1.0)) throw InputError("damping must lie in (0,1]");
  MlfIterationResult r;
  r.u1 = o.start_u1;
  r.u2 = o.start_u2;
  for (r.iterations = 0; r.iterations < o.max_iter; ++r.iterations) {
    const double n1 = major_br_mlf(Firm::One, r.u2, c, u0_mean);
    const double n2 = major_br_mlf(Firm::Two, r.u1, c, u0_mean);
    r.last_change = std::max(std::abs(n1 - r.u1), std::abs(n2 - r.u2));
    if (r.last_change <= o.tol) {
      r.converged = true;
      break;
    }
    r.u1 += o.damping * (n1 - r.u1);
    r.u2 += o.damping * (n2 - r.u2);
  }
  return r;
}

Equilibrium solve_mlfne(const ModelParams& p, const InitialDistribution& dist, double tol) {
  p.validate();
  detail::require_positive(tol, "tol");
  if (!p.canonical()) return solve_mlfne_numerical(p, dist, tol);

  const double e = dist.mean();
  const MlfneClosedForm cf = mlfne_closed_form(p.c, e);
  const MlfIterationResult it = iterate_mlf_best_responses(p.c, e);
  const double disagreement =
      std::max(std::abs(cf.u1_star - it.u1), std::abs(cf.u2_star - it.u2));
  if (!it.converged || disagreement > kMlfAgreementTol) {
    std::ostringstream os;
    os.precision(15);
    os << "MLF-NE closed form (" << cf.u1_star << ", " << cf.u2_star
       << ") disagrees with best-response iteration (" << it.u1 << ", " << it.u2
       << ") at c=" << p.c << ", u0_mean=" << e;
    throw ConsistencyError(os.str());
  }

  Equilibrium eq;
  eq.kind = EquilibriumKind::MLFNE;
  eq.u1 = cf.u1_star;
  eq.u2 = cf.u2_star;
  eq.mu_bar = cf.mu_bar;
  if (eq.u1 < 0.0 || eq.u2 < 0.0 || eq.mu_bar < 0.0 || eq.mu_bar > 1.0) {
    std::ostringstream os;
    os << "MLF-NE closed form left the admissible set: u1=" << eq.u1 << ", u2=" << eq.u2
       << ", mu=" << eq.mu_bar;
    throw SolverError(os.str());
  }
  eq.policy = MinorPolicy{eq.mu_bar, eq.u1, eq.u2};
  eq.residuals = {
      eq.u1 - major_br_mlf(Firm::One, eq.u2, p.c, e),
      eq.u2 - major_br_mlf(Firm::Two, eq.u1, p.c, e),
      eq.mu_bar - mean_field_map(eq.mu_bar, eq.u1, eq.u2, dist, p),
  };
  eq.report.method = SolveMethod::ClosedForm;
  eq.report.iterations = it.iterations;
  eq.report.tolerance = tol;
  eq.report.final_residual = eq.max_residual();
  eq.report.converged = eq.report.final_residual <= tol;
  if (!eq.report.converged) {
    std::ostringstream os;
    os.precision(12);
    os << "MLF-NE residual " << eq.report.final_residual << " exceeds tol " << tol
       << " (c=" << p.c << ", u0_mean=" << e << ")";
    throw SolverError(os.str());
  }
  return eq;
}

Equilibrium solve_mlfne(const ModelParams& p, double u0_mean, double tol) {
  return solve_mlfne(p, InitialDistribution::mean_only(u0_mean), tol);
}

DeviationCertificate certify_mlfne(const Equilibrium& eq, const ModelParams& p,
                                   const InitialDistribution& dist,
                                   const DeviationGrid& grid) {
  DeviationCertificate cert;
  const double base1 = reequilibrated_firm_cost(Firm::One, eq.u1, eq.u2, p, dist);
  const double base2 = reequilibrated_firm_cost(Firm::Two, eq.u2, eq.u1, p, dist);
  double best1 = base1;
  double best2 = base2;
  cert.firm1_best = eq.u1;
  cert.firm2_best = eq.u2;
  for (int i = 0; i < grid.firm_points; ++i) {
    const double u = grid.firm_max * i / (grid.firm_points - 1);
    const double c1 = reequilibrated_firm_cost(Firm::One, u, eq.u2, p, dist);
    const double c2 = reequilibrated_firm_cost(Firm::Two, u, eq.u1, p, dist);
    if (c1 < best1) {
      best1 = c1;
      cert.firm1_best = u;
    }
    if (c2 < best2) {
      best2 = c2;
      cert.firm2_best = u;
    }
  }
  cert.firm1_gain = base1 - best1;
  cert.firm2_gain = base2 - best2;
  cert.consumer_gain = consumer_deviation_gain(eq.policy, p, grid, &cert.consumer_worst_u0);
  return cert;
}

}  // namespace mfd
