#include "mfduopoly/ne_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfduopoly/errors.hpp"
#include "numeric.hpp"

namespace mfd {

namespace {

constexpr int kOuterMaxIter = 200;

void require_cost(double c) {
  detail::require_finite(c, "c");
  if (!(c >= kMinCost)) {
    std::ostringstream os;
    os << "c = " << c << " below the supported minimum " << kMinCost;
    throw InputError(os.str());
  }
}

struct SubgamePair {
  double u1 = 0.0;
  double u2 = 0.0;
};

// Firms' game at fixed mu for general parameters: u1 solves
// u1 = BR1(BR2(u1)); the composition maps [0, hi] into itself.
SubgamePair solve_subgame_general(double mu, const ModelParams& p) {
  auto br1 = [&](double u2) { return major_br_given_field(Firm::One, u2, mu, p); };
  auto br2 = [&](double u1) { return major_br_given_field(Firm::Two, u1, mu, p); };
  const double hi = (p.rho1 + 1.0 / p.epsilon) / p.c;
  auto h = [&](double u1) { return u1 - br1(br2(u1)); };
  if (h(hi) <= 0.0) return {hi, br2(hi)};
  const detail::BisectResult r = detail::bisect_increasing(h, 0.0, hi, kOuterMaxIter);
  return {r.root, br2(r.root)};
}

Equilibrium finish_ne(double mu, double u1, double u2, const ModelParams& p,
                      const InitialDistribution& dist, double tol,
                      const detail::BisectResult& br) {
  Equilibrium eq;
  eq.kind = EquilibriumKind::NE;
  eq.mu_bar = detail::clip01(mu);
  eq.u1 = u1;
  eq.u2 = u2;
  eq.policy = MinorPolicy{eq.mu_bar, u1, u2};
  eq.residuals = {
      u1 - major_br_given_field(Firm::One, u2, eq.mu_bar, p),
      u2 - major_br_given_field(Firm::Two, u1, eq.mu_bar, p),
      eq.mu_bar - mean_field_map(eq.mu_bar, u1, u2, dist, p),
  };
  eq.report.method = SolveMethod::Bisection;
  eq.report.iterations = br.iterations;
  eq.report.bracket = std::make_pair(br.lo, br.hi);
  eq.report.tolerance = tol;
  eq.report.final_residual = eq.max_residual();
  eq.report.converged = eq.report.final_residual <= tol;
  if (!eq.report.converged) {
    std::ostringstream os;
    os.precision(12);
    os << "NE residual " << eq.report.final_residual << " exceeds tol " << tol
       << " (c=" << p.c << ", u0_mean=" << dist.mean() << ", mu=" << eq.mu_bar
       << ", u1=" << u1 << ", u2=" << u2 << ")";
    throw SolverError(os.str());
  }
  return eq;
}

}  // namespace

double major_br_given_field(Firm which, double other_u, double mu_bar, double c) {
  require_cost(c);
  return major_br_given_field(which, other_u, mu_bar, ModelParams::with_cost(c));
}

double major_br_given_field(Firm which, double other_u, double mu_bar,
                            const ModelParams& p) {
  detail::require_positive(p.c, "c");
  detail::require_nonnegative(other_u, "other_u");
  detail::require_unit(mu_bar, "mu_bar");
  const double share = which == Firm::One ? p.rho1 * (1.0 - mu_bar) : p.rho2 * mu_bar;
  return std::max(0.0, (share + 1.0 / (other_u + p.epsilon)) / p.c);
}

NeSubgameSolution solve_major_subgame_ne(double mu, double c) {
  require_cost(c);
  detail::require_unit(mu, "mu_bar");
  // Substituting u2 = BR2(u1) into u1 = BR1(u2) gives a*u1^2 + b*u1 + k = 0
  // with a > 0 and k < 0, so exactly one root is positive.
  const double a = c * c + c * mu;
  const double b = c * c + 2.0 * c * mu - c - mu + mu * mu;
  const double k = -2.0 * c - 1.0 + c * mu + mu * mu;
  const double disc = b * b - 4.0 * a * k;
  const double sq = std::sqrt(disc);
  const double u1 = b >= 0.0 ? -2.0 * k / (b + sq) : (-b + sq) / (2.0 * a);
  const double u2 = (mu + 1.0 / (u1 + 1.0)) / c;
  return {u1, u2, mu, disc};
}

double ne_gap(double mu, double c, double u0_mean) {
  detail::require_unit(u0_mean, "u0_mean");
  const NeSubgameSolution s = solve_major_subgame_ne(mu, c);
  return mu - (s.u1_star - s.u2_star + 1.0 + u0_mean) / 3.0;
}

Equilibrium solve_ne(const ModelParams& p, const InitialDistribution& dist, double tol) {
  p.validate();
  detail::require_positive(tol, "tol");

  if (!p.canonical()) {
    auto residual_at = [&](double mu) {
      const SubgamePair s = solve_subgame_general(mu, p);
      return mu - mean_field_map(mu, s.u1, s.u2, dist, p);
    };
    const double f0 = residual_at(0.0);
    const double f1 = residual_at(1.0);
    if (f0 > 0.0 || f1 < 0.0) {
      std::ostringstream os;
      os << "NE bracket failure: residual(0)=" << f0 << ", residual(1)=" << f1;
      throw SolverError(os.str());
    }
    const detail::BisectResult br =
        detail::bisect_increasing(residual_at, 0.0, 1.0, kOuterMaxIter);
    const SubgamePair s = solve_subgame_general(br.root, p);
    return finish_ne(br.root, s.u1, s.u2, p, dist, tol, br);
  }

  require_cost(p.c);
  const double u0 = dist.mean();
  auto gap = [&](double mu) { return ne_gap(mu, p.c, u0); };
  const double f0 = gap(0.0);
  const double f1 = gap(1.0);
  if (f0 > 0.0 || f1 < 0.0) {
    std::ostringstream os;
    os << "NE bracket failure: f(0)=" << f0 << ", f(1)=" << f1 << " (c=" << p.c
       << ", u0_mean=" << u0 << ")";
    throw SolverError(os.str());
  }
  const detail::BisectResult br = detail::bisect_increasing(gap, 0.0, 1.0, kOuterMaxIter);
  const NeSubgameSolution s = solve_major_subgame_ne(br.root, p.c);
  return finish_ne(br.root, s.u1_star, s.u2_star, p, dist, tol, br);
}

DeviationCertificate certify_ne(const Equilibrium& eq, const ModelParams& p,
                                const DeviationGrid& grid) {
  DeviationCertificate cert;
  const double base1 = major_cost(Firm::One, eq.u1, eq.u2, eq.mu_bar, p);
  const double base2 = major_cost(Firm::Two, eq.u2, eq.u1, eq.mu_bar, p);
  double best1 = base1;
  double best2 = base2;
  cert.firm1_best = eq.u1;
  cert.firm2_best = eq.u2;
  for (int i = 0; i < grid.firm_points; ++i) {
    const double u = grid.firm_max * i / (grid.firm_points - 1);
    const double c1 = major_cost(Firm::One, u, eq.u2, eq.mu_bar, p);
    const double c2 = major_cost(Firm::Two, u, eq.u1, eq.mu_bar, p);
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
