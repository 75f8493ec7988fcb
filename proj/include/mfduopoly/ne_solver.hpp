#pragma once

// Nash equilibrium among both firms and the consumer continuum. For a fixed
// market share the firms' 2-player game has a closed-form positive solution;
// the market share then solves a scalar monotone equation.

#include "mfduopoly/certificate.hpp"
#include "mfduopoly/model.hpp"

namespace mfd {

inline constexpr double kDefaultSolveTol = 1e-10;
inline constexpr double kMinCost = 1e-6;

struct NeSubgameSolution {
  double u1_star = 0.0;
  double u2_star = 0.0;
  double mu_bar_input = 0.5;
  double discriminant = 0.0;
};

/// Firm best response at a fixed market share (canonical parameters),
/// floored at zero.
double major_br_given_field(Firm which, double other_u, double mu_bar, double c);

/// Same for arbitrary admissible parameters.
double major_br_given_field(Firm which, double other_u, double mu_bar,
                            const ModelParams& params);

/// Unique positive solution of the firms' game at a fixed market share.
NeSubgameSolution solve_major_subgame_ne(double mu_bar, double c);

/// mu - (u1**(mu) - u2**(mu) + 1 + u0_mean) / 3; strictly increasing in mu.
double ne_gap(double mu_bar, double c, double u0_mean);

/// Canonical parameters use the closed-form subgame plus bisection on ne_gap.
/// Other parameters fall back to a nested numerical solve.
Equilibrium solve_ne(const ModelParams& params, const InitialDistribution& dist,
                     double tol = kDefaultSolveTol);

/// Unilateral deviation scan at a solved NE. Firm deviations hold the mean
/// field fixed.
DeviationCertificate certify_ne(const Equilibrium& eq, const ModelParams& params,
                                const DeviationGrid& grid = {});

}  // namespace mfd
