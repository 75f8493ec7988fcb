#pragma once

// Multi-leader-follower Nash equilibrium: the firms play a 2-player game in
// which each anticipates the consumers' equilibrium market share as a function
// of both controls.

#include "mfduopoly/certificate.hpp"
#include "mfduopoly/model.hpp"
#include "mfduopoly/ne_solver.hpp"

namespace mfd {

struct MlfneClosedForm {
  double u1_star = 0.0;
  double u2_star = 0.0;
  double mu_bar = 0.5;
  double delta = 0.0;
};

/// Consumers' market share (u1 - u2 + 1 + u0_mean)/3 when no consumer clips.
/// Not clamped.
double anticipated_mean_field(double u1, double u2, double u0_mean);

/// Firm best response with the anticipated market share substituted.
double major_br_mlf(Firm which, double other_u, double c, double u0_mean);

/// Best response when the market share is anticipated with fixed clipping
/// masses p1 (lower) and p2 (upper). Reduces to major_br_mlf at p1 = p2 = 0.
/// Only meaningful as a local model of a deviation: it does not track how the
/// masses move with the control.
double major_br_mlf_clipped(Firm which, double other_u, double c, double u0_mean,
                            const ClippingMasses& masses);

/// Firm cost with the linear anticipated market share substituted.
double anticipated_firm_cost(Firm which, double own_u, double other_u, double c,
                             double u0_mean);

/// Firm cost with the market share re-solved through the clipped consumer
/// fixed point for this pair of controls.
double reequilibrated_firm_cost(Firm which, double own_u, double other_u,
                                const ModelParams& params,
                                const InitialDistribution& dist);

/// Positive solution of the firms' anticipated game in closed form.
MlfneClosedForm mlfne_closed_form(double c, double u0_mean);

struct MlfIterationOptions {
  double damping = 0.5;
  double start_u1 = 1.0;
  double start_u2 = 1.0;
  int max_iter = 100000;
  double tol = 1e-12;
};

struct MlfIterationResult {
  double u1 = 0.0;
  double u2 = 0.0;
  int iterations = 0;
  double last_change = 0.0;
  bool converged = false;
};

/// Damped simultaneous iteration of major_br_mlf.
MlfIterationResult iterate_mlf_best_responses(double c, double u0_mean,
                                              const MlfIterationOptions& opts = {});

inline constexpr double kMlfAgreementTol = 1e-6;
// Brent refinement limits numerical best responses to about 1e-8.
inline constexpr double kNumericalMlfTolFloor = 1e-7;

/// Canonical parameters: closed form, cross-checked against the damped
/// iteration. Otherwise a nested numerical solve (inner consumer fixed point,
/// outer damped best responses) whose tolerance is floored at
/// kNumericalMlfTolFloor.
Equilibrium solve_mlfne(const ModelParams& params, const InitialDistribution& dist,
                        double tol = kDefaultSolveTol);
Equilibrium solve_mlfne(const ModelParams& params, double u0_mean,
                        double tol = kDefaultSolveTol);

/// Deviation scan at a solved MLF-NE; each firm deviation re-solves the
/// clipped consumer fixed point.
DeviationCertificate certify_mlfne(const Equilibrium& eq, const ModelParams& params,
                                   const InitialDistribution& dist,
                                   const DeviationGrid& grid = {});

}  // namespace mfd
