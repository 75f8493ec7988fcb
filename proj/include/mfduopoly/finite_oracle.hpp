#pragma once

// Brute-force N-consumer game used to validate the mean-field solvers. It is
// coded directly from the finite-population costs (leave-one-out consumer
// averages, realized market share for the firms) and shares no solver code
// with the mean-field modules.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mfduopoly/certificate.hpp"
#include "mfduopoly/model.hpp"

namespace mfd {

struct FinitePopulation {
  std::vector<double> u0;  // initial preferences
  std::vector<double> u;   // current preferences
  double u1 = 0.0;
  double u2 = 0.0;

  std::size_t size() const { return u.size(); }
  double mean_pref() const;
  /// Throws InputError unless N >= 2, sizes match and entries are in range.
  void validate() const;
};

struct OracleOptions {
  double damping = 0.0;  // <= 0 selects min(0.5, c)
  int max_sweeps = 1000000;
  double tol = 1e-12;    // max per-player change that ends the dynamics
  std::uint64_t seed = 0;
  int max_outer_rounds = 500;     // MLF-NE firm rounds
  double mlf_search_radius = 0.0; // > 0 restricts each firm's search to a window
                                  // around its current control; 0 searches
                                  // [0, grid.firm_max]
  DeviationGrid grid;
};

struct OracleResult {
  double u1 = 0.0;
  double u2 = 0.0;
  double mean_pref = 0.0;
  int sweeps = 0;            // outer iterations for the MLF-NE oracle
  bool converged = false;
  double last_change = 0.0;
  double max_unilateral_gain = 0.0;
  double consumer_gain = 0.0;
  double firm1_gain = 0.0;
  double firm2_gain = 0.0;
  FinitePopulation population;
};

/// N initial preferences drawn deterministically from `dist`: atoms are
/// apportioned by largest remainder; a mean-only law is realized as the
/// midpoint quantiles of a uniform law mixed with an atom at 0 or 1 so that
/// the mixture has the requested mean.
std::vector<double> sample_initial_preferences(const InitialDistribution& dist,
                                               std::size_t n);

/// Population with the given initial preferences and seeded uniform random
/// starting preferences and firm controls.
FinitePopulation seeded_population(std::vector<double> u0, std::uint64_t seed);

/// Consumer i's exact best response against the leave-one-out average.
double consumer_br_finite(std::size_t i, const FinitePopulation& pop,
                          const ModelParams& params);

/// One synchronous round: every consumer and both firms best-respond to the
/// current state, blended with weight `damping` in (0,1].
FinitePopulation best_response_sweep(const FinitePopulation& pop,
                                     const ModelParams& params, double damping);

/// Consumers-only equilibrium for fixed firm controls (undamped sweeps).
/// Returns the number of sweeps used.
int settle_consumers(FinitePopulation& pop, const ModelParams& params,
                     double tol = 1e-14, int max_sweeps = 100000);

/// Best-response dynamics to a fixed point and deviation certificate, without
/// enforcing the certificate.
OracleResult run_finite_ne(std::size_t n, const InitialDistribution& dist,
                           const ModelParams& params, const OracleOptions& opts = {});
OracleResult run_finite_mlfne(std::size_t n, const InitialDistribution& dist,
                              const ModelParams& params, const OracleOptions& opts = {});

/// As above; throws SolverError when the dynamics do not converge or the
/// certified unilateral gain exceeds eps.
OracleResult solve_finite_ne(std::size_t n, const InitialDistribution& dist,
                             const ModelParams& params, double eps,
                             const OracleOptions& opts = {});
OracleResult solve_finite_mlfne(std::size_t n, const InitialDistribution& dist,
                                const ModelParams& params, double eps,
                                const OracleOptions& opts = {});

/// CSV with header `u0,u_final`.
void write_population_csv(const FinitePopulation& pop, const std::filesystem::path& path);

}  // namespace mfd
