#include "mfduopoly/certificate.hpp"

#include <limits>

namespace mfd {

double consumer_deviation_gain(const MinorPolicy& policy, const ModelParams& params,
                               const DeviationGrid& grid, double* worst_u0) {
  double worst = -std::numeric_limits<double>::infinity();
  const int ns = grid.consumer_samples;
  const int nc = grid.consumer_points;
  for (int s = 0; s < ns; ++s) {
    const double u0 = ns == 1 ? 0.5 : static_cast<double>(s) / (ns - 1);
    const double chosen =
        minor_best_response(policy.mu_bar, policy.u1, policy.u2, u0, params);
    const double base =
        minor_cost(chosen, u0, policy.mu_bar, policy.u1, policy.u2, params);
    double best = base;
    for (int k = 0; k < nc; ++k) {
      const double u = static_cast<double>(k) / (nc - 1);
      best = std::min(best, minor_cost(u, u0, policy.mu_bar, policy.u1, policy.u2, params));
    }
    if (base - best > worst) {
      worst = base - best;
      if (worst_u0) *worst_u0 = u0;
    }
  }
  return worst;
}

}  // namespace mfd
