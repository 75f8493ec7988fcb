#pragma once

#include <algorithm>

#include "mfduopoly/model.hpp"

namespace mfd {

/// Deviation grids used to certify an equilibrium. Defaults are fixed so that
/// certificates are reproducible.
struct DeviationGrid {
  int firm_points = 10000;      // uniform on [0, firm_max]
  double firm_max = 10.0;
  int consumer_points = 1000;   // uniform on [0, 1]
  int consumer_samples = 101;   // initial preferences 0, 0.01, ..., 1
};

/// Largest cost reduction found for each player class, with the deviation
/// that achieved it.
struct DeviationCertificate {
  double firm1_gain = 0.0;
  double firm2_gain = 0.0;
  double consumer_gain = 0.0;
  double firm1_best = 0.0;
  double firm2_best = 0.0;
  double consumer_worst_u0 = 0.0;

  double max_gain() const { return std::max({firm1_gain, firm2_gain, consumer_gain}); }
};

/// Best improvement any sampled consumer type can get over the consumer grid
/// against `policy`, holding the mean field fixed.
double consumer_deviation_gain(const MinorPolicy& policy, const ModelParams& params,
                               const DeviationGrid& grid, double* worst_u0 = nullptr);

}  // namespace mfd
