#include "mfduopoly/finite_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "mfduopoly/errors.hpp"
#include "numeric.hpp"

namespace mfd {

namespace {

// Finite-population costs, written out from the N-player model.

double consumer_cost(double u, double u0, double others_mean, double u1, double u2,
                     const ModelParams& p) {
  const double v = 1.0 - u;
  return 0.5 * p.beta * (u - u0) * (u - u0) +
         0.5 * p.eta * (u - others_mean) * (u - others_mean) -
         ((p.alpha + u1) * u + (p.alpha + u2) * v -
          0.5 * (u * u + v * v - 2.0 * p.gamma * v * u));
}

double consumer_br(double u0, double others_mean, double u1, double u2,
                   const ModelParams& p) {
  const double x = (p.beta * u0 + p.eta * others_mean + u1 - u2 + 1.0 + p.gamma) /
                   (p.beta + p.eta + 2.0 + 2.0 * p.gamma);
  return std::clamp(x, 0.0, 1.0);
}

double firm1_cost(double u1, double u2, double share, const ModelParams& p) {
  return -(p.rho1 * u1 * (1.0 - share) - p.rho2 * u2 * share) -
         (u1 + p.epsilon) / (u2 + p.epsilon) + 0.5 * p.c * u1 * u1;
}

double firm2_cost(double u2, double u1, double share, const ModelParams& p) {
  return -(p.rho2 * u2 * share - p.rho1 * u1 * (1.0 - share)) -
         (u2 + p.epsilon) / (u1 + p.epsilon) + 0.5 * p.c * u2 * u2;
}

double firm1_br(double u2, double share, const ModelParams& p) {
  return std::max(0.0, (p.rho1 * (1.0 - share) + 1.0 / (u2 + p.epsilon)) / p.c);
}

double firm2_br(double u1, double share, const ModelParams& p) {
  return std::max(0.0, (p.rho2 * share + 1.0 / (u1 + p.epsilon)) / p.c);
}

double sum_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

double leave_one_out(double total, double own, std::size_t n) {
  return (total - own) / static_cast<double>(n - 1);
}

// Synchronous round; reports the largest unblended change.
FinitePopulation sweep_impl(const FinitePopulation& pop, const ModelParams& p,
                            double damping, double& change) {
  const std::size_t n = pop.size();
  const double total = sum_of(pop.u);
  const double share = total / static_cast<double>(n);
  FinitePopulation next = pop;
  change = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double br =
        consumer_br(pop.u0[i], leave_one_out(total, pop.u[i], n), pop.u1, pop.u2, p);
    change = std::max(change, std::abs(br - pop.u[i]));
    next.u[i] = pop.u[i] + damping * (br - pop.u[i]);
  }
  const double b1 = firm1_br(pop.u2, share, p);
  const double b2 = firm2_br(pop.u1, share, p);
  change = std::max({change, std::abs(b1 - pop.u1), std::abs(b2 - pop.u2)});
  next.u1 = pop.u1 + damping * (b1 - pop.u1);
  next.u2 = pop.u2 + damping * (b2 - pop.u2);
  return next;
}

double consumer_gain(const FinitePopulation& pop, const ModelParams& p,
                     const DeviationGrid& grid) {
  const std::size_t n = pop.size();
  const double total = sum_of(pop.u);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double others = leave_one_out(total, pop.u[i], n);
    const double base = consumer_cost(pop.u[i], pop.u0[i], others, pop.u1, pop.u2, p);
    double best = base;
    for (int k = 0; k < grid.consumer_points; ++k) {
      const double u = static_cast<double>(k) / (grid.consumer_points - 1);
      best = std::min(best, consumer_cost(u, pop.u0[i], others, pop.u1, pop.u2, p));
    }
    worst = std::max(worst, base - best);
  }
  return worst;
}

double resolve_damping(const OracleOptions& o, const ModelParams& p) {
  if (o.damping > 0.0) {
    if (o.damping > 1.0) throw InputError("damping must lie in (0,1]");
    return o.damping;
  }
  // The consumer/firm feedback loop has gain of order 1/(2c); larger steps
  // oscillate for small c.
  return std::min(0.5, p.c);
}

void check_oracle_args(std::size_t n, const ModelParams& p, const OracleOptions& o) {
  if (n < 2) throw InputError("finite oracle needs N >= 2");
  p.validate();
  detail::require_positive(o.tol, "tol");
  if (o.max_sweeps <= 0) throw InputError("max_sweeps must be positive");
  if (o.max_outer_rounds <= 0) throw InputError("max_outer_rounds must be positive");
  if (!(o.mlf_search_radius >= 0.0)) throw InputError("mlf_search_radius must be >= 0");
  if (!(o.grid.firm_max > 0.0)) throw InputError("firm_max must be positive");
  if (o.grid.firm_points < 2 || o.grid.consumer_points < 2) {
    throw InputError("deviation grids need at least two points");
  }
}

OracleResult finish(FinitePopulation pop, int sweeps, bool converged, double change) {
  OracleResult r;
  r.u1 = pop.u1;
  r.u2 = pop.u2;
  r.mean_pref = pop.mean_pref();
  r.sweeps = sweeps;
  r.converged = converged;
  r.last_change = change;
  r.population = std::move(pop);
  return r;
}

// Consumers' market share after they settle at (u1, u2), warm-started from
// `scratch`.
double settled_share(FinitePopulation& scratch, double u1, double u2,
                     const ModelParams& p) {
  scratch.u1 = u1;
  scratch.u2 = u2;
  settle_consumers(scratch, p);
  return scratch.mean_pref();
}

double mlf_firm_br(int which, const FinitePopulation& pop, const ModelParams& p,
                   const OracleOptions& o) {
  FinitePopulation scratch = pop;
  auto cost = [&](double u) {
    if (which == 1) return firm1_cost(u, pop.u2, settled_share(scratch, u, pop.u2, p), p);
    return firm2_cost(u, pop.u1, settled_share(scratch, pop.u1, u, p), p);
  };
  double lo = 0.0;
  double hi = o.grid.firm_max;
  if (o.mlf_search_radius > 0.0) {
    const double cur = which == 1 ? pop.u1 : pop.u2;
    lo = std::max(0.0, cur - o.mlf_search_radius);
    hi = std::min(o.grid.firm_max, cur + o.mlf_search_radius);
  }
  return detail::minimize_on_interval(cost, lo, hi, 101).x;
}

void throw_if_uncertified(const OracleResult& r, double eps, const char* what) {
  if (!r.converged) {
    std::ostringstream os;
    os << what << " oracle did not converge after " << r.sweeps
       << " rounds (last change " << r.last_change << ", u1=" << r.u1
       << ", u2=" << r.u2 << ", mean_pref=" << r.mean_pref << ")";
    throw SolverError(os.str());
  }
  if (r.max_unilateral_gain > eps) {
    std::ostringstream os;
    os << what << " oracle certificate failed: max unilateral gain "
       << r.max_unilateral_gain << " > eps " << eps << " (consumer " << r.consumer_gain
       << ", firm1 " << r.firm1_gain << ", firm2 " << r.firm2_gain << ")";
    throw SolverError(os.str());
  }
}

}  // namespace

double FinitePopulation::mean_pref() const {
  if (u.empty()) return 0.0;
  return sum_of(u) / static_cast<double>(u.size());
}

void FinitePopulation::validate() const {
  if (u.size() < 2) throw InputError("population needs N >= 2");
  if (u0.size() != u.size()) throw InputError("u0 and u sizes differ");
  for (std::size_t i = 0; i < u.size(); ++i) {
    detail::require_unit(u0[i], "u0[i]");
    detail::require_unit(u[i], "u[i]");
  }
  detail::require_nonnegative(u1, "u1");
  detail::require_nonnegative(u2, "u2");
}

std::vector<double> sample_initial_preferences(const InitialDistribution& dist,
                                               std::size_t n) {
  if (n == 0) throw InputError("sample size must be positive");
  std::vector<double> out;
  out.reserve(n);
  if (!dist.is_mean_only()) {
    const auto atoms = dist.atoms();
    std::vector<std::size_t> counts(atoms.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double exact = atoms[k].weight * static_cast<double>(n);
      counts[k] = static_cast<std::size_t>(std::floor(exact));
      assigned += counts[k];
      remainders.emplace_back(exact - std::floor(exact), k);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t j = 0; assigned < n; ++j, ++assigned) {
      ++counts[remainders[j % remainders.size()].second];
    }
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      out.insert(out.end(), counts[k], atoms[k].value);
    }
    return out;
  }

  const double m = dist.mean();
  for (std::size_t i = 0; i < n; ++i) {
    const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    double x;
    if (m < 0.5) {
      const double w = 1.0 - 2.0 * m;  // mass of the atom at 0
      x = q < w ? 0.0 : (q - w) / (1.0 - w);
    } else if (m > 0.5) {
      const double w = 2.0 * m - 1.0;  // mass of the atom at 1
      x = q < 1.0 - w ? q / (1.0 - w) : 1.0;
    } else {
      x = q;
    }
    out.push_back(std::clamp(x, 0.0, 1.0));
  }
  return out;
}

FinitePopulation seeded_population(std::vector<double> u0, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FinitePopulation pop;
  pop.u.resize(u0.size());
  for (double& x : pop.u) x = unit(rng);
  pop.u0 = std::move(u0);
  pop.u1 = 2.0 * unit(rng);
  pop.u2 = 2.0 * unit(rng);
  return pop;
}

double consumer_br_finite(std::size_t i, const FinitePopulation& pop,
                          const ModelParams& p) {
  if (i >= pop.size()) throw InputError("consumer index out of range");
  const double others = leave_one_out(sum_of(pop.u), pop.u[i], pop.size());
  return consumer_br(pop.u0[i], others, pop.u1, pop.u2, p);
}

FinitePopulation best_response_sweep(const FinitePopulation& pop, const ModelParams& p,
                                     double damping) {
  pop.validate();
  p.validate();
  if (!(damping > 0.0 && damping <= 1.0)) throw InputError("damping must lie in (0,1]");
  double change = 0.0;
  return sweep_impl(pop, p, damping, change);
}

int settle_consumers(FinitePopulation& pop, const ModelParams& p, double tol,
                     int max_sweeps) {
  const std::size_t n = pop.size();
  std::vector<double> next(n);
  for (int s = 1; s <= max_sweeps; ++s) {
    const double total = sum_of(pop.u);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = consumer_br(pop.u0[i], leave_one_out(total, pop.u[i], n), pop.u1, pop.u2, p);
      change = std::max(change, std::abs(next[i] - pop.u[i]));
    }
    pop.u.swap(next);
    if (change <= tol) return s;
  }
  throw SolverError("consumer sweeps did not settle within " + std::to_string(max_sweeps) +
                    " rounds");
}

OracleResult run_finite_ne(std::size_t n, const InitialDistribution& dist,
                           const ModelParams& p, const OracleOptions& o) {
  check_oracle_args(n, p, o);
  const double damping = resolve_damping(o, p);
  FinitePopulation pop = seeded_population(sample_initial_preferences(dist, n), o.seed);

  int sweeps = 0;
  double change = std::numeric_limits<double>::infinity();
  bool converged = false;
  while (sweeps < o.max_sweeps) {
    pop = sweep_impl(pop, p, damping, change);
    ++sweeps;
    if (change <= o.tol) {
      converged = true;
      break;
    }
  }

  OracleResult r = finish(std::move(pop), sweeps, converged, change);
  const FinitePopulation& fp = r.population;
  const double share = fp.mean_pref();
  const double base1 = firm1_cost(fp.u1, fp.u2, share, p);
  const double base2 = firm2_cost(fp.u2, fp.u1, share, p);
  double best1 = base1;
  double best2 = base2;
  for (int i = 0; i < o.grid.firm_points; ++i) {
    const double u = o.grid.firm_max * i / (o.grid.firm_points - 1);
    best1 = std::min(best1, firm1_cost(u, fp.u2, share, p));
    best2 = std::min(best2, firm2_cost(u, fp.u1, share, p));
  }
  r.firm1_gain = base1 - best1;
  r.firm2_gain = base2 - best2;
  r.consumer_gain = consumer_gain(fp, p, o.grid);
  r.max_unilateral_gain = std::max({r.firm1_gain, r.firm2_gain, r.consumer_gain});
  return r;
}

OracleResult run_finite_mlfne(std::size_t n, const InitialDistribution& dist,
                              const ModelParams& p, const OracleOptions& o) {
  check_oracle_args(n, p, o);
  constexpr double kOuterDamping = 0.5;
  // A derivative-free minimizer places each best response only to about
  // sqrt(machine epsilon).
  const double outer_tol = std::max(o.tol, 1e-7);
  FinitePopulation pop = seeded_population(sample_initial_preferences(dist, n), o.seed);
  settle_consumers(pop, p);

  int rounds = 0;
  double change = std::numeric_limits<double>::infinity();
  bool converged = false;
  while (rounds < o.max_outer_rounds) {
    const double b1 = mlf_firm_br(1, pop, p, o);
    const double b2 = mlf_firm_br(2, pop, p, o);
    change = std::max(std::abs(b1 - pop.u1), std::abs(b2 - pop.u2));
    ++rounds;
    if (change <= outer_tol) {
      converged = true;
      break;
    }
    pop.u1 += kOuterDamping * (b1 - pop.u1);
    pop.u2 += kOuterDamping * (b2 - pop.u2);
    settle_consumers(pop, p);
  }

  OracleResult r = finish(std::move(pop), rounds, converged, change);
  const FinitePopulation& fp = r.population;
  const double base1 = firm1_cost(fp.u1, fp.u2, fp.mean_pref(), p);
  const double base2 = firm2_cost(fp.u2, fp.u1, fp.mean_pref(), p);
  double best1 = base1;
  double best2 = base2;
  FinitePopulation scratch1 = fp;
  FinitePopulation scratch2 = fp;
  for (int i = 0; i < o.grid.firm_points; ++i) {
    const double u = o.grid.firm_max * i / (o.grid.firm_points - 1);
    best1 = std::min(best1, firm1_cost(u, fp.u2, settled_share(scratch1, u, fp.u2, p), p));
    best2 = std::min(best2, firm2_cost(u, fp.u1, settled_share(scratch2, fp.u1, u, p), p));
  }
  r.firm1_gain = base1 - best1;
  r.firm2_gain = base2 - best2;
  r.consumer_gain = consumer_gain(fp, p, o.grid);
  r.max_unilateral_gain = std::max({r.firm1_gain, r.firm2_gain, r.consumer_gain});
  return r;
}

OracleResult solve_finite_ne(std::size_t n, const InitialDistribution& dist,
                             const ModelParams& p, double eps, const OracleOptions& o) {
  detail::require_positive(eps, "eps");
  OracleResult r = run_finite_ne(n, dist, p, o);
  throw_if_uncertified(r, eps, "NE");
  return r;
}

OracleResult solve_finite_mlfne(std::size_t n, const InitialDistribution& dist,
                                const ModelParams& p, double eps, const OracleOptions& o) {
  detail::require_positive(eps, "eps");
  OracleResult r = run_finite_mlfne(n, dist, p, o);
  throw_if_uncertified(r, eps, "MLF-NE");
  return r;
}

void write_population_csv(const FinitePopulation& pop, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << "u0,u_final\n";
  char buf[64];
  for (std::size_t i = 0; i < pop.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", pop.u0[i], pop.u[i]);
    out << buf;
  }
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace mfd
