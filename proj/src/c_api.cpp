#include "mfduopoly/mfduopoly.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "mfduopoly/certificate.hpp"
#include "mfduopoly/errors.hpp"
#include "mfduopoly/finite_oracle.hpp"
#include "mfduopoly/mlfne_solver.hpp"
#include "mfduopoly/model.hpp"
#include "mfduopoly/ne_solver.hpp"
#include "mfduopoly/sweep.hpp"

struct mfd_params {
  mfd::ModelParams p;
};

struct mfd_dist {
  mfd::InitialDistribution d;
};

struct mfd_equilibrium {
  mfd::Equilibrium eq;
  mfd::ModelParams params;
  mfd::InitialDistribution dist;
};

struct mfd_sweep {
  std::vector<mfd::SweepRow> rows;
};

struct mfd_comparison {
  mfd::ComparisonSummary summary;
};

struct mfd_oracle {
  mfd::OracleResult result;
};

namespace {

thread_local std::string g_last_error;

mfd_status fail(mfd_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

mfd_status status_of(mfd::ErrorKind k) {
  switch (k) {
    case mfd::ErrorKind::Input:
      return MFD_ERR_INPUT;
    case mfd::ErrorKind::UnsupportedDistribution:
      return MFD_ERR_UNSUPPORTED;
    case mfd::ErrorKind::Solver:
      return MFD_ERR_SOLVER;
    case mfd::ErrorKind::Consistency:
      return MFD_ERR_CONSISTENCY;
    case mfd::ErrorKind::Io:
      return MFD_ERR_IO;
  }
  return MFD_ERR_INTERNAL;
}

template <class F>
mfd_status guarded(F&& f) {
  try {
    f();
    return MFD_OK;
  } catch (const mfd::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MFD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MFD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MFD_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* ptr, const char* name) {
  if (!ptr) throw mfd::InputError(std::string(name) + " is NULL");
}

double* param_slot(mfd::ModelParams& p, const char* name) {
  require(name, "name");
  const std::string n(name);
  if (n == "c") return &p.c;
  if (n == "alpha") return &p.alpha;
  if (n == "epsilon") return &p.epsilon;
  if (n == "rho1") return &p.rho1;
  if (n == "rho2") return &p.rho2;
  if (n == "beta") return &p.beta;
  if (n == "eta") return &p.eta;
  if (n == "gamma") return &p.gamma;
  throw mfd::InputError("unknown parameter '" + n + "'");
}

mfd::EquilibriumKind to_cpp(mfd_kind k) {
  if (k == MFD_KIND_NE) return mfd::EquilibriumKind::NE;
  if (k == MFD_KIND_MLFNE) return mfd::EquilibriumKind::MLFNE;
  throw mfd::InputError("unknown kind");
}

mfd_kind to_c(mfd::EquilibriumKind k) {
  return k == mfd::EquilibriumKind::NE ? MFD_KIND_NE : MFD_KIND_MLFNE;
}

mfd_method to_c(mfd::SolveMethod m) {
  switch (m) {
    case mfd::SolveMethod::ClosedForm:
      return MFD_METHOD_CLOSED_FORM;
    case mfd::SolveMethod::Bisection:
      return MFD_METHOD_BISECTION;
    case mfd::SolveMethod::BestResponseIteration:
      return MFD_METHOD_BR_ITERATION;
  }
  return MFD_METHOD_BISECTION;
}

void copy_values(const std::vector<double>& v, double* out, size_t cap, size_t* n) {
  require(n, "n");
  *n = v.size();
  if (out) {
    for (size_t i = 0; i < v.size() && i < cap; ++i) out[i] = v[i];
  }
}

}  // namespace

extern "C" {

const char* mfd_version(void) { return "0.1.0"; }

const char* mfd_last_error(void) { return g_last_error.c_str(); }

const char* mfd_status_name(mfd_status s) {
  switch (s) {
    case MFD_OK:
      return "ok";
    case MFD_ERR_INPUT:
      return "input error";
    case MFD_ERR_UNSUPPORTED:
      return "unsupported distribution";
    case MFD_ERR_SOLVER:
      return "solver error";
    case MFD_ERR_CONSISTENCY:
      return "consistency error";
    case MFD_ERR_IO:
      return "i/o error";
    case MFD_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* mfd_kind_name(mfd_kind kind) {
  return kind == MFD_KIND_MLFNE ? "MLFNE" : "NE";
}

mfd_status mfd_kind_parse(const char* text, mfd_kind* out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    const auto kinds = mfd::parse_kind_list(text);
    if (kinds.size() != 1) throw mfd::InputError("expected a single kind");
    *out = to_c(kinds.front());
  });
}

mfd_status mfd_params_create(double c, mfd_params** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto h = std::make_unique<mfd_params>();
    h->p = mfd::ModelParams::with_cost(c);
    h->p.validate();
    *out = h.release();
  });
}

mfd_status mfd_params_set(mfd_params* params, const char* name, double value) {
  return guarded([&] {
    require(params, "params");
    mfd::ModelParams next = params->p;
    *param_slot(next, name) = value;
    next.validate();
    params->p = next;
  });
}

mfd_status mfd_params_get(const mfd_params* params, const char* name, double* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    mfd::ModelParams copy = params->p;
    *out = *param_slot(copy, name);
  });
}

void mfd_params_destroy(mfd_params* params) { delete params; }

mfd_status mfd_dist_mean_only(double mean, mfd_dist** out) {
  return guarded([&] {
    require(out, "out");
    *out = new mfd_dist{mfd::InitialDistribution::mean_only(mean)};
  });
}

mfd_status mfd_dist_atoms(const double* values, const double* weights, size_t n,
                          mfd_dist** out) {
  return guarded([&] {
    require(out, "out");
    if (n > 0) {
      require(values, "values");
      require(weights, "weights");
    }
    std::vector<mfd::Atom> atoms(n);
    for (size_t i = 0; i < n; ++i) atoms[i] = {values[i], weights[i]};
    *out = new mfd_dist{mfd::InitialDistribution::atoms(std::move(atoms))};
  });
}

mfd_status mfd_dist_load_csv(const char* path, mfd_dist** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new mfd_dist{mfd::InitialDistribution::load_csv(path)};
  });
}

double mfd_dist_mean(const mfd_dist* dist) {
  return dist ? dist->d.mean() : std::nan("");
}

void mfd_dist_destroy(mfd_dist* dist) { delete dist; }

mfd_status mfd_solve(mfd_kind kind, const mfd_params* params, const mfd_dist* dist,
                     double tol, mfd_equilibrium** out) {
  return guarded([&] {
    require(params, "params");
    require(dist, "dist");
    require(out, "out");
    *out = nullptr;
    const double t = tol > 0.0 ? tol : mfd::kDefaultSolveTol;
    mfd::Equilibrium eq = to_cpp(kind) == mfd::EquilibriumKind::NE
                              ? mfd::solve_ne(params->p, dist->d, t)
                              : mfd::solve_mlfne(params->p, dist->d, t);
    *out = new mfd_equilibrium{std::move(eq), params->p, dist->d};
  });
}

mfd_status mfd_equilibrium_info_get(const mfd_equilibrium* h, mfd_equilibrium_info* out) {
  return guarded([&] {
    require(h, "eq");
    require(out, "out");
    const mfd::Equilibrium& eq = h->eq;
    out->kind = to_c(eq.kind);
    out->u1 = eq.u1;
    out->u2 = eq.u2;
    out->mu_bar = eq.mu_bar;
    out->cost1 = mfd::major_cost(mfd::Firm::One, eq.u1, eq.u2, eq.mu_bar, h->params);
    out->cost2 = mfd::major_cost(mfd::Firm::Two, eq.u2, eq.u1, eq.mu_bar, h->params);
    out->residual = eq.max_residual();
    out->tolerance = eq.report.tolerance;
    out->iterations = eq.report.iterations;
    out->method = to_c(eq.report.method);
    out->converged = eq.report.converged ? 1 : 0;
  });
}

mfd_status mfd_equilibrium_policy(const mfd_equilibrium* h, double u0, double* unclipped,
                                  double* clipped) {
  return guarded([&] {
    require(h, "eq");
    if (!h->params.canonical()) {
      throw mfd::InputError("policy query requires canonical parameters");
    }
    if (!(u0 >= 0.0 && u0 <= 1.0)) throw mfd::InputError("u0 outside [0,1]");
    if (unclipped) *unclipped = h->eq.policy.unclipped(u0);
    if (clipped) *clipped = h->eq.policy(u0);
  });
}

mfd_status mfd_equilibrium_certify(const mfd_equilibrium* h, int firm_points,
                                   double firm_max, int consumer_points,
                                   int consumer_samples, mfd_certificate* out) {
  return guarded([&] {
    require(h, "eq");
    require(out, "out");
    mfd::DeviationGrid g;
    if (firm_points > 0) g.firm_points = firm_points;
    if (firm_max > 0.0) g.firm_max = firm_max;
    if (consumer_points > 0) g.consumer_points = consumer_points;
    if (consumer_samples > 0) g.consumer_samples = consumer_samples;
    if (g.firm_points < 2 || g.consumer_points < 2 || g.consumer_samples < 2) {
      throw mfd::InputError("deviation grids need at least two points");
    }
    const mfd::DeviationCertificate cert =
        h->eq.kind == mfd::EquilibriumKind::NE
            ? mfd::certify_ne(h->eq, h->params, g)
            : mfd::certify_mlfne(h->eq, h->params, h->dist, g);
    out->firm1_gain = cert.firm1_gain;
    out->firm2_gain = cert.firm2_gain;
    out->consumer_gain = cert.consumer_gain;
    out->firm1_best = cert.firm1_best;
    out->firm2_best = cert.firm2_best;
    out->consumer_worst_u0 = cert.consumer_worst_u0;
  });
}

void mfd_equilibrium_destroy(mfd_equilibrium* eq) { delete eq; }

mfd_status mfd_ne_gap(double mu, double c, double u0_mean, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = mfd::ne_gap(mu, c, u0_mean);
  });
}

mfd_status mfd_parse_values(const char* text, double* out, size_t cap, size_t* n) {
  return guarded([&] {
    require(text, "text");
    copy_values(mfd::parse_value_list(text), out, cap, n);
  });
}

mfd_status mfd_default_c_grid(double* out, size_t cap, size_t* n) {
  return guarded([&] { copy_values(mfd::default_c_grid(), out, cap, n); });
}

mfd_status mfd_default_u0_grid(double* out, size_t cap, size_t* n) {
  return guarded([&] { copy_values(mfd::default_u0_grid(), out, cap, n); });
}

mfd_status mfd_sweep_run(const double* c_values, size_t n_c, const double* u0_means,
                         size_t n_u0, unsigned kinds_mask, double tol, int include_costs,
                         mfd_sweep** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (n_c > 0) require(c_values, "c_values");
    if (n_u0 > 0) require(u0_means, "u0_means");
    if (kinds_mask & ~3u) throw mfd::InputError("unknown bits in kinds_mask");
    mfd::SweepSpec spec;
    spec.c_values.assign(c_values, c_values + n_c);
    spec.u0_means.assign(u0_means, u0_means + n_u0);
    spec.kinds.clear();
    if (kinds_mask & 1u) spec.kinds.push_back(mfd::EquilibriumKind::NE);
    if (kinds_mask & 2u) spec.kinds.push_back(mfd::EquilibriumKind::MLFNE);
    if (tol > 0.0) spec.tol = tol;
    spec.include_costs = include_costs != 0;
    *out = new mfd_sweep{mfd::run_sweep(spec)};
  });
}

mfd_status mfd_sweep_read_csv(const char* path, mfd_sweep** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new mfd_sweep{mfd::read_rows_csv(path)};
  });
}

mfd_status mfd_sweep_write_csv(const mfd_sweep* sweep, const char* path) {
  return guarded([&] {
    require(sweep, "sweep");
    require(path, "path");
    mfd::write_rows_csv(sweep->rows, path);
  });
}

size_t mfd_sweep_size(const mfd_sweep* sweep) { return sweep ? sweep->rows.size() : 0; }

size_t mfd_sweep_failures(const mfd_sweep* sweep) {
  if (!sweep) return 0;
  size_t n = 0;
  for (const auto& r : sweep->rows) n += r.ok() ? 0 : 1;
  return n;
}

mfd_status mfd_sweep_row_get(const mfd_sweep* sweep, size_t index, mfd_sweep_row* out) {
  return guarded([&] {
    require(sweep, "sweep");
    require(out, "out");
    if (index >= sweep->rows.size()) throw mfd::InputError("row index out of range");
    const mfd::SweepRow& r = sweep->rows[index];
    out->kind = to_c(r.kind);
    out->c = r.c;
    out->u0_mean = r.u0_mean;
    out->u1 = r.u1;
    out->u2 = r.u2;
    out->mu_bar = r.mu_bar;
    out->cost1 = r.cost1;
    out->cost2 = r.cost2;
    out->residual = r.residual;
    out->error = r.ok() ? nullptr : r.error.c_str();
  });
}

void mfd_sweep_destroy(mfd_sweep* sweep) { delete sweep; }

mfd_status mfd_compare(const mfd_sweep* sweep, mfd_comparison** out) {
  return guarded([&] {
    require(sweep, "sweep");
    require(out, "out");
    *out = new mfd_comparison{mfd::compare_report(sweep->rows)};
  });
}

size_t mfd_comparison_size(const mfd_comparison* cmp) {
  return cmp ? cmp->summary.size() : 0;
}

mfd_status mfd_comparison_row_get(const mfd_comparison* cmp, size_t index,
                                  mfd_comparison_row* out) {
  return guarded([&] {
    require(cmp, "comparison");
    require(out, "out");
    if (index >= cmp->summary.size()) throw mfd::InputError("row index out of range");
    const mfd::ComparisonRow& r = cmp->summary[index];
    *out = {r.c, r.u0_mean, r.du1, r.du2, r.dcost1, r.dcost2, r.dmu, r.leader_flip ? 1 : 0};
  });
}

mfd_status mfd_comparison_write_csv(const mfd_comparison* cmp, const char* path) {
  return guarded([&] {
    require(cmp, "comparison");
    require(path, "path");
    mfd::write_summary_csv(cmp->summary, path);
  });
}

void mfd_comparison_destroy(mfd_comparison* cmp) { delete cmp; }

mfd_oracle_options mfd_oracle_options_default(void) {
  const mfd::OracleOptions o;
  mfd_oracle_options c;
  c.damping = o.damping;
  c.max_sweeps = o.max_sweeps;
  c.tol = o.tol;
  c.seed = o.seed;
  c.firm_points = o.grid.firm_points;
  c.firm_max = o.grid.firm_max;
  c.consumer_points = o.grid.consumer_points;
  c.max_outer_rounds = o.max_outer_rounds;
  c.search_radius = o.mlf_search_radius;
  return c;
}

mfd_status mfd_oracle_run(mfd_kind kind, size_t n, const mfd_params* params,
                          const mfd_dist* dist, double eps, int certify,
                          const mfd_oracle_options* opts, mfd_oracle** out) {
  return guarded([&] {
    require(params, "params");
    require(dist, "dist");
    require(out, "out");
    *out = nullptr;
    const mfd_oracle_options c = opts ? *opts : mfd_oracle_options_default();
    mfd::OracleOptions o;
    o.damping = c.damping;
    o.max_sweeps = c.max_sweeps;
    o.tol = c.tol;
    o.seed = c.seed;
    o.grid.firm_points = c.firm_points;
    o.grid.firm_max = c.firm_max;
    o.grid.consumer_points = c.consumer_points;
    o.max_outer_rounds = c.max_outer_rounds;
    o.mlf_search_radius = c.search_radius;
    const bool ne = to_cpp(kind) == mfd::EquilibriumKind::NE;
    mfd::OracleResult r;
    if (certify) {
      r = ne ? mfd::solve_finite_ne(n, dist->d, params->p, eps, o)
             : mfd::solve_finite_mlfne(n, dist->d, params->p, eps, o);
    } else {
      r = ne ? mfd::run_finite_ne(n, dist->d, params->p, o)
             : mfd::run_finite_mlfne(n, dist->d, params->p, o);
    }
    *out = new mfd_oracle{std::move(r)};
  });
}

mfd_status mfd_oracle_info_get(const mfd_oracle* oracle, mfd_oracle_info* out) {
  return guarded([&] {
    require(oracle, "oracle");
    require(out, "out");
    const mfd::OracleResult& r = oracle->result;
    out->n = r.population.size();
    out->u1 = r.u1;
    out->u2 = r.u2;
    out->mean_pref = r.mean_pref;
    out->sweeps = r.sweeps;
    out->converged = r.converged ? 1 : 0;
    out->last_change = r.last_change;
    out->max_unilateral_gain = r.max_unilateral_gain;
    out->consumer_gain = r.consumer_gain;
    out->firm1_gain = r.firm1_gain;
    out->firm2_gain = r.firm2_gain;
  });
}

mfd_status mfd_oracle_write_population(const mfd_oracle* oracle, const char* path) {
  return guarded([&] {
    require(oracle, "oracle");
    require(path, "path");
    mfd::write_population_csv(oracle->result.population, path);
  });
}

void mfd_oracle_destroy(mfd_oracle* oracle) { delete oracle; }

}  // extern "C"
