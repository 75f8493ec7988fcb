// mfduopoly command-line front end. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfduopoly/mfduopoly.h"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

struct Failure {
  int code;
};

int exit_code_for(mfd_status s) {
  switch (s) {
    case MFD_OK:
      return kExitOk;
    case MFD_ERR_INPUT:
    case MFD_ERR_UNSUPPORTED:
    case MFD_ERR_IO:
      return kExitInput;
    case MFD_ERR_SOLVER:
    case MFD_ERR_CONSISTENCY:
      return kExitSolver;
    case MFD_ERR_INTERNAL:
      break;
  }
  return kExitInternal;
}

void check(mfd_status s, const char* context) {
  if (s == MFD_OK) return;
  std::cerr << "mfduopoly: " << context << ": " << mfd_status_name(s) << ": "
            << mfd_last_error() << "\n";
  throw Failure{exit_code_for(s)};
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};

using Params = std::unique_ptr<mfd_params, Deleter<mfd_params, mfd_params_destroy>>;
using Dist = std::unique_ptr<mfd_dist, Deleter<mfd_dist, mfd_dist_destroy>>;
using Eq = std::unique_ptr<mfd_equilibrium, Deleter<mfd_equilibrium, mfd_equilibrium_destroy>>;
using Sweep = std::unique_ptr<mfd_sweep, Deleter<mfd_sweep, mfd_sweep_destroy>>;
using Cmp = std::unique_ptr<mfd_comparison, Deleter<mfd_comparison, mfd_comparison_destroy>>;
using Oracle = std::unique_ptr<mfd_oracle, Deleter<mfd_oracle, mfd_oracle_destroy>>;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// NaN and infinities have no JSON literal.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

mfd_kind parse_kind(const std::string& text) {
  mfd_kind k;
  check(mfd_kind_parse(text.c_str(), &k), "--kind");
  return k;
}

Params make_params(double c, double alpha) {
  mfd_params* raw = nullptr;
  check(mfd_params_create(c, &raw), "--c");
  Params p(raw);
  check(mfd_params_set(p.get(), "alpha", alpha), "--alpha");
  return p;
}

Dist make_dist(std::optional<double> u0_mean, const std::string& dist_csv) {
  mfd_dist* raw = nullptr;
  if (!dist_csv.empty()) {
    check(mfd_dist_load_csv(dist_csv.c_str(), &raw), "--dist");
  } else {
    check(mfd_dist_mean_only(*u0_mean, &raw), "--u0-mean");
  }
  return Dist(raw);
}

std::vector<double> values_from(const std::string& text, const char* what,
                                mfd_status (*fallback)(double*, size_t, size_t*)) {
  size_t n = 0;
  if (text.empty()) {
    check(fallback(nullptr, 0, &n), what);
    std::vector<double> v(n);
    check(fallback(v.data(), v.size(), &n), what);
    return v;
  }
  check(mfd_parse_values(text.c_str(), nullptr, 0, &n), what);
  std::vector<double> v(n);
  check(mfd_parse_values(text.c_str(), v.data(), v.size(), &n), what);
  return v;
}

// ---- solve ----

struct SolveArgs {
  std::string kind;
  double c = 0.0;
  double u0_mean = 0.0;
  double alpha = 0.0;
  double tol = 0.0;
  bool json = false;
  bool certify = false;
};

int run_solve(const SolveArgs& a) {
  const mfd_kind kind = parse_kind(a.kind);
  Params params = make_params(a.c, a.alpha);
  Dist dist = make_dist(a.u0_mean, "");
  mfd_equilibrium* raw = nullptr;
  check(mfd_solve(kind, params.get(), dist.get(), a.tol, &raw), "solve");
  Eq eq(raw);
  mfd_equilibrium_info info;
  check(mfd_equilibrium_info_get(eq.get(), &info), "solve");

  std::optional<mfd_certificate> cert;
  if (a.certify) {
    mfd_certificate c;
    check(mfd_equilibrium_certify(eq.get(), 0, 0.0, 0, 0, &c), "certify");
    cert = c;
  }

  const char* methods[] = {"closed-form", "bisection", "best-response-iteration"};
  if (a.json) {
    json j;
    j["kind"] = mfd_kind_name(info.kind);
    j["c"] = a.c;
    j["u0_mean"] = a.u0_mean;
    j["u1"] = num(info.u1);
    j["u2"] = num(info.u2);
    j["mu_bar"] = num(info.mu_bar);
    j["cost1"] = num(info.cost1);
    j["cost2"] = num(info.cost2);
    j["residual"] = num(info.residual);
    j["tolerance"] = info.tolerance;
    j["iterations"] = info.iterations;
    j["method"] = methods[info.method];
    j["converged"] = info.converged != 0;
    if (cert) {
      j["certificate"] = {{"firm1_gain", num(cert->firm1_gain)},
                          {"firm2_gain", num(cert->firm2_gain)},
                          {"consumer_gain", num(cert->consumer_gain)}};
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "kind,c,u0_mean,u1,u2,mu_bar,cost1,cost2,residual\n"
              << mfd_kind_name(info.kind) << ',' << fmt(a.c) << ',' << fmt(a.u0_mean) << ','
              << fmt(info.u1) << ',' << fmt(info.u2) << ',' << fmt(info.mu_bar) << ','
              << fmt(info.cost1) << ',' << fmt(info.cost2) << ',' << fmt(info.residual)
              << "\n";
    if (cert) {
      std::cerr << "certificate: firm1_gain=" << fmt(cert->firm1_gain)
                << " firm2_gain=" << fmt(cert->firm2_gain)
                << " consumer_gain=" << fmt(cert->consumer_gain) << "\n";
    }
  }
  return kExitOk;
}

// ---- sweep ----

struct SweepArgs {
  std::string c;
  std::string u0;
  std::string kinds = "ne,mlfne";
  std::string out;
  double tol = 0.0;
  bool no_costs = false;
};

int run_sweep(const SweepArgs& a) {
  const std::vector<double> cs = values_from(a.c, "--c", mfd_default_c_grid);
  const std::vector<double> us = values_from(a.u0, "--u0", mfd_default_u0_grid);

  unsigned mask = 0;
  std::string rest = a.kinds;
  while (true) {
    const auto pos = rest.find(',');
    const mfd_kind k = parse_kind(rest.substr(0, pos));
    const unsigned bit = k == MFD_KIND_NE ? 1u : 2u;
    if (mask & bit) {
      std::cerr << "mfduopoly: --kinds: duplicate kind\n";
      throw Failure{kExitInput};
    }
    mask |= bit;
    if (pos == std::string::npos) break;
    rest = rest.substr(pos + 1);
  }

  mfd_sweep* raw = nullptr;
  check(mfd_sweep_run(cs.data(), cs.size(), us.data(), us.size(), mask, a.tol,
                      a.no_costs ? 0 : 1, &raw),
        "sweep");
  Sweep sweep(raw);
  check(mfd_sweep_write_csv(sweep.get(), a.out.c_str()), "--out");

  const size_t failures = mfd_sweep_failures(sweep.get());
  for (size_t i = 0; i < mfd_sweep_size(sweep.get()); ++i) {
    mfd_sweep_row row;
    check(mfd_sweep_row_get(sweep.get(), i, &row), "sweep");
    if (row.error) {
      std::cerr << "warning: " << mfd_kind_name(row.kind) << " c=" << fmt(row.c)
                << " u0_mean=" << fmt(row.u0_mean) << ": " << row.error << "\n";
    }
  }
  std::cout << "wrote " << mfd_sweep_size(sweep.get()) << " rows (" << failures
            << " failed) to " << a.out << "\n";
  return kExitOk;
}

// ---- compare ----

struct CompareArgs {
  std::string in;
  std::string out;
  bool json = false;
};

int run_compare(const CompareArgs& a) {
  mfd_sweep* raw = nullptr;
  check(mfd_sweep_read_csv(a.in.c_str(), &raw), "--in");
  Sweep sweep(raw);
  mfd_comparison* craw = nullptr;
  check(mfd_compare(sweep.get(), &craw), "compare");
  Cmp cmp(craw);
  check(mfd_comparison_write_csv(cmp.get(), a.out.c_str()), "--out");

  const size_t n = mfd_comparison_size(cmp.get());
  size_t flips = 0;
  json rows = json::array();
  for (size_t i = 0; i < n; ++i) {
    mfd_comparison_row r;
    check(mfd_comparison_row_get(cmp.get(), i, &r), "compare");
    flips += r.leader_flip ? 1 : 0;
    if (a.json) {
      rows.push_back({{"c", r.c},
                      {"u0_mean", r.u0_mean},
                      {"du1", num(r.du1)},
                      {"du2", num(r.du2)},
                      {"dcost1", num(r.dcost1)},
                      {"dcost2", num(r.dcost2)},
                      {"dmu", num(r.dmu)},
                      {"leader_flip", r.leader_flip != 0}});
    }
  }
  if (a.json) {
    std::cout << rows.dump(2) << "\n";
  } else {
    std::cout << "wrote " << n << " comparisons (" << flips << " leader flips) to " << a.out
              << "\n";
  }
  return kExitOk;
}

// ---- oracle ----

struct OracleArgs {
  long long n = 0;
  std::string kind;
  double c = 0.0;
  std::optional<double> u0_mean;
  std::string dist_csv;
  unsigned long long seed = 0;
  double eps = 1e-6;
  double alpha = 0.0;
  double damping = 0.0;
  double search_radius = 0.0;
  bool no_certify = false;
  std::string population_out;
  bool json = false;
};

int run_oracle(const OracleArgs& a) {
  if (a.n < 2) {
    std::cerr << "mfduopoly: --n must be at least 2\n";
    throw Failure{kExitInput};
  }
  if (!a.u0_mean && a.dist_csv.empty()) {
    std::cerr << "mfduopoly: one of --u0-mean or --dist is required\n";
    throw Failure{kExitInput};
  }
  const mfd_kind kind = parse_kind(a.kind);
  Params params = make_params(a.c, a.alpha);
  Dist dist = make_dist(a.u0_mean, a.dist_csv);

  mfd_oracle_options opts = mfd_oracle_options_default();
  opts.seed = a.seed;
  opts.damping = a.damping;
  opts.search_radius = a.search_radius;
  mfd_oracle* raw = nullptr;
  check(mfd_oracle_run(kind, static_cast<size_t>(a.n), params.get(), dist.get(), a.eps,
                       a.no_certify ? 0 : 1, &opts, &raw),
        "oracle");
  Oracle oracle(raw);
  mfd_oracle_info info;
  check(mfd_oracle_info_get(oracle.get(), &info), "oracle");
  if (!a.population_out.empty()) {
    check(mfd_oracle_write_population(oracle.get(), a.population_out.c_str()),
          "--population-out");
  }

  if (a.json) {
    json j;
    j["kind"] = mfd_kind_name(kind);
    j["n"] = info.n;
    j["c"] = a.c;
    j["u0_mean"] = mfd_dist_mean(dist.get());
    j["seed"] = a.seed;
    j["u1"] = num(info.u1);
    j["u2"] = num(info.u2);
    j["mean_pref"] = num(info.mean_pref);
    j["sweeps"] = info.sweeps;
    j["converged"] = info.converged != 0;
    j["last_change"] = num(info.last_change);
    j["max_unilateral_gain"] = num(info.max_unilateral_gain);
    j["consumer_gain"] = num(info.consumer_gain);
    j["firm1_gain"] = num(info.firm1_gain);
    j["firm2_gain"] = num(info.firm2_gain);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "kind,n,c,u0_mean,seed,u1,u2,mean_pref,sweeps,max_unilateral_gain\n"
              << mfd_kind_name(kind) << ',' << info.n << ',' << fmt(a.c) << ','
              << fmt(mfd_dist_mean(dist.get())) << ',' << a.seed << ',' << fmt(info.u1) << ','
              << fmt(info.u2) << ',' << fmt(info.mean_pref) << ',' << info.sweeps << ','
              << fmt(info.max_unilateral_gain) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field advertising duopoly: NE and MLF-NE solvers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mfd_version()));

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve one equilibrium");
  solve->add_option("--kind", sa.kind, "ne or mlfne")->required();
  solve->add_option("--c", sa.c, "Unit advertising cost")->required();
  solve->add_option("--u0-mean", sa.u0_mean, "Mean initial preference")->required();
  solve->add_option("--alpha", sa.alpha, "Common product quality");
  solve->add_option("--tol", sa.tol, "Residual tolerance");
  solve->add_flag("--json", sa.json, "JSON output");
  solve->add_flag("--certify", sa.certify, "Also run the deviation scan");

  SweepArgs wa;
  auto* sweep = app.add_subcommand("sweep", "Solve over a (c, u0_mean) grid");
  sweep->add_option("--c", wa.c, "List a,b,c or range lo:hi:n or log:lo:hi:n");
  sweep->add_option("--u0", wa.u0, "List or range of mean initial preferences");
  sweep->add_option("--kinds", wa.kinds, "Comma-separated kinds")->capture_default_str();
  sweep->add_option("--out", wa.out, "Output CSV")->required();
  sweep->add_option("--tol", wa.tol, "Residual tolerance");
  sweep->add_flag("--no-costs", wa.no_costs, "Leave firm costs empty");

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "NE minus MLF-NE report from a sweep CSV");
  compare->add_option("--in", ca.in, "Sweep CSV")->required();
  compare->add_option("--out", ca.out, "Comparison CSV")->required();
  compare->add_flag("--json", ca.json, "Also print the comparison as JSON");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Finite-population brute-force equilibrium");
  oracle->add_option("--n", oa.n, "Number of consumers")->required();
  oracle->add_option("--kind", oa.kind, "ne or mlfne")->required();
  oracle->add_option("--c", oa.c, "Unit advertising cost")->required();
  oracle->add_option("--u0-mean", oa.u0_mean, "Mean initial preference");
  oracle->add_option("--dist", oa.dist_csv, "Atoms CSV (value,weight) instead of --u0-mean");
  oracle->add_option("--seed", oa.seed, "Seed for the random start")->capture_default_str();
  oracle->add_option("--eps", oa.eps, "Certificate tolerance")->capture_default_str();
  oracle->add_option("--alpha", oa.alpha, "Common product quality");
  oracle->add_option("--damping", oa.damping, "Step weight in (0,1]; default min(0.5, c)");
  oracle->add_option("--search-radius", oa.search_radius,
                     "MLF-NE only: limit firm moves to this window (0 = whole range)");
  oracle->add_flag("--no-certify", oa.no_certify, "Report without enforcing --eps");
  oracle->add_option("--population-out", oa.population_out, "Write u0,u_final CSV");
  oracle->add_flag("--json", oa.json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*solve) return run_solve(sa);
    if (*sweep) return run_sweep(wa);
    if (*compare) return run_compare(ca);
    if (*oracle) return run_oracle(oa);
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "mfduopoly: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInput;
}
