#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "mfduopoly/mfduopoly.h"

namespace {

std::string tmp(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("c-api") {

TEST_CASE("params and errors") {
  mfd_params* p = nullptr;
  REQUIRE(mfd_params_create(1.0, &p) == MFD_OK);
  double v = 0;
  CHECK(mfd_params_get(p, "c", &v) == MFD_OK);
  CHECK(v == 1.0);
  CHECK(mfd_params_set(p, "alpha", 0.3) == MFD_OK);
  CHECK(mfd_params_set(p, "gamma", 2.0) == MFD_ERR_INPUT);
  CHECK(std::string(mfd_last_error()).find("gamma") != std::string::npos);
  CHECK(mfd_params_get(p, "gamma", &v) == MFD_OK);
  CHECK(v == 0.0);
  CHECK(mfd_params_set(p, "nope", 1.0) == MFD_ERR_INPUT);
  mfd_params_destroy(p);

  mfd_params* bad = nullptr;
  CHECK(mfd_params_create(-1.0, &bad) == MFD_ERR_INPUT);
  CHECK(bad == nullptr);
  CHECK(mfd_params_create(1.0, nullptr) == MFD_ERR_INPUT);
  mfd_params_destroy(nullptr);
  CHECK(std::string(mfd_status_name(MFD_ERR_SOLVER)) == "solver error");
}

TEST_CASE("solve through handles") {
  mfd_params* p = nullptr;
  mfd_dist* d = nullptr;
  REQUIRE(mfd_params_create(1.0, &p) == MFD_OK);
  REQUIRE(mfd_dist_mean_only(0.5, &d) == MFD_OK);
  mfd_equilibrium* eq = nullptr;
  REQUIRE(mfd_solve(MFD_KIND_NE, p, d, 0.0, &eq) == MFD_OK);
  mfd_equilibrium_info info;
  REQUIRE(mfd_equilibrium_info_get(eq, &info) == MFD_OK);
  CHECK(info.u1 == doctest::Approx(1.0));
  CHECK(info.mu_bar == doctest::Approx(0.5));
  CHECK(info.cost1 == doctest::Approx(-0.5));
  CHECK(info.method == MFD_METHOD_BISECTION);
  CHECK(info.converged == 1);
  double un = 0, cl = 0;
  CHECK(mfd_equilibrium_policy(eq, 0.5, &un, &cl) == MFD_OK);
  CHECK(cl == doctest::Approx(0.5));
  mfd_certificate cert;
  CHECK(mfd_equilibrium_certify(eq, 1000, 0, 100, 11, &cert) == MFD_OK);
  CHECK(cert.firm1_gain <= 1e-8);
  mfd_equilibrium_destroy(eq);

  REQUIRE(mfd_solve(MFD_KIND_MLFNE, p, d, 0.0, &eq) == MFD_OK);
  REQUIRE(mfd_equilibrium_info_get(eq, &info) == MFD_OK);
  CHECK(info.u1 == doctest::Approx(0.6611874208).epsilon(1e-9));
  CHECK(info.method == MFD_METHOD_CLOSED_FORM);
  mfd_equilibrium_destroy(eq);

  CHECK(mfd_solve(static_cast<mfd_kind>(7), p, d, 0.0, &eq) == MFD_ERR_INPUT);
  CHECK(mfd_solve(MFD_KIND_NE, nullptr, d, 0.0, &eq) == MFD_ERR_INPUT);
  double gap = 0;
  CHECK(mfd_ne_gap(0.0, 1.0, 0.5, &gap) == MFD_OK);
  CHECK(gap < 0.0);
  mfd_dist_destroy(d);
  mfd_params_destroy(p);
}

TEST_CASE("distributions") {
  const double values[] = {0.2, 0.8};
  const double weights[] = {0.5, 0.5};
  mfd_dist* d = nullptr;
  REQUIRE(mfd_dist_atoms(values, weights, 2, &d) == MFD_OK);
  CHECK(mfd_dist_mean(d) == doctest::Approx(0.5));
  mfd_dist_destroy(d);
  const double heavy[] = {0.9, 0.9};
  CHECK(mfd_dist_atoms(values, heavy, 2, &d) == MFD_ERR_INPUT);
  CHECK(mfd_dist_load_csv("/nonexistent/x.csv", &d) == MFD_ERR_IO);
  CHECK(mfd_dist_mean_only(2.0, &d) == MFD_ERR_INPUT);
}

TEST_CASE("value parsing with count query") {
  size_t n = 0;
  REQUIRE(mfd_parse_values("log:0.01:10:31", nullptr, 0, &n) == MFD_OK);
  CHECK(n == 31);
  std::vector<double> v(n);
  REQUIRE(mfd_parse_values("log:0.01:10:31", v.data(), v.size(), &n) == MFD_OK);
  CHECK(v.front() == doctest::Approx(0.01));
  CHECK(mfd_parse_values("x", nullptr, 0, &n) == MFD_ERR_INPUT);
  REQUIRE(mfd_default_u0_grid(nullptr, 0, &n) == MFD_OK);
  CHECK(n == 11);
}

TEST_CASE("sweep and compare") {
  const double cs[] = {0.01, 1.0};
  const double us[] = {0.3, 0.5};
  mfd_sweep* s = nullptr;
  REQUIRE(mfd_sweep_run(cs, 2, us, 2, 3u, 0.0, 1, &s) == MFD_OK);
  CHECK(mfd_sweep_size(s) == 8);
  CHECK(mfd_sweep_failures(s) == 0);
  mfd_sweep_row row;
  REQUIRE(mfd_sweep_row_get(s, 0, &row) == MFD_OK);
  CHECK(row.kind == MFD_KIND_NE);
  CHECK(row.error == nullptr);
  CHECK(mfd_sweep_row_get(s, 8, &row) == MFD_ERR_INPUT);
  const std::string path = tmp("mfd_capi_sweep.csv");
  REQUIRE(mfd_sweep_write_csv(s, path.c_str()) == MFD_OK);

  mfd_sweep* back = nullptr;
  REQUIRE(mfd_sweep_read_csv(path.c_str(), &back) == MFD_OK);
  CHECK(mfd_sweep_size(back) == 8);
  mfd_comparison* cmp = nullptr;
  REQUIRE(mfd_compare(back, &cmp) == MFD_OK);
  CHECK(mfd_comparison_size(cmp) == 4);
  mfd_comparison_row cr;
  REQUIRE(mfd_comparison_row_get(cmp, 0, &cr) == MFD_OK);
  CHECK(cr.c == doctest::Approx(0.01));
  CHECK(cr.u0_mean == doctest::Approx(0.3));
  CHECK(cr.leader_flip == 1);
  CHECK(mfd_comparison_write_csv(cmp, tmp("mfd_capi_cmp.csv").c_str()) == MFD_OK);
  CHECK(mfd_comparison_write_csv(cmp, "/nonexistent/dir/x.csv") == MFD_ERR_IO);
  mfd_comparison_destroy(cmp);
  mfd_sweep_destroy(back);

  mfd_sweep* only_ne = nullptr;
  REQUIRE(mfd_sweep_run(cs, 2, us, 2, 1u, 0.0, 1, &only_ne) == MFD_OK);
  CHECK(mfd_compare(only_ne, &cmp) == MFD_ERR_INPUT);
  mfd_sweep_destroy(only_ne);
  CHECK(mfd_sweep_run(cs, 2, us, 2, 4u, 0.0, 1, &only_ne) == MFD_ERR_INPUT);
  mfd_sweep_destroy(s);
}

TEST_CASE("oracle") {
  mfd_params* p = nullptr;
  mfd_dist* d = nullptr;
  REQUIRE(mfd_params_create(1.0, &p) == MFD_OK);
  REQUIRE(mfd_dist_mean_only(0.5, &d) == MFD_OK);
  mfd_oracle_options o = mfd_oracle_options_default();
  o.seed = 9;
  mfd_oracle* r = nullptr;
  REQUIRE(mfd_oracle_run(MFD_KIND_NE, 100, p, d, 1e-8, 1, &o, &r) == MFD_OK);
  mfd_oracle_info info;
  REQUIRE(mfd_oracle_info_get(r, &info) == MFD_OK);
  CHECK(info.n == 100);
  CHECK(info.u1 == doctest::Approx(1.0).epsilon(0.02));
  CHECK(info.converged == 1);
  CHECK(mfd_oracle_write_population(r, tmp("mfd_capi_pop.csv").c_str()) == MFD_OK);
  mfd_oracle_destroy(r);

  o.max_sweeps = 3;
  CHECK(mfd_oracle_run(MFD_KIND_NE, 100, p, d, 1e-8, 1, &o, &r) == MFD_ERR_SOLVER);
  CHECK(std::string(mfd_last_error()).find("did not converge") != std::string::npos);
  REQUIRE(mfd_oracle_run(MFD_KIND_NE, 100, p, d, 1e-8, 0, &o, &r) == MFD_OK);
  REQUIRE(mfd_oracle_info_get(r, &info) == MFD_OK);
  CHECK(info.converged == 0);
  mfd_oracle_destroy(r);
  CHECK(mfd_oracle_run(MFD_KIND_NE, 1, p, d, 1e-8, 1, nullptr, &r) == MFD_ERR_INPUT);
  mfd_dist_destroy(d);
  mfd_params_destroy(p);
}

}
