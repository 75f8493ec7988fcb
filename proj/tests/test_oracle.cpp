#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "mfduopoly/errors.hpp"
#include "mfduopoly/finite_oracle.hpp"
#include "mfduopoly/mlfne_solver.hpp"
#include "mfduopoly/ne_solver.hpp"
#include "oracles.hpp"

using namespace mfd;

namespace {

const ModelParams kCanon{};

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_SUITE("finite-oracle") {

TEST_CASE("consumer_br_finite examples") {
  FinitePopulation pop{{0.5, 0.5}, {0.5, 0.5}, 1.0, 1.0};
  CHECK(consumer_br_finite(0, pop, kCanon) == doctest::Approx(0.5));
  CHECK(consumer_br_finite(1, pop, kCanon) == doctest::Approx(0.5));
  pop.u1 = 5.0;
  pop.u2 = 0.0;
  CHECK(consumer_br_finite(0, pop, kCanon) == 1.0);
  CHECK_THROWS_AS(consumer_br_finite(2, pop, kCanon), InputError);
}

TEST_CASE("consumer_br_finite matches a fine grid search") {
  auto g = oracle::rng(31);
  for (int t = 0; t < 10; ++t) {
    FinitePopulation pop;
    for (int i = 0; i < 7; ++i) {
      pop.u0.push_back(oracle::uniform(g, 0, 1));
      pop.u.push_back(oracle::uniform(g, 0, 1));
    }
    pop.u1 = oracle::uniform(g, 0, 2);
    pop.u2 = oracle::uniform(g, 0, 2);
    const std::size_t i = t % 7;
    const double others = (std::accumulate(pop.u.begin(), pop.u.end(), 0.0) - pop.u[i]) / 6.0;
    const auto f = [&](double u) {
      return oracle::minor_cost(u, pop.u0[i], others, pop.u1, pop.u2);
    };
    CHECK(std::abs(oracle::grid_argmin(f, 0, 1, 100000).x -
                   consumer_br_finite(i, pop, kCanon)) <= 1e-5);
  }
}

TEST_CASE("best_response_sweep") {
  const auto sol = solve_ne(kCanon, InitialDistribution::mean_only(0.5));
  FinitePopulation pop;
  const std::size_t n = 50;
  pop.u0 = sample_initial_preferences(InitialDistribution::mean_only(0.5), n);
  for (double u0 : pop.u0) pop.u.push_back(sol.policy(u0));
  pop.u1 = sol.u1;
  pop.u2 = sol.u2;
  const auto next = best_response_sweep(pop, kCanon, 1.0);
  double change = std::abs(next.u1 - pop.u1) + std::abs(next.u2 - pop.u2);
  for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next.u[i] - pop.u[i]));
  CHECK(change <= 2.0 / n);

  FinitePopulation sym{{0.2, 0.8}, {0.3, 0.7}, 1.3, 1.3};
  const auto s = best_response_sweep(sym, kCanon, 1.0);
  CHECK(s.u[0] == doctest::Approx(1.0 - s.u[1]).epsilon(1e-15));
  CHECK(s.u1 == s.u2);

  CHECK_THROWS_AS(best_response_sweep(sym, kCanon, 0.0), InputError);
  CHECK_THROWS_AS(best_response_sweep(sym, kCanon, 1.5), InputError);
  FinitePopulation bad{{0.5}, {0.5}, 1.0, 1.0};
  CHECK_THROWS_AS(best_response_sweep(bad, kCanon, 0.5), InputError);
}

TEST_CASE("sampling is deterministic with the right mean") {
  for (double m : {0.0, 0.1, 0.3, 0.5, 0.77, 1.0}) {
    const auto v = sample_initial_preferences(InitialDistribution::mean_only(m), 1000);
    CHECK(v.size() == 1000);
    CHECK(mean(v) == doctest::Approx(m).epsilon(1e-3));
    for (double x : v) CHECK((x >= 0.0 && x <= 1.0));
    CHECK(v == sample_initial_preferences(InitialDistribution::mean_only(m), 1000));
  }
  const auto d = InitialDistribution::atoms({{0.1, 1.0 / 3}, {0.5, 1.0 / 3}, {0.9, 1.0 / 3}});
  const auto v = sample_initial_preferences(d, 10);
  CHECK(v.size() == 10);
  CHECK(std::count(v.begin(), v.end(), 0.1) + std::count(v.begin(), v.end(), 0.5) +
            std::count(v.begin(), v.end(), 0.9) ==
        10);
  CHECK(std::count(v.begin(), v.end(), 0.1) >= 3);
}

TEST_CASE("settle_consumers reaches the consumers' equilibrium") {
  FinitePopulation pop = seeded_population(std::vector<double>(40, 0.3), 3);
  pop.u1 = 1.2;
  pop.u2 = 0.9;
  settle_consumers(pop, kCanon);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    CHECK(std::abs(pop.u[i] - consumer_br_finite(i, pop, kCanon)) <= 1e-13);
  }
  // Identical consumers share the mean-field answer exactly.
  CHECK(pop.mean_pref() ==
        doctest::Approx(mean_field_fixed_point(1.2, 0.9, InitialDistribution::point_mass(0.3))
                            .mu_bar)
            .epsilon(1e-12));
}

TEST_CASE("finite NE examples") {
  const auto at05 = InitialDistribution::point_mass(0.5);
  const auto r = solve_finite_ne(100, at05, kCanon, 1e-8);
  CHECK(r.u1 >= 0.98);
  CHECK(r.u1 <= 1.02);
  CHECK(r.u2 >= 0.98);
  CHECK(r.u2 <= 1.02);
  CHECK(r.mean_pref >= 0.49);
  CHECK(r.mean_pref <= 0.51);
  CHECK(r.converged);
  CHECK(r.max_unilateral_gain <= 1e-8);

  OracleOptions o;
  o.damping = 1.0;
  const auto two = solve_finite_ne(2, InitialDistribution::point_mass(0.5), kCanon, 1e-8, o);
  CHECK(two.u1 == doctest::Approx(two.u2).epsilon(1e-10));

  OracleOptions fixed;
  fixed.seed = 4;
  const auto a = run_finite_ne(200, InitialDistribution::mean_only(0.5), kCanon, fixed);
  CHECK(a.u1 == doctest::Approx(1.0).epsilon(0.02));
  const auto b = run_finite_ne(200, InitialDistribution::mean_only(0.5), kCanon, fixed);
  CHECK(a.u1 == b.u1);
  CHECK(a.u2 == b.u2);
  CHECK(a.population.u == b.population.u);
  CHECK(a.sweeps == b.sweeps);
}

TEST_CASE("finite NE mean preference approaches the mean-field answer") {
  const auto sol = solve_ne(kCanon, InitialDistribution::mean_only(0.3));
  for (std::size_t n : {10u, 50u, 250u, 1000u}) {
    const auto r = solve_finite_ne(n, InitialDistribution::mean_only(0.3), kCanon, 1e-8);
    CHECK(std::abs(r.mean_pref - sol.mu_bar) <= 5e-3);
  }
}

TEST_CASE("finite NE needs small steps at low cost") {
  OracleOptions o;
  o.damping = 0.5;
  o.max_sweeps = 2000;
  const auto d = InitialDistribution::point_mass(0.3);
  const auto ModelLow = ModelParams::with_cost(0.1);
  CHECK_THROWS_AS(solve_finite_ne(50, d, ModelLow, 1e-6, o), SolverError);
  const auto r = solve_finite_ne(50, d, ModelLow, 1e-6);
  CHECK(r.converged);
}

TEST_CASE("finite MLF-NE examples") {
  const auto r = solve_finite_mlfne(100, InitialDistribution::point_mass(0.5), kCanon, 1e-8);
  CHECK(std::abs(r.u1 - 0.6611874208078342) <= 0.02);
  CHECK(std::abs(r.u2 - 0.6611874208078342) <= 0.02);
  CHECK(r.u1 == doctest::Approx(r.u2).epsilon(1e-6));
  CHECK(r.max_unilateral_gain <= 1e-8);
}

TEST_CASE("finite MLF-NE at very low cost") {
  const auto d = InitialDistribution::point_mass(0.3);
  const auto low = ModelParams::with_cost(0.01);
  OracleOptions o;
  o.mlf_search_radius = 0.5;
  const auto local = run_finite_mlfne(100, d, low, o);
  CHECK(local.converged);
  CHECK(local.mean_pref > 0.5);
  CHECK(local.mean_pref == doctest::Approx(0.5226869235985248).epsilon(1e-6));
  // The local point is not a global equilibrium.
  CHECK(local.firm1_gain > 1.0);

  OracleOptions global;
  global.max_outer_rounds = 60;
  global.grid.firm_points = 200;
  CHECK_THROWS_AS(solve_finite_mlfne(20, d, low, 1e-6, global), SolverError);
}

TEST_CASE("population CSV export") {
  const auto r = run_finite_ne(5, InitialDistribution::point_mass(0.4), kCanon);
  const auto path = std::filesystem::temp_directory_path() / "mfd_pop.csv";
  write_population_csv(r.population, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "u0,u_final");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
  CHECK_THROWS_AS(write_population_csv(r.population, "/nonexistent/dir/pop.csv"), IoError);
}

TEST_CASE("oracle argument checks") {
  const auto d = InitialDistribution::point_mass(0.4);
  CHECK_THROWS_AS(run_finite_ne(1, d, kCanon), InputError);
  CHECK_THROWS_AS(solve_finite_ne(10, d, kCanon, 0.0), InputError);
  OracleOptions o;
  o.damping = 2.0;
  CHECK_THROWS_AS(run_finite_ne(10, d, kCanon, o), InputError);
}

}
