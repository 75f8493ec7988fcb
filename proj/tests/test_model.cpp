#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mfduopoly/errors.hpp"
#include "mfduopoly/model.hpp"
#include "oracles.hpp"

using namespace mfd;

namespace {

const ModelParams kCanon{};

std::filesystem::path temp_file(const char* name, const char* text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

InitialDistribution uniform_atoms(int n) {
  std::vector<Atom> atoms;
  for (int i = 0; i < n; ++i) atoms.push_back({(i + 0.5) / n, 1.0 / n});
  return InitialDistribution::atoms(atoms);
}

}  // namespace

TEST_SUITE("core-model") {

TEST_CASE("params validation and canonical predicate") {
  CHECK(kCanon.canonical());
  CHECK_NOTHROW(kCanon.validate());
  ModelParams p;
  p.c = 0.0;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.gamma = 1.5;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.alpha = -0.1;
  CHECK_THROWS_AS(p.validate(), InputError);
  p = {};
  p.eta = 2.0;
  CHECK_NOTHROW(p.validate());
  CHECK_FALSE(p.canonical());
  p = ModelParams::with_cost(3.0, 0.4);
  CHECK(p.canonical());
}

TEST_CASE("minor_cost examples") {
  CHECK(minor_cost(0.5, 0.5, 0.5, 1, 1, kCanon) == doctest::Approx(-0.75).epsilon(1e-15));
  CHECK(minor_cost(0, 0, 0, 0, 0, kCanon) == doctest::Approx(0.5));
  const auto f = [](double u) { return minor_cost(u, 0.0, 0.4, 0.2, 0.1, kCanon); };
  CHECK(oracle::grid_argmin(f, 0.0, 1.0, 1000000).x == doctest::Approx(0.375).epsilon(2e-6));
  CHECK_THROWS_AS(minor_cost(1.5, 0, 0, 0, 0, kCanon), InputError);
  CHECK_THROWS_AS(minor_cost(0.5, 0, 0, -1, 0, kCanon), InputError);
}

TEST_CASE("minor_cost matches the hand-written form") {
  auto g = oracle::rng(11);
  for (int i = 0; i < 200; ++i) {
    const double u = oracle::uniform(g, 0, 1), u0 = oracle::uniform(g, 0, 1);
    const double mu = oracle::uniform(g, 0, 1), u1 = oracle::uniform(g, 0, 3);
    const double u2 = oracle::uniform(g, 0, 3), alpha = oracle::uniform(g, 0, 2);
    CHECK(minor_cost(u, u0, mu, u1, u2, ModelParams::with_cost(1, alpha)) ==
          doctest::Approx(oracle::minor_cost(u, u0, mu, u1, u2, alpha)).epsilon(1e-13));
  }
}

TEST_CASE("major_cost examples") {
  CHECK(major_cost(Firm::One, 1, 1, 0.5, kCanon) == doctest::Approx(-0.5));
  CHECK(major_cost(Firm::One, 0, 0, 0, kCanon) == doctest::Approx(-1.0));
  CHECK(major_cost(Firm::Two, 1, 1, 0.5, kCanon) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(major_cost(Firm::One, -1, 0, 0, kCanon), InputError);
  CHECK_THROWS_AS(major_cost(Firm::Two, 0, -0.5, 0, kCanon), InputError);
}

TEST_CASE("minor_best_response examples") {
  CHECK(minor_best_response(0.5, 1, 1, 0.5) == doctest::Approx(0.5));
  CHECK(minor_best_response(0.5, 3, 0, 1) == 1.0);
  CHECK(minor_best_response(0.4, 0.2, 0.1, 0) == doctest::Approx(0.375));
  CHECK(minor_best_response(0.0, 0, 3, 0) == 0.0);
}

TEST_CASE("minor_best_response is the grid argmin and lies in [0,1]") {
  auto g = oracle::rng(5);
  for (int i = 0; i < 60; ++i) {
    const double mu = oracle::uniform(g, 0, 1), u0 = oracle::uniform(g, 0, 1);
    const double u1 = oracle::uniform(g, 0, 3), u2 = oracle::uniform(g, 0, 3);
    const double br = minor_best_response(mu, u1, u2, u0);
    REQUIRE(br >= 0.0);
    REQUIRE(br <= 1.0);
    const auto f = [&](double u) { return oracle::minor_cost(u, u0, mu, u1, u2); };
    CHECK(std::abs(oracle::grid_argmin(f, 0, 1, 100000).x - br) <= 1e-5);
  }
}

TEST_CASE("general-parameter consumer response minimizes the cost") {
  auto g = oracle::rng(6);
  for (int i = 0; i < 40; ++i) {
    ModelParams p;
    p.beta = oracle::uniform(g, 0.2, 3);
    p.eta = oracle::uniform(g, 0.2, 3);
    p.gamma = oracle::uniform(g, 0, 1);
    p.alpha = oracle::uniform(g, 0, 1);
    const double mu = oracle::uniform(g, 0, 1), u0 = oracle::uniform(g, 0, 1);
    const double u1 = oracle::uniform(g, 0, 3), u2 = oracle::uniform(g, 0, 3);
    const double br = minor_best_response(mu, u1, u2, u0, p);
    const auto f = [&](double u) { return minor_cost(u, u0, mu, u1, u2, p); };
    CHECK(std::abs(oracle::grid_argmin(f, 0, 1, 100000).x - br) <= 1e-5);
  }
}

TEST_CASE("FOC vanishes at the unclipped response") {
  auto g = oracle::rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double mu = oracle::uniform(g, 0, 1), u0 = oracle::uniform(g, 0, 1);
    const double u1 = oracle::uniform(g, 0, 1), u2 = oracle::uniform(g, 0, 1);
    const double x = MinorPolicy{mu, u1, u2}.unclipped(u0);
    // The cost is a polynomial in u_c, so evaluating it outside [0,1] is harmless.
    const auto f = [&](double u) { return oracle::minor_cost(u, u0, mu, u1, u2); };
    CHECK(std::abs(oracle::central_diff(f, x)) <= 1e-6);
  }
}

TEST_CASE("analytic derivatives match central differences") {
  auto g = oracle::rng(8);
  for (int i = 0; i < 300; ++i) {
    const double u = oracle::uniform(g, 0.01, 0.99), u0 = oracle::uniform(g, 0, 1);
    const double mu = oracle::uniform(g, 0, 1), u1 = oracle::uniform(g, 0.01, 4);
    const double u2 = oracle::uniform(g, 0.01, 4);
    const ModelParams p = ModelParams::with_cost(oracle::uniform(g, 0.05, 5));
    const auto fm = [&](double x) { return minor_cost(x, u0, mu, u1, u2, p); };
    CHECK(minor_cost_derivative(u, u0, mu, u1, u2, p) ==
          doctest::Approx(oracle::central_diff(fm, u)).epsilon(1e-6));
    const auto f1 = [&](double x) { return major_cost(Firm::One, x, u2, mu, p); };
    CHECK(std::abs(major_cost_derivative(Firm::One, u1, u2, mu, p) -
                   oracle::central_diff(f1, u1)) <= 1e-6);
    const auto f2 = [&](double x) { return major_cost(Firm::Two, x, u1, mu, p); };
    CHECK(std::abs(major_cost_derivative(Firm::Two, u2, u1, mu, p) -
                   oracle::central_diff(f2, u2)) <= 1e-6);
  }
}

TEST_CASE("strict convexity") {
  auto g = oracle::rng(9);
  for (int i = 0; i < 200; ++i) {
    const double u = oracle::uniform(g, 0.01, 0.99), u0 = oracle::uniform(g, 0, 1);
    const double mu = oracle::uniform(g, 0, 1), u1 = oracle::uniform(g, 0.01, 4);
    const double u2 = oracle::uniform(g, 0.01, 4), c = oracle::uniform(g, 0.05, 5);
    const ModelParams p = ModelParams::with_cost(c);
    CHECK(oracle::second_diff([&](double x) { return minor_cost(x, u0, mu, u1, u2, p); },
                              u) > 0.0);
    const double d2 =
        oracle::second_diff([&](double x) { return major_cost(Firm::One, x, u2, mu, p); }, u1);
    CHECK(d2 == doctest::Approx(c).epsilon(1e-5));
  }
}

TEST_CASE("policy is clipped and nondecreasing in u0") {
  const MinorPolicy pol{0.3, 2.0, 0.1};
  double prev = -1.0;
  for (int k = 0; k <= 100; ++k) {
    const double v = pol(k / 100.0);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("clipping masses") {
  const auto unif = uniform_atoms(50);
  auto m = clipping_masses(0.5, 1.3, 1.3, unif);
  CHECK(m.lower == 0.0);
  CHECK(m.upper == 0.0);
  m = clipping_masses(0.0, 5.0, 0.0, unif);
  CHECK(m.lower == 0.0);
  CHECK(m.upper == doctest::Approx(1.0));
  m = clipping_masses(0.0, 0.0, 3.0, unif);
  CHECK(m.lower == doctest::Approx(1.0));
  CHECK(m.upper == 0.0);
  CHECK_THROWS_AS(clipping_masses(0.5, 1, 1, InitialDistribution::mean_only(0.5)),
                  UnsupportedDistributionError);
}

TEST_CASE("mean-field fixed point examples") {
  CHECK(mean_field_fixed_point(1.2, 1.2, InitialDistribution::mean_only(0.5)).mu_bar ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mean_field_fixed_point(5, 0, uniform_atoms(20)).mu_bar == doctest::Approx(1.0));
  CHECK(mean_field_fixed_point(1, 1, InitialDistribution::mean_only(0.2)).mu_bar ==
        doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("fixed point residual, monotonicity and mirror symmetry") {
  const auto unif = uniform_atoms(40);
  std::vector<Atom> skew{{0.05, 0.5}, {0.6, 0.3}, {0.95, 0.2}};
  const auto sk = InitialDistribution::atoms(skew);
  for (const auto* d : {&unif, &sk}) {
    double prev = -1.0;
    for (int k = -40; k <= 40; ++k) {
      const double diff = k / 10.0;
      const double u1 = std::max(0.0, diff), u2 = std::max(0.0, -diff);
      const auto s = mean_field_fixed_point(u1, u2, *d);
      CHECK(std::abs(s.mu_bar - mean_field_map(s.mu_bar, u1, u2, *d)) <= 1e-12);
      CHECK(s.mu_bar >= prev);
      prev = s.mu_bar;
      const auto r = mean_field_fixed_point(u2, u1, d->reflected());
      CHECK(std::abs(r.mu_bar - (1.0 - s.mu_bar)) <= 1e-10);
    }
  }
  double prev = -1.0;
  for (int k = 0; k <= 20; ++k) {
    const double mu = mean_field_fixed_point(0.7, 1.1, InitialDistribution::mean_only(k / 20.0))
                          .mu_bar;
    CHECK(mu >= prev);
    prev = mu;
  }
}

TEST_CASE("distribution construction") {
  CHECK_THROWS_AS(InitialDistribution::mean_only(1.2), InputError);
  CHECK_THROWS_AS(InitialDistribution::atoms({{0.2, 0.5}, {0.4, 0.4}}), InputError);
  CHECK_THROWS_AS(InitialDistribution::atoms({{1.2, 1.0}}), InputError);
  CHECK_THROWS_AS(InitialDistribution::atoms({{0.2, 1.0}, {0.4, 0.0}}), InputError);
  const auto d = InitialDistribution::atoms({{0.2, 0.25}, {0.6, 0.75}});
  CHECK(d.mean() == doctest::Approx(0.5));
  CHECK(d.reflected().mean() == doctest::Approx(0.5));
  CHECK(InitialDistribution::mean_only(0.3).support().size() == 1);
  CHECK_THROWS_AS(InitialDistribution::mean_only(0.3).atoms(), UnsupportedDistributionError);
}

TEST_CASE("distribution CSV loading") {
  const auto ok = temp_file("mfd_ok.csv", "value,weight\n0.1,0.5\n0.9,0.5000004\n");
  const auto d = InitialDistribution::load_csv(ok);
  CHECK(d.atoms().size() == 2);
  CHECK(d.atoms()[0].weight + d.atoms()[1].weight == doctest::Approx(1.0).epsilon(1e-15));

  const auto bad_sum = temp_file("mfd_sum.csv", "value,weight\n0.1,0.5\n0.9,0.4\n");
  CHECK_THROWS_AS(InitialDistribution::load_csv(bad_sum), InputError);
  const auto bad_header = temp_file("mfd_hdr.csv", "x,y\n0.1,1\n");
  CHECK_THROWS_AS(InitialDistribution::load_csv(bad_header), InputError);
  const auto bad_value = temp_file("mfd_val.csv", "value,weight\n1.5,1\n");
  CHECK_THROWS_AS(InitialDistribution::load_csv(bad_value), InputError);
  CHECK_THROWS_AS(InitialDistribution::load_csv("/nonexistent/mfd.csv"), IoError);
}

}
