#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "chainmix/concentration.hpp"
#include "chainmix/rng.hpp"

using namespace chainmix;

TEST_CASE("mg_tail_bound values and clamping") {
  CHECK(mg_tail_bound(0.0, {1.0, 1.0}) == 1.0);
  CHECK(mg_tail_bound(2.0, {1.0, 0.0}) ==
        doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(mg_tail_bound(20.0, {50.0, 2.0}) ==
        doctest::Approx(2.0 * std::exp(-400.0 / (100.0 + 80.0 / 3.0)))
            .epsilon(1e-14));
  CHECK(mg_tail_bound(1.0, {0.0, 0.0}) == 0.0);  // degenerate bound
  CHECK(mg_tail_bound(1e-9, {1.0, 0.0}) == 1.0);  // clamped
  CHECK_THROWS_AS(mg_tail_bound(-1.0, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(mg_tail_bound(1.0, {-1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("mg_tail_bound monotonicity") {
  double prev = 2.0;
  for (double m = 0.0; m <= 30.0; m += 0.25) {
    const double v = mg_tail_bound(m, {5.0, 0.5});
    CHECK(v <= prev + 1e-15);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
  // Non-decreasing in delta and gamma.
  for (double m : {1.0, 5.0, 12.0}) {
    CHECK(mg_tail_bound(m, {2.0, 1.0}) >= mg_tail_bound(m, {1.0, 1.0}));
    CHECK(mg_tail_bound(m, {1.0, 2.0}) >= mg_tail_bound(m, {1.0, 1.0}));
  }
}

TEST_CASE("discrete_chain_tail_bound reduces to mg_tail_bound exactly") {
  for (double m = 0.0; m <= 25.0; m += 0.5)
    CHECK(discrete_chain_tail_bound(m, {50.0, 1.0, 10}) ==
          mg_tail_bound(m, {50.0, 2.0}));
  // Doubling a_k can only weaken the bound.
  for (double m : {1.0, 10.0, 20.0})
    CHECK(discrete_chain_tail_bound(m, {100.0, 1.0, 10}) >=
          discrete_chain_tail_bound(m, {50.0, 1.0, 10}));
}

TEST_CASE("continuous_chain_tail_bound") {
  CHECK(continuous_chain_tail_bound(0.0, {1.0, 0.0, 1.0}) == 1.0);
  CHECK(continuous_chain_tail_bound(2.0, {1.0, 0.0, 1.0}) ==
        doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));
  double prev = 2.0;
  for (double m = 0.0; m < 40.0; m += 1.0) {
    const double v = continuous_chain_tail_bound(m, {3.0, 0.7, 1.0});
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("contractive_bound denominators per mode") {
  SUBCASE("discrete a") {
    const double rho = 0.02;
    const double denom = 2.0 / (2.0 * rho - rho * rho) + 4.0 * 20.0 / 3.0;
    CHECK(contractive_bound(20.0, {1.0, 1.0, rho, {}, {}, {}},
                            ContractiveMode::discrete_a) ==
          doctest::Approx(2.0 * std::exp(-400.0 / denom)).epsilon(1e-14));
  }
  SUBCASE("continuous a") {
    CHECK(contractive_bound(3.0, {1.0, 1.0, 1.0, 1.0, {}, {}},
                            ContractiveMode::continuous_a) ==
          doctest::Approx(2.0 * std::exp(-3.0)).epsilon(1e-14));
  }
  SUBCASE("b modes with b = 0 reduce to the a modes") {
    const ContractiveParams pa{1.5, 2.0, 0.3, {}, {}, {}};
    const ContractiveParams pb{1.5, 2.0, 0.3, {}, 0.0, 25.0};
    for (double m : {0.5, 2.0, 10.0})
      CHECK(contractive_bound(m, pb, ContractiveMode::discrete_b) ==
            doctest::Approx(contractive_bound(m, pa,
                                              ContractiveMode::discrete_a))
                .epsilon(1e-14));
    const ContractiveParams ca{1.5, 2.0, 0.3, 4.0, {}, {}};
    const ContractiveParams cb{1.5, 2.0, 0.3, 4.0, 0.0, 25.0};
    for (double m : {0.5, 2.0, 10.0})
      CHECK(contractive_bound(m, cb, ContractiveMode::continuous_b) ==
            doctest::Approx(contractive_bound(m, ca,
                                              ContractiveMode::continuous_a))
                .epsilon(1e-14));
  }
  SUBCASE("a positive b strictly weakens the bound") {
    const ContractiveParams pb{1.0, 1.0, 0.5, {}, 0.5, 10.0};
    const ContractiveParams pa{1.0, 1.0, 0.5, {}, {}, {}};
    CHECK(contractive_bound(10.0, pb, ContractiveMode::discrete_b) >
          contractive_bound(10.0, pa, ContractiveMode::discrete_a));
  }
  SUBCASE("mode-required fields") {
    CHECK_THROWS_AS(contractive_bound(1.0, {1.0, 1.0, 0.5, {}, {}, {}},
                                      ContractiveMode::continuous_a),
                    std::invalid_argument);
    CHECK_THROWS_AS(contractive_bound(1.0, {1.0, 1.0, 0.5, {}, 1.0, {}},
                                      ContractiveMode::discrete_b),
                    std::invalid_argument);
    CHECK_THROWS_AS(contractive_bound(1.0, {1.0, 1.0, 1.5, {}, {}, {}},
                                      ContractiveMode::discrete_a),
                    std::invalid_argument);
  }
}

TEST_CASE("urn-chain contractive bound is dominated by the Gaussian form") {
  // L = D = 1, rho = 2/n: the bound at m = c sqrt(n) is <= 2 e^{-c^2/2}
  // for 0 <= c <= 3 sqrt(n) / 4.
  for (int n : {10, 100, 1000}) {
    const double rho = 2.0 / n;
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double c_max = 0.75 * sqrt_n;
    for (int i = 0; i <= 50; ++i) {
      const double c = c_max * i / 50.0;
      const double lhs = contractive_bound(
          c * sqrt_n, {1.0, 1.0, rho, {}, {}, {}},
          ContractiveMode::discrete_a);
      CHECK(lhs <= std::min(1.0, 2.0 * std::exp(-c * c / 2.0)) + 1e-12);
    }
  }
}

TEST_CASE("hitting_time_bound") {
  CHECK(hitting_time_bound({1.0, 4.0, 1.0, 1.0, 100.0, 0.0}) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // eta sqrt(r t0) < B forces the clamp.
  CHECK(hitting_time_bound({1.0, 100.0, 50.0, 1.0, 0.0001, 1.0}) == 1.0);
  CHECK(hitting_time_bound({1.0, 25.0, 1.0, 1.0, 2500.0, 1.0}) ==
        doctest::Approx(0.2 + std::pow(1.0 / 250.0, 0.25)).epsilon(1e-12));
  CHECK_THROWS_AS(hitting_time_bound({1.0, 25.0, 0.5, 1.0, 2500.0, 1.0}),
                  std::invalid_argument);  // B < eta
  CHECK_THROWS_AS(hitting_time_bound({1.0, 0.0, 1.0, 1.0, 2500.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("heuristic_excursion_constant") {
  const std::vector<double> values{0.5, -2.5, 1.0};
  CHECK(heuristic_excursion_constant(values) == 2.5);
  CHECK(heuristic_excursion_constant(std::vector<double>{}) == 0.0);
}

TEST_CASE("empirical_tail_verify on degenerate samplers") {
  const std::vector<double> m_grid{0.5, 1.0, 2.0};
  SUBCASE("constant sampler") {
    const auto report = empirical_tail_verify(
        [](SeedSpec) { return 3.0; }, 3.0, m_grid,
        [](double) { return 0.0; }, 1000, SeedSpec{1, 0});
    REQUIRE(report.rows.size() == 3);
    for (const auto& row : report.rows) {
      CHECK(row.empirical == 0.0);
      CHECK(row.pass);
    }
    CHECK(report.all_pass());
  }
  SUBCASE("fair +-1 sampler, m = 2 is out of range") {
    const auto report = empirical_tail_verify(
        [](SeedSpec s) { return Rng(s).uniform() < 0.5 ? -1.0 : 1.0; }, 0.0,
        std::vector<double>{2.0}, [](double) { return 0.0; }, 2000,
        SeedSpec{2, 0});
    CHECK(report.rows[0].empirical == 0.0);
    CHECK(report.all_pass());
  }
  SUBCASE("deterministic given seed") {
    auto sampler = [](SeedSpec s) { return Rng(s).uniform(); };
    auto bound = [](double) { return 1.0; };
    const auto r1 =
        empirical_tail_verify(sampler, 0.5, m_grid, bound, 1000, SeedSpec{3, 0});
    const auto r2 =
        empirical_tail_verify(sampler, 0.5, m_grid, bound, 1000, SeedSpec{3, 0});
    for (std::size_t i = 0; i < r1.rows.size(); ++i)
      CHECK(r1.rows[i].empirical == r2.rows[i].empirical);
  }
  SUBCASE("sample floor enforced") {
    CHECK_THROWS_AS(
        empirical_tail_verify([](SeedSpec) { return 0.0; }, 0.0, m_grid,
                              [](double) { return 1.0; }, 10, SeedSpec{4, 0}),
        std::invalid_argument);
  }
}

TEST_CASE("walk_hitting_experiment") {
  const std::vector<double> t0s{4.0, 9.0};
  const auto rows = walk_hitting_experiment(1.0, 100.0, t0s, 1000,
                                            SeedSpec{5, 0});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].t0 == 4.0);
  CHECK(rows[0].bound ==
        doctest::Approx(hitting_time_bound({1.0, 4.0, 1.0, 1.0, 100.0, 1.0})));
  // Miss probability cannot increase with the horizon on shared trials.
  CHECK(rows[1].empirical <= rows[0].empirical);
  const auto again = walk_hitting_experiment(1.0, 100.0, t0s, 1000,
                                             SeedSpec{5, 0});
  CHECK(rows[0].empirical == again[0].empirical);
  CHECK_THROWS_AS(walk_hitting_experiment(1.0, 100.0, t0s, 10, SeedSpec{5, 0}),
                  std::invalid_argument);
}
