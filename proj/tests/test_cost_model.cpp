#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rova/cost_model.hpp"
#include "rova/error.hpp"
#include "rova/rng.hpp"

using namespace rova;

TEST_CASE("grpo step cost") {
  CostProfile p;
  CHECK(cost_grpo(p) == doctest::Approx(18.0));
  p.batch_size = 0;
  CHECK(cost_grpo(p) == 0.0);
  p = CostProfile{};
  p.c_bwd_factor = 0;
  CHECK(cost_grpo(p) == doctest::Approx(12.0));
}

TEST_CASE("naive per-sample cost") {
  CostProfile p;
  CHECK(cost_naive_per_sample(p) == doctest::Approx(43.8));
  p.c_api = 0;
  CHECK(cost_naive_per_sample(p) == doctest::Approx(42.0));
  p = CostProfile{};
  p.group_total = 1;
  CHECK(cost_naive_per_sample(p) == doctest::Approx(5.3));
  p = CostProfile{};
  p.include_pert = true;
  CHECK(cost_naive_per_sample(p) == doctest::Approx(43.85));
}

TEST_CASE("curriculum per-sample cost") {
  CostProfile p;
  CHECK(cost_rova_per_sample(p) == doctest::Approx(41.606));
  p.rho = 0;
  CHECK(cost_rova_per_sample(p) == doctest::Approx(24.4));
  p.rho = 1;
  CHECK(cost_rova_per_sample(p) == doctest::Approx(44.2));
  CHECK(cost_ratio(p).ratio == doctest::Approx(44.2 / 43.8));
  CHECK(cost_ratio(p).ratio > 1.0);
}

TEST_CASE("cost ratio and savings margin") {
  CostProfile p;
  auto r = cost_ratio(p);
  CHECK(std::abs(r.ratio - 0.950) <= 0.001);
  CHECK(r.saves);
  CHECK(r.breakeven_rho == doctest::Approx(1.0 - 0.4 / 19.8));
  CHECK(std::abs(r.breakeven_rho - 0.9798) < 1e-4);
  p.rho = r.breakeven_rho;
  CHECK(std::abs(cost_ratio(p).margin) < 1e-12);
  CHECK(cost_ratio(p).ratio == doctest::Approx(1.0));
}

TEST_CASE("approximate speedup") {
  CHECK(approx_speedup(0.6) == doctest::Approx(1.111).epsilon(0.001));
  CHECK(std::abs(approx_speedup(0.6) - 1.11) <= 0.01);
  CHECK(approx_speedup(0.8) == doctest::Approx(1.0));
  CHECK(approx_speedup(0.0) == doctest::Approx(1.6667).epsilon(1e-4));
  CHECK_THROWS_AS(approx_speedup(1.3), Error);
  CHECK_THROWS_AS(approx_speedup(-0.1), Error);
}

TEST_CASE("approximate and per-sample forms are separate predictions") {
  // Dropping the API and perturbation terms and charging 0.4 forward passes
  // per rollout for the judge leaves naive = 3.5 G and curriculum =
  // (2.4 + 1.5 rho) G; the approximate form instead bills training at 2 G.
  CostProfile p;
  p.c_api = 0;
  p.c_judge = 0.4 * p.group_total;
  for (double rho : {0.0, 0.3, 0.6, 0.9}) {
    p.rho = rho;
    double per_sample = cost_naive_per_sample(p) / cost_rova_per_sample(p);
    CHECK(per_sample == doctest::Approx(3.5 / (2.4 + 1.5 * rho)));
    CHECK(approx_speedup(rho) == doctest::Approx(4.0 / (2.4 + 2.0 * rho)));
  }
}

TEST_CASE("amortized re-evaluation") {
  CostProfile p;
  auto a = amortized_reeval_cost(p);
  CHECK(a.per_step == doctest::Approx(2.344));
  p.batch_size = 16;
  a = amortized_reeval_cost(p);
  CHECK(a.share == doctest::Approx(2.344 / (16 * 41.606)));
  CHECK(a.share < 0.01);
  p.buffer_size = 0;
  CHECK(amortized_reeval_cost(p).per_step == 0.0);
  p.reeval_period = 0;
  CHECK_THROWS_AS(amortized_reeval_cost(p), Error);
}

TEST_CASE("per-sample cost is strictly increasing in rho, c_judge, c_api and G_total") {
  CounterRng rng(1);
  for (int i = 0; i < 1000; ++i) {
    CostProfile p;
    p.rho = rng.uniform(0.0, 0.9);
    p.c_judge = rng.uniform(0.0, 2.0);
    p.c_api = rng.uniform(0.01, 2.0);
    p.group_total = 1 + static_cast<double>(rng.below(32));
    double base = cost_rova_per_sample(p);
    auto bumped = [&](auto mutate) {
      CostProfile q = p;
      mutate(q);
      return cost_rova_per_sample(q);
    };
    REQUIRE(bumped([](CostProfile& q) { q.rho += 0.05; }) > base);
    REQUIRE(bumped([](CostProfile& q) { q.c_judge += 0.1; }) > base);
    REQUIRE(bumped([](CostProfile& q) { q.c_api += 0.1; }) > base);
    REQUIRE(bumped([](CostProfile& q) { q.group_total += 1; }) > base);
  }
}

TEST_CASE("ratio below one exactly when the margin is positive") {
  CounterRng rng(2);
  for (int i = 0; i < 10000; ++i) {
    CostProfile p;
    p.rho = rng.uniform();
    p.c_judge = rng.uniform(0.0, 5.0);
    p.c_api = rng.uniform(0.0, 3.0);
    p.group_total = 1 + static_cast<double>(rng.below(40));
    auto r = cost_ratio(p);
    if (std::abs(r.margin) < 1e-12) continue;
    REQUIRE((r.ratio < 1.0) == (r.margin > 0));
    REQUIRE(r.naive - r.rova == doctest::Approx(r.margin));
  }
}

TEST_CASE("rho sweep") {
  auto rows = sweep_rho(CostProfile{}, 0.0, 1.0, 0.1);
  REQUIRE(rows.size() == 11);
  CHECK(rows.front().rho == 0.0);
  CHECK(rows.back().rho == doctest::Approx(1.0));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].ratio.ratio > rows[i - 1].ratio.ratio);
  CHECK(rows[9].ratio.ratio < 1.0);
  CHECK(rows[10].ratio.ratio > 1.0);
  auto j = to_json(rows[6]);
  CHECK(j.contains("speedup_approx"));
  CHECK(j.contains("speedup_per_sample"));
  CHECK_THROWS_AS(sweep_rho(CostProfile{}, 0.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(sweep_rho(CostProfile{}, 0.0, 1.5, 0.5), Error);
}

TEST_CASE("profile validation") {
  CostProfile p;
  CHECK_NOTHROW(p.validate());
  p.rho = 1.2;
  CHECK_THROWS_AS(p.validate(), Error);
  p = CostProfile{};
  p.group_total = 0.5;
  CHECK_THROWS_AS(p.validate(), Error);
  p = CostProfile{};
  p.c_api = -1;
  CHECK_THROWS_AS(p.validate(), Error);
}
