#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <utility>

#include "doctest.h"
#include "sysfree/errors.hpp"
#include "sysfree/freedom_pipeline.hpp"
#include "sysfree/surgery_geometry.hpp"

using namespace sysfree;
using namespace sysfree::pipeline;

namespace {

// Levels as exact fractions: twist i at (3n + 2(i - 1)) / (6n), homology j at
// (10g + j - 1) / (12g).
bool exact_levels_ok(std::int64_t n, std::int64_t g) {
  std::set<std::pair<std::int64_t, std::int64_t>> seen;  // reduced num/den
  auto add = [&](std::int64_t num, std::int64_t den) {
    const std::int64_t k = std::gcd(num, den);
    if (!(num > 0 && num < den)) return false;
    return seen.insert({num / k, den / k}).second;
  };
  for (std::int64_t i = 1; i <= n; ++i) {
    const std::int64_t num = 3 * n + 2 * (i - 1), den = 6 * n;
    if (6 * num >= 5 * den) return false;
    if (!add(num, den)) return false;
  }
  for (std::int64_t j = 1; j <= 2 * g; ++j) {
    const std::int64_t num = 10 * g + j - 1, den = 12 * g;
    if (6 * num < 5 * den) return false;
    if (!add(num, den)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("surgery levels") {
  CHECK(twist_level(1, 5) == 0.5);
  CHECK(homology_level(1, 7) == doctest::Approx(5.0 / 6.0));
  const auto lv = surgery_levels(3, 2);
  REQUIRE(lv.twist_levels.size() == 3);
  REQUIRE(lv.homology_levels.size() == 4);
  CHECK(lv.twist_levels[2] == doctest::Approx(0.5 + 2.0 / 9.0));
  CHECK(lv.homology_levels[3] == doctest::Approx(5.0 / 6.0 + 3.0 / 24.0));
  for (std::int64_t g = 1; g <= 40; ++g) {
    for (std::int64_t n : {std::int64_t{1}, g, 2 * g + 1, 5 * g + 3}) {
      CAPTURE(n);
      CAPTURE(g);
      CHECK(exact_levels_ok(n, g));
      CHECK(level_invariants_hold(n, g));
    }
  }
  CHECK(level_invariants_hold(17772223, 8886111));
  CHECK_FALSE(level_invariants_hold(0, 3));
  CHECK_THROWS_AS(surgery_levels(0, 2), ParameterError);
}

TEST_CASE("epsilon rule and plan") {
  const auto ed = epsilon_rule(10, 10.0);
  CHECK(ed.eps == doctest::Approx(0.01));
  CHECK(ed.delta == ed.eps / 4.0);
  CHECK_THROWS_AS(epsilon_rule(1, 1.0), ParameterError);
  CHECK_THROWS_AS(epsilon_rule(5, 0.0), ParameterError);
  SurgeryPlan plan{5, 2, ed.eps, ed.delta, 10.0};
  CHECK(plan.valid());
  CHECK(plan.levels().twist_levels.size() == 5);
  plan.delta = ed.eps / 3.0;
  CHECK_FALSE(plan.valid());
}

TEST_CASE("bound formulas") {
  CHECK(sys1_lower(std::exp(4.0), 2.0, 1.0) == doctest::Approx(1.0));
  CHECK(sys1_lower(3.0, 1.0, 5.0) == 0.0);
  CHECK(sys2_lower(100.0, 3.0) == doctest::Approx(150.0));
  CHECK(vol_upper(100.0, 3.0) == doctest::Approx(150.0));
  CHECK(semibundle_sys_bound(7.0) == 3.5);
  CHECK_THROWS_AS(semibundle_sys_bound(0.0), ParameterError);
  CHECK(order_lower_bound(std::exp(9.0), 2.0) == doctest::Approx(6.0));
  CHECK_THROWS_AS(sys1_lower(1.5, 1, 1), ParameterError);
  for (double g : {10.0, 1e3, 1e6, 1e12}) {
    CHECK(freedom_ratio(g, 1, 1, 1) * std::sqrt(std::log(g)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(freedom_ratio(g, 2, 3, 4) == doctest::Approx(4.0 / 6.0 / std::sqrt(std::log(g))));
  }
  CHECK(freedom_ratio(1e6, 1, 1, 1) < freedom_ratio(1e3, 1, 1, 1));
  CHECK_THROWS_AS(freedom_ratio(10, 0, 1, 1), ParameterError);
}

TEST_CASE("pipeline report") {
  const std::vector<std::int64_t> genera{55, 8104, 8886111};
  const auto report = run_pipeline(ConstructionParams::with_defaults(genera));
  REQUIRE(report.rows.size() == 3);
  const double expected[] = {0.5, 1.0 / 3.0, 0.25};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& r = report.rows[k];
    const double g = static_cast<double>(r.g);
    CHECK(r.n == 2 * r.g + 1);
    CHECK(r.eps == doctest::Approx(1.0 / (g * g)));
    CHECK(r.delta == r.eps / 4);
    CHECK(r.levels_valid);
    CHECK(r.asymptotic);
    CHECK(r.ratio_ub == doctest::Approx(1.0 / std::sqrt(std::log(g))).epsilon(1e-14));
    CHECK(std::abs(r.ratio_ub - expected[k]) < 1e-3);
    CHECK(r.ratio_ub == doctest::Approx(r.vol_ub / (r.sys1_lb * r.sys2_lb)));
    CHECK(r.substitution_bound ==
          doctest::Approx(2.5 * std::numbers::pi * static_cast<double>(r.n + 2 * r.g) * r.eps).epsilon(1e-15));
  }
  CHECK(report.ratio_strictly_decreasing());
  CHECK(report.ratio_scale_spread() < 1e-9);
  CHECK(run_pipeline(ConstructionParams::with_defaults(genera)) == report);
}

TEST_CASE("pipeline asymptotic gate and constants") {
  auto params = ConstructionParams::with_defaults({3, 10, 1000});
  params.constants.c_sub = 1.0;
  params.constants.c_prime = 1.0;
  const auto report = run_pipeline(params);
  // (1/2) sqrt(ln g) > 1 needs ln g > 4
  CHECK_FALSE(report.rows[0].asymptotic);
  CHECK_FALSE(report.rows[1].asymptotic);
  CHECK(report.rows[2].asymptotic);
  PipelineConstants c;
  c.at("s2") = 4.0;
  CHECK(c.s2 == 4.0);
  CHECK_THROWS_AS(c.at("nope"), ParameterError);
  CHECK(log_genus_threshold(c, 0.1) == doctest::Approx(std::pow(1.0 / (4.0 * 0.1), 2)));
  CHECK_THROWS_AS(log_genus_threshold(c, 0.0), ParameterError);
}

TEST_CASE("pipeline rejects bad input") {
  CHECK_THROWS_AS(run_pipeline(ConstructionParams::with_defaults({})), ParameterError);
  CHECK_THROWS_AS(run_pipeline(ConstructionParams::with_defaults({10, 5})), ParameterError);
  CHECK_THROWS_AS(run_pipeline(ConstructionParams::with_defaults({10, 10})), ParameterError);
  CHECK_THROWS_AS(run_pipeline(ConstructionParams::with_defaults({1, 5})), ParameterError);
  auto params = ConstructionParams::with_defaults({10});
  params.constants.s3 = 0.0;
  CHECK_THROWS_AS(run_pipeline(params), ParameterError);
  params = ConstructionParams::with_defaults({10});
  params.twist_count_model = nullptr;
  CHECK_THROWS_AS(run_pipeline(params), ParameterError);
}
