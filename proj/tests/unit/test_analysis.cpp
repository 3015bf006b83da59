#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "vlcq/analysis.hpp"
#include "vlcq/codebook.hpp"
#include "vlcq/core_math.hpp"

using namespace vlcq;

TEST_CASE("ell0 from its three conditions") {
  CHECK(find_ell0(2) == 4);
  CHECK(find_ell0(1) == 3);
  const auto c = ell0_conditions(2, 3);
  CHECK(c.witness_nonzero);
  CHECK_FALSE(c.margin_positive);  // 2^3 = 8 is not above 6t = 12
  CHECK(c.bracket_small);
  for (int t = 1; t <= 8; ++t) {
    const int l0 = find_ell0(t);
    CHECK(ell0_conditions(t, l0).all());
    for (int l = 1; l < l0; ++l) CHECK_FALSE(ell0_conditions(t, l).all());
  }
}

TEST_CASE("tail bound") {
  CHECK(tail_bound(2, 0.1, 4) == doctest::Approx(0.0028125).epsilon(1e-12));
  CHECK(tail_bound(2, 0.1, 5) == doctest::Approx(tail_bound(2, 0.1, 4) / 2).epsilon(1e-15));
  CHECK_THROWS_AS(tail_bound(2, 0.1, 3), std::domain_error);
  CHECK(tail_constant(1) == 6.0);
}

TEST_CASE("rate bound assembly") {
  const auto sizes = count_layer_sizes(2, 6);
  const auto r = rate_upper_bound(2, 0.1, sizes);
  CHECK(r.ell0 == 4);
  REQUIRE(r.per_layer_terms.size() == 2);
  const double y4 = static_cast<double>(sizes[4]);
  CHECK(r.head_term == doctest::Approx(0.1 * std::floor(std::log2(y4)) * (y4 - 2)));
  CHECK(r.per_layer_terms[0] == doctest::Approx(4.5 * 0.01 * std::floor(std::log2(static_cast<double>(sizes[5]))) / 16));
  CHECK(r.rate_bound == doctest::Approx(r.head_term + r.per_layer_terms[0] + r.per_layer_terms[1] + r.capped_tail));
  // more materialized layers can only tighten the tail estimate
  const auto r5 = rate_upper_bound(2, 0.1, std::span(sizes).first(6));
  CHECK(r.rate_bound <= r5.rate_bound);
  CHECK_THROWS(rate_upper_bound(2, 0.1, std::span(sizes).first(5)));
  double prev = 1e300;
  for (double p : {1.0, 10.0, 100.0, 1000.0}) {
    const double b = rate_upper_bound(2, alpha_of(1.0, p), sizes).rate_bound;
    CHECK(b <= prev);
    prev = b;
  }
}

TEST_CASE("converse floor") {
  CHECK(converse_floor(0.1, 0.0) == doctest::Approx(out_open_closed(0.1)));
  CHECK(converse_floor(0.1, 1.0) == 0.0);
  CHECK_THROWS(converse_floor(0.1, -1.0));
}

TEST_CASE("decay slope fit") {
  std::vector<std::pair<double, double>> pts;
  for (double p : {10.0, 20.0, 50.0, 100.0}) pts.emplace_back(p, 3.0 / (p * p));
  CHECK(fit_decay_slope(pts) == doctest::Approx(-2.0).epsilon(1e-12));
  pts.resize(2);
  CHECK_THROWS(fit_decay_slope(pts));
  std::vector<std::pair<double, double>> bad = {{1, 1}, {2, 0}, {3, 1}};
  CHECK_THROWS(fit_decay_slope(bad));
}

TEST_CASE("verification battery passes at small scale") {
  VerifyConfig c;
  c.samples = 20000;
  c.seed = 3;
  const auto report = run_verification(c);
  for (const auto& check : report.checks) {
    CAPTURE(check.name);
    CAPTURE(check.detail);
    CHECK(check.passed);
  }
  CHECK(report.checks.size() >= 15);
}
