#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "redbench/red_core.hpp"

using namespace redbench;

namespace {

RedParams classic() { return RedParams{5.0, 15.0, 0.1, 0.002, false}; }

}  // namespace

TEST_CASE("ewma_update follows the weighted average") {
  CHECK(ewma_update(4.0, 8.0, 0.5) == 6.0);
  CHECK(ewma_update(3.0, 7.0, 1.0) == 7.0);
  CHECK(ewma_update(3.0, 7.0, 0.0) == 3.0);
}

TEST_CASE("ewma_update rejects out-of-domain input") {
  CHECK_THROWS_AS(ewma_update(-1.0, 2.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(ewma_update(1.0, -2.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(ewma_update(1.0, 2.0, 1.5), std::domain_error);
  CHECK_THROWS_AS(ewma_update(1.0, 2.0, -0.1), std::domain_error);
  CHECK_THROWS_AS(ewma_update(NAN, 2.0, 0.1), std::domain_error);
}

TEST_CASE("ewma_update is a convex combination") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> q(0.0, 200.0), w(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = q(rng), b = q(rng), wq = w(rng);
    const double r = ewma_update(a, b, wq);
    CHECK(r >= std::min(a, b));
    CHECK(r <= std::max(a, b));
  }
}

TEST_CASE("iterated ewma converges geometrically") {
  SUBCASE("dyadic weights are exact") {
    for (double wq : {0.5, 0.25, 0.125}) {
      double x = 0.0;
      const double q = 8.0;
      // x = 8 - 8 (1 - wq)^n stays representable for n <= 16 with these weights.
      for (int n = 1; n <= 16; ++n) {
        x = ewma_update(x, q, wq);
        CHECK(std::abs(x - q) == std::pow(1.0 - wq, n) * 8.0);
      }
    }
  }
  SUBCASE("arbitrary weights within rounding") {
    const double wq = 0.002, q = 12.0, x0 = 3.0;
    double x = x0;
    for (int n = 1; n <= 5000; ++n) {
      x = ewma_update(x, q, wq);
      const double expected = std::pow(1.0 - wq, n) * std::abs(x0 - q);
      CHECK(std::abs(std::abs(x - q) - expected) <= 1e-12 * std::abs(x0 - q));
    }
  }
}

TEST_CASE("drop_probability piecewise law") {
  const RedParams p = classic();
  CHECK(drop_probability(4.0, p) == 0.0);
  CHECK(drop_probability(10.0, p) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(drop_probability(20.0, p) == 1.0);
  CHECK(drop_probability(5.0, p) == 0.0);
  CHECK(drop_probability(15.0, p) == 1.0);
  CHECK(drop_probability(std::nextafter(15.0, 0.0), p) == doctest::Approx(0.1));
}

TEST_CASE("drop_probability is monotone for random threshold sets") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int set = 0; set < 10000; ++set) {
    RedParams p;
    p.q_min = 0.5 + 50.0 * u(rng);
    p.q_max = p.q_min + 0.1 + 100.0 * u(rng);
    p.p_max = 0.001 + 0.999 * u(rng);
    double prev = 0.0;
    for (int k = 0; k <= 50; ++k) {
      const double q = 1.2 * p.q_max * k / 50.0;
      const double v = drop_probability(q, p);
      REQUIRE(v >= prev);
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("RedParams validation") {
  CHECK_NOTHROW(classic().validate());
  RedParams p = classic();
  p.q_max = 4.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = classic();
  p.p_max = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = classic();
  p.w_q = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("red_decide regions") {
  const RedParams p = classic();
  RedState s;
  s.avg_queue = 4.0;
  for (double u : {0.0, 0.3, 0.999}) {
    CHECK(red_decide(s, p, u, 100).action == RedAction::Enqueue);
  }
  s.avg_queue = 20.0;
  for (double u : {0.0, 0.3, 0.999}) {
    const auto d = red_decide(s, p, u, 100);
    CHECK(d.action == RedAction::Drop);
    CHECK(d.cause == DropCause::Red);
  }
}

TEST_CASE("red_decide count adjustment") {
  RedParams p = classic();
  p.use_count = true;
  RedState s;
  s.avg_queue = 10.0;  // p_b = 0.05
  s.count = 10;
  const auto d = red_decide(s, p, 0.99, 100);
  CHECK(d.base_probability == doctest::Approx(0.05));
  CHECK(d.effective_probability == doctest::Approx(0.1));
  CHECK(d.action == RedAction::Enqueue);
  CHECK(d.state.count == 11);

  s.count = 25;  // 1 - 25 * 0.05 < 0
  CHECK(red_decide(s, p, 0.99, 100).effective_probability == 1.0);
  CHECK(count_adjusted_probability(0.05, 0) == doctest::Approx(0.05));
}

TEST_CASE("red_decide count bookkeeping") {
  const RedParams p = classic();
  RedState s;
  s.avg_queue = 10.0;
  s.count = 3;
  CHECK(red_decide(s, p, 0.0, 100).state.count == 0);   // drop resets
  CHECK(red_decide(s, p, 0.9, 100).state.count == 4);   // enqueue with p_b > 0
  s.avg_queue = 1.0;
  CHECK(red_decide(s, p, 0.9, 100).state.count == 0);   // p_b == 0 resets
}

TEST_CASE("red_decide forces a tail drop on a full buffer") {
  const RedParams p = classic();
  RedState s;
  s.avg_queue = 0.0;
  s.occupancy = 10;
  const auto d = red_decide(s, p, 0.5, 10);
  CHECK(d.action == RedAction::Drop);
  CHECK(d.cause == DropCause::Tail);
  s.occupancy = 9;
  CHECK(red_decide(s, p, 0.5, 10).action == RedAction::Enqueue);
}

TEST_CASE("red_decide reproduces drop_probability empirically") {
  const RedParams p = classic();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double avg : {6.0, 10.0, 14.0}) {
    RedState s;
    s.avg_queue = avg;
    const int n = 100000;
    int drops = 0;
    for (int i = 0; i < n; ++i) {
      drops += red_decide(s, p, u(rng), 1000).action == RedAction::Drop;
    }
    const double prob = drop_probability(avg, p);
    const double se = std::sqrt(prob * (1.0 - prob) / n);
    CHECK(std::abs(static_cast<double>(drops) / n - prob) <= 3.0 * se);
  }
}

TEST_CASE("continuous_ewma_rate") {
  CHECK(continuous_ewma_rate(6.0, 6.0, 0.3, 77.0) == 0.0);
  CHECK(continuous_ewma_rate(0.0, 10.0, 0.002, 1000.0) == doctest::Approx(20.0));
  CHECK(continuous_ewma_rate(1.0, 10.0, 0.002, 1000.0) > 0.0);
  CHECK(continuous_ewma_rate(10.0, 1.0, 0.002, 1000.0) < 0.0);
}

TEST_CASE("continuous rate matches the discrete recurrence with delta = 1/C") {
  const double c = 250.0, wq = 0.01;
  const double delta = 1.0 / c;
  for (double q_hat : {0.0, 3.5, 12.0}) {
    for (double q : {0.0, 7.0, 40.0}) {
      const double discrete = (ewma_update(q_hat, q, wq) - q_hat) / delta;
      CHECK(continuous_ewma_rate(q_hat, q, wq, c) == doctest::Approx(discrete).epsilon(1e-9));
    }
  }
}
