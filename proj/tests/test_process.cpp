#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "tangle/process.hpp"

using namespace tangle;

TEST_CASE("seed mixing is pinned") {
  // First splitmix64 output for seed 0, from the reference implementation.
  CHECK(mix64(0) == 0xE220A8397B1DCDAFull);
  CHECK(RngStream::derive_seed(7, 3) == mix64(4));
}

TEST_CASE("uniform draws land in [0,1) and streams are reproducible") {
  RngStream a(123), b(123), c(124);
  bool diverged = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform01());
    diverged = diverged || u != c.uniform01();
  }
  CHECK(diverged);
}

TEST_CASE("selection triple matches exhaustive pair enumeration") {
  for (std::int64_t total = 1; total <= 6; ++total) {
    for (std::int64_t x = 0; x <= total; ++x) {
      const std::int64_t w = total - x;
      const auto counts = oracles::enumerate_pairs(x, w);
      // Integer identities first, then the computed ratios bit for bit.
      CHECK(counts.c2 == x * (x - 1));
      CHECK(counts.c0 == w * w);
      CHECK(counts.c1 == 2 * w * x + x);
      const UTriple p = u_distribution(x, w);
      const double l2 = static_cast<double>(total * total);
      CHECK(p.p0 == static_cast<double>(counts.c0) / l2);
      CHECK(p.p1 == static_cast<double>(counts.c1) / l2);
      CHECK(p.p2 == static_cast<double>(counts.c2) / l2);
    }
  }
}

TEST_CASE("known triples") {
  const UTriple p = u_distribution(2, 1);
  CHECK(p.p0 == 1.0 / 9.0);
  CHECK(p.p1 == 6.0 / 9.0);
  CHECK(p.p2 == 2.0 / 9.0);

  const UTriple lone = u_distribution(1, 0);
  CHECK(lone.p0 == 0.0);
  CHECK(lone.p1 == 1.0);
  CHECK(lone.p2 == 0.0);

  const UTriple starved = u_distribution(0, 5);
  CHECK(starved.p0 == 1.0);
  CHECK(starved.p1 == 0.0);
  CHECK(starved.p2 == 0.0);
}

TEST_CASE("triple closure and mean identity") {
  RngStream rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = static_cast<std::int64_t>(rng.uniform01() * 1e6);
    auto w = static_cast<std::int64_t>(rng.uniform01() * 1e6);
    if (x + w == 0) w = 1;
    const UTriple p = u_distribution(x, w);
    CHECK(std::fabs(p.p0 + p.p1 + p.p2 - 1.0) <= 1e-12);
    const double mean = expected_u(x, w);
    const double from_triple = p.p1 + 2.0 * p.p2;
    CHECK(std::fabs(mean - from_triple) <= 1e-12 * std::max(1.0, mean));
    // Exact rational route: numerators over L^2 agree as integers.
    const std::int64_t l = x + w;
    CHECK((2 * w * x + x) + 2 * x * (x - 1) == 2 * x * l - x);
  }
}

TEST_CASE("expected selection count examples") {
  CHECK(expected_u(2, 1) == doctest::Approx(10.0 / 9.0).epsilon(1e-15));
  CHECK(expected_u(1, 0) == 1.0);
  CHECK(expected_u(0, 5) == 0.0);
}

TEST_CASE("degenerate counts are rejected") {
  CHECK_THROWS_AS(u_distribution(0, 0), std::domain_error);
  CHECK_THROWS_AS(expected_u(0, 0), std::domain_error);
  CHECK_THROWS_AS(u_distribution(-1, 3), std::domain_error);
}

TEST_CASE("params require a whole number of delay steps") {
  const ModelParams p = ModelParams::create(10, 1.0);
  CHECK(p.m == 10);
  CHECK(ModelParams::create(100, 0.3).m == 30);  // 100 * 0.3 is exactly 30
  CHECK(ModelParams::create(2.5, 2.0).m == 5);
  CHECK_THROWS_AS(ModelParams::create(100, 0.305), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::create(3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::create(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::create(1, -1), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams::create(0.5, 1), std::invalid_argument);
}

TEST_CASE("seeded state gets its counts from the warm-up data") {
  {
    const ModelParams p = ModelParams::create(2, 1);
    const TangleState s = init_state(p, DiscreteInit{1, {1, 1}});
    CHECK(s.n() == 2);
    CHECK(s.free_tips() == 1);
    CHECK(s.pending_tips() == 2);
    CHECK(s.total_tips() == 3);
  }
  {
    const ModelParams p = ModelParams::create(3, 1);
    const TangleState s = init_state(p, DiscreteInit{5, {0, 0, 0}});
    CHECK(s.free_tips() == 5);
    CHECK(s.pending_tips() == 0);
    CHECK(s.total_tips() == 5);
  }
  {
    const ModelParams p = ModelParams::create(2, 1);
    const TangleState s = init_state(p, DiscreteInit{1, {2, 2}});
    CHECK(s.free_tips() == 1);
    CHECK(s.pending_tips() == 4);
    CHECK(s.total_tips() == 5);
  }
}

TEST_CASE("invalid warm-up data is rejected") {
  const ModelParams p = ModelParams::create(2, 1);
  CHECK_THROWS_AS(init_state(p, DiscreteInit{1, {1}}), std::invalid_argument);
  CHECK_THROWS_AS(init_state(p, DiscreteInit{0, {1, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(init_state(p, DiscreteInit{1, {1, 3}}),
                  std::invalid_argument);
}

TEST_CASE("a single free tip forces the transition") {
  const ModelParams p = ModelParams::create(1, 1);
  const TangleState base = init_state(p, DiscreteInit{1, {0}});
  REQUIRE(base.free_tips() == 1);
  REQUIRE(base.pending_tips() == 0);
  RngStream rng(9);
  for (int i = 0; i < 200; ++i) {
    TangleState s = base;
    CHECK(s.step(rng) == 1);
    CHECK(s.free_tips() == 1);
    CHECK(s.pending_tips() == 1);
  }
}

TEST_CASE("sampler frequencies match the triple") {
  const ModelParams p = ModelParams::create(3, 1);
  const TangleState base = init_state(p, DiscreteInit{2, {1, 0, 0}});
  REQUIRE(base.free_tips() == 2);
  REQUIRE(base.pending_tips() == 1);
  RngStream rng(31415);
  const int draws = 1'000'000;
  std::int64_t hits[3] = {0, 0, 0};
  for (int i = 0; i < draws; ++i) {
    TangleState fresh = base;  // reset each draw
    hits[fresh.step(rng)]++;
  }
  const double expected[3] = {1.0 / 9.0, 6.0 / 9.0, 2.0 / 9.0};
  for (int k = 0; k < 3; ++k) {
    const double freq = static_cast<double>(hits[k]) / draws;
    const double sigma = std::sqrt(expected[k] * (1.0 - expected[k]) / draws);
    CHECK(std::fabs(freq - expected[k]) <= 3.0 * sigma);
  }
}

TEST_CASE("runs are deterministic in the seed") {
  const ModelParams p = ModelParams::create(10, 1);
  const DiscreteInit init{7, {1, 0, 2, 1, 1, 0, 2, 1, 0, 1}};
  RngStream r1(77), r2(77), r3(78);
  const Trace t1 = run(p, init, 500, r1);
  const Trace t2 = run(p, init, 500, r2);
  const Trace t3 = run(p, init, 500, r3);
  CHECK(t1.free_tips == t2.free_tips);
  CHECK(t1.u == t2.u);
  CHECK(t1.free_tips != t3.free_tips);
}

TEST_CASE("zero steps yields just the seeded row") {
  const ModelParams p = ModelParams::create(2, 1);
  RngStream rng(5);
  const Trace t = run(p, DiscreteInit{1, {1, 1}}, 0, rng);
  CHECK(t.size() == 1);
  CHECK(t.total_tips[0] == 3);
  CHECK(t.u[0] == 1);
}

TEST_CASE("warm-up totals are fixed by the seed data") {
  const ModelParams p = ModelParams::create(2, 1);
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
    RngStream rng(seed);
    const Trace t = run(p, DiscreteInit{1, {1, 1}}, 2, rng);
    CHECK(t.total_tips[0] == 3);
    CHECK(t.total_tips[1] == 3);
    CHECK(t.total_tips[2] == 3);
  }
}

TEST_CASE("trace invariants hold along simulated paths") {
  RngStream seeds(4242);
  for (double lambda : {10.0, 100.0}) {
    const ModelParams p = ModelParams::create(lambda, 1.0);
    const auto m = p.m;
    for (int rep = 0; rep < 5; ++rep) {
      DiscreteInit init;
      init.initial_free =
          1 + static_cast<std::int64_t>(seeds.uniform01() * 3 * m);
      init.u.resize(m);
      for (int& v : init.u) v = static_cast<int>(seeds.uniform01() * 3);
      RngStream rng(seeds.next_u64());
      const Trace t = run(p, init, 10 * m, rng);
      for (std::size_t i = 0; i < t.size(); ++i) {
        const std::int64_t n = t.start_n + static_cast<std::int64_t>(i);
        CHECK(t.total_tips[i] == t.free_tips[i] + t.pending_tips[i]);
        CHECK(t.free_tips[i] >= 1);
        if (i > 0) {
          CHECK(t.free_tips[i] == t.free_tips[i - 1] + 1 - t.u[i]);
        }
        if (n >= 2 * m) {
          CHECK(t.total_tips[i] ==
                t.free_tips[i - static_cast<std::size_t>(m)] + m);
          CHECK(t.total_tips[i] >= m + 1);
        }
        if (n <= 2 * m) {
          CHECK(t.total_tips[i] == l_from_init(n - m, init));
        }
      }
    }
  }
}

TEST_CASE("pending count reconciles with the selection window") {
  const ModelParams p = ModelParams::create(5, 1);
  TangleState s = init_state(p, DiscreteInit{3, {1, 2, 0, 1, 1}});
  RngStream rng(8);
  for (int i = 0; i < 100; ++i) {
    s.step(rng);
    const auto window = s.selection_window();
    CHECK(std::accumulate(window.begin(), window.end(), 0) ==
          s.pending_tips());
    CHECK(static_cast<std::int64_t>(window.size()) == s.delay_steps());
  }
}

TEST_CASE("warm-up total formula") {
  {
    const DiscreteInit init{1, {1, 1}};
    CHECK(l_from_init(0, init) == 3);
    CHECK(l_from_init(2, init) == 3);
  }
  {
    const DiscreteInit init{2, {0, 2, 1}};
    CHECK(l_from_init(1, init) == 6);
    CHECK(l_from_init(3, init) == 5);  // empty tail: xi + m
    CHECK_THROWS_AS(l_from_init(4, init), std::out_of_range);
    CHECK_THROWS_AS(l_from_init(-1, init), std::out_of_range);
  }
}
