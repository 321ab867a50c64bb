#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ozlab/coarse_grain.hpp"
#include "ozlab/error.hpp"

using namespace ozlab;

namespace {

LatticePath line(int n) {
  std::vector<LatticePoint> v;
  for (int i = 0; i <= n; ++i) v.push_back(LatticePoint{i});
  return LatticePath(v);
}

// xi(v) = |v| exactly: the d = 1 body at beta = 1
const WulffBody& body1() {
  static const WulffBody b = build_body(saw_model(1.0, 1), 8, 2);
  return b;
}

LatticePath random_saw(std::mt19937& rng, int len) {
  for (;;) {
    std::vector<LatticePoint> v{{0, 0}};
    bool stuck = false;
    while (static_cast<int>(v.size()) <= len && !stuck) {
      std::vector<LatticePoint> options;
      for (const auto& s : unit_steps(2)) {
        const auto nxt = v.back() + s;
        if (std::find(v.begin(), v.end(), nxt) == v.end()) options.push_back(nxt);
      }
      if (options.empty()) {
        stuck = true;
      } else {
        v.push_back(options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)]);
      }
    }
    if (!stuck) return LatticePath(v);
  }
}

}  // namespace

TEST_SUITE_BEGIN("coarse-grain");

TEST_CASE("skeleton examples") {
  const auto sk = build_skeleton(line(10), 3.0, body1());
  CHECK(sk.points == std::vector<LatticePoint>{LatticePoint{0}, LatticePoint{4}, LatticePoint{8}, LatticePoint{10}});
  CHECK(sk.indices == std::vector<int>{0, 4, 8, 10});

  const auto short_path = build_skeleton(line(2), 3.0, body1());
  CHECK(short_path.points == std::vector<LatticePoint>{LatticePoint{0}, LatticePoint{2}});

  const auto fine = build_skeleton(line(6), 1e-9, body1());
  CHECK(fine.points.size() == 7);

  // a tie xi = K stays inside the ball
  const auto tie = build_skeleton(line(6), 2.0, body1());
  CHECK(tie.points == std::vector<LatticePoint>{LatticePoint{0}, LatticePoint{3}, LatticePoint{6}});
}

TEST_CASE("skeleton hops exceed K except possibly the last") {
  const auto body = WulffBody::circle(1.0, 64);
  std::mt19937 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_saw(rng, 30);
    for (double K : {1.5, 3.0, 4.5}) {
      const auto sk = build_skeleton(p, K, body);
      CHECK(sk.points.front() == p.start());
      CHECK(sk.points.back() == p.end());
      for (std::size_t k = 1; k + 1 < sk.points.size(); ++k) CHECK(body.xi(sk.points[k] - sk.points[k - 1]) > K);
    }
  }
}

TEST_CASE("surcharges") {
  const DualVector t{1.0};
  Skeleton sk;
  sk.K = 1.0;
  sk.points = {LatticePoint{0}, LatticePoint{-2}};
  const auto back = surcharge(sk, t, body1());
  REQUIRE(back.hops.size() == 1);
  CHECK(back.hops[0] == doctest::Approx(4.0).epsilon(1e-12));

  sk.points = {LatticePoint{0}, LatticePoint{5}, LatticePoint{5}};
  const auto fwd = surcharge(sk, t, body1());
  CHECK(fwd.hops[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fwd.hops[1] == 0.0);
  CHECK(fwd.total == fwd.hops[0] + fwd.hops[1]);

  try {
    (void)surcharge(sk, DualVector{1.5}, body1());
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("surcharges are nonnegative for boundary duals") {
  const auto body = build_body(saw_model(1.5, 2), 10, 64);
  std::mt19937 rng(5);
  for (const auto& s : body.samples()) {
    const auto p = random_saw(rng, 20);
    const auto sk = build_skeleton(p, 2.0, body);
    const auto rep = surcharge(sk, s.dual, body);
    for (double h : rep.hops) CHECK(h >= 0.0);
  }
}

TEST_CASE("break points") {
  for (double K : {0.5, 2.0, 7.0})
    for (double delta : {0.05, 0.5}) {
      const auto p = line(7);
      CHECK(break_points(p, DualVector{1.0}, K, delta, body1()) == regeneration_points(p, DualVector{1.0}));
    }
  const auto circle = WulffBody::circle(1.0, 64);
  const LatticePath hook({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(regeneration_points(hook, DualVector{1.0, 0.0}) == std::vector<int>{2});
  CHECK(break_points(hook, DualVector{1.0, 0.0}, 0.5, 0.1, circle).empty());
  CHECK(break_points(LatticePath({{0, 0}, {0, 1}}), DualVector{1.0, 0.0}, 1.0, 0.1, circle).empty());

  std::mt19937 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = random_saw(rng, 16);
    const auto regen = regeneration_points(p, DualVector{1.0, 0.0});
    const auto bp = break_points(p, DualVector{1.0, 0.0}, 2.0, 0.2, circle);
    CHECK(std::includes(regen.begin(), regen.end(), bp.begin(), bp.end()));
  }
}

TEST_CASE("cone distance") {
  const auto circle = WulffBody::circle(1.0, 256);
  const DualVector t{1.0, 0.0};
  CHECK(cone_distance(DualVector{3.0, 0.1}, t, 0.1, circle) == 0.0);
  // the cone has half opening acos(0.9); (0, 1) lies at angle pi/2 - acos(0.9) from its edge
  const double expect = std::sin(std::numbers::pi / 2 - std::acos(0.9));
  CHECK(cone_distance(DualVector{0.0, 1.0}, t, 0.1, circle) == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("surcharge histograms") {
  const auto m1 = saw_model(1.0, 1);
  const auto h1 = surcharge_histogram(m1, 8, 2.0, LatticePoint{5}, DualVector{1.0}, body1());
  REQUIRE(h1.weight.size() == 1);
  CHECK(h1.weight.begin()->first == 0);
  CHECK(h1.backtracking_fraction() == 0.0);

  const auto body = build_body(saw_model(1.5, 2), 10, 64);
  const auto m = saw_model(1.5, 2);
  const auto none = surcharge_histogram(m, 4, 2.0, {6, 0}, body.samples()[0].dual, body);
  CHECK(none.weight.empty());
  CHECK(none.paths == 0);

  // total weight equals the two-point function from an independent DFS
  const int N = 10;
  const LatticePoint x{4, 0};
  double g = 0.0;
  std::size_t paths = 0;
  oracle::for_each_walk(2, N, [&](const oracle::Walk& w) {
    if (w.back() == x) {
      g += std::exp(-1.5 * (w.size() - 1));
      ++paths;
    }
  });
  const auto h = surcharge_histogram(m, N, 2.0, x, body.samples()[0].dual, body);
  CHECK(h.total() == doctest::Approx(g).epsilon(1e-13));
  CHECK(h.paths == paths);
  CHECK(h.threshold == 1.0);
  CHECK(h.backtracking_fraction() < 0.5);
}

TEST_SUITE_END();
