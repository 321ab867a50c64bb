#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"
#include "ozlab/error.hpp"
#include "ozlab/renewal.hpp"

using namespace ozlab;

namespace {

// regeneration indices for t = e1 from integer first coordinates
std::vector<int> regen_oracle(const oracle::Walk& w) {
  std::vector<int> out;
  const int n = static_cast<int>(w.size()) - 1;
  for (int l = 1; l < n; ++l) {
    bool ok = true;
    for (int j = 0; j < l; ++j) ok = ok && w[static_cast<std::size_t>(j)][0] < w[static_cast<std::size_t>(l)][0];
    for (int j = l + 1; j <= n; ++j) ok = ok && w[static_cast<std::size_t>(l)][0] <= w[static_cast<std::size_t>(j)][0];
    if (ok) out.push_back(l);
  }
  return out;
}

bool is_left(const oracle::Walk& w) {
  const std::size_t m = w.size() - 1;
  if (m == 0 || !regen_oracle(w).empty()) return false;
  for (std::size_t j = 0; j < m; ++j)
    if (w[j][0] >= w[m][0]) return false;
  return true;
}

bool is_right(const oracle::Walk& w) {
  const std::size_t m = w.size() - 1;
  if (m == 0 || !regen_oracle(w).empty()) return false;
  for (std::size_t j = 1; j <= m; ++j)
    if (w[j][0] < w[0][0]) return false;
  return true;
}

LatticePath line(int n) {
  std::vector<LatticePoint> v;
  for (int i = 0; i <= n; ++i) v.push_back(LatticePoint{i});
  return LatticePath(v);
}

const LatticePath kHook({{0, 0}, {0, 1}, {1, 1}, {1, 0}});

}  // namespace

TEST_SUITE_BEGIN("renewal-engine");

TEST_CASE("regeneration points") {
  CHECK(regeneration_points(line(5), DualVector{1.0}) == std::vector<int>{1, 2, 3, 4});
  CHECK(regeneration_points(kHook, DualVector{1.0, 0.0}) == std::vector<int>{2});
  const LatticePath vertical({{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  CHECK(regeneration_points(vertical, DualVector{1.0, 0.0}).empty());
}

TEST_CASE("factorization examples") {
  const auto f = factorize(line(3), DualVector{1.0});
  CHECK(f.left == LatticePath({LatticePoint{0}, LatticePoint{1}}));
  REQUIRE(f.bulk.size() == 1);
  CHECK(f.bulk[0] == LatticePath({LatticePoint{1}, LatticePoint{2}}));
  CHECK(f.right == LatticePath({LatticePoint{2}, LatticePoint{3}}));

  const auto h = factorize(kHook, DualVector{1.0, 0.0});
  CHECK(h.left == LatticePath({{0, 0}, {0, 1}, {1, 1}}));
  CHECK(h.bulk.empty());
  CHECK(h.right == LatticePath({{1, 1}, {1, 0}}));

  const LatticePath vertical({{0, 0}, {0, 1}, {0, 2}});
  const auto v = factorize(vertical, DualVector{1.0, 0.0});
  CHECK(v.left == vertical);
  CHECK(v.bulk.empty());
  CHECK_FALSE(v.has_cut());
}

TEST_CASE("regeneration points and round trip over every walk") {
  const DualVector t{1.0, 0.0};
  std::size_t n = 0;
  oracle::for_each_walk(2, 10, [&](const oracle::Walk& w) {
    const LatticePath p(w);
    CHECK(regeneration_points(p, t) == regen_oracle(w));
    const auto f = factorize(p, t);
    CHECK(f.reassemble() == p);
    for (const auto& b : f.bulk) CHECK((classify_piece(b, t) & static_cast<unsigned>(PieceClass::bulk)) != 0);
    if (f.has_cut()) {
      CHECK((classify_piece(f.left, t) & static_cast<unsigned>(PieceClass::left)) != 0);
      CHECK((classify_piece(f.right, t) & static_cast<unsigned>(PieceClass::right)) != 0);
    }
    ++n;
  });
  CHECK(n == 69673);  // sum of c_n for n <= 10
}

TEST_CASE("piece sequences are in bijection with cut walks") {
  // every self-avoiding concatenation left ++ bulk^k ++ right factorizes back
  // into its pieces, and these concatenations are exactly the walks with a cut
  const int N = 8;
  const DualVector t{1.0, 0.0};
  std::vector<LatticePath> lefts, bulks, rights;
  oracle::for_each_walk(2, N, [&](const oracle::Walk& w) {
    const bool l = is_left(w), r = is_right(w);
    if (l) lefts.emplace_back(w);
    if (r) rights.emplace_back(w);
    if (l && r) bulks.emplace_back(w);
  });
  std::map<int, long long> built;
  std::function<void(const LatticePath&, std::vector<const LatticePath*>&)> extend =
      [&](const LatticePath& head, std::vector<const LatticePath*>& used) {
        for (const auto& r : rights) {
          if (head.length() + r.length() > N) continue;
          const auto full = head.append_translated(r);
          if (!full.is_self_avoiding()) continue;
          const auto f = factorize(full, t);
          CHECK(f.left == *used.front());
          REQUIRE(f.bulk.size() == used.size() - 1);
          for (std::size_t i = 0; i < f.bulk.size(); ++i)
            CHECK(f.bulk[i].translated(f.bulk[i].start() * -1) == *used[i + 1]);
          CHECK(f.right.translated(f.right.start() * -1) == r);
          ++built[full.length()];
        }
        for (const auto& b : bulks) {
          if (head.length() + b.length() + 1 > N) continue;
          const auto next = head.append_translated(b);
          if (!next.is_self_avoiding()) continue;
          used.push_back(&b);
          extend(next, used);
          used.pop_back();
        }
      };
  for (const auto& l : lefts) {
    std::vector<const LatticePath*> used{&l};
    extend(l, used);
  }
  std::map<int, long long> cut;
  oracle::for_each_walk(2, N, [&](const oracle::Walk& w) {
    if (!regen_oracle(w).empty()) ++cut[static_cast<int>(w.size()) - 1];
  });
  CHECK(built == cut);
}

TEST_CASE("direct correlation in one dimension") {
  const auto dc = direct_correlation(saw_model(1.0, 1), DualVector{1.0}, 8);
  for (const auto* s : {&dc.bulk, &dc.left, &dc.right}) {
    REQUIRE(s->size() == 1);
    CHECK(s->at(LatticePoint{1}, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  }
}

TEST_CASE("direct correlation in two dimensions") {
  const auto dc = direct_correlation(saw_model(1.0, 2), DualVector{1.0, 0.0}, 8);
  CHECK(dc.bulk.at({1, 0}, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(dc.bulk.size() > 1);
  const Projection proj(dc.direction);
  for (const auto* s : {&dc.bulk, &dc.left})
    for (const auto& [a, c] : s->atoms()) CHECK(proj(a.x) > 0);
  // a right piece may end on its starting hyperplane, as in the hook walk
  for (const auto& [a, c] : dc.right.atoms()) CHECK(proj(a.x) >= 0);

  // bulk coefficients against the oracle piece classes
  std::map<Atom, double> ref;
  oracle::for_each_walk(2, 8, [&](const oracle::Walk& w) {
    if (is_left(w) && is_right(w)) ref[Atom{w.back(), static_cast<int>(w.size()) - 1}] += std::exp(-1.0 * (w.size() - 1));
  });
  CHECK(dc.bulk.size() == ref.size());
  for (const auto& [a, v] : ref) CHECK(dc.bulk.at(a.x, a.n) == doctest::Approx(v).epsilon(1e-14));

  const auto empty = direct_correlation(saw_model(1.0, 2), DualVector{1.0, 0.0}, 0);
  CHECK(empty.bulk.empty());
  CHECK(empty.left.empty());
  CHECK(empty.right.empty());
}

TEST_CASE("renewal residual") {
  {
    const auto m = saw_model(1.0, 1);
    const auto r = renewal_residual(enumerate_two_point(m, 10), direct_correlation(m, DualVector{1.0}, 10));
    CHECK(r < 1e-14);
  }
  for (double beta : {0.7, 0.8, 1.0}) {
    const auto m = saw_model(beta, 2);
    for (const DualVector& t : {DualVector{1.0, 0.0}, DualVector{1.0, 1.0}, DualVector{0.3, -0.8}}) {
      const auto r = renewal_residual(enumerate_two_point(m, 10), direct_correlation(m, t, 10));
      CHECK(r < 1e-12);
    }
  }
  const auto m = saw_model(1.0, 2);
  CHECK(renewal_residual(enumerate_two_point(m, 0), direct_correlation(m, DualVector{1.0, 0.0}, 0)) == 0.0);
  CHECK_THROWS_AS(renewal_residual(enumerate_two_point(m, 6), direct_correlation(m, DualVector{1.0, 0.0}, 5)),
                  Error);
}

TEST_CASE("three-dimensional renewal residual") {
  const auto m = saw_model(1.0, 3);
  const auto r = renewal_residual(enumerate_two_point(m, 7), direct_correlation(m, DualVector{1.0, 0.5, 0.0}, 7));
  CHECK(r < 1e-12);
}

TEST_CASE("mass gap") {
  {
    const auto m = saw_model(1.0, 1);
    const auto g = mass_gap_estimate(direct_correlation(m, DualVector{1.0}, 10), enumerate_two_point(m, 10),
                                     LatticePoint{1});
    CHECK(g.direct_finite_support);
    CHECK(std::isinf(g.gap));
    CHECK(g.gap > 0);
  }
  const auto m = saw_model(1.0, 2);
  const auto dc = direct_correlation(m, DualVector{1.0, 0.0}, 14);
  const auto table = enumerate_two_point(m, 14);
  CHECK(mass_gap_estimate(dc, table, {1, 0}).gap_lower > 0.0);
  try {
    (void)mass_gap_estimate(dc, table, {-1, 0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::contract);
  }
}

TEST_CASE("renewal extrapolation") {
  {
    const auto dc = direct_correlation(saw_model(1.0, 1), DualVector{1.0}, 6);
    const std::vector<LatticePoint> x{LatticePoint{50}};
    CHECK(oz_extrapolate(dc, x).at(LatticePoint{50}) == doctest::Approx(std::exp(-50.0)).epsilon(1e-13));
    CHECK(oz_extrapolate(dc, std::vector<LatticePoint>{}).empty());
  }
  // every walk of at most N steps is a piece sequence, so the extrapolation
  // dominates the truncated enumeration
  const auto m = saw_model(1.5, 2);
  const auto dc = direct_correlation(m, DualVector{1.0, 0.0}, 10);
  const auto table = enumerate_two_point(m, 10);
  std::vector<LatticePoint> xs;
  for (int k = 1; k <= 3; ++k) xs.push_back({k, 0});
  const auto g = oz_extrapolate(dc, xs);
  for (const auto& x : xs) CHECK(g.at(x) >= table.total_at(x));
}

TEST_CASE("tilted step mass") {
  const auto d1 = direct_correlation(saw_model(1.0, 1), DualVector{1.0}, 6);
  CHECK(tilted_step_mass(d1, DualVector{1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  const auto d2 = direct_correlation(saw_model(1.2, 2), DualVector{1.0, 0.0}, 10);
  CHECK(tilted_step_mass(d2, DualVector{0.0, 0.0}) < 1.0);
}

TEST_SUITE_END();
