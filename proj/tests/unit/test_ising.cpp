#include <doctest.h>

#include <cmath>

#include "ozlab/error.hpp"
#include "ozlab/ising.hpp"

using namespace ozlab;

namespace {

std::vector<LatticePoint> axis(int dim, int kmax) {
  std::vector<LatticePoint> out{LatticePoint(dim)};
  for (int k = 1; k <= kmax; ++k) {
    LatticePoint x(dim);
    x[0] = k;
    out.push_back(x);
  }
  return out;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::contract;
}

}  // namespace

TEST_SUITE_BEGIN("ising-lab");

TEST_CASE("model validation") {
  CHECK(kind_of([] { IsingModel(2, {{{1, 0}, 1.0}}, 0.3); }) == ErrorKind::domain);  // missing -v
  CHECK(kind_of([] { IsingModel(2, {{{1, 0}, 1.0}, {{-1, 0}, 0.5}}, 0.3); }) == ErrorKind::domain);
  CHECK(kind_of([] { IsingModel(2, {{{1, 0}, -1.0}, {{-1, 0}, -1.0}}, 0.3); }) == ErrorKind::domain);
  CHECK(kind_of([] { IsingModel::nearest_neighbor(2, -0.1); }) == ErrorKind::domain);
  CHECK(kind_of([] { IsingModel(2, {{{0, 0}, 1.0}}, 0.3); }) == ErrorKind::domain);

  const IsingModel nnn(2, {{{1, 0}, 1.0}, {{-1, 0}, 1.0}, {{0, 1}, 1.0}, {{0, -1}, 1.0}, {{2, 1}, 0.2}, {{-2, -1}, 0.2}},
                       0.1);
  CHECK(nnn.range() == 2);
  CHECK_FALSE(nnn.is_nearest_neighbor());
  CHECK(kind_of([&] { SpinLattice({4, 8}).check_range(nnn); }) == ErrorKind::domain);
  SpinLattice({5, 5}).check_range(nnn);

  const auto m = IsingModel::nearest_neighbor(2, 0.3);
  CHECK(m.is_nearest_neighbor());
  CHECK(*m.nearest_neighbor_coupling() == 1.0);
}

TEST_CASE("spin lattice indexing") {
  SpinLattice lat({4, 6});
  CHECK(lat.sites() == 24);
  for (std::size_t i = 0; i < lat.sites(); ++i) CHECK(lat.index(lat.site(i)) == i);
  CHECK(*lat.shift(lat.index({3, 5}), {1, 1}) == lat.index({0, 0}));
  SpinLattice open({4, 6}, false);
  CHECK_FALSE(open.shift(open.index({3, 5}), {1, 0}).has_value());
}

TEST_CASE("sampler validation") {
  const auto m = IsingModel::nearest_neighbor(2, 0.3);
  const SpinLattice lat({16, 16});
  const auto xs = axis(2, 3);
  CHECK(kind_of([&] { wolff_sample(m, lat, 0, 1, xs); }) == ErrorKind::domain);
  SampleOptions o;
  o.beta_max = 0.2;
  CHECK(kind_of([&] { wolff_sample(m, lat, 10, 1, xs, o); }) == ErrorKind::domain);
  SampleOptions far;
  far.target_correlation_length = 4.0;
  CHECK(kind_of([&] { wolff_sample(m, lat, 10, 1, xs, far); }) == ErrorKind::domain);
  SampleOptions few;
  few.burn_in = 0;
  const auto s = wolff_sample(m, lat, 50, 1, xs, few);
  CHECK(kind_of([&] { measure_correlation(s, xs); }) == ErrorKind::data);
}

TEST_CASE("infinite temperature gives independent spins") {
  const auto m = IsingModel::nearest_neighbor(2, 0.0);
  SampleOptions o;
  o.burn_in = 10;
  for (auto est : {CorrelationEstimator::cluster, CorrelationEstimator::spin}) {
    o.estimator = est;
    const auto xs = axis(2, 4);
    const auto s = wolff_sample(m, SpinLattice({16, 16}), 400, 7, xs, o);
    const auto c = measure_correlation(s, xs);
    CHECK(c[0].mean == 1.0);
    for (std::size_t k = 1; k < c.size(); ++k) CHECK(std::abs(c[k].mean) <= 3.0 * c[k].stderr_ + 1e-15);
  }
}

TEST_CASE("seeded runs are reproducible and thread independent") {
  const auto m = IsingModel::nearest_neighbor(2, 0.35);
  const auto xs = axis(2, 4);
  SampleOptions a;
  a.burn_in = 20;
  a.chains = 3;
  a.threads = 1;
  SampleOptions b = a;
  b.threads = 3;
  const auto s1 = wolff_sample(m, SpinLattice({12, 12}), 60, 42, xs, a);
  const auto s2 = wolff_sample(m, SpinLattice({12, 12}), 60, 42, xs, b);
  CHECK(s1.series == s2.series);
  const auto s3 = wolff_sample(m, SpinLattice({12, 12}), 60, 43, xs, a);
  CHECK(s1.series != s3.series);
}

TEST_CASE("one-dimensional chain") {
  const auto m = IsingModel::nearest_neighbor(1, 0.5);
  for (int x = 0; x < 12; ++x)
    CHECK(chain_brute_force(m, 12, x) == doctest::Approx(std::pow(std::tanh(0.5), x)).epsilon(1e-12));
  CHECK(exact_1d(m, -3) == doctest::Approx(std::pow(std::tanh(0.5), 3)).epsilon(1e-15));
  CHECK(exact_1d(IsingModel::nearest_neighbor(1, 10.0), 1) == doctest::Approx(1.0).epsilon(1e-8));

  // enough statistics to expose a 0.5% bias from measuring at cluster-size
  // dependent times
  SampleOptions o;
  o.burn_in = 200;
  const auto xs = axis(1, 6);
  for (auto est : {CorrelationEstimator::cluster, CorrelationEstimator::spin}) {
    o.estimator = est;
    const auto s = wolff_sample(m, SpinLattice({128}), 40000, 3, xs, o);
    for (const auto& e : measure_correlation(s, xs))
      CHECK(std::abs(e.mean - exact_1d(m, e.x[0])) <= 4.0 * e.stderr_ + 1e-12);
  }
}

TEST_CASE("transfer matrix against brute force on small tori") {
  for (double beta : {0.2, 0.44, 0.9}) {
    const auto m = IsingModel::nearest_neighbor(2, beta);
    for (auto [w, l] : {std::pair{2, 6}, std::pair{3, 6}, std::pair{4, 5}}) {
      const auto bf = torus_brute_force(m, w, l);
      const auto tm = torus_transfer_matrix(m, w, l);
      CHECK(tm.Z == doctest::Approx(bf.Z).epsilon(1e-12));
      for (int x = 0; x < l; ++x) CHECK(tm.correlation[x] == doctest::Approx(bf.correlation[x]).epsilon(1e-12));
    }
    // the Lanczos eigenvalues dominate the partition function of a long torus
    const auto strip = strip_transfer_matrix(m, 2);
    const int L = 8;
    const double z = torus_brute_force(m, 2, L).Z;
    CHECK(std::abs(z / std::pow(strip.lambda0, L) - 1.0) <= 3.0 * std::pow(strip.lambda1 / strip.lambda0, L) + 1e-12);
  }
}

TEST_CASE("strip correlation lengths") {
  // at high temperature the width corrections are exponentially small
  const auto hot = IsingModel::nearest_neighbor(2, 0.05);
  CHECK(strip_transfer_matrix(hot, 12).xi == doctest::Approx(onsager_axis_xi(0.05)).epsilon(1e-9));
  CHECK(strip_transfer_matrix(hot, 12).nn_correlation == doctest::Approx(onsager_nn_correlation(0.05)).epsilon(1e-9));

  const auto m = IsingModel::nearest_neighbor(2, 0.3);
  const std::vector<int> widths{10, 12, 14};
  const auto seq = strip_sequence(m, widths);
  CHECK(std::abs(seq[2].xi - seq[1].xi) < 1e-3);
  CHECK(std::abs(seq[2].xi - onsager_axis_xi(0.3)) < 1e-3);
  CHECK(kind_of([&] { strip_transfer_matrix(m, 16); }) == ErrorKind::resource);
}

TEST_CASE("Onsager nearest-neighbour correlation") {
  // high-temperature expansion: tanh K + O(K^3)
  CHECK(onsager_nn_correlation(1e-3) == doctest::Approx(std::tanh(1e-3)).epsilon(1e-6));
  // low temperature: tends to one
  CHECK(onsager_nn_correlation(2.0) > 0.999);
  // energy at the critical point is sqrt(2) / 2
  CHECK(onsager_nn_correlation(0.4406) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
}

TEST_CASE("Monte Carlo on the square lattice") {
  const double beta = 0.3;
  const auto m = IsingModel::nearest_neighbor(2, beta);
  const auto xs = axis(2, 6);
  std::vector<LatticePoint> all = xs;
  for (int k = 1; k <= 6; ++k) {
    all.push_back({-k, 0});
    all.push_back({0, k});
  }
  SampleOptions o;
  o.burn_in = 200;
  const auto s = wolff_sample(m, SpinLattice({32, 32}), 3000, 11, all, o);
  const auto c = measure_correlation(s, all);
  CHECK(c[0].mean == 1.0);
  CHECK(std::abs(c[1].mean - onsager_nn_correlation(beta)) <= 4.0 * c[1].stderr_);
  for (int k = 1; k <= 6; ++k) {
    const auto& fwd = c[static_cast<std::size_t>(k)];
    const auto& back = c[static_cast<std::size_t>(5 + 2 * k)];
    const auto& side = c[static_cast<std::size_t>(6 + 2 * k)];
    CHECK(fwd.mean == back.mean);  // exact for the cluster estimator
    CHECK(std::abs(fwd.mean - side.mean) <= 4.0 * std::hypot(fwd.stderr_, side.stderr_));
    CHECK(fwd.mean > 0.0);
    CHECK(fwd.tau_int > 0.0);
  }
}

TEST_SUITE_END();
