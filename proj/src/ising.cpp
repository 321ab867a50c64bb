#include "ozlab/ising.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <thread>

#include "ozlab/error.hpp"
#include "ozlab/series.hpp"

namespace ozlab {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int linf(const LatticePoint& v) {
  int m = 0;
  for (int i = 0; i < v.dim(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

template <class F>
void run_parallel(std::size_t jobs, unsigned threads, F&& work) {
  const std::size_t n = std::clamp<std::size_t>(
      threads == 0 ? std::thread::hardware_concurrency() : threads, 1, std::max<std::size_t>(jobs, 1));
  if (n <= 1) {
    for (std::size_t k = 0; k < jobs; ++k) work(k);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < jobs; k += n) work(k);
    });
  for (auto& t : pool) t.join();
}

class WolffChain {
 public:
  WolffChain(const IsingModel& model, const SpinLattice& lattice,
             std::span<const LatticePoint> displacements, CorrelationEstimator estimator,
             std::uint64_t seed, unsigned chain)
      : lat_(lattice), estimator_(estimator), stamp_(lattice.sites(), 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(chain)};
    rng_.seed(seq);
    const std::size_t V = lat_.sites();
    for (const auto& c : model.couplings()) {
      if (c.J <= 0.0) continue;
      probs_.push_back(-std::expm1(-2.0 * model.beta() * c.J));
      for (std::size_t i = 0; i < V; ++i) {
        const auto j = lat_.shift(i, c.v);
        nbr_.push_back(j ? *j : kNone);
      }
    }
    for (const auto& x : displacements) {
      std::vector<std::size_t> tab(V);
      for (std::size_t i = 0; i < V; ++i) {
        const auto j = lat_.shift(i, x);
        tab[i] = j ? *j : kNone;
      }
      disp_.push_back(std::move(tab));
    }
    for (std::size_t i = 0; i < V; ++i) lat_.spin(i) = uniform01(rng_) < 0.5 ? 1 : -1;
    acc_.resize(disp_.size());
  }

  // Freeze the number of cluster flips per recorded sweep. Ending a sweep
  // once V sites have flipped would make the measurement time depend on the
  // cluster sizes, which biases every observable.
  void fix_schedule() {
    if (cluster_count_ == 0) sweep(nullptr);
    const double mean = mean_cluster_size();
    per_sweep_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(static_cast<double>(lat_.sites()) / mean)));
  }

  std::size_t clusters_per_sweep() const noexcept { return per_sweep_; }

  // one sweep; fills `out` with one sample per displacement. Before
  // fix_schedule a sweep runs until V sites have flipped.
  void sweep(std::vector<double>* out) {
    const std::size_t V = lat_.sites();
    std::size_t flipped = 0;
    std::size_t clusters = 0;
    std::fill(acc_.begin(), acc_.end(), 0.0);
    while (per_sweep_ > 0 ? clusters < per_sweep_ : flipped < V) {
      const std::size_t size = grow();
      flipped += size;
      ++clusters;
      if (out != nullptr && estimator_ == CorrelationEstimator::cluster) {
        for (std::size_t k = 0; k < disp_.size(); ++k) {
          std::size_t hits = 0;
          const auto& tab = disp_[k];
          for (const std::size_t i : cluster_) {
            const std::size_t j = tab[i];
            hits += (j != kNone && stamp_[j] == id_) ? 1 : 0;
          }
          acc_[k] += static_cast<double>(hits) / static_cast<double>(size);
        }
      }
    }
    cluster_total_ += flipped;
    cluster_count_ += clusters;
    if (out == nullptr) return;
    out->assign(disp_.size(), 0.0);
    for (std::size_t k = 0; k < disp_.size(); ++k) {
      if (estimator_ == CorrelationEstimator::cluster) {
        (*out)[k] = acc_[k] / static_cast<double>(clusters);
        continue;
      }
      double s = 0.0;
      std::size_t pairs = 0;
      const auto& tab = disp_[k];
      for (std::size_t i = 0; i < V; ++i) {
        if (tab[i] == kNone) continue;
        s += lat_.spin(i) * lat_.spin(tab[i]);
        ++pairs;
      }
      (*out)[k] = pairs > 0 ? s / static_cast<double>(pairs) : 0.0;
    }
  }

  double mean_cluster_size() const {
    return cluster_count_ == 0 ? 0.0 : static_cast<double>(cluster_total_) / cluster_count_;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t grow() {
    const std::size_t V = lat_.sites();
    if (++id_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      id_ = 1;
    }
    auto seed = static_cast<std::size_t>(uniform01(rng_) * static_cast<double>(V));
    seed = std::min(seed, V - 1);
    const std::int8_t s0 = lat_.spin(seed);
    cluster_.clear();
    cluster_.push_back(seed);
    stamp_[seed] = id_;
    lat_.spin(seed) = static_cast<std::int8_t>(-s0);
    for (std::size_t head = 0; head < cluster_.size(); ++head) {
      const std::size_t i = cluster_[head];
      for (std::size_t b = 0; b < probs_.size(); ++b) {
        const std::size_t j = nbr_[b * V + i];
        if (j == kNone || stamp_[j] == id_ || lat_.spin(j) != s0) continue;
        if (uniform01(rng_) < probs_[b]) {
          stamp_[j] = id_;
          lat_.spin(j) = static_cast<std::int8_t>(-s0);
          cluster_.push_back(j);
        }
      }
    }
    return cluster_.size();
  }

  SpinLattice lat_;
  CorrelationEstimator estimator_;
  std::size_t per_sweep_ = 0;
  std::mt19937_64 rng_;
  std::vector<double> probs_;
  std::vector<std::size_t> nbr_;
  std::vector<std::vector<std::size_t>> disp_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t id_ = 0;
  std::vector<std::size_t> cluster_;
  std::vector<double> acc_;
  std::uint64_t cluster_total_ = 0;
  std::uint64_t cluster_count_ = 0;
};

std::optional<double> default_beta_max(const IsingModel& model) {
  if (!model.nearest_neighbor_coupling()) return std::nullopt;
  const double J = *model.nearest_neighbor_coupling();
  if (model.dim() == 2) return 0.42 / J;
  if (model.dim() == 3) return 0.21 / J;
  return std::nullopt;
}

double nn_coupling_2d(const IsingModel& model) {
  require(model.dim() == 2, ErrorKind::unsupported, "strip transfer matrix needs a 2D model");
  const auto J = model.nearest_neighbor_coupling();
  require(J.has_value(), ErrorKind::unsupported,
          "strip transfer matrix supports uniform nearest-neighbour couplings only");
  return *J;
}

int bit_spin(std::uint32_t x, int i) { return (x >> i) & 1u ? -1 : 1; }

// half of the intra-column weight, exp(K/2 sum_i s_i s_{i+1 mod W})
std::vector<double> half_column_weight(int W, double K) {
  const std::uint32_t dim = 1u << W;
  std::vector<double> out(dim);
  for (std::uint32_t x = 0; x < dim; ++x) {
    int e = 0;
    for (int i = 0; i < W; ++i) e += bit_spin(x, i) * bit_spin(x, (i + 1) % W);
    out[x] = std::exp(0.5 * K * e);
  }
  return out;
}

}  // namespace

IsingModel::IsingModel(int dim, std::vector<Coupling> couplings, double beta)
    : dim_(dim), couplings_(std::move(couplings)), beta_(beta) {
  require(dim >= 1 && dim <= kMaxDim, ErrorKind::domain, "Ising dimension must lie in 1..4");
  require(std::isfinite(beta) && beta >= 0.0, ErrorKind::domain, "beta must be a nonnegative real");
  std::map<LatticePoint, double> J;
  bool any = false;
  for (const auto& c : couplings_) {
    require(c.v.dim() == dim, ErrorKind::domain, "coupling vector " + c.v.to_string() + " has the wrong dimension");
    require(std::isfinite(c.J) && c.J >= 0.0, ErrorKind::domain,
            "coupling J at " + c.v.to_string() + " must be a finite nonnegative number");
    require(!(c.v.is_zero() && c.J != 0.0), ErrorKind::domain, "self coupling J_0 must vanish");
    require(J.emplace(c.v, c.J).second, ErrorKind::domain, "duplicate coupling at " + c.v.to_string());
    if (c.J > 0.0) {
      any = true;
      range_ = std::max(range_, linf(c.v));
    }
  }
  for (const auto& [v, j] : J) {
    auto it = J.find(-v);
    require(it != J.end() && it->second == j, ErrorKind::domain,
            "couplings must be symmetric, J_v = J_{-v}; violated at " + v.to_string());
  }
  require(any, ErrorKind::domain, "at least one coupling must be positive");
}

IsingModel IsingModel::nearest_neighbor(int dim, double beta, double J) {
  std::vector<Coupling> cs;
  for (const auto& e : unit_steps(dim)) cs.push_back({e, J});
  return IsingModel(dim, std::move(cs), beta);
}

std::optional<double> IsingModel::nearest_neighbor_coupling() const {
  std::optional<double> J;
  int units = 0;
  for (const auto& c : couplings_) {
    if (c.J == 0.0) continue;
    if (c.v.l1_norm() != 1) return std::nullopt;
    if (J && *J != c.J) return std::nullopt;
    J = c.J;
    ++units;
  }
  if (units != 2 * dim_) return std::nullopt;
  return J;
}

bool IsingModel::is_nearest_neighbor() const { return nearest_neighbor_coupling().has_value(); }

SpinLattice::SpinLattice(std::vector<int> extents, bool periodic)
    : extents_(std::move(extents)), periodic_(periodic) {
  require(!extents_.empty() && extents_.size() <= static_cast<std::size_t>(kMaxDim), ErrorKind::domain,
          "lattice needs 1..4 extents");
  std::size_t n = 1;
  for (int e : extents_) {
    require(e > 0, ErrorKind::domain, "lattice extents must be positive");
    n *= static_cast<std::size_t>(e);
  }
  spins_.assign(n, 1);
}

std::size_t SpinLattice::index(const LatticePoint& x) const {
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int k = 0; k < dim(); ++k) {
    const int e = extents_[static_cast<std::size_t>(k)];
    require(x[k] >= 0 && x[k] < e, ErrorKind::contract, "site " + x.to_string() + " outside the lattice");
    idx += static_cast<std::size_t>(x[k]) * stride;
    stride *= static_cast<std::size_t>(e);
  }
  return idx;
}

LatticePoint SpinLattice::site(std::size_t i) const {
  LatticePoint x(dim());
  for (int k = 0; k < dim(); ++k) {
    const auto e = static_cast<std::size_t>(extents_[static_cast<std::size_t>(k)]);
    x[k] = static_cast<int>(i % e);
    i /= e;
  }
  return x;
}

std::optional<std::size_t> SpinLattice::shift(std::size_t i, const LatticePoint& v) const {
  LatticePoint x = site(i);
  for (int k = 0; k < dim(); ++k) {
    const int e = extents_[static_cast<std::size_t>(k)];
    int c = x[k] + v[k];
    if (periodic_) {
      c %= e;
      if (c < 0) c += e;
    } else if (c < 0 || c >= e) {
      return std::nullopt;
    }
    x[k] = c;
  }
  return index(x);
}

void SpinLattice::check_range(const IsingModel& model) const {
  require(model.dim() == dim(), ErrorKind::domain, "lattice and model dimensions differ");
  for (int e : extents_)
    require(e >= 2 * model.range() + 1, ErrorKind::domain,
            "lattice extent " + std::to_string(e) + " is below 2R + 1 = " +
                std::to_string(2 * model.range() + 1));
}

std::size_t SampleStream::samples() const noexcept {
  std::size_t n = 0;
  for (const auto& chain : series)
    if (!chain.empty()) n += chain.front().size();
  return n;
}

SampleStream wolff_sample(const IsingModel& model, const SpinLattice& lattice, int sweeps,
                          std::uint64_t seed, std::span<const LatticePoint> displacements,
                          const SampleOptions& options) {
  lattice.check_range(model);
  require(sweeps > 0, ErrorKind::domain, "sweeps must be positive");
  require(options.burn_in >= 0, ErrorKind::domain, "burn-in must be nonnegative");
  require(options.chains >= 1, ErrorKind::domain, "need at least one chain");
  const auto bound = options.beta_max ? options.beta_max : default_beta_max(model);
  if (bound)
    require(model.beta() <= *bound, ErrorKind::domain,
            "beta " + format_double(model.beta()) + " exceeds the safety bound " + format_double(*bound));
  if (options.target_correlation_length) {
    for (int e : lattice.extents())
      require(e >= 8.0 * *options.target_correlation_length, ErrorKind::domain,
              "lattice extent " + std::to_string(e) + " is below 8 correlation lengths");
  }
  for (const auto& x : displacements)
    require(x.dim() == model.dim(), ErrorKind::contract, "displacement dimension mismatch");

  SampleStream stream;
  stream.displacements.assign(displacements.begin(), displacements.end());
  stream.seed = seed;
  stream.sweeps = sweeps;
  stream.series.resize(options.chains);
  stream.mean_cluster_size.resize(options.chains);
  run_parallel(options.chains, options.threads, [&](std::size_t c) {
    WolffChain chain(model, lattice, displacements, options.estimator, seed, static_cast<unsigned>(c));
    for (int s = 0; s < options.burn_in; ++s) chain.sweep(nullptr);
    chain.fix_schedule();
    auto& out = stream.series[c];
    out.assign(displacements.size(), std::vector<double>(static_cast<std::size_t>(sweeps)));
    std::vector<double> sample;
    for (int s = 0; s < sweeps; ++s) {
      chain.sweep(&sample);
      for (std::size_t k = 0; k < sample.size(); ++k) out[k][static_cast<std::size_t>(s)] = sample[k];
    }
    stream.mean_cluster_size[c] = chain.mean_cluster_size();
  });
  return stream;
}

std::vector<CorrelationEstimate> measure_correlation(const SampleStream& stream,
                                                     std::span<const LatticePoint> displacements) {
  const std::size_t total = stream.samples();
  require(total >= 100, ErrorKind::data,
          "need at least 100 samples, stream has " + std::to_string(total));
  constexpr std::size_t kBins = 32;
  std::vector<CorrelationEstimate> out;
  for (const auto& x : displacements) {
    CorrelationEstimate est;
    est.x = x;
    est.n_samples = total;
    if (x.is_zero()) {
      est.mean = 1.0;
      out.push_back(est);
      continue;
    }
    const auto it = std::find(stream.displacements.begin(), stream.displacements.end(), x);
    require(it != stream.displacements.end(), ErrorKind::contract,
            "displacement " + x.to_string() + " was not recorded in the stream");
    const auto k = static_cast<std::size_t>(it - stream.displacements.begin());

    double sum = 0.0;
    for (const auto& chain : stream.series)
      for (double v : chain[k]) sum += v;
    const double mean = sum / static_cast<double>(total);
    double var = 0.0;
    for (const auto& chain : stream.series)
      for (double v : chain[k]) var += (v - mean) * (v - mean);
    var /= static_cast<double>(total - 1);

    std::vector<double> bins;
    std::size_t width = 0;
    for (const auto& chain : stream.series) {
      const auto& s = chain[k];
      width = std::max<std::size_t>(1, s.size() / kBins);
      for (std::size_t b = 0; b + width <= s.size() && b / width < kBins; b += width) {
        double m = 0.0;
        for (std::size_t i = b; i < b + width; ++i) m += s[i];
        bins.push_back(m / static_cast<double>(width));
      }
    }
    double bmean = 0.0;
    for (double b : bins) bmean += b;
    bmean /= static_cast<double>(bins.size());
    double bvar = 0.0;
    for (double b : bins) bvar += (b - bmean) * (b - bmean);
    bvar /= static_cast<double>(bins.size() - 1);

    est.mean = std::clamp(mean, -1.0, 1.0);
    est.stderr_ = std::sqrt(bvar / static_cast<double>(bins.size()));
    est.tau_int = var > 0.0 ? std::max(0.5, 0.5 * static_cast<double>(width) * bvar / var) : 0.5;
    out.push_back(est);
  }
  return out;
}

StripResult strip_transfer_matrix(const IsingModel& model, int width) {
  const double K = model.beta() * nn_coupling_2d(model);
  require(width >= 2, ErrorKind::contract, "strip width must be at least 2");
  require(width <= 14, ErrorKind::resource,
          "strip width " + std::to_string(width) + " exceeds the limit 14 (state space 2^W)");
  const std::uint32_t dim = 1u << width;
  const std::uint32_t mask = dim - 1;
  const auto dh = half_column_weight(width, K);
  const double ep = std::exp(K);
  const double em = std::exp(-K);

  auto apply = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd w(dim);
    for (std::uint32_t x = 0; x < dim; ++x) w[x] = dh[x] * v[x];
    for (int b = 0; b < width; ++b) {
      const std::uint32_t bit = 1u << b;
      for (std::uint32_t x = 0; x < dim; ++x) {
        if (x & bit) continue;
        const double a = w[x];
        const double c = w[x | bit];
        w[x] = ep * a + em * c;
        w[x | bit] = em * a + ep * c;
      }
    }
    for (std::uint32_t x = 0; x < dim; ++x) w[x] *= dh[x];
    return w;
  };
  auto project = [&](Eigen::VectorXd& v, int parity) {
    for (std::uint32_t x = 0; x < dim; ++x) {
      const std::uint32_t y = x ^ mask;
      if (y < x) continue;
      const double a = 0.5 * (v[x] + parity * v[y]);
      v[x] = a;
      v[y] = parity * a;
    }
  };

  // Lanczos with full reorthogonalization; returns the top Ritz pair
  auto lanczos = [&](int parity, Eigen::VectorXd* vec) {
    Eigen::VectorXd q(dim);
    for (std::uint32_t x = 0; x < dim; ++x) {
      double m = 0.0;
      for (int i = 0; i < width; ++i) m += bit_spin(x, i);
      q[x] = parity > 0 ? 1.0 : m;
    }
    project(q, parity);
    q.normalize();
    const int sector = static_cast<int>(dim / 2);
    const int max_iter = std::min(sector, 300);
    std::vector<Eigen::VectorXd> basis{q};
    std::vector<double> alpha;
    std::vector<double> beta;
    double prev = 0.0;
    double top = 0.0;
    Eigen::VectorXd ritz;
    for (int it = 0; it < max_iter; ++it) {
      Eigen::VectorXd w = apply(basis.back());
      alpha.push_back(basis.back().dot(w));
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) w -= b.dot(w) * b;
      project(w, parity);
      const double nb = w.norm();
      const int m = static_cast<int>(alpha.size());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1))
                                  : Eigen::VectorXd(0);
      es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      top = es.eigenvalues()[m - 1];
      ritz = es.eigenvectors().col(m - 1);
      const bool converged = it > 4 && std::abs(top - prev) <= 1e-15 * std::abs(top);
      prev = top;
      if (converged || nb <= 1e-13 * std::abs(top) || m == max_iter) break;
      beta.push_back(nb);
      basis.push_back(w / nb);
    }
    if (vec != nullptr) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
      for (int i = 0; i < ritz.size(); ++i) v += ritz[i] * basis[static_cast<std::size_t>(i)];
      *vec = v.normalized();
    }
    return top;
  };

  StripResult res;
  res.width = width;
  Eigen::VectorXd psi;
  res.lambda0 = lanczos(+1, &psi);
  res.lambda1 = lanczos(-1, nullptr);
  require(res.lambda1 > 0.0 && res.lambda0 > res.lambda1, ErrorKind::divergence,
          "transfer matrix spectrum has no gap at width " + std::to_string(width));
  res.xi = std::log(res.lambda0 / res.lambda1);
  double nn = 0.0;
  for (std::uint32_t x = 0; x < dim; ++x) nn += psi[x] * psi[x] * bit_spin(x, 0) * bit_spin(x, 1 % width);
  res.nn_correlation = nn;
  return res;
}

std::vector<StripResult> strip_sequence(const IsingModel& model, std::span<const int> widths) {
  std::vector<StripResult> out;
  for (int w : widths) out.push_back(strip_transfer_matrix(model, w));
  return out;
}

double onsager_axis_xi(double beta_J) {
  require(beta_J > 0.0, ErrorKind::domain, "beta J must be positive");
  return -std::log(std::tanh(beta_J)) - 2.0 * beta_J;
}

double onsager_nn_correlation(double beta_J) {
  require(beta_J > 0.0, ErrorKind::domain, "beta J must be positive");
  const double K2 = 2.0 * beta_J;
  const double k = 2.0 * std::sinh(K2) / (std::cosh(K2) * std::cosh(K2));
  require(k < 1.0, ErrorKind::domain, "nearest-neighbour correlation formula needs beta J != beta_c");
  const double th = std::tanh(K2);
  return 0.5 / th * (1.0 + 2.0 / std::numbers::pi * (2.0 * th * th - 1.0) * std::comp_ellint_1(k));
}

TorusExact torus_brute_force(const IsingModel& model, int width, int length) {
  const double K = model.beta() * nn_coupling_2d(model);
  require(width >= 2 && length >= 2, ErrorKind::contract, "torus extents must be at least 2");
  require(width * length <= 24, ErrorKind::resource, "brute force torus limited to 24 sites");
  const int n = width * length;
  auto s = [&](std::uint32_t c, int i, int j) {
    return bit_spin(c, ((i % width + width) % width) + width * ((j % length + length) % length));
  };
  // integer histograms over the energy, exponentiated once per level
  const int emax = 2 * n;
  const std::size_t levels = static_cast<std::size_t>(2 * emax + 1);
  std::vector<std::int64_t> count(levels, 0);
  std::vector<std::vector<std::int64_t>> corr(static_cast<std::size_t>(length), std::vector<std::int64_t>(levels, 0));
  for (std::uint32_t c = 0; c < (1u << n); ++c) {
    int e = 0;
    for (int j = 0; j < length; ++j)
      for (int i = 0; i < width; ++i) e += s(c, i, j) * (s(c, i + 1, j) + s(c, i, j + 1));
    const auto lv = static_cast<std::size_t>(e + emax);
    ++count[lv];
    for (int x = 0; x < length; ++x) corr[static_cast<std::size_t>(x)][lv] += s(c, 0, 0) * s(c, 0, x);
  }
  TorusExact out;
  out.correlation.assign(static_cast<std::size_t>(length), 0.0);
  for (std::size_t lv = 0; lv < levels; ++lv) {
    if (count[lv] == 0) continue;
    const double w = std::exp(K * (static_cast<int>(lv) - emax));
    out.Z += static_cast<double>(count[lv]) * w;
    for (int x = 0; x < length; ++x)
      out.correlation[static_cast<std::size_t>(x)] += static_cast<double>(corr[static_cast<std::size_t>(x)][lv]) * w;
  }
  for (auto& v : out.correlation) v /= out.Z;
  return out;
}

TorusExact torus_transfer_matrix(const IsingModel& model, int width, int length) {
  const double K = model.beta() * nn_coupling_2d(model);
  require(width >= 2 && width <= 10, ErrorKind::resource, "dense transfer matrix limited to width 10");
  require(length >= 2, ErrorKind::contract, "torus length must be at least 2");
  const std::uint32_t dim = 1u << width;
  const auto dh = half_column_weight(width, K);
  Eigen::MatrixXd T(dim, dim);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dim, dim);
  for (std::uint32_t a = 0; a < dim; ++a) {
    S(a, a) = bit_spin(a, 0);
    for (std::uint32_t b = 0; b < dim; ++b) {
      int e = 0;
      for (int i = 0; i < width; ++i) e += bit_spin(a, i) * bit_spin(b, i);
      T(a, b) = dh[a] * std::exp(K * e) * dh[b];
    }
  }
  std::vector<Eigen::MatrixXd> pw{Eigen::MatrixXd::Identity(dim, dim)};
  for (int k = 1; k <= length; ++k) pw.push_back(pw.back() * T);
  TorusExact out;
  out.Z = pw[static_cast<std::size_t>(length)].trace();
  for (int x = 0; x < length; ++x)
    out.correlation.push_back((S * pw[static_cast<std::size_t>(x)] * S * pw[static_cast<std::size_t>(length - x)]).trace() / out.Z);
  return out;
}

double exact_1d(const IsingModel& model, int x) {
  require(model.dim() == 1, ErrorKind::unsupported, "exact_1d needs a 1D model");
  const auto J = model.nearest_neighbor_coupling();
  require(J.has_value(), ErrorKind::unsupported, "exact_1d needs a nearest-neighbour chain");
  return std::pow(std::tanh(model.beta() * *J), std::abs(x));
}

double chain_brute_force(const IsingModel& model, int length, int x) {
  require(model.dim() == 1, ErrorKind::unsupported, "chain brute force needs a 1D model");
  const auto J = model.nearest_neighbor_coupling();
  require(J.has_value(), ErrorKind::unsupported, "chain brute force needs nearest-neighbour couplings");
  require(length >= 1 && length <= 24, ErrorKind::resource, "chain brute force limited to 24 sites");
  require(x >= 0 && x < length, ErrorKind::contract, "displacement outside the chain");
  const double K = model.beta() * *J;
  double Z = 0.0;
  double c = 0.0;
  for (std::uint32_t cfg = 0; cfg < (1u << length); ++cfg) {
    int e = 0;
    for (int i = 0; i + 1 < length; ++i) e += bit_spin(cfg, i) * bit_spin(cfg, i + 1);
    const double w = std::exp(K * e);
    Z += w;
    c += w * bit_spin(cfg, 0) * bit_spin(cfg, x);
  }
  return c / Z;
}

}  // namespace ozlab
