#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ozlab/lattice.hpp"

namespace ozlab {

struct Coupling {
  LatticePoint v;
  double J = 0.0;
};

// Finite-range ferromagnet H = -sum over unordered pairs {x, x + v} of J_v s_x s_{x+v}.
// Couplings are listed for both v and -v.
class IsingModel {
 public:
  IsingModel(int dim, std::vector<Coupling> couplings, double beta);
  static IsingModel nearest_neighbor(int dim, double beta, double J = 1.0);

  int dim() const noexcept { return dim_; }
  double beta() const noexcept { return beta_; }
  const std::vector<Coupling>& couplings() const noexcept { return couplings_; }
  // max over v with J_v > 0 of |v|_inf
  int range() const noexcept { return range_; }
  bool is_nearest_neighbor() const;
  // uniform J on the 2d unit vectors; nullopt otherwise
  std::optional<double> nearest_neighbor_coupling() const;

 private:
  int dim_;
  std::vector<Coupling> couplings_;
  double beta_;
  int range_ = 0;
};

class SpinLattice {
 public:
  SpinLattice(std::vector<int> extents, bool periodic = true);

  int dim() const noexcept { return static_cast<int>(extents_.size()); }
  const std::vector<int>& extents() const noexcept { return extents_; }
  bool periodic() const noexcept { return periodic_; }
  std::size_t sites() const noexcept { return spins_.size(); }

  std::int8_t spin(std::size_t i) const noexcept { return spins_[i]; }
  std::int8_t& spin(std::size_t i) noexcept { return spins_[i]; }
  std::span<const std::int8_t> spins() const noexcept { return spins_; }

  std::size_t index(const LatticePoint& x) const;
  LatticePoint site(std::size_t i) const;
  // i + v, wrapped when periodic; nullopt off an open lattice
  std::optional<std::size_t> shift(std::size_t i, const LatticePoint& v) const;

  // throws unless every extent is >= 2R + 1
  void check_range(const IsingModel& model) const;

 private:
  std::vector<int> extents_;
  bool periodic_;
  std::vector<std::int8_t> spins_;
};

enum class CorrelationEstimator { cluster, spin };

struct SampleOptions {
  int burn_in = 1000;                 // sweeps discarded before recording
  unsigned chains = 1;
  unsigned threads = 0;               // 0 = hardware concurrency
  std::optional<double> beta_max;     // safety bound; defaults per model
  std::optional<double> target_correlation_length;  // extents must be >= 8x
  CorrelationEstimator estimator = CorrelationEstimator::cluster;
};

// Per-sweep measurements of <s_0 s_x> at fixed displacements. The cluster
// estimator averages (1/|C|) #{i in C : i + x in C} over the Wolff clusters of
// a sweep; the spin estimator is the translation average of s_i s_{i+x} at the
// end of the sweep. A recorded sweep is a fixed number of cluster flips,
// ceil(V / mean cluster size during burn-in); a zero burn-in still runs one
// unrecorded pilot sweep to set that number.
struct SampleStream {
  std::vector<LatticePoint> displacements;
  // series[c][k][s]: chain c, displacement k, sweep s
  std::vector<std::vector<std::vector<double>>> series;
  std::vector<double> mean_cluster_size;  // per chain
  std::uint64_t seed = 0;
  int sweeps = 0;

  std::size_t samples() const noexcept;
};

// Wolff cluster Monte Carlo with bond probability 1 - exp(-2 beta J_v).
// Chains are seeded from seed_seq{seed, chain} with mt19937_64; the output is
// independent of the thread count.
SampleStream wolff_sample(const IsingModel& model, const SpinLattice& lattice, int sweeps,
                          std::uint64_t seed, std::span<const LatticePoint> displacements,
                          const SampleOptions& options = {});

struct CorrelationEstimate {
  LatticePoint x;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n_samples = 0;
  double tau_int = 0.5;
};

// binned means and errors (32 bins per chain); tau_int = B var(bin) / (2 var(sample))
std::vector<CorrelationEstimate> measure_correlation(const SampleStream& stream,
                                                     std::span<const LatticePoint> displacements);

struct StripResult {
  int width = 0;
  double lambda0 = 0.0;  // largest eigenvalue, even sector
  double lambda1 = 0.0;  // largest eigenvalue, odd sector
  double xi = 0.0;       // log(lambda0 / lambda1), inverse correlation length per column
  double nn_correlation = 0.0;  // <s_i s_{i+1}> within a column
};

// Periodic strip of width W, transfer along the axis; Lanczos in each spin-flip
// sector. 2D nearest-neighbour models only, W <= 14.
StripResult strip_transfer_matrix(const IsingModel& model, int width);
std::vector<StripResult> strip_sequence(const IsingModel& model, std::span<const int> widths);

// exact inverse on-axis correlation length of the square-lattice model,
// log coth(beta J) - 2 beta J
double onsager_axis_xi(double beta_J);
// exact infinite-lattice <s_0 s_e1> of the square-lattice model
double onsager_nn_correlation(double beta_J);

// brute force over all 2^(W L) configurations of a W x L torus (W L <= 24):
// partition function and <s_0 s_x> along the L direction
struct TorusExact {
  double Z = 0.0;
  std::vector<double> correlation;  // index x = 0..L-1
};
TorusExact torus_brute_force(const IsingModel& model, int width, int length);
// same quantities from the dense strip transfer matrix
TorusExact torus_transfer_matrix(const IsingModel& model, int width, int length);

// (tanh beta J)^|x| for the 1D nearest-neighbour chain
double exact_1d(const IsingModel& model, int x);
// brute force <s_0 s_x> on an open chain of L sites, s_0 at the first site
double chain_brute_force(const IsingModel& model, int length, int x);

}  // namespace ozlab
