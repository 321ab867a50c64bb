#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ozlab/saw.hpp"

namespace ozlab {

// Hyperplane ordering induced by a dual vector t. Directions are quantized to
// integer components (t / |t| scaled by 2^20) so that projections of lattice
// points are exact integers: ties are exact and comparisons are invariant
// under translation.
class Projection {
 public:
  static constexpr double kScale = 1048576.0;  // 2^20

  explicit Projection(const DualVector& t);

  int dim() const noexcept { return dim_; }
  std::int64_t operator()(const LatticePoint& x) const noexcept {
    std::int64_t s = 0;
    for (int i = 0; i < dim_; ++i) s += k_[static_cast<std::size_t>(i)] * x[i];
    return s;
  }

 private:
  std::array<std::int64_t, kMaxDim> k_{};
  int dim_;
};

// interior indices l with max_{j<l} p_j < p_l <= min_{j>l} p_j, ascending
std::vector<int> regeneration_points(const LatticePath& path, const DualVector& t);

struct Factorization {
  LatticePath left;
  std::vector<LatticePath> bulk;
  LatticePath right;  // single vertex when the path has no regeneration point
  DualVector direction;

  bool has_cut() const noexcept { return right.length() > 0; }
  // pieces concatenated back in order
  LatticePath reassemble() const;
};

Factorization factorize(const LatticePath& path, const DualVector& t);

// Piece classes of the unique factorization at regeneration points, with p
// the projection and m the piece length:
//   whole: no interior regeneration point (the unfactorizable walks, incl. the empty one)
//   left:  whole, m >= 1, p_j < p_m for j < m
//   right: whole, m >= 1, p_j >= p_0 for j >= 1
//   bulk:  left and right (slab-confined)
enum class PieceClass : unsigned { whole = 1, left = 2, right = 4, bulk = 8 };

unsigned classify_piece(const LatticePath& piece, const DualVector& t);

struct DirectCorrelation {
  SpaceLengthSeries bulk;
  SpaceLengthSeries left;
  SpaceLengthSeries right;
  SpaceLengthSeries whole;
  DualVector direction;
  int horizon = 0;
  ModelPtr model;
};

DirectCorrelation direct_correlation(const ModelPtr& model, const DualVector& t, int max_len,
                                     const EnumerationOptions& options = {});

// whole + left * sum_k bulk^{*k} * right
SpaceLengthSeries renewal_reconstruction(const DirectCorrelation& dc);

// max |g^(n)(x) - R^(n)(x)| over atoms with (t, x) > 0
double renewal_residual(const TwoPointTable& table, const DirectCorrelation& dc);

struct MassGap {
  DecayEstimate xi_full;
  DecayEstimate xi_direct;  // all fields +inf when the bulk series is finitely supported on the ray
  bool direct_finite_support = false;
  double gap = 0.0;
  double gap_lower = 0.0;
  double gap_upper = 0.0;
};

MassGap mass_gap_estimate(const DirectCorrelation& dc, const TwoPointTable& table,
                          const LatticePoint& direction);

// g(x) from the iterated renewal with lengths summed out, for targets with (t, x) > 0
std::map<LatticePoint, double> oz_extrapolate(const DirectCorrelation& dc,
                                              std::span<const LatticePoint> targets);

// sum_{y, m} bulk(y, m) exp((t', y))
double tilted_step_mass(const DirectCorrelation& dc, const DualVector& t_prime);

}  // namespace ozlab
