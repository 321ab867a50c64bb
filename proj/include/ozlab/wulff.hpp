#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "ozlab/renewal.hpp"

namespace ozlab {

// rho_N(z) = sum_{y, m <= N} bulk(y, m) exp((z, y)); range error on overflow
double perron_root(const DirectCorrelation& dc, const DualVector& z);
// gradient of rho_N at z
DualVector perron_gradient(const DirectCorrelation& dc, const DualVector& z);

// s* n with rho_N(s* n) = 1, by bracketing and bisection down to adjacent
// doubles; the endpoint with rho <= 1 is returned
DualVector solve_boundary(const DirectCorrelation& dc, const DualVector& n);

struct BoundarySample {
  DualVector direction;  // unit
  DualVector dual;       // boundary point t*(n) = s* n
  DualVector normal;     // unit outward normal at t*(n)
};

struct ConsistencyReport {
  bool pass = true;
  double tol = 0.0;
  double worst = 0.0;  // max over pairs of (t*_n, v_m) / (t*_m, v_m) - 1
  int worst_n = -1;
  int worst_m = -1;
};

// Sampled boundary of the convex body K with its support function
// xi(x) = max_{t in K} (t, x). Immutable; 0 must be interior.
class WulffBody {
 public:
  // normals left with dim 0 are filled in from the boundary curve (d = 2) or
  // set to the radial direction otherwise
  WulffBody(int dim, std::vector<BoundarySample> samples, int horizon, double tol);

  // fixtures
  static WulffBody circle(double radius, int resolution);
  static WulffBody from_radial(const std::function<double(double)>& r, int resolution);

  int dim() const noexcept { return dim_; }
  int horizon() const noexcept { return horizon_; }
  double tol() const noexcept { return tol_; }
  const std::vector<BoundarySample>& samples() const noexcept { return samples_; }
  // radial distances s*(n) in sample order
  std::vector<double> radii() const;

  // support function; in d = 2 refined between samples through a periodic
  // spline of the radial function
  double support(const DualVector& x) const;
  // support at a lattice point, evaluated on its primitive vector so that
  // xi(k p) = k xi(p) exactly
  double xi(const LatticePoint& x) const;
  // boundary dual with (t, x) = support(x), the contact point for direction x
  DualVector contact_dual(const DualVector& x) const;
  // t in K up to tol: (t, v) <= xi(v)(1 + tol) for every sampled normal v
  bool contains(const DualVector& t, double tol = 1e-9) const;

  // (t*_n, v_m) <= (t*_m, v_m)(1 + tol) for all sampled n, m
  ConsistencyReport support_consistency(double tol) const;

  nlohmann::json to_json() const;

 private:
  // support of the unit vector (c, s) and the contact angle (d = 2, uniform grid)
  std::pair<double, double> support_unit(double c, double s) const;
  double spline_radius(double theta) const;

  int dim_;
  std::vector<BoundarySample> samples_;
  int horizon_;
  double tol_;
  std::vector<double> r_;       // radii, d = 2 on a uniform angular grid
  std::vector<double> second_;  // spline second derivatives
  bool uniform_ = false;
};

struct BodyOptions {
  EnumerationOptions enumeration;
};

// Unit directions of the sampling grid: d = 1 gives +-1, d = 2 a uniform
// angular grid starting on the axis, d = 3 a Fibonacci sphere grid.
std::vector<DualVector> direction_grid(int dim, int resolution);

// Boundary samples of K for the model at horizon N, each solved with the
// direct correlation decomposed along its own direction. In d = 2 with a
// resolution divisible by 8 only the fundamental domain is enumerated and
// the rest follows by the square symmetry.
WulffBody build_body(const ModelPtr& model, int max_len, int resolution,
                     const BodyOptions& options = {});

struct CurvatureReport {
  std::vector<double> angle;
  std::vector<double> kappa;        // step h
  std::vector<double> kappa_coarse; // step 2h
  std::vector<double> err;          // |kappa - kappa_coarse|
  std::vector<bool> spike;
  double step = 0.0;
  double kappa_min = 0.0;
  double kappa_min_err = 0.0;  // err at the minimizing sample
  int spikes = 0;

  bool min_excludes_zero() const noexcept { return kappa_min - kappa_min_err > 0.0; }
};

// curvature of the boundary curve r(theta) by central differences with steps
// h and 2h; d = 2 only, resolution >= 32
CurvatureReport curvature(const WulffBody& body);

struct XiDiscrepancy {
  LatticePoint direction;
  double support = 0.0;
  double support_bracket = 0.0;  // |xi_N - xi_coarse| when a coarser body is given
  DecayEstimate estimate;
  double discrepancy = 0.0;  // |support - estimate| per unit of the direction
  double combined_width = 0.0;

  bool consistent() const noexcept { return discrepancy <= combined_width; }
};

// |support(v) - decay_rate_estimate(v)| for the lattice directions with
// enough multiples in the table; unreachable directions are omitted
std::vector<XiDiscrepancy> xi_consistency(const WulffBody& body, const TwoPointTable& table,
                                          std::span<const LatticePoint> directions,
                                          const WulffBody* coarser = nullptr);

// default directions for xi_consistency: axis and diagonal
std::vector<LatticePoint> standard_directions(int dim);

// decay axiom against the body: smallest C_1 with g(x) <= C_1 exp(-xi(x)) over the table
AxiomReport check_decay(const TwoPointTable& table, const WulffBody& body);

}  // namespace ozlab
