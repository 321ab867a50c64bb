#pragma once

#include <map>
#include <span>
#include <vector>

#include "ozlab/wulff.hpp"

namespace ozlab {

struct Skeleton {
  std::vector<LatticePoint> points;
  std::vector<int> indices;  // vertex index of each point in the source path
  double K = 0.0;
};

// x_0 = start; x_{k+1} = first later vertex with xi(z - x_k) > K; the end is
// appended when the greedy loop does not land on it
Skeleton build_skeleton(const LatticePath& path, double K, const WulffBody& body);
Skeleton build_skeleton(std::span<const LatticePoint> vertices, double K, const WulffBody& body);

struct SurchargeReport {
  std::vector<double> hops;
  double total = 0.0;
  DualVector direction;
};

// s_t(v) = xi(v) - (t, v) per hop; t must lie in the body up to tol
SurchargeReport surcharge(const Skeleton& skeleton, const DualVector& t, const WulffBody& body,
                          double tol = 1e-6);

// Regeneration points l (with respect to t) whose whole suffix satisfies
// z_j - z_l in K U + C_delta(t): the xi-distance from z_j - z_l to the
// closed cone is at most K. d <= 2.
std::vector<int> break_points(const LatticePath& path, const DualVector& t, double K,
                              double delta, const WulffBody& body);

// xi-distance from v to the closed cone {c : (t, c) >= (1 - delta) xi(c)}
double cone_distance(const DualVector& v, const DualVector& t, double delta,
                     const WulffBody& body);

struct SurchargeHistogram {
  std::map<int, double> weight;  // backtracking hop count -> total path weight
  double threshold = 0.0;        // hops with surcharge >= threshold backtrack
  std::size_t paths = 0;

  double total() const;
  // share of the weight carried by paths with at least one backtracking hop
  double backtracking_fraction() const;
};

// All SAWs 0 -> x with at most N steps, skeletonized at scale K; hops with
// s_t >= K/2 count as backtracking.
SurchargeHistogram surcharge_histogram(const ModelPtr& model, int max_len, double K,
                                       const LatticePoint& x, const DualVector& t,
                                       const WulffBody& body, const EnumerationOptions& options = {});

}  // namespace ozlab
