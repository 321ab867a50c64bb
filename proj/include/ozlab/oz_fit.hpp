#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "ozlab/ising.hpp"

namespace ozlab {

// weighted least squares of log g = log Psi - p log r - xi r
struct OzParams {
  double log_psi = 0.0;
  double p = 0.0;
  double xi = 0.0;
  std::array<std::array<double, 3>, 3> cov{};  // order log_psi, p, xi
  double chi2 = 0.0;
  int dof = 0;
  bool p_fixed = false;

  double sigma_p() const;
  double sigma_xi() const;
  double chi2_per_dof() const;
};

struct OzFit {
  DualVector direction;
  OzParams free;
  OzParams constrained;  // p = (d - 1) / 2
  double x_min = 0.0;    // fit window actually used, in |x|
  double x_max = 0.0;
  int points = 0;

  nlohmann::json to_json() const;
};

struct FitWindow {
  double x_min = 0.0;
  double x_max = std::numeric_limits<double>::infinity();
};

// Uses the estimates along the ray of `direction` with x_min <= |x| <= x_max.
// The window ends before the first estimate that is nonpositive or has a
// relative error >= 30%, and x_min is raised until it is at least three
// correlation lengths of the fit. Needs >= 6 points.
OzFit oz_fit(std::span<const CorrelationEstimate> estimates, const DualVector& direction, int dim,
             const FitWindow& window = {});

}  // namespace ozlab
