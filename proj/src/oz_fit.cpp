#include "ozlab/oz_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ozlab/error.hpp"
#include "ozlab/series.hpp"

namespace ozlab {

namespace {

struct Point {
  double r;
  double y;
  double sigma;
};

OzParams solve(const std::vector<Point>& pts, std::optional<double> fixed_p, bool unit_weights) {
  const int n = static_cast<int>(pts.size());
  const int k = fixed_p ? 2 : 3;
  Eigen::MatrixXd A(n, k);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const auto& p = pts[static_cast<std::size_t>(i)];
    const double w = unit_weights ? 1.0 : 1.0 / p.sigma;
    A(i, 0) = w;
    if (fixed_p) {
      A(i, 1) = -p.r * w;
      b(i) = (p.y + *fixed_p * std::log(p.r)) * w;
    } else {
      A(i, 1) = -std::log(p.r) * w;
      A(i, 2) = -p.r * w;
      b(i) = p.y * w;
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  require(qr.rank() == k, ErrorKind::fit, "ill-conditioned OZ fit design (rank " +
                                              std::to_string(qr.rank()) + " < " + std::to_string(k) + ")");
  const Eigen::VectorXd beta = qr.solve(b);
  const Eigen::VectorXd resid = A * beta - b;
  Eigen::MatrixXd cov = (A.transpose() * A).inverse();
  OzParams out;
  out.chi2 = resid.squaredNorm();
  out.dof = n - k;
  if (unit_weights && out.dof > 0) cov *= out.chi2 / out.dof;
  out.p_fixed = fixed_p.has_value();
  out.log_psi = beta(0);
  if (fixed_p) {
    out.p = *fixed_p;
    out.xi = beta(1);
    const int map[2] = {0, 2};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out.cov[static_cast<std::size_t>(map[i])][static_cast<std::size_t>(map[j])] = cov(i, j);
  } else {
    out.p = beta(1);
    out.xi = beta(2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out.cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cov(i, j);
  }
  return out;
}

nlohmann::json params_json(const OzParams& p) {
  nlohmann::json cov = nlohmann::json::array();
  for (const auto& row : p.cov) cov.push_back({row[0], row[1], row[2]});
  return {{"log_psi", p.log_psi}, {"psi", std::exp(p.log_psi)}, {"p", p.p},
          {"xi", p.xi}, {"sigma_p", p.sigma_p()}, {"sigma_xi", p.sigma_xi()},
          {"chi2", p.chi2}, {"dof", p.dof}, {"chi2_per_dof", p.chi2_per_dof()},
          {"p_fixed", p.p_fixed}, {"cov", cov}};
}

}  // namespace

double OzParams::sigma_p() const { return p_fixed ? 0.0 : std::sqrt(std::max(0.0, cov[1][1])); }
double OzParams::sigma_xi() const { return std::sqrt(std::max(0.0, cov[2][2])); }
double OzParams::chi2_per_dof() const {
  return dof > 0 ? chi2 / dof : std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json OzFit::to_json() const {
  return {{"direction", direction.components()}, {"window", {x_min, x_max}}, {"points", points},
          {"free", params_json(free)}, {"constrained", params_json(constrained)}};
}

OzFit oz_fit(std::span<const CorrelationEstimate> estimates, const DualVector& direction, int dim,
             const FitWindow& window) {
  require(direction.dim() == dim && !direction.is_zero() && direction.is_finite(), ErrorKind::contract,
          "fit direction must be a nonzero vector of dimension d");
  const DualVector u = direction.normalized();
  std::vector<Point> ray;
  std::vector<const CorrelationEstimate*> src;
  for (const auto& e : estimates) {
    require(e.x.dim() == dim, ErrorKind::contract, "estimate dimension mismatch");
    if (e.x.is_zero()) continue;
    const double r = e.x.euclidean_norm();
    double off = 0.0;
    for (int i = 0; i < dim; ++i) off = std::max(off, std::abs(e.x[i] / r - u[i]));
    if (off > 1e-12 || r < window.x_min || r > window.x_max) continue;
    ray.push_back({r, 0.0, 0.0});
    src.push_back(&e);
  }
  std::vector<std::size_t> order(ray.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ray[a].r < ray[b].r; });

  std::vector<Point> pts;
  std::size_t with_error = 0;
  for (const std::size_t i : order) {
    const auto& e = *src[i];
    if (!(e.mean > 0.0) || e.stderr_ >= 0.3 * e.mean) break;
    pts.push_back({ray[i].r, std::log(e.mean), e.stderr_ / e.mean});
    with_error += e.stderr_ > 0.0 ? 1 : 0;
  }
  require(with_error == 0 || with_error == pts.size(), ErrorKind::data,
          "fit window mixes estimates with and without standard errors");
  const bool unit = with_error == 0;
  const double p0 = 0.5 * (dim - 1);

  OzFit fit;
  fit.direction = direction;
  for (int round = 0;; ++round) {
    require(pts.size() >= 6, ErrorKind::data,
            "OZ fit needs at least 6 positive, resolved points in the window, got " +
                std::to_string(pts.size()));
    fit.free = solve(pts, std::nullopt, unit);
    const double lmin = fit.free.xi > 0.0 ? 3.0 / fit.free.xi : 0.0;
    if (pts.front().r >= lmin || round == 10) break;
    // asymptotic window: start at three correlation lengths
    pts.erase(pts.begin(), std::find_if(pts.begin(), pts.end(), [&](const Point& p) { return p.r >= lmin; }));
  }
  fit.constrained = solve(pts, p0, unit);
  fit.x_min = pts.front().r;
  fit.x_max = pts.back().r;
  fit.points = static_cast<int>(pts.size());
  return fit;
}

}  // namespace ozlab
