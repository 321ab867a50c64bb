#include "ozlab/wulff.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "ozlab/error.hpp"

namespace ozlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double exponent_guard(double e) {
  require(e < 700.0, ErrorKind::range, "tilted weight overflows (exponent " + format_double(e) + ")");
  return std::exp(e);
}

DualVector rot90(const DualVector& v) { return DualVector{-v[1], v[0]}; }
DualVector swap_xy(const DualVector& v) { return DualVector{v[1], v[0]}; }

// periodic cubic spline second derivatives on a uniform grid
std::vector<double> periodic_spline(const std::vector<double>& y, double h) {
  const int n = static_cast<int>(y.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n;
    const int next = (i + 1) % n;
    a(i, prev) += 1.0;
    a(i, i) += 4.0;
    a(i, next) += 1.0;
    b(i) = 6.0 * (y[static_cast<std::size_t>(prev)] - 2.0 * y[static_cast<std::size_t>(i)] +
                  y[static_cast<std::size_t>(next)]) / (h * h);
  }
  const Eigen::VectorXd m = a.partialPivLu().solve(b);
  return {m.data(), m.data() + n};
}

double kappa_polar(double r, double r1, double r2) {
  return (r * r + 2.0 * r1 * r1 - r * r2) / std::pow(r * r + r1 * r1, 1.5);
}

}  // namespace

double perron_root(const DirectCorrelation& dc, const DualVector& z) {
  require(z.dim() == dc.bulk.dim(), ErrorKind::contract, "tilt dimension mismatch");
  double rho = 0.0;
  for (const auto& [atom, c] : dc.bulk.atoms()) rho += c * exponent_guard(inner(z, atom.x));
  require(std::isfinite(rho), ErrorKind::range, "Perron root overflows");
  return rho;
}

DualVector perron_gradient(const DirectCorrelation& dc, const DualVector& z) {
  require(z.dim() == dc.bulk.dim(), ErrorKind::contract, "tilt dimension mismatch");
  DualVector g(z.dim());
  for (const auto& [atom, c] : dc.bulk.atoms()) {
    const double w = c * exponent_guard(inner(z, atom.x));
    for (int i = 0; i < z.dim(); ++i) g[i] += w * atom.x[i];
  }
  return g;
}

DualVector solve_boundary(const DirectCorrelation& dc, const DualVector& n_in) {
  require(n_in.dim() == dc.bulk.dim() && !n_in.is_zero() && n_in.is_finite(),
          ErrorKind::contract, "boundary direction must be a finite nonzero vector");
  const DualVector n = n_in.normalized();
  constexpr double kLimit = 1024.0;
  auto rho = [&](double s) {
    try {
      return perron_root(dc, n * s);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::range) throw;
      fail(ErrorKind::divergence, "no crossing of rho = 1 along " + n.to_string() +
                                      " before overflow");
    }
  };
  double lo = 0.0;
  double hi = 0.0;
  if (rho(0.0) <= 1.0) {
    hi = 1.0;
    while (rho(hi) <= 1.0) {
      lo = hi;
      hi *= 2.0;
      require(hi <= kLimit, ErrorKind::divergence,
              "no crossing of rho = 1 along " + n.to_string() + " within |s| <= 1024");
    }
  } else {
    lo = -1.0;
    while (rho(lo) > 1.0) {
      hi = lo;
      lo *= 2.0;
      require(lo >= -kLimit, ErrorKind::divergence,
              "no crossing of rho = 1 along " + n.to_string() + " within |s| <= 1024");
    }
  }
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (rho(mid) <= 1.0 ? lo : hi) = mid;
  }
  return n * lo;
}

WulffBody::WulffBody(int dim, std::vector<BoundarySample> samples, int horizon, double tol)
    : dim_(dim), samples_(std::move(samples)), horizon_(horizon), tol_(tol) {
  require(dim >= 1 && dim <= kMaxDim, ErrorKind::contract, "body dimension out of range");
  require(!samples_.empty(), ErrorKind::contract, "body needs boundary samples");
  for (const auto& s : samples_) {
    require(s.direction.dim() == dim && s.dual.dim() == dim, ErrorKind::contract,
            "boundary sample dimension mismatch");
    require(s.dual.is_finite(), ErrorKind::domain, "non-finite boundary dual at " + s.direction.to_string());
    require(inner(s.dual, s.direction) > 0.0, ErrorKind::domain,
            "origin is not interior: boundary dual " + s.dual.to_string() + " along " +
                s.direction.to_string() + " (total bulk mass exceeds 1 at t = 0)");
  }

  const int n = static_cast<int>(samples_.size());
  if (dim == 2 && n >= 4) {
    uniform_ = true;
    for (int k = 0; k < n && uniform_; ++k) {
      const double th = kTwoPi * k / n;
      const auto& d = samples_[static_cast<std::size_t>(k)].direction;
      uniform_ = std::abs(d[0] - std::cos(th)) < 1e-12 && std::abs(d[1] - std::sin(th)) < 1e-12;
    }
  }
  if (uniform_) {
    r_ = radii();
    second_ = periodic_spline(r_, kTwoPi / n);
  }
  for (int k = 0; k < n; ++k) {
    auto& s = samples_[static_cast<std::size_t>(k)];
    if (s.normal.dim() == dim) {
      require(!s.normal.is_zero() && s.normal.is_finite(), ErrorKind::domain,
              "degenerate normal at " + s.direction.to_string());
      s.normal = s.normal.normalized();
      continue;
    }
    if (uniform_) {
      const double h = kTwoPi / n;
      const auto i = static_cast<std::size_t>(k);
      const auto j = static_cast<std::size_t>((k + 1) % n);
      const double r = r_[i];
      const double dr = (r_[j] - r_[i]) / h - h * (2.0 * second_[i] + second_[j]) / 6.0;
      const double c = s.direction[0];
      const double sn = s.direction[1];
      s.normal = DualVector{r * c + dr * sn, r * sn - dr * c}.normalized();
    } else {
      s.normal = s.direction.normalized();
    }
  }
}

WulffBody WulffBody::circle(double radius, int resolution) {
  return from_radial([radius](double) { return radius; }, resolution);
}

WulffBody WulffBody::from_radial(const std::function<double(double)>& r, int resolution) {
  require(resolution >= 4, ErrorKind::contract, "resolution must be at least 4");
  std::vector<BoundarySample> samples;
  for (const auto& n : direction_grid(2, resolution)) {
    const double th = std::atan2(n[1], n[0]);
    samples.push_back({n, n * r(th), DualVector()});
  }
  return WulffBody(2, std::move(samples), 0, 0.0);
}

std::vector<double> WulffBody::radii() const {
  std::vector<double> out;
  for (const auto& s : samples_) out.push_back(inner(s.dual, s.direction));
  return out;
}

double WulffBody::spline_radius(double theta) const {
  const int n = static_cast<int>(r_.size());
  const double h = kTwoPi / n;
  double u = theta / h;
  const double fl = std::floor(u);
  u -= fl;
  const int i = ((static_cast<int>(fl) % n) + n) % n;
  const auto a = static_cast<std::size_t>(i);
  const auto b = static_cast<std::size_t>((i + 1) % n);
  const double x = u * h;
  const double xb = h - x;
  return second_[a] * xb * xb * xb / (6.0 * h) + second_[b] * x * x * x / (6.0 * h) +
         (r_[a] / h - second_[a] * h / 6.0) * xb + (r_[b] / h - second_[b] * h / 6.0) * x;
}

std::pair<double, double> WulffBody::support_unit(double c, double s) const {
  const DualVector u{c, s};
  int best = 0;
  double val = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const double v = inner(samples_[k].dual, u);
    if (v > val) {
      val = v;
      best = static_cast<int>(k);
    }
  }
  const int n = static_cast<int>(samples_.size());
  const double h = kTwoPi / n;
  const double phi = std::atan2(s, c);
  auto f = [&](double th) { return spline_radius(th) * std::cos(th - phi); };
  double a = (best - 1) * h;
  double b = (best + 1) * h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  const double refined = std::max(f1, f2);
  if (refined <= val) return {val, best * h};
  return {refined, f1 > f2 ? x1 : x2};
}

double WulffBody::support(const DualVector& x) const {
  require(x.dim() == dim_, ErrorKind::contract, "support argument dimension mismatch");
  const double norm = x.norm();
  if (norm == 0.0) return 0.0;
  if (uniform_) return norm * support_unit(x[0] / norm, x[1] / norm).first;
  double val = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples_) val = std::max(val, inner(s.dual, x));
  return val;
}

double WulffBody::xi(const LatticePoint& x) const {
  require(x.dim() == dim_, ErrorKind::contract, "xi argument dimension mismatch");
  int g = 0;
  for (int i = 0; i < dim_; ++i) g = std::gcd(g, std::abs(x[i]));
  if (g == 0) return 0.0;
  DualVector p(dim_);
  for (int i = 0; i < dim_; ++i) p[i] = x[i] / g;
  return g * support(p);
}

DualVector WulffBody::contact_dual(const DualVector& x) const {
  require(x.dim() == dim_ && !x.is_zero(), ErrorKind::contract, "contact direction must be nonzero");
  const DualVector u = x.normalized();
  // a sampled direction keeps its solved dual rather than the interpolant
  for (const auto& s : samples_)
    if (inner(s.direction, u) >= 1.0 - 1e-14) return s.dual;
  if (uniform_) {
    const double norm = x.norm();
    const double th = support_unit(x[0] / norm, x[1] / norm).second;
    const double r = spline_radius(th);
    return DualVector{r * std::cos(th), r * std::sin(th)};
  }
  const BoundarySample* best = &samples_.front();
  for (const auto& s : samples_)
    if (inner(s.dual, x) > inner(best->dual, x)) best = &s;
  return best->dual;
}

bool WulffBody::contains(const DualVector& t, double tol) const {
  for (const auto& m : samples_) {
    const double lim = inner(m.dual, m.normal);
    if (inner(t, m.normal) > lim + std::abs(lim) * tol) return false;
  }
  return true;
}

ConsistencyReport WulffBody::support_consistency(double tol) const {
  ConsistencyReport rep;
  rep.tol = tol;
  rep.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < samples_.size(); ++m) {
    const double rhs = inner(samples_[m].dual, samples_[m].normal);
    for (std::size_t n = 0; n < samples_.size(); ++n) {
      if (n == m) continue;
      const double excess = inner(samples_[n].dual, samples_[m].normal) / rhs - 1.0;
      if (excess > rep.worst) {
        rep.worst = excess;
        rep.worst_n = static_cast<int>(n);
        rep.worst_m = static_cast<int>(m);
      }
    }
  }
  rep.pass = !(rep.worst > tol);
  return rep;
}

nlohmann::json WulffBody::to_json() const {
  nlohmann::json dirs = nlohmann::json::array();
  nlohmann::json duals = nlohmann::json::array();
  nlohmann::json normals = nlohmann::json::array();
  for (const auto& s : samples_) {
    dirs.push_back(s.direction.components());
    duals.push_back(s.dual.components());
    normals.push_back(s.normal.components());
  }
  return {{"dim", dim_}, {"N", horizon_}, {"tol", tol_},
          {"directions", dirs}, {"duals", duals}, {"normals", normals}};
}

std::vector<DualVector> direction_grid(int dim, int resolution) {
  std::vector<DualVector> out;
  switch (dim) {
    case 1:
      out = {DualVector{1.0}, DualVector{-1.0}};
      break;
    case 2:
      require(resolution >= 4, ErrorKind::contract, "angular resolution must be at least 4");
      for (int k = 0; k < resolution; ++k) {
        const double th = kTwoPi * k / resolution;
        out.push_back(DualVector{std::cos(th), std::sin(th)});
      }
      break;
    case 3: {
      require(resolution >= 8, ErrorKind::contract, "sphere grid needs at least 8 points");
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int k = 0; k < resolution; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / resolution;
        const double r = std::sqrt(1.0 - z * z);
        out.push_back(DualVector{r * std::cos(golden * k), r * std::sin(golden * k), z});
      }
      break;
    }
    default:
      fail(ErrorKind::unsupported, "direction grids exist for d <= 3");
  }
  return out;
}

WulffBody build_body(const ModelPtr& model, int max_len, int resolution, const BodyOptions& options) {
  require(model != nullptr, ErrorKind::contract, "null model");
  const int dim = model->dim();
  auto solve = [&](const DualVector& n) {
    const auto dc = direct_correlation(model, n, max_len, options.enumeration);
    BoundarySample s;
    s.direction = n;
    try {
      s.dual = solve_boundary(dc, n);
    } catch (const Error& e) {
      fail(e.kind(), std::string(e.what()) + " (direction " + n.to_string() + ")");
    }
    s.normal = perron_gradient(dc, s.dual);
    return s;
  };

  std::vector<BoundarySample> samples;
  if (dim == 2 && resolution % 8 == 0) {
    const int quarter = resolution / 4;
    const int eighth = resolution / 8;
    std::vector<BoundarySample> base;
    for (int j = 0; j <= eighth; ++j) {
      DualVector n{1.0, 0.0};
      if (j == eighth) {
        n = DualVector{std::sqrt(0.5), std::sqrt(0.5)};
      } else if (j > 0) {
        const double th = kTwoPi * j / resolution;
        n = DualVector{std::cos(th), std::sin(th)};
      }
      base.push_back(solve(n));
    }
    for (int k = 0; k < resolution; ++k) {
      const int q = k / quarter;
      const int m = k % quarter;
      BoundarySample s = base[static_cast<std::size_t>(m <= eighth ? m : quarter - m)];
      auto map = [&](DualVector v) {
        if (m > eighth) v = swap_xy(v);
        for (int r = 0; r < q; ++r) v = rot90(v);
        return v;
      };
      samples.push_back({map(s.direction), map(s.dual), map(s.normal)});
    }
  } else {
    for (const auto& n : direction_grid(dim, resolution)) samples.push_back(solve(n));
  }
  return WulffBody(dim, std::move(samples), max_len, 0.0);
}

CurvatureReport curvature(const WulffBody& body) {
  require(body.dim() == 2, ErrorKind::unsupported, "curvature is implemented for d = 2 only");
  const auto r = body.radii();
  const int n = static_cast<int>(r.size());
  require(n >= 32, ErrorKind::data, "curvature needs angular resolution >= 32, got " + std::to_string(n));
  for (int k = 0; k < n; ++k) {
    const double th = kTwoPi * k / n;
    const auto& d = body.samples()[static_cast<std::size_t>(k)].direction;
    require(std::abs(d[0] - std::cos(th)) < 1e-12 && std::abs(d[1] - std::sin(th)) < 1e-12,
            ErrorKind::data, "curvature needs a uniform angular grid");
  }
  CurvatureReport rep;
  const double h = kTwoPi / n;
  rep.step = h;
  auto at = [&](int i) { return r[static_cast<std::size_t>(((i % n) + n) % n)]; };
  for (int i = 0; i < n; ++i) {
    const double r0 = at(i);
    const double k1 = kappa_polar(r0, (at(i + 1) - at(i - 1)) / (2.0 * h),
                                  (at(i + 1) - 2.0 * r0 + at(i - 1)) / (h * h));
    const double k2 = kappa_polar(r0, (at(i + 2) - at(i - 2)) / (4.0 * h),
                                  (at(i + 2) - 2.0 * r0 + at(i - 2)) / (4.0 * h * h));
    rep.angle.push_back(h * i);
    rep.kappa.push_back(k1);
    rep.kappa_coarse.push_back(k2);
    rep.err.push_back(std::abs(k1 - k2));
  }
  std::vector<double> mags;
  for (double k : rep.kappa) mags.push_back(std::abs(k));
  std::nth_element(mags.begin(), mags.begin() + n / 2, mags.end());
  const double median = mags[static_cast<std::size_t>(n / 2)];
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const bool spike = rep.err[ui] > 0.25 * std::abs(rep.kappa[ui]) &&
                       std::abs(rep.kappa[ui]) > 5.0 * median;
    rep.spike.push_back(spike);
    rep.spikes += spike ? 1 : 0;
  }
  const auto it = std::min_element(rep.kappa.begin(), rep.kappa.end());
  rep.kappa_min = *it;
  rep.kappa_min_err = rep.err[static_cast<std::size_t>(it - rep.kappa.begin())];
  return rep;
}

std::vector<LatticePoint> standard_directions(int dim) {
  std::vector<LatticePoint> out;
  LatticePoint v(dim);
  for (int i = 0; i < std::min(dim, 3); ++i) {
    v[i] = 1;
    out.push_back(v);
  }
  return out;
}

std::vector<XiDiscrepancy> xi_consistency(const WulffBody& body, const TwoPointTable& table,
                                          std::span<const LatticePoint> directions,
                                          const WulffBody* coarser) {
  require(body.dim() == table.dim(), ErrorKind::contract, "body and table dimensions differ");
  std::vector<XiDiscrepancy> out;
  for (const auto& v : directions) {
    XiDiscrepancy d;
    d.direction = v;
    try {
      d.estimate = decay_rate_estimate(table, v);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::data) continue;
      throw;
    }
    d.support = body.xi(v);
    if (coarser != nullptr) d.support_bracket = std::abs(d.support - coarser->xi(v));
    d.discrepancy = std::abs(d.support - d.estimate.value);
    d.combined_width = d.estimate.width() + d.support_bracket;
    out.push_back(std::move(d));
  }
  return out;
}

AxiomReport check_decay(const TwoPointTable& table, const WulffBody& body) {
  require(body.dim() == table.dim(), ErrorKind::contract, "body and table dimensions differ");
  AxiomReport rep;
  rep.axiom = AxiomId::decay;
  rep.constant = 0.0;
  LatticePoint prev(table.dim());
  bool first = true;
  for (const auto& [atom, c] : table.series().atoms()) {
    if (atom.x.is_zero() || (!first && atom.x == prev)) continue;
    first = false;
    prev = atom.x;
    ++rep.instances;
    rep.constant = std::max(rep.constant, std::exp(table.log_total_at(atom.x) + body.xi(atom.x)));
  }
  rep.pass = std::isfinite(rep.constant);
  return rep;
}

}  // namespace ozlab
