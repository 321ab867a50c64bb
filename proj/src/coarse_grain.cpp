#include "ozlab/coarse_grain.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "ozlab/error.hpp"
#include "saw_dfs.hpp"

namespace ozlab {

namespace {

DualVector as_dual(const LatticePoint& x) {
  DualVector v(x.dim());
  for (int i = 0; i < x.dim(); ++i) v[i] = x[i];
  return v;
}

template <class Xi>
Skeleton greedy_skeleton(std::span<const LatticePoint> vs, double K, Xi&& xi) {
  require(K > 0.0, ErrorKind::contract, "skeleton scale K must be positive");
  require(!vs.empty(), ErrorKind::contract, "empty vertex sequence");
  Skeleton sk;
  sk.K = K;
  sk.points.push_back(vs.front());
  sk.indices.push_back(0);
  for (std::size_t j = 1; j < vs.size(); ++j) {
    if (xi(vs[j] - sk.points.back()) > K) {
      sk.points.push_back(vs[j]);
      sk.indices.push_back(static_cast<int>(j));
    }
  }
  if (sk.indices.back() != static_cast<int>(vs.size()) - 1) {
    sk.points.push_back(vs.back());
    sk.indices.push_back(static_cast<int>(vs.size()) - 1);
  }
  return sk;
}

// boundary rays of the closed cone {(t, c) >= (1 - delta) xi(c)} in d <= 2
class ConeGeometry {
 public:
  ConeGeometry(const DualVector& t, double delta, const WulffBody& body)
      : t_(t), delta_(delta), body_(body) {
    require(delta > 0.0 && delta < 1.0, ErrorKind::domain, "cone opening delta must lie in (0, 1)");
    require(t.dim() == body.dim(), ErrorKind::contract, "cone axis dimension mismatch");
    const int dim = body.dim();
    if (dim == 1) {
      for (double sgn : {1.0, -1.0})
        if (gap(DualVector{sgn}) >= 0.0) rays_.push_back(DualVector{sgn});
      full_ = rays_.size() == 2;
      return;
    }
    require(dim == 2, ErrorKind::unsupported, "break points are implemented for d <= 2");
    constexpr int kScan = 720;
    auto g = [&](double th) { return gap(DualVector{std::cos(th), std::sin(th)}); };
    int best = 0;
    double best_g = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(kScan);
    for (int k = 0; k < kScan; ++k) {
      vals[static_cast<std::size_t>(k)] = g(2.0 * std::numbers::pi * k / kScan);
      if (vals[static_cast<std::size_t>(k)] > best_g) {
        best_g = vals[static_cast<std::size_t>(k)];
        best = k;
      }
    }
    if (best_g < 0.0) return;  // only the apex
    const double h = 2.0 * std::numbers::pi / kScan;
    for (int sgn : {1, -1}) {
      int k = 1;
      while (k < kScan && vals[static_cast<std::size_t>(((best + sgn * k) % kScan + kScan) % kScan)] >= 0.0) ++k;
      if (k == kScan) {
        full_ = true;
        rays_.clear();
        return;
      }
      double in = (best + sgn * (k - 1)) * h;
      double out = (best + sgn * k) * h;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (in + out);
        (g(mid) >= 0.0 ? in : out) = mid;
      }
      rays_.push_back(DualVector{std::cos(in), std::sin(in)});
    }
  }

  bool contains(const DualVector& v) const {
    if (v.is_zero() || full_) return true;
    return gap(v) >= -1e-12 * v.norm();
  }

  double distance(const DualVector& v) const {
    if (contains(v)) return 0.0;
    double best = body_.support(v);
    const double back = body_.support(v * -1.0);
    for (const auto& b : rays_) {
      const double hi = (best + back) / body_.support(b * -1.0);
      auto f = [&](double s) { return body_.support(v + b * (-s)); };
      double lo = 0.0;
      double up = hi;
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = up - gr * (up - lo);
      double x2 = lo + gr * (up - lo);
      double f1 = f(x1);
      double f2 = f(x2);
      for (int it = 0; it < 100; ++it) {
        if (f1 > f2) {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (up - lo);
          f2 = f(x2);
        } else {
          up = x2;
          x2 = x1;
          f2 = f1;
          x1 = up - gr * (up - lo);
          f1 = f(x1);
        }
      }
      best = std::min(best, std::min(f1, f2));
    }
    return best;
  }

 private:
  double gap(const DualVector& u) const { return inner(t_, u) - (1.0 - delta_) * body_.support(u); }

  DualVector t_;
  double delta_;
  const WulffBody& body_;
  std::vector<DualVector> rays_;
  bool full_ = false;
};

class HistogramVisitor {
 public:
  HistogramVisitor(const WulffBody& body, const DualVector& t, const LatticePoint& target, double K,
                   double log_step, int max_len)
      : body_(&body), t_(t), target_(target), K_(K), log_step_(log_step),
        path_(static_cast<std::size_t>(max_len) + 1) {}

  void enter(int depth, const LatticePoint& x, std::size_t, bool record) {
    path_[static_cast<std::size_t>(depth)] = x;
    if (!record || x != target_) return;
    const std::span<const LatticePoint> vs(path_.data(), static_cast<std::size_t>(depth) + 1);
    const auto sk = greedy_skeleton(vs, K_, [this](const LatticePoint& v) { return xi(v); });
    int back = 0;
    for (std::size_t k = 1; k < sk.points.size(); ++k) {
      const LatticePoint v = sk.points[k] - sk.points[k - 1];
      if (xi(v) - inner(t_, v) >= 0.5 * K_) ++back;
    }
    hist_.weight[back] += std::exp(log_step_ * depth);
    ++hist_.paths;
  }
  void leave(int) {}
  void merge(const HistogramVisitor& o) {
    for (const auto& [k, w] : o.hist_.weight) hist_.weight[k] += w;
    hist_.paths += o.hist_.paths;
  }

  SurchargeHistogram result() const { return hist_; }

 private:
  double xi(const LatticePoint& v) {
    auto it = cache_.find(v);
    if (it != cache_.end()) return it->second;
    const double val = body_->xi(v);
    cache_.emplace(v, val);
    return val;
  }

  const WulffBody* body_;
  DualVector t_;
  LatticePoint target_;
  double K_;
  double log_step_;
  std::vector<LatticePoint> path_;
  std::unordered_map<LatticePoint, double, LatticePointHash> cache_;
  SurchargeHistogram hist_;
};

void require_in_body(const DualVector& t, const WulffBody& body, double tol) {
  require(t.dim() == body.dim(), ErrorKind::contract, "dual dimension mismatch");
  require(body.contains(t, tol), ErrorKind::domain,
          "dual " + t.to_string() + " lies outside the body; surcharges could be negative");
}

}  // namespace

Skeleton build_skeleton(std::span<const LatticePoint> vertices, double K, const WulffBody& body) {
  return greedy_skeleton(vertices, K, [&](const LatticePoint& v) { return body.xi(v); });
}

Skeleton build_skeleton(const LatticePath& path, double K, const WulffBody& body) {
  return build_skeleton(path.vertices(), K, body);
}

SurchargeReport surcharge(const Skeleton& skeleton, const DualVector& t, const WulffBody& body,
                          double tol) {
  require_in_body(t, body, tol);
  SurchargeReport rep;
  rep.direction = t;
  for (std::size_t k = 1; k < skeleton.points.size(); ++k) {
    const LatticePoint v = skeleton.points[k] - skeleton.points[k - 1];
    // t inside the body makes this nonnegative up to the membership tolerance
    const double s = std::max(0.0, body.xi(v) - inner(t, v));
    rep.hops.push_back(s);
    rep.total += s;
  }
  return rep;
}

double cone_distance(const DualVector& v, const DualVector& t, double delta, const WulffBody& body) {
  return ConeGeometry(t, delta, body).distance(v);
}

std::vector<int> break_points(const LatticePath& path, const DualVector& t, double K, double delta,
                              const WulffBody& body) {
  require(K > 0.0, ErrorKind::contract, "K must be positive");
  std::vector<int> out;
  const auto regen = regeneration_points(path, t);
  if (regen.empty()) return out;
  const ConeGeometry cone(t, delta, body);
  for (const int l : regen) {
    bool ok = true;
    for (int j = l + 1; j <= path.length() && ok; ++j) {
      const DualVector v = as_dual(path[static_cast<std::size_t>(j)] - path[static_cast<std::size_t>(l)]);
      ok = cone.distance(v) <= K;
    }
    if (ok) out.push_back(l);
  }
  return out;
}

double SurchargeHistogram::total() const {
  double s = 0.0;
  for (const auto& [k, w] : weight) s += w;
  return s;
}

double SurchargeHistogram::backtracking_fraction() const {
  const double all = total();
  if (all == 0.0) return 0.0;
  double back = 0.0;
  for (const auto& [k, w] : weight)
    if (k > 0) back += w;
  return back / all;
}

SurchargeHistogram surcharge_histogram(const ModelPtr& model, int max_len, double K,
                                       const LatticePoint& x, const DualVector& t,
                                       const WulffBody& body, const EnumerationOptions& options) {
  require(model != nullptr, ErrorKind::contract, "null model");
  require(model->name() == "saw", ErrorKind::unsupported,
          "surcharge histograms are implemented for self-avoiding walks only");
  require(K > 0.0, ErrorKind::contract, "K must be positive");
  require(x.dim() == model->dim(), ErrorKind::contract, "target dimension mismatch");
  check_enumeration_cap(model->dim(), max_len, options.caps);
  require_in_body(t, body, 1e-6);
  const HistogramVisitor proto(body, t, x, K, *model->log_step_weight(), max_len);
  auto hist = detail::run_saw_enumeration(model->dim(), max_len, proto, options.threads).result();
  hist.threshold = 0.5 * K;
  return hist;
}

}  // namespace ozlab
