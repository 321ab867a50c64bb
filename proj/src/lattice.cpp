#include "ozlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <unordered_set>

#include "ozlab/error.hpp"

namespace ozlab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::contract: return "contract";
    case ErrorKind::domain: return "domain";
    case ErrorKind::resource: return "resource";
    case ErrorKind::data: return "data";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::range: return "range";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::fit: return "fit";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

namespace {

void check_dim(int dim) {
  require(dim >= 1 && dim <= kMaxDim, ErrorKind::contract,
          "lattice dimension must be in [1, " + std::to_string(kMaxDim) + "], got " +
              std::to_string(dim));
}

}  // namespace

LatticePoint::LatticePoint(int dim) : dim_(dim) { check_dim(dim); }

LatticePoint::LatticePoint(std::initializer_list<int> coords)
    : LatticePoint(std::span<const int>(coords.begin(), coords.size())) {}

LatticePoint::LatticePoint(std::span<const int> coords)
    : dim_(static_cast<int>(coords.size())) {
  check_dim(dim_);
  std::copy(coords.begin(), coords.end(), c_.begin());
}

LatticePoint LatticePoint::unit(int dim, int axis, int sign) {
  LatticePoint p(dim);
  require(axis >= 0 && axis < dim, ErrorKind::contract, "axis out of range");
  p[axis] = sign;
  return p;
}

LatticePoint LatticePoint::operator+(const LatticePoint& o) const {
  require(dim_ == o.dim_, ErrorKind::contract, "dimension mismatch in point sum");
  LatticePoint r = *this;
  for (int i = 0; i < dim_; ++i) r[i] += o[i];
  return r;
}

LatticePoint LatticePoint::operator-(const LatticePoint& o) const {
  require(dim_ == o.dim_, ErrorKind::contract, "dimension mismatch in point difference");
  LatticePoint r = *this;
  for (int i = 0; i < dim_; ++i) r[i] -= o[i];
  return r;
}

LatticePoint LatticePoint::operator-() const {
  LatticePoint r = *this;
  for (int i = 0; i < dim_; ++i) r[i] = -r[i];
  return r;
}

LatticePoint LatticePoint::operator*(int k) const {
  LatticePoint r = *this;
  for (int i = 0; i < dim_; ++i) r[i] *= k;
  return r;
}

bool LatticePoint::is_zero() const noexcept {
  return std::all_of(c_.begin(), c_.begin() + dim_, [](int v) { return v == 0; });
}

int LatticePoint::l1_norm() const noexcept {
  int s = 0;
  for (int i = 0; i < dim_; ++i) s += std::abs(c_[static_cast<std::size_t>(i)]);
  return s;
}

double LatticePoint::euclidean_norm() const noexcept {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double v = c_[static_cast<std::size_t>(i)];
    s += v * v;
  }
  return std::sqrt(s);
}

std::string LatticePoint::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < dim_; ++i) os << (i ? "," : "") << (*this)[i];
  os << ')';
  return os.str();
}

std::size_t LatticePointHash::operator()(const LatticePoint& p) const noexcept {
  std::size_t h = static_cast<std::size_t>(p.dim());
  for (int i = 0; i < p.dim(); ++i) {
    h ^= static_cast<std::size_t>(static_cast<unsigned>(p[i]) * 0x9E3779B1u) + 0x7f4a7c15 +
         (h << 6) + (h >> 2);
  }
  return h;
}

DualVector::DualVector(int dim) : dim_(dim) { check_dim(dim); }

DualVector::DualVector(std::initializer_list<double> comps)
    : DualVector(std::span<const double>(comps.begin(), comps.size())) {}

DualVector::DualVector(std::span<const double> comps) : dim_(static_cast<int>(comps.size())) {
  check_dim(dim_);
  std::copy(comps.begin(), comps.end(), c_.begin());
}

DualVector DualVector::operator*(double s) const {
  DualVector r = *this;
  for (int i = 0; i < dim_; ++i) r[i] *= s;
  return r;
}

DualVector DualVector::operator+(const DualVector& o) const {
  require(dim_ == o.dim_, ErrorKind::contract, "dimension mismatch in dual sum");
  DualVector r = *this;
  for (int i = 0; i < dim_; ++i) r[i] += o[i];
  return r;
}

double DualVector::norm() const noexcept { return std::sqrt(inner(*this, *this)); }

bool DualVector::is_zero() const noexcept {
  return std::all_of(c_.begin(), c_.begin() + dim_, [](double v) { return v == 0.0; });
}

bool DualVector::is_finite() const noexcept {
  return std::all_of(c_.begin(), c_.begin() + dim_, [](double v) { return std::isfinite(v); });
}

DualVector DualVector::normalized() const {
  const double n = norm();
  require(n > 0.0, ErrorKind::contract, "cannot normalize the zero dual vector");
  return *this * (1.0 / n);
}

std::vector<double> DualVector::components() const {
  return {c_.begin(), c_.begin() + dim_};
}

std::string DualVector::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (int i = 0; i < dim_; ++i) os << (i ? "," : "") << (*this)[i];
  os << ')';
  return os.str();
}

double inner(const DualVector& t, const LatticePoint& x) {
  require(t.dim() == x.dim(), ErrorKind::contract,
          "dimension mismatch: dual has d=" + std::to_string(t.dim()) + ", point has d=" +
              std::to_string(x.dim()));
  double s = 0.0;
  for (int i = 0; i < t.dim(); ++i) s += t[i] * x[i];
  return s;
}

double inner(const DualVector& a, const DualVector& b) {
  require(a.dim() == b.dim(), ErrorKind::contract, "dimension mismatch in dual product");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<LatticePoint> unit_steps(int dim) {
  std::vector<LatticePoint> steps;
  for (int i = 0; i < dim; ++i) {
    steps.push_back(LatticePoint::unit(dim, i, 1));
    steps.push_back(LatticePoint::unit(dim, i, -1));
  }
  return steps;
}

LatticePath::StepSet LatticePath::unit_step_set(int dim) {
  static const std::array<StepSet, kMaxDim + 1> cache = [] {
    std::array<StepSet, kMaxDim + 1> c{};
    for (int d = 1; d <= kMaxDim; ++d)
      c[static_cast<std::size_t>(d)] = std::make_shared<const std::vector<LatticePoint>>(unit_steps(d));
    return c;
  }();
  check_dim(dim);
  return cache[static_cast<std::size_t>(dim)];
}

LatticePath::LatticePath(std::vector<LatticePoint> vertices, StepSet steps)
    : vertices_(std::move(vertices)), steps_(std::move(steps)) {
  require(!vertices_.empty(), ErrorKind::contract, "a path needs at least one vertex");
  const int d = vertices_.front().dim();
  if (!steps_) steps_ = unit_step_set(d);
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    require(vertices_[i].dim() == d, ErrorKind::contract, "mixed dimensions in path");
    const LatticePoint step = vertices_[i] - vertices_[i - 1];
    require(std::find(steps_->begin(), steps_->end(), step) != steps_->end(),
            ErrorKind::contract, "step " + step.to_string() + " not in the step support");
  }
}

LatticePath LatticePath::empty_at(const LatticePoint& origin, StepSet steps) {
  return LatticePath({origin}, std::move(steps));
}

LatticePath LatticePath::slice(int first, int last) const {
  require(0 <= first && first <= last && last <= length(), ErrorKind::contract,
          "path slice out of range");
  LatticePath p;
  p.vertices_.assign(vertices_.begin() + first, vertices_.begin() + last + 1);
  p.steps_ = steps_;
  return p;
}

LatticePath LatticePath::concat(const LatticePath& next) const {
  require(end() == next.start(), ErrorKind::contract,
          "concatenation requires matching endpoints");
  LatticePath p = *this;
  p.vertices_.insert(p.vertices_.end(), next.vertices_.begin() + 1, next.vertices_.end());
  return p;
}

LatticePath LatticePath::translated(const LatticePoint& shift) const {
  LatticePath p = *this;
  for (auto& v : p.vertices_) v = v + shift;
  return p;
}

LatticePath LatticePath::append_translated(const LatticePath& next) const {
  return concat(next.translated(end() - next.start()));
}

bool LatticePath::is_self_avoiding() const {
  std::unordered_set<LatticePoint, LatticePointHash> seen;
  for (const auto& v : vertices_) {
    if (!seen.insert(v).second) return false;
  }
  return true;
}

Cone::Cone(DualVector axis, double delta) : axis_(axis), delta_(delta) {
  require(delta > 0.0 && delta < 1.0, ErrorKind::domain, "cone aperture delta must lie in (0,1)");
}

bool Cone::contains(const LatticePoint& v, const Norm& xi) const {
  return inner(axis_, v) > (1.0 - delta_) * xi(v);
}

}  // namespace ozlab
