#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ozlab {

inline constexpr int kMaxDim = 4;

// integer site of Z^d, d <= kMaxDim; unused trailing coordinates stay zero
class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(int dim);
  LatticePoint(std::initializer_list<int> coords);
  explicit LatticePoint(std::span<const int> coords);

  static LatticePoint unit(int dim, int axis, int sign = 1);

  int dim() const noexcept { return dim_; }
  int operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
  int& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }

  LatticePoint operator+(const LatticePoint& o) const;
  LatticePoint operator-(const LatticePoint& o) const;
  LatticePoint operator-() const;
  LatticePoint operator*(int k) const;

  bool is_zero() const noexcept;
  int l1_norm() const noexcept;
  double euclidean_norm() const noexcept;

  std::string to_string() const;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend std::strong_ordering operator<=>(const LatticePoint& a, const LatticePoint& b) {
    if (auto c = a.dim_ <=> b.dim_; c != 0) return c;
    return a.c_ <=> b.c_;
  }

 private:
  std::array<int, kMaxDim> c_{};
  int dim_ = 0;
};

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const noexcept;
};

// real vector of the dual space (inverse lattice length); the tilt t of the
// exponentially weighted susceptibility and the normal of regeneration hyperplanes
class DualVector {
 public:
  DualVector() = default;
  explicit DualVector(int dim);
  DualVector(std::initializer_list<double> comps);
  explicit DualVector(std::span<const double> comps);

  int dim() const noexcept { return dim_; }
  double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }

  DualVector operator*(double s) const;
  DualVector operator+(const DualVector& o) const;

  double norm() const noexcept;
  bool is_zero() const noexcept;
  bool is_finite() const noexcept;
  DualVector normalized() const;

  std::vector<double> components() const;
  std::string to_string() const;

  friend bool operator==(const DualVector&, const DualVector&) = default;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

// scalar product (t, x); throws a contract error on dimension mismatch
double inner(const DualVector& t, const LatticePoint& x);
double inner(const DualVector& a, const DualVector& b);

// unit steps +-e_i
std::vector<LatticePoint> unit_steps(int dim);

// ordered vertex sequence with steps restricted to a support set; a path with
// a single vertex is the empty path (length 0)
class LatticePath {
 public:
  using StepSet = std::shared_ptr<const std::vector<LatticePoint>>;

  LatticePath() = default;
  // validates consecutive differences against the step set (unit steps by default)
  explicit LatticePath(std::vector<LatticePoint> vertices, StepSet steps = nullptr);

  static LatticePath empty_at(const LatticePoint& origin, StepSet steps = nullptr);
  static StepSet unit_step_set(int dim);

  int dim() const noexcept { return vertices_.empty() ? 0 : vertices_.front().dim(); }
  int length() const noexcept { return static_cast<int>(vertices_.size()) - 1; }
  std::span<const LatticePoint> vertices() const noexcept { return vertices_; }
  const LatticePoint& operator[](std::size_t i) const noexcept { return vertices_[i]; }
  const LatticePoint& start() const { return vertices_.front(); }
  const LatticePoint& end() const { return vertices_.back(); }
  LatticePoint displacement() const { return end() - start(); }
  const StepSet& steps() const noexcept { return steps_; }

  // vertices first..last inclusive
  LatticePath slice(int first, int last) const;
  // this path followed by `next`, which must start where this one ends
  LatticePath concat(const LatticePath& next) const;
  LatticePath translated(const LatticePoint& shift) const;
  // `next` translated so it starts at this path's end, then concatenated
  LatticePath append_translated(const LatticePath& next) const;

  bool is_self_avoiding() const;

  friend bool operator==(const LatticePath& a, const LatticePath& b) {
    return a.vertices_ == b.vertices_;
  }

 private:
  std::vector<LatticePoint> vertices_;
  StepSet steps_;
};

// C_delta(t) = { v : (t, v) > (1 - delta) xi(v) }
class Cone {
 public:
  using Norm = std::function<double(const LatticePoint&)>;

  Cone(DualVector axis, double delta);

  const DualVector& axis() const noexcept { return axis_; }
  double delta() const noexcept { return delta_; }

  bool contains(const LatticePoint& v, const Norm& xi) const;

 private:
  DualVector axis_;
  double delta_;
};

}  // namespace ozlab
