#pragma once

#include <compare>
#include <iosfwd>
#include <map>
#include <string>

#include "ozlab/lattice.hpp"

namespace ozlab {

// (displacement, length) index of a length-resolved generating function
struct Atom {
  LatticePoint x;
  int n = 0;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.n <=> b.n;
  }
};

// Sparse map (x, n) -> nonnegative coefficient, truncated at a length horizon.
// Iteration order is lexicographic in (x_1, ..., x_d, n), which is also the
// CSV row order.
class SpaceLengthSeries {
 public:
  using Map = std::map<Atom, double>;

  SpaceLengthSeries(int dim, int horizon);

  // delta at (0, 0) with coefficient 1
  static SpaceLengthSeries unit(int dim, int horizon);

  int dim() const noexcept { return dim_; }
  int horizon() const noexcept { return horizon_; }
  const Map& atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }
  std::size_t size() const noexcept { return atoms_.size(); }

  // adds to the coefficient at (x, n); atoms beyond the horizon are dropped
  void add(const LatticePoint& x, int n, double coeff);
  double at(const LatticePoint& x, int n) const;
  // sum over lengths at a fixed displacement
  double total_at(const LatticePoint& x) const;
  double total_mass() const;

  // sum_{x,n} coeff * exp((t, x))
  double tilted_mass(const DualVector& t) const;

  void write_csv(std::ostream& os) const;
  static SpaceLengthSeries read_csv(std::istream& is, int horizon);

 private:
  int dim_;
  int horizon_;
  Map atoms_;
};

// (a * b)(x, n) = sum_{y, m} a(y, m) b(x - y, n - m), horizon = min of inputs
SpaceLengthSeries convolve(const SpaceLengthSeries& a, const SpaceLengthSeries& b);

// sum_{k >= 0} c^{*k} up to the horizon; c must not carry zero-length atoms
SpaceLengthSeries geometric_sum(const SpaceLengthSeries& c);

// largest |a - b| over the union of supports
double max_abs_difference(const SpaceLengthSeries& a, const SpaceLengthSeries& b);

// shortest round-trip decimal text for a double
std::string format_double(double v);

}  // namespace ozlab
