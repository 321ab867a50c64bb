#include "ozlab/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "ozlab/error.hpp"

namespace ozlab {

namespace {

struct AtomHash {
  std::size_t operator()(const Atom& a) const noexcept {
    return LatticePointHash{}(a.x) * 31u + static_cast<std::size_t>(a.n);
  }
};

void same_dim(const SpaceLengthSeries& a, const SpaceLengthSeries& b) {
  require(a.dim() == b.dim(), ErrorKind::contract,
          "series dimension mismatch: " + std::to_string(a.dim()) + " vs " +
              std::to_string(b.dim()));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

SpaceLengthSeries::SpaceLengthSeries(int dim, int horizon) : dim_(dim), horizon_(horizon) {
  require(dim >= 1 && dim <= kMaxDim, ErrorKind::contract, "series dimension out of range");
  require(horizon >= 0, ErrorKind::contract, "series horizon must be nonnegative");
}

SpaceLengthSeries SpaceLengthSeries::unit(int dim, int horizon) {
  SpaceLengthSeries s(dim, horizon);
  s.add(LatticePoint(dim), 0, 1.0);
  return s;
}

void SpaceLengthSeries::add(const LatticePoint& x, int n, double coeff) {
  require(x.dim() == dim_, ErrorKind::contract, "atom dimension mismatch");
  require(n >= 0, ErrorKind::contract, "atom length must be nonnegative");
  require(coeff >= 0.0, ErrorKind::contract, "series coefficients must be nonnegative");
  if (n > horizon_ || coeff == 0.0) return;
  atoms_[Atom{x, n}] += coeff;
}

double SpaceLengthSeries::at(const LatticePoint& x, int n) const {
  auto it = atoms_.find(Atom{x, n});
  return it == atoms_.end() ? 0.0 : it->second;
}

double SpaceLengthSeries::total_at(const LatticePoint& x) const {
  double s = 0.0;
  for (auto it = atoms_.lower_bound(Atom{x, 0}); it != atoms_.end() && it->first.x == x; ++it)
    s += it->second;
  return s;
}

double SpaceLengthSeries::total_mass() const {
  double s = 0.0;
  for (const auto& [a, c] : atoms_) s += c;
  return s;
}

double SpaceLengthSeries::tilted_mass(const DualVector& t) const {
  double s = 0.0;
  for (const auto& [a, c] : atoms_) s += c * std::exp(inner(t, a.x));
  return s;
}

void SpaceLengthSeries::write_csv(std::ostream& os) const {
  for (int i = 0; i < dim_; ++i) os << 'x' << (i + 1) << ',';
  os << "n,coeff\n";
  for (const auto& [a, c] : atoms_) {
    for (int i = 0; i < dim_; ++i) os << a.x[i] << ',';
    os << a.n << ',' << format_double(c) << '\n';
  }
}

SpaceLengthSeries SpaceLengthSeries::read_csv(std::istream& is, int horizon) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorKind::data, "empty series CSV");
  const int columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  const int dim = columns - 2;
  require(dim >= 1 && dim <= kMaxDim, ErrorKind::data, "series CSV header has wrong column count");
  SpaceLengthSeries s(dim, horizon);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    LatticePoint x(dim);
    for (int i = 0; i < dim; ++i) {
      std::getline(row, cell, ',');
      x[i] = std::stoi(cell);
    }
    std::getline(row, cell, ',');
    const int n = std::stoi(cell);
    std::getline(row, cell, ',');
    s.add(x, n, std::stod(cell));
  }
  return s;
}

SpaceLengthSeries convolve(const SpaceLengthSeries& a, const SpaceLengthSeries& b) {
  same_dim(a, b);
  const int horizon = std::min(a.horizon(), b.horizon());
  std::unordered_map<Atom, double, AtomHash> acc;
  acc.reserve(a.size() * 4 + b.size() * 4);
  for (const auto& [pa, ca] : a.atoms()) {
    for (const auto& [pb, cb] : b.atoms()) {
      const int n = pa.n + pb.n;
      if (n > horizon) continue;
      acc[Atom{pa.x + pb.x, n}] += ca * cb;
    }
  }
  SpaceLengthSeries out(a.dim(), horizon);
  for (const auto& [atom, c] : acc) out.add(atom.x, atom.n, c);
  return out;
}

SpaceLengthSeries geometric_sum(const SpaceLengthSeries& c) {
  for (const auto& [atom, coeff] : c.atoms()) {
    require(atom.n > 0, ErrorKind::divergence,
            "geometric sum diverges: zero-length atom at " + atom.x.to_string());
  }
  const int dim = c.dim();
  const int horizon = c.horizon();

  // G = unit + c * G, solved length by length: G_n depends on G_{n-m}, m >= 1
  std::vector<std::vector<std::pair<LatticePoint, double>>> c_by_len(
      static_cast<std::size_t>(horizon) + 1);
  for (const auto& [atom, coeff] : c.atoms()) c_by_len[static_cast<std::size_t>(atom.n)].emplace_back(atom.x, coeff);

  std::vector<std::unordered_map<LatticePoint, double, LatticePointHash>> g_by_len(
      static_cast<std::size_t>(horizon) + 1);
  g_by_len[0][LatticePoint(dim)] = 1.0;
  for (int n = 1; n <= horizon; ++n) {
    auto& gn = g_by_len[static_cast<std::size_t>(n)];
    for (int m = 1; m <= n; ++m) {
      const auto& prev = g_by_len[static_cast<std::size_t>(n - m)];
      for (const auto& [y, cy] : c_by_len[static_cast<std::size_t>(m)]) {
        for (const auto& [x, gx] : prev) gn[x + y] += cy * gx;
      }
    }
  }
  SpaceLengthSeries out(dim, horizon);
  for (int n = 0; n <= horizon; ++n) {
    for (const auto& [x, v] : g_by_len[static_cast<std::size_t>(n)]) out.add(x, n, v);
  }
  return out;
}

double max_abs_difference(const SpaceLengthSeries& a, const SpaceLengthSeries& b) {
  same_dim(a, b);
  double worst = 0.0;
  for (const auto& [atom, c] : a.atoms())
    worst = std::max(worst, std::abs(c - b.at(atom.x, atom.n)));
  for (const auto& [atom, c] : b.atoms())
    worst = std::max(worst, std::abs(c - a.at(atom.x, atom.n)));
  return worst;
}

}  // namespace ozlab
