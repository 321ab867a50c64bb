#include "ozlab/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "ozlab/error.hpp"
#include "saw_dfs.hpp"

namespace ozlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Incremental piece classification along a growing walk. Alive regeneration
// candidates form a stack of increasing projections: a new vertex kills every
// candidate above it, and the vertex it displaces from the tip joins the stack
// if it was a strict running maximum.
class ClassifyingVisitor {
 public:
  ClassifyingVisitor(const Projection& proj, std::size_t cells, int max_len)
      : proj_(proj),
        cells_(cells),
        counts_(4 * cells * static_cast<std::size_t>(max_len + 1), 0),
        p_(static_cast<std::size_t>(max_len) + 1),
        prefix_max_(static_cast<std::size_t>(max_len) + 1),
        suffix_min_(static_cast<std::size_t>(max_len) + 1),
        stack_(static_cast<std::size_t>(max_len) + 1),
        undo_(static_cast<std::size_t>(max_len) + 1) {}

  void enter(int depth, const LatticePoint& x, std::size_t cell, bool record) {
    const auto d = static_cast<std::size_t>(depth);
    const std::int64_t p = proj_(x);
    p_[d] = p;
    Undo& u = undo_[d];
    u.old_size = size_;
    u.pushed = false;
    if (depth == 0) {
      prefix_max_[0] = p;
      suffix_min_[0] = std::numeric_limits<std::int64_t>::max();
      if (record) bump(0, 0, cell);  // the empty walk is unfactorizable
      return;
    }
    while (size_ > 0 && stack_[size_ - 1] > p) --size_;
    if (depth >= 2) {
      const std::int64_t prev = p_[d - 1];
      if (prev > prefix_max_[d - 2] && prev <= p) {
        u.pushed = true;
        u.slot = size_;
        u.saved = stack_[size_];
        stack_[size_++] = prev;
      }
    }
    prefix_max_[d] = std::max(prefix_max_[d - 1], p);
    suffix_min_[d] = std::min(suffix_min_[d - 1], p);
    if (!record || size_ > 0) return;

    const bool left = p > prefix_max_[d - 1];
    const bool right = suffix_min_[d] >= p_[0];
    bump(0, depth, cell);
    if (left) bump(1, depth, cell);
    if (right) bump(2, depth, cell);
    if (left && right) bump(3, depth, cell);
  }

  void leave(int depth) {
    const Undo& u = undo_[static_cast<std::size_t>(depth)];
    if (u.pushed) stack_[u.slot] = u.saved;
    size_ = u.old_size;
  }

  void merge(const ClassifyingVisitor& o) {
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
  }

  // cls: 0 whole, 1 left, 2 right, 3 bulk
  std::uint64_t at(int cls, int n, std::size_t cell) const {
    return counts_[index(cls, n, cell)];
  }

 private:
  struct Undo {
    std::size_t old_size = 0;
    bool pushed = false;
    std::size_t slot = 0;
    std::int64_t saved = 0;
  };

  std::size_t index(int cls, int n, std::size_t cell) const {
    const std::size_t per_class = counts_.size() / 4;
    return static_cast<std::size_t>(cls) * per_class + static_cast<std::size_t>(n) * cells_ + cell;
  }
  void bump(int cls, int n, std::size_t cell) { ++counts_[index(cls, n, cell)]; }

  Projection proj_;
  std::size_t cells_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::int64_t> p_;
  std::vector<std::int64_t> prefix_max_;
  std::vector<std::int64_t> suffix_min_;  // min over vertices 1..depth
  std::vector<std::int64_t> stack_;
  std::size_t size_ = 0;
  std::vector<Undo> undo_;
};

void check_same_setup(const TwoPointTable& table, const DirectCorrelation& dc) {
  require(dc.model != nullptr, ErrorKind::contract, "direct correlation has no model");
  require(table.dim() == dc.model->dim() && table.horizon() == dc.horizon &&
              table.model().name() == dc.model->name() &&
              table.model().log_step_weight() == dc.model->log_step_weight(),
          ErrorKind::contract, "table and direct correlation differ in model or horizon");
}

// sum over lengths, keyed by displacement
std::vector<std::pair<LatticePoint, double>> spatial(const SpaceLengthSeries& s) {
  std::map<LatticePoint, double> acc;
  for (const auto& [atom, c] : s.atoms()) acc[atom.x] += c;
  return {acc.begin(), acc.end()};
}

}  // namespace

Projection::Projection(const DualVector& t) : dim_(t.dim()) {
  require(!t.is_zero() && t.is_finite(), ErrorKind::contract,
          "regeneration direction must be a finite nonzero vector");
  const DualVector u = t.normalized();
  for (int i = 0; i < dim_; ++i)
    k_[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::llround(u[i] * kScale));
}

std::vector<int> regeneration_points(const LatticePath& path, const DualVector& t) {
  const Projection proj(t);
  const int n = path.length();
  std::vector<std::int64_t> p(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) p[static_cast<std::size_t>(i)] = proj(path[static_cast<std::size_t>(i)]);
  std::vector<std::int64_t> suffix_min(p.size());
  suffix_min[static_cast<std::size_t>(n)] = std::numeric_limits<std::int64_t>::max();
  for (int i = n - 1; i >= 0; --i)
    suffix_min[static_cast<std::size_t>(i)] =
        std::min(suffix_min[static_cast<std::size_t>(i) + 1], p[static_cast<std::size_t>(i) + 1]);
  std::vector<int> out;
  std::int64_t prefix_max = n >= 0 ? p[0] : 0;
  for (int l = 1; l < n; ++l) {
    const auto pl = p[static_cast<std::size_t>(l)];
    if (prefix_max < pl && pl <= suffix_min[static_cast<std::size_t>(l)]) out.push_back(l);
    prefix_max = std::max(prefix_max, pl);
  }
  return out;
}

LatticePath Factorization::reassemble() const {
  LatticePath out = left;
  for (const auto& b : bulk) out = out.concat(b);
  return out.concat(right);
}

Factorization factorize(const LatticePath& path, const DualVector& t) {
  const auto cuts = regeneration_points(path, t);
  Factorization f;
  f.direction = t;
  if (cuts.empty()) {
    f.left = path;
    f.right = path.slice(path.length(), path.length());
    return f;
  }
  f.left = path.slice(0, cuts.front());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) f.bulk.push_back(path.slice(cuts[i], cuts[i + 1]));
  f.right = path.slice(cuts.back(), path.length());
  return f;
}

unsigned classify_piece(const LatticePath& piece, const DualVector& t) {
  if (!regeneration_points(piece, t).empty()) return 0;
  unsigned cls = static_cast<unsigned>(PieceClass::whole);
  const int m = piece.length();
  if (m == 0) return cls;
  const Projection proj(t);
  const auto vs = piece.vertices();
  const std::int64_t p0 = proj(vs.front());
  const std::int64_t pm = proj(vs.back());
  bool left = true;
  bool right = true;
  for (int j = 0; j < m; ++j) left = left && proj(vs[static_cast<std::size_t>(j)]) < pm;
  for (int j = 1; j <= m; ++j) right = right && proj(vs[static_cast<std::size_t>(j)]) >= p0;
  if (left) cls |= static_cast<unsigned>(PieceClass::left);
  if (right) cls |= static_cast<unsigned>(PieceClass::right);
  if (left && right) cls |= static_cast<unsigned>(PieceClass::bulk);
  return cls;
}

DirectCorrelation direct_correlation(const ModelPtr& model, const DualVector& t, int max_len,
                                     const EnumerationOptions& options) {
  require(model != nullptr, ErrorKind::contract, "null model");
  require(t.dim() == model->dim(), ErrorKind::contract, "direction dimension mismatch");
  require(model->name() == "saw", ErrorKind::unsupported,
          "direct correlation is implemented for self-avoiding walks only");
  const double log_step = *model->log_step_weight();
  const int dim = model->dim();
  check_enumeration_cap(dim, max_len, options.caps);
  const Projection proj(t);

  const detail::Box box(dim, std::max(max_len, 1) + 1);
  const ClassifyingVisitor proto(proj, box.cells(), max_len);
  const auto counted = detail::run_saw_enumeration(dim, max_len, proto, options.threads);

  DirectCorrelation dc{SpaceLengthSeries(dim, max_len), SpaceLengthSeries(dim, max_len),
                       SpaceLengthSeries(dim, max_len), SpaceLengthSeries(dim, max_len),
                       t, max_len, model};
  SpaceLengthSeries* targets[4] = {&dc.whole, &dc.left, &dc.right, &dc.bulk};
  for (int n = 0; n <= max_len; ++n) {
    const double w = std::exp(log_step * n);
    for (std::size_t cell = 0; cell < box.cells(); ++cell) {
      for (int cls = 0; cls < 4; ++cls) {
        if (const auto c = counted.at(cls, n, cell))
          targets[cls]->add(box.point(cell), n, static_cast<double>(c) * w);
      }
    }
  }
  return dc;
}

SpaceLengthSeries renewal_reconstruction(const DirectCorrelation& dc) {
  SpaceLengthSeries r = convolve(convolve(dc.left, geometric_sum(dc.bulk)), dc.right);
  for (const auto& [atom, c] : dc.whole.atoms()) r.add(atom.x, atom.n, c);
  return r;
}

double renewal_residual(const TwoPointTable& table, const DirectCorrelation& dc) {
  check_same_setup(table, dc);
  const Projection proj(dc.direction);
  const SpaceLengthSeries r = renewal_reconstruction(dc);
  double worst = 0.0;
  for (const auto& [atom, g] : table.series().atoms()) {
    if (proj(atom.x) <= 0) continue;
    worst = std::max(worst, std::abs(g - r.at(atom.x, atom.n)));
  }
  for (const auto& [atom, c] : r.atoms()) {
    if (proj(atom.x) <= 0) continue;
    worst = std::max(worst, std::abs(c - table.series().at(atom.x, atom.n)));
  }
  return worst;
}

MassGap mass_gap_estimate(const DirectCorrelation& dc, const TwoPointTable& table,
                          const LatticePoint& direction) {
  check_same_setup(table, dc);
  require(inner(dc.direction, direction) > 0.0, ErrorKind::contract,
          "mass gap direction must have positive projection on t");
  MassGap gap;
  gap.xi_full = decay_rate_estimate(table, direction);

  std::vector<double> log_c;
  for (int k = 1; k * direction.l1_norm() <= dc.horizon; ++k) {
    const double c = dc.bulk.total_at(direction * k);
    log_c.push_back(c > 0.0 ? std::log(c) : -kInf);
  }
  require(!log_c.empty() && std::isfinite(log_c.front()), ErrorKind::data,
          "direct correlation has no mass at " + direction.to_string());
  const bool beyond_first = std::any_of(log_c.begin() + 1, log_c.end(),
                                        [](double v) { return std::isfinite(v); });
  if (!beyond_first && log_c.size() >= 3) {
    // supported on the first multiple only: the direct correlation is finite range
    gap.direct_finite_support = true;
    gap.xi_direct = DecayEstimate{kInf, kInf, kInf, {}, static_cast<int>(log_c.size())};
    gap.gap = gap.gap_lower = gap.gap_upper = kInf;
    return gap;
  }
  gap.xi_direct = ratio_decay_estimate(log_c);
  gap.gap = gap.xi_direct.value - gap.xi_full.value;
  gap.gap_lower = gap.xi_direct.lower - gap.xi_full.upper;
  gap.gap_upper = gap.xi_direct.upper - gap.xi_full.lower;
  return gap;
}

std::map<LatticePoint, double> oz_extrapolate(const DirectCorrelation& dc,
                                              std::span<const LatticePoint> targets) {
  std::map<LatticePoint, double> out;
  if (targets.empty()) return out;
  const int dim = dc.bulk.dim();
  const Projection proj(dc.direction);
  std::int64_t p_max = 0;
  int radius = 0;
  for (const auto& x : targets) {
    require(x.dim() == dim, ErrorKind::contract, "target dimension mismatch");
    require(proj(x) > 0, ErrorKind::contract,
            "extrapolation target " + x.to_string() + " is not ahead of the hyperplane");
    p_max = std::max(p_max, proj(x));
    for (int i = 0; i < dim; ++i) radius = std::max(radius, std::abs(x[i]));
  }
  radius += 2 * dc.horizon + 1;

  const auto bulk = spatial(dc.bulk);
  for (const auto& [y, c] : bulk)
    require(proj(y) > 0, ErrorKind::contract, "bulk atom at non-forward displacement");
  const auto boundary = spatial(convolve(dc.left, dc.right));

  // renewal sum G = delta_0 + bulk * G over the box points with 0 <= p <= p_max,
  // in increasing projection order; every bulk atom raises the projection
  const detail::Box box(dim, radius);
  std::vector<std::size_t> order;
  std::vector<std::int64_t> p_of;
  for (std::size_t cell = 0; cell < box.cells(); ++cell) {
    const auto p = proj(box.point(cell));
    if (p < 0 || p > p_max) continue;
    order.push_back(cell);
  }
  std::vector<std::int64_t> key(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) key[i] = proj(box.point(order[i]));
  std::vector<std::size_t> idx(order.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });

  std::vector<double> g(box.cells(), 0.0);
  std::vector<std::pair<std::ptrdiff_t, double>> steps;
  for (const auto& [y, c] : bulk) steps.emplace_back(box.offset(y), c);
  const LatticePoint origin(dim);
  for (const std::size_t i : idx) {
    const std::size_t cell = order[i];
    const LatticePoint x = box.point(cell);
    double v = x == origin ? 1.0 : 0.0;
    for (std::size_t s = 0; s < bulk.size(); ++s) {
      const LatticePoint prev = x - bulk[s].first;
      bool inside = true;
      for (int a = 0; a < dim && inside; ++a) inside = std::abs(prev[a]) <= radius;
      if (!inside || proj(prev) < 0) continue;
      v += steps[s].second * g[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(cell) - steps[s].first)];
    }
    g[cell] = v;
  }

  for (const auto& x : targets) {
    double v = dc.whole.total_at(x);
    for (const auto& [w, c] : boundary) {
      const LatticePoint rest = x - w;
      bool inside = true;
      for (int a = 0; a < dim && inside; ++a) inside = std::abs(rest[a]) <= radius;
      if (!inside || proj(rest) < 0 || proj(rest) > p_max) continue;
      v += c * g[box.index(rest)];
    }
    out[x] = v;
  }
  return out;
}

double tilted_step_mass(const DirectCorrelation& dc, const DualVector& t_prime) {
  return dc.bulk.tilted_mass(t_prime);
}

}  // namespace ozlab
