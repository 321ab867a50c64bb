#include "ozlab/saw.hpp"

#include <cmath>
#include <limits>

#include "ozlab/error.hpp"
#include "saw_dfs.hpp"

namespace ozlab {

namespace {

double require_factorized(const WeightedPathModel& model) {
  const auto s = model.log_step_weight();
  require(s.has_value(), ErrorKind::unsupported,
          "exact enumeration needs length-factorized weights; model '" + model.name() +
              "' has none");
  return *s;
}

// dense counts[n][cell]
class CountingVisitor {
 public:
  CountingVisitor(std::size_t cells, int max_len)
      : cells_(cells), counts_(cells * static_cast<std::size_t>(max_len + 1), 0) {}

  void enter(int depth, const LatticePoint&, std::size_t cell, bool record) {
    if (record) ++counts_[static_cast<std::size_t>(depth) * cells_ + cell];
  }
  void leave(int) {}
  void merge(const CountingVisitor& o) {
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
  }

  std::uint64_t at(int n, std::size_t cell) const {
    return counts_[static_cast<std::size_t>(n) * cells_ + cell];
  }

 private:
  std::size_t cells_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace

int EnumerationCaps::for_dim(int dim) const {
  switch (dim) {
    case 1: return d1;
    case 2: return d2;
    case 3: return d3;
    default: return d4;
  }
}

void check_enumeration_cap(int dim, int max_len, const EnumerationCaps& caps) {
  require(max_len >= 0, ErrorKind::contract, "max_len must be nonnegative");
  const int cap = caps.for_dim(dim);
  require(max_len <= cap, ErrorKind::resource,
          "max_len " + std::to_string(max_len) + " exceeds the enumeration cap " +
              std::to_string(cap) + " for d=" + std::to_string(dim));
}

TwoPointTable::TwoPointTable(ModelPtr model, int horizon, std::map<Atom, std::uint64_t> counts)
    : model_(std::move(model)),
      horizon_(horizon),
      log_step_(require_factorized(*model_)),
      counts_(std::move(counts)),
      series_(model_->dim(), horizon) {
  for (const auto& [atom, c] : counts_)
    series_.add(atom.x, atom.n, static_cast<double>(c) * std::exp(log_step_ * atom.n));
}

std::uint64_t TwoPointTable::count(const LatticePoint& x, int n) const {
  auto it = counts_.find(Atom{x, n});
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t TwoPointTable::walks_of_length(int n) const {
  std::uint64_t total = 0;
  for (const auto& [atom, c] : counts_)
    if (atom.n == n) total += c;
  return total;
}

double TwoPointTable::total_at(const LatticePoint& x) const { return series_.total_at(x); }

double TwoPointTable::log_total_at(const LatticePoint& x) const {
  auto it = counts_.lower_bound(Atom{x, 0});
  if (it == counts_.end() || it->first.x != x) return -std::numeric_limits<double>::infinity();
  const int n0 = it->first.n;
  double rest = 0.0;
  for (; it != counts_.end() && it->first.x == x; ++it)
    rest += static_cast<double>(it->second) * std::exp(log_step_ * (it->first.n - n0));
  return log_step_ * n0 + std::log(rest);
}

TwoPointTable enumerate_two_point(const ModelPtr& model, int max_len,
                                  const EnumerationOptions& options) {
  require(model != nullptr, ErrorKind::contract, "null model");
  require_factorized(*model);
  require(model->name() == "saw", ErrorKind::unsupported,
          "exact enumeration is implemented for self-avoiding walks only");
  const int dim = model->dim();
  check_enumeration_cap(dim, max_len, options.caps);

  const detail::Box box(dim, std::max(max_len, 1) + 1);
  const CountingVisitor proto(box.cells(), max_len);
  const auto counted = detail::run_saw_enumeration(dim, max_len, proto, options.threads);

  std::map<Atom, std::uint64_t> counts;
  for (int n = 0; n <= max_len; ++n) {
    for (std::size_t cell = 0; cell < box.cells(); ++cell) {
      if (const auto c = counted.at(n, cell)) counts.emplace(Atom{box.point(cell), n}, c);
    }
  }
  return TwoPointTable(model, max_len, std::move(counts));
}

double tilted_susceptibility(const TwoPointTable& table, const DualVector& t) {
  return table.series().tilted_mass(t);
}

DecayEstimate ratio_decay_estimate(std::span<const double> log_g) {
  require(log_g.size() >= 3, ErrorKind::data,
          "decay estimate needs at least 3 multiples, got " + std::to_string(log_g.size()));
  DecayEstimate est;
  est.k_max = static_cast<int>(log_g.size());
  for (std::size_t i = 0; i + 1 < log_g.size(); ++i) {
    require(std::isfinite(log_g[i]) && std::isfinite(log_g[i + 1]), ErrorKind::data,
            "decay estimate needs positive values at every multiple");
    est.ratios.push_back(log_g[i] - log_g[i + 1]);
  }
  // r_k = xi + p / (k + 1/2) + ..., eliminate the 1/k term between neighbours
  auto richardson = [&](std::size_t i) {
    const double m = static_cast<double>(i) + 1.5;
    return m * est.ratios[i] - (m - 1.0) * est.ratios[i - 1];
  };
  const std::size_t last = est.ratios.size() - 1;
  est.value = richardson(last);
  const double other = last >= 2 ? richardson(last - 1) : est.ratios[last];
  est.lower = std::min(est.value, other);
  est.upper = std::max(est.value, other);
  return est;
}

DecayEstimate decay_rate_estimate(const TwoPointTable& table, const LatticePoint& direction) {
  require(direction.dim() == table.dim(), ErrorKind::contract, "direction dimension mismatch");
  require(!direction.is_zero(), ErrorKind::contract, "decay direction must be nonzero");
  // beyond half the horizon the truncation, not the decay, sets the ratios
  std::vector<double> log_g;
  for (int k = 1; 2 * k * direction.l1_norm() <= table.horizon(); ++k)
    log_g.push_back(table.log_total_at(direction * k));
  require(log_g.size() >= 3, ErrorKind::data,
          "fewer than 3 multiples of " + direction.to_string() + " within half the horizon " +
              std::to_string(table.horizon()));
  return ratio_decay_estimate(log_g);
}

}  // namespace ozlab
