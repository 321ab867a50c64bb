#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ozlab/series.hpp"
#include "ozlab/weights.hpp"

namespace ozlab {

// hard enumeration caps per dimension (index = d)
struct EnumerationCaps {
  int d1 = 2000;
  int d2 = 20;
  int d3 = 14;
  int d4 = 10;

  int for_dim(int dim) const;
};

struct EnumerationOptions {
  EnumerationCaps caps;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// throws a resource error naming the cap when max_len exceeds it
void check_enumeration_cap(int dim, int max_len, const EnumerationCaps& caps);

// g^(n)(x) = sum_{lambda: 0 -> x, |lambda| = n} q(lambda) for n <= horizon
class TwoPointTable {
 public:
  TwoPointTable(ModelPtr model, int horizon, std::map<Atom, std::uint64_t> counts);

  const WeightedPathModel& model() const noexcept { return *model_; }
  const ModelPtr& model_ptr() const noexcept { return model_; }
  int dim() const noexcept { return model_->dim(); }
  int horizon() const noexcept { return horizon_; }
  double log_step_weight() const noexcept { return log_step_; }

  const SpaceLengthSeries& series() const noexcept { return series_; }
  const std::map<Atom, std::uint64_t>& counts() const noexcept { return counts_; }

  std::uint64_t count(const LatticePoint& x, int n) const;
  // number of walks of length n (all endpoints)
  std::uint64_t walks_of_length(int n) const;
  // sum over n <= horizon of g^(n)(x)
  double total_at(const LatticePoint& x) const;
  // log of total_at(x), evaluated from integer counts; -inf when no walk reaches x
  double log_total_at(const LatticePoint& x) const;

 private:
  ModelPtr model_;
  int horizon_;
  double log_step_;
  std::map<Atom, std::uint64_t> counts_;
  SpaceLengthSeries series_;
};

// exact length-truncated enumeration; the model must have length-factorized weights
TwoPointTable enumerate_two_point(const ModelPtr& model, int max_len,
                                  const EnumerationOptions& options = {});

// sum_{x, n <= N} exp((t, x)) g^(n)(x)
double tilted_susceptibility(const TwoPointTable& table, const DualVector& t);

// Decay rate from successive ratios r_k = -log(g((k+1) v) / g(k v)). The
// ratios carry a p / k correction from the power-law prefactor; neighbouring
// ratios are Richardson-combined to remove it. `value` is the last combined
// estimate and [lower, upper] spans the last two (the last combined estimate
// and the last raw ratio when only two ratios exist).
struct DecayEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> ratios;  // ratios[i] uses k = i + 1 and k = i + 2
  int k_max = 0;

  double width() const noexcept { return upper - lower; }
  bool contains(double v) const noexcept { return lower <= v && v <= upper; }
};

// ratio-method estimate from log g(k v), k = 1..K (log_g[k-1]); needs K >= 3
DecayEstimate ratio_decay_estimate(std::span<const double> log_g);

// estimate of xi(direction) from the table along multiples k * direction with
// 2 k |direction|_1 <= N
DecayEstimate decay_rate_estimate(const TwoPointTable& table, const LatticePoint& direction);

}  // namespace ozlab
