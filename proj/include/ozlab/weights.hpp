#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ozlab/lattice.hpp"

namespace ozlab {

// Strictly positive path weights q(lambda) on an admissible path family.
// Concatenation `first` then `second` follows the path order used by the
// conditional weight q(first | second) = q(first ++ second) / q(second).
class WeightedPathModel {
 public:
  virtual ~WeightedPathModel() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual const LatticePath::StepSet& step_support() const = 0;

  virtual bool admissible(const LatticePath& path) const = 0;
  // `second` translated to start at the end of `first`
  virtual bool compatible(const LatticePath& first, const LatticePath& second) const;

  virtual double log_weight(const LatticePath& path) const = 0;
  double weight(const LatticePath& path) const;

  // log q(first | second); the generic form is the log-weight difference
  virtual double log_conditional_weight(const LatticePath& first, const LatticePath& second) const;

  // per-step log weight when q(lambda) = exp(s |lambda|); enumerators use it to
  // accumulate integer path counts
  virtual std::optional<double> log_step_weight() const { return std::nullopt; }
};

class SawModel final : public WeightedPathModel {
 public:
  SawModel(double beta, int dim);

  double beta() const noexcept { return beta_; }

  std::string name() const override { return "saw"; }
  int dim() const override { return dim_; }
  const LatticePath::StepSet& step_support() const override { return steps_; }
  bool admissible(const LatticePath& path) const override;
  bool compatible(const LatticePath& first, const LatticePath& second) const override;
  double log_weight(const LatticePath& path) const override;
  double log_conditional_weight(const LatticePath& first, const LatticePath& second) const override;
  std::optional<double> log_step_weight() const override { return -beta_; }

 private:
  double beta_;
  int dim_;
  LatticePath::StepSet steps_;
};

using ModelPtr = std::shared_ptr<const WeightedPathModel>;

// weight exp(-beta |lambda|) on self-avoiding unit-step walks
ModelPtr saw_model(double beta, int dim);

// calls `visit` for every admissible path from the origin with length <= max_len,
// in depth-first order (prefixes before extensions)
void for_each_path(const WeightedPathModel& model, int max_len,
                   const std::function<void(const LatticePath&)>& visit);

enum class AxiomId { decay, finite_energy, splitting, mixing };

const char* to_string(AxiomId id) noexcept;

struct AxiomReport {
  AxiomId axiom = AxiomId::finite_energy;
  // smallest constant consistent with every enumerated instance
  double constant = 0.0;
  std::optional<double> theta;
  bool pass = true;
  std::size_t instances = 0;
  // mixing only: largest conditional-weight ratio seen
  std::optional<double> max_ratio;
  std::vector<LatticePath> witness_paths;

  nlohmann::json to_json() const;
};

enum class MixingNorm { euclidean, l1, linf };

struct MixingOptions {
  double theta = 0.5;
  MixingNorm norm = MixingNorm::euclidean;
};

// q(lambda | eta) >= exp(-C2 |lambda|) over admissible pairs with total length <= max_len
AxiomReport check_finite_energy(const WeightedPathModel& model, int max_len);

// sum_{0 -> x -> y} q <= C3 (sum_{0 -> x} q)(sum_{x -> y} q), both sides truncated
// at total length max_len; x, y != 0 and x != y
AxiomReport check_splitting(const WeightedPathModel& model, int max_len);

// q(lambda | eta ++ g1) / q(lambda | eta ++ g2) <= exp(C4 sum theta^{|x - y|})
AxiomReport check_mixing(const WeightedPathModel& model, int max_len,
                         const MixingOptions& options = {});

struct SplittingSides {
  double lhs = 0.0;
  double rhs = 0.0;
};

// both sides of the splitting inequality for one pair (x, y)
SplittingSides splitting_sides(const WeightedPathModel& model, int max_len,
                               const LatticePoint& x, const LatticePoint& y);

nlohmann::json path_to_json(const LatticePath& path);

}  // namespace ozlab
