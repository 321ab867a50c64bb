#include "ozlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "ozlab/error.hpp"

namespace ozlab {

namespace {

constexpr double kRoundingSlack = 1e-12;

double vertex_distance(const LatticePoint& a, const LatticePoint& b, MixingNorm norm) {
  const LatticePoint d = a - b;
  switch (norm) {
    case MixingNorm::l1: return d.l1_norm();
    case MixingNorm::linf: {
      int m = 0;
      for (int i = 0; i < d.dim(); ++i) m = std::max(m, std::abs(d[i]));
      return m;
    }
    case MixingNorm::euclidean: break;
  }
  return d.euclidean_norm();
}

std::vector<LatticePath> all_paths(const WeightedPathModel& model, int max_len) {
  std::vector<LatticePath> paths;
  for_each_path(model, max_len, [&](const LatticePath& p) { paths.push_back(p); });
  return paths;
}

}  // namespace

bool WeightedPathModel::compatible(const LatticePath& first, const LatticePath& second) const {
  return admissible(first.append_translated(second));
}

double WeightedPathModel::weight(const LatticePath& path) const {
  return std::exp(log_weight(path));
}

double WeightedPathModel::log_conditional_weight(const LatticePath& first,
                                                 const LatticePath& second) const {
  return log_weight(first.append_translated(second)) - log_weight(second);
}

SawModel::SawModel(double beta, int dim) : beta_(beta), dim_(dim) {
  require(beta > 0.0 && std::isfinite(beta), ErrorKind::domain,
          "SAW model needs beta > 0, got " + std::to_string(beta));
  require(dim >= 1 && dim <= kMaxDim, ErrorKind::domain, "SAW model dimension out of range");
  steps_ = LatticePath::unit_step_set(dim);
}

bool SawModel::admissible(const LatticePath& path) const {
  return path.dim() == dim_ && path.is_self_avoiding();
}

bool SawModel::compatible(const LatticePath& first, const LatticePath& second) const {
  return admissible(first.append_translated(second));
}

double SawModel::log_weight(const LatticePath& path) const {
  return -beta_ * static_cast<double>(path.length());
}

// weights factorize, so conditioning on the continuation is irrelevant
double SawModel::log_conditional_weight(const LatticePath& first, const LatticePath&) const {
  return -beta_ * static_cast<double>(first.length());
}

ModelPtr saw_model(double beta, int dim) { return std::make_shared<const SawModel>(beta, dim); }

void for_each_path(const WeightedPathModel& model, int max_len,
                   const std::function<void(const LatticePath&)>& visit) {
  require(max_len >= 0, ErrorKind::contract, "max_len must be nonnegative");
  const auto& steps = *model.step_support();
  std::vector<LatticePoint> vertices{LatticePoint(model.dim())};
  std::function<void()> grow = [&] {
    LatticePath path(vertices, model.step_support());
    if (!model.admissible(path)) return;
    visit(path);
    if (path.length() == max_len) return;
    for (const auto& s : steps) {
      vertices.push_back(vertices.back() + s);
      grow();
      vertices.pop_back();
    }
  };
  grow();
}

const char* to_string(AxiomId id) noexcept {
  switch (id) {
    case AxiomId::decay: return "decay";
    case AxiomId::finite_energy: return "finite_energy";
    case AxiomId::splitting: return "splitting";
    case AxiomId::mixing: return "mixing";
  }
  return "unknown";
}

nlohmann::json path_to_json(const LatticePath& path) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : path.vertices()) {
    nlohmann::json coords = nlohmann::json::array();
    for (int i = 0; i < v.dim(); ++i) coords.push_back(v[i]);
    out.push_back(coords);
  }
  return out;
}

nlohmann::json AxiomReport::to_json() const {
  nlohmann::json j;
  j["axiom"] = to_string(axiom);
  j["constant"] = std::isfinite(constant) ? nlohmann::json(constant) : nlohmann::json("inf");
  if (theta) j["theta"] = *theta;
  j["pass"] = pass;
  j["instances"] = instances;
  if (max_ratio) j["max_ratio"] = *max_ratio;
  j["witness_paths"] = nlohmann::json::array();
  for (const auto& p : witness_paths) j["witness_paths"].push_back(path_to_json(p));
  return j;
}

AxiomReport check_finite_energy(const WeightedPathModel& model, int max_len) {
  AxiomReport report;
  report.axiom = AxiomId::finite_energy;
  if (max_len <= 0) return report;

  // By the chain rule q(lambda | eta) is a product of single-step conditionals,
  // so the smallest valid C2 is attained on one-step lambdas; longer pairs are
  // still enumerated and must agree.
  double c2 = 0.0;
  const LatticePath* worst = nullptr;
  std::vector<std::pair<LatticePath, LatticePath>> multi_step;
  const auto paths = all_paths(model, max_len);
  for (const auto& gamma : paths) {
    for (int a = 1; a <= gamma.length(); ++a) {
      const LatticePath lambda = gamma.slice(0, a);
      const LatticePath eta = gamma.slice(a, gamma.length());
      ++report.instances;
      if (a > 1) {
        multi_step.emplace_back(lambda, eta);
        continue;
      }
      const double rate = -model.log_conditional_weight(lambda, eta);
      if (worst == nullptr || rate > c2) {
        c2 = rate;
        worst = &gamma;
      }
    }
  }
  report.constant = c2;
  if (worst) report.witness_paths.push_back(*worst);
  for (const auto& [lambda, eta] : multi_step) {
    const double log_cond = model.log_conditional_weight(lambda, eta);
    const double bound = -c2 * lambda.length();
    if (!std::isfinite(log_cond) ||
        log_cond < bound - kRoundingSlack * (1.0 + std::abs(bound))) {
      report.pass = false;
      report.constant = std::max(report.constant, -log_cond / lambda.length());
      report.witness_paths = {lambda.append_translated(eta)};
    }
  }
  report.pass = report.pass && std::isfinite(report.constant);
  return report;
}

SplittingSides splitting_sides(const WeightedPathModel& model, int max_len,
                               const LatticePoint& x, const LatticePoint& y) {
  require(!x.is_zero() && !y.is_zero() && x != y, ErrorKind::contract,
          "splitting needs x, y != 0 and x != y");
  SplittingSides sides;
  // g_by_len[target][n]
  std::map<LatticePoint, std::vector<double>> g;
  auto slot = [&](const LatticePoint& p) -> std::vector<double>& {
    auto& v = g[p];
    v.resize(static_cast<std::size_t>(max_len) + 1, 0.0);
    return v;
  };
  for_each_path(model, max_len, [&](const LatticePath& p) {
    const double w = model.weight(p);
    slot(p.end())[static_cast<std::size_t>(p.length())] += w;
    if (p.end() == y) {
      const auto vs = p.vertices();
      if (std::find(vs.begin() + 1, vs.end() - 1, x) != vs.end() - 1) sides.lhs += w;
    }
  });
  const auto& gx = slot(x);
  const auto& gyx = slot(y - x);
  for (int a = 0; a <= max_len; ++a)
    for (int b = 0; a + b <= max_len; ++b)
      sides.rhs += gx[static_cast<std::size_t>(a)] * gyx[static_cast<std::size_t>(b)];
  return sides;
}

AxiomReport check_splitting(const WeightedPathModel& model, int max_len) {
  AxiomReport report;
  report.axiom = AxiomId::splitting;
  if (max_len <= 0) return report;

  const auto paths = all_paths(model, max_len);
  using Pair = std::pair<LatticePoint, LatticePoint>;
  std::map<Pair, double> lhs;
  std::map<Pair, const LatticePath*> example;
  std::map<LatticePoint, std::vector<double>> g;
  for (const auto& p : paths) {
    const double w = model.weight(p);
    auto& gv = g[p.end()];
    gv.resize(static_cast<std::size_t>(max_len) + 1, 0.0);
    gv[static_cast<std::size_t>(p.length())] += w;
    const auto vs = p.vertices();
    for (std::size_t i = 1; i + 1 < vs.size(); ++i) {
      const Pair key{vs[i], p.end()};
      lhs[key] += w;
      example.emplace(key, &p);
    }
  }
  auto sums = [&](const LatticePoint& target) -> const std::vector<double>* {
    auto it = g.find(target);
    return it == g.end() ? nullptr : &it->second;
  };
  double c3 = 0.0;
  for (const auto& [key, left] : lhs) {
    const auto& [x, y] = key;
    ++report.instances;
    const auto* gx = sums(x);
    const auto* gyx = sums(y - x);
    double right = 0.0;
    if (gx && gyx) {
      for (int a = 0; a <= max_len; ++a)
        for (int b = 0; a + b <= max_len; ++b)
          right += (*gx)[static_cast<std::size_t>(a)] * (*gyx)[static_cast<std::size_t>(b)];
    }
    const double ratio =
        right > 0.0 ? left / right : std::numeric_limits<double>::infinity();
    if (ratio > c3 || report.witness_paths.empty()) {
      c3 = std::max(c3, ratio);
      report.witness_paths = {*example.at(key)};
    }
  }
  report.constant = c3;
  report.pass = std::isfinite(c3);
  return report;
}

AxiomReport check_mixing(const WeightedPathModel& model, int max_len,
                         const MixingOptions& options) {
  require(options.theta > 0.0 && options.theta < 1.0, ErrorKind::domain,
          "mixing theta must lie in (0,1)");
  AxiomReport report;
  report.axiom = AxiomId::mixing;
  report.theta = options.theta;
  report.max_ratio = 1.0;
  if (max_len <= 0) return report;

  const auto paths = all_paths(model, max_len);
  // prefix (as a path) -> all admissible continuations of it within max_len
  std::map<std::vector<LatticePoint>, std::vector<LatticePath>> continuations;
  for (const auto& p : paths) {
    const auto vs = p.vertices();
    for (int b = 1; b <= p.length(); ++b) {
      continuations[std::vector<LatticePoint>(vs.begin(), vs.begin() + b + 1)].push_back(
          p.slice(b, p.length()));
    }
  }

  double c4 = 0.0;
  double max_ratio = 1.0;
  for (const auto& [prefix_vs, tails] : continuations) {
    const LatticePath prefix(prefix_vs, model.step_support());
    const int b = prefix.length();
    for (int a = 1; a <= b; ++a) {
      const LatticePath lambda = prefix.slice(0, a);
      const LatticePath eta = prefix.slice(a, b);
      std::vector<double> log_cond(tails.size());
      for (std::size_t i = 0; i < tails.size(); ++i)
        log_cond[i] = model.log_conditional_weight(lambda, eta.concat(tails[i]));
      for (std::size_t i = 0; i < tails.size(); ++i) {
        for (std::size_t j = 0; j < tails.size(); ++j) {
          ++report.instances;
          const double log_ratio = log_cond[i] - log_cond[j];
          max_ratio = std::max(max_ratio, std::exp(log_ratio));
          if (log_ratio <= 0.0) continue;
          double interaction = 0.0;
          for (const auto& u : lambda.vertices()) {
            for (const auto* tail : {&tails[i], &tails[j]}) {
              const auto tv = tail->vertices();
              for (std::size_t k = 1; k < tv.size(); ++k)
                interaction += std::pow(options.theta, vertex_distance(u, tv[k], options.norm));
            }
          }
          const double needed = interaction > 0.0 ? log_ratio / interaction
                                                  : std::numeric_limits<double>::infinity();
          if (needed > c4) {
            c4 = needed;
            report.witness_paths = {lambda, eta, tails[i], tails[j]};
          }
        }
      }
    }
  }
  report.constant = c4;
  report.max_ratio = max_ratio;
  report.pass = std::isfinite(c4);
  return report;
}

}  // namespace ozlab
