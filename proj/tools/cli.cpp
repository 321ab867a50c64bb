#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <regex>

#include "ozlab/coarse_grain.hpp"
#include "ozlab/error.hpp"
#include "ozlab/io.hpp"
#include "ozlab/oz_fit.hpp"

namespace ozlab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Common {
  unsigned threads = 0;
  std::string manifest;
  std::string out;
};

// what a handler reports back for the manifest
struct Outcome {
  json params = json::object();
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  std::vector<std::uint64_t> seeds;
  std::string summary;
};

void add_common(CLI::App* sub, Common& c, const std::string& out_help) {
  sub->add_option("--out", c.out, out_help)->required();
  sub->add_option("--threads", c.threads, "worker threads (0 = all cores)")->capture_default_str();
  sub->add_option("--manifest", c.manifest, "manifest path (default <out>.manifest.json)");
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  require(os.good(), ErrorKind::usage, "cannot write " + p.string());
  return os;
}

void write_json(const fs::path& p, const json& j) {
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

EnumerationOptions enum_options(const Common& c) {
  EnumerationOptions o;
  o.threads = c.threads;
  return o;
}

DualVector axis_dual(int dim) {
  DualVector t(dim);
  t[0] = 1.0;
  return t;
}

DualVector dual_or_axis(const std::string& text, int dim) {
  if (text.empty()) return axis_dual(dim);
  const DualVector t = parse_dual(text);
  require(t.dim() == dim, ErrorKind::usage, "--direction has " + std::to_string(t.dim()) +
                                                " components, expected " + std::to_string(dim));
  require(!t.is_zero() && t.is_finite(), ErrorKind::usage, "--direction must be a nonzero finite vector");
  return t;
}

// integer lattice vector parallel to t when t has integer components
std::optional<LatticePoint> as_lattice(const DualVector& t) {
  LatticePoint p(t.dim());
  for (int i = 0; i < t.dim(); ++i) {
    if (t[i] != std::round(t[i]) || std::abs(t[i]) > 1e6) return std::nullopt;
    p[i] = static_cast<int>(t[i]);
  }
  return p;
}

json decay_json(const DecayEstimate& d) {
  return {{"value", d.value}, {"lower", d.lower}, {"upper", d.upper}, {"k_max", d.k_max}, {"ratios", d.ratios}};
}

json points_json(std::span<const LatticePoint> ps) {
  json a = json::array();
  for (const auto& p : ps) {
    json c = json::array();
    for (int i = 0; i < p.dim(); ++i) c.push_back(p[i]);
    a.push_back(c);
  }
  return a;
}

// "k*e1:20..200" or "k*1,1:1..50"
std::vector<std::pair<int, LatticePoint>> parse_targets(const std::string& spec, int dim) {
  static const std::regex re(R"(\s*k\s*\*\s*(e(\d+)|[-0-9,\s]+)\s*:\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*)");
  std::smatch m;
  require(std::regex_match(spec, m, re), ErrorKind::usage,
          "--targets must look like \"k*e1:20..200\" or \"k*1,1:1..50\", got \"" + spec + "\"");
  LatticePoint v(dim);
  if (m[2].matched) {
    const int axis = std::stoi(m[2].str());
    require(axis >= 1 && axis <= dim, ErrorKind::usage, "--targets axis out of range");
    v = LatticePoint::unit(dim, axis - 1);
  } else {
    v = parse_lattice_point(m[1].str());
    require(v.dim() == dim && !v.is_zero(), ErrorKind::usage, "--targets vector must be nonzero with d components");
  }
  const int a = std::stoi(m[3].str());
  const int b = std::stoi(m[4].str());
  require(1 <= a && a <= b && b <= 100000, ErrorKind::usage, "--targets range must satisfy 1 <= a <= b");
  std::vector<std::pair<int, LatticePoint>> out;
  for (int k = a; k <= b; ++k) out.emplace_back(k, v * k);
  return out;
}

// ---------------------------------------------------------------- handlers

struct SawArgs {
  int dim = 2;
  double beta = 0.0;
  int max_len = 0;
};

void add_saw_args(CLI::App* sub, SawArgs& a) {
  sub->add_option("--dim", a.dim, "lattice dimension")->capture_default_str()->check(CLI::Range(1, kMaxDim));
  sub->add_option("--beta", a.beta, "inverse temperature")->required();
  sub->add_option("--max-len", a.max_len, "length horizon N")->required()->check(CLI::PositiveNumber);
}

json saw_params(const SawArgs& a) { return {{"dim", a.dim}, {"beta", a.beta}, {"max_len", a.max_len}}; }

Outcome saw_enumerate(const SawArgs& a, const Common& c) {
  const auto table = enumerate_two_point(saw_model(a.beta, a.dim), a.max_len, enum_options(c));
  auto os = open_out(c.out);
  table.series().write_csv(os);
  Outcome o;
  o.params = saw_params(a);
  o.outputs = {c.out};
  o.summary = std::to_string(table.series().size()) + " atoms";
  return o;
}

struct RenewalArgs {
  SawArgs saw;
  std::string direction;
  int roundtrip_len = 10;
};

Outcome renewal_check(const RenewalArgs& a, const Common& c) {
  const auto model = saw_model(a.saw.beta, a.saw.dim);
  const DualVector t = dual_or_axis(a.direction, a.saw.dim);
  const auto table = enumerate_two_point(model, a.saw.max_len, enum_options(c));
  const auto dc = direct_correlation(model, t, a.saw.max_len, enum_options(c));
  json rep;
  rep["dim"] = a.saw.dim;
  rep["beta"] = a.saw.beta;
  rep["max_len"] = a.saw.max_len;
  rep["direction"] = t.components();
  rep["residual"] = renewal_residual(table, dc);
  rep["atoms"] = {{"whole", dc.whole.size()}, {"left", dc.left.size()},
                  {"right", dc.right.size()}, {"bulk", dc.bulk.size()}};
  rep["bulk_mass"] = dc.bulk.total_mass();

  // factorization round trip over every path up to the round-trip length
  const int rt = std::min(a.roundtrip_len, a.saw.max_len);
  std::size_t paths = 0;
  std::size_t failures = 0;
  for_each_path(*model, rt, [&](const LatticePath& p) {
    ++paths;
    if (!(factorize(p, t).reassemble() == p)) ++failures;
  });
  rep["roundtrip"] = {{"max_len", rt}, {"paths", paths}, {"failures", failures}};

  try {
    const DualVector s = solve_boundary(dc, t);
    rep["boundary"] = {{"dual", s.components()}, {"tilted_step_mass", tilted_step_mass(dc, s)}};
  } catch (const Error& e) {
    rep["boundary"] = {{"error", e.what()}};
  }
  if (const auto v = as_lattice(t)) {
    try {
      const auto gap = mass_gap_estimate(dc, table, *v);
      json g = {{"xi_full", decay_json(gap.xi_full)}, {"direct_finite_support", gap.direct_finite_support},
                {"gap", gap.gap}, {"gap_lower", gap.gap_lower}, {"gap_upper", gap.gap_upper}};
      if (!gap.direct_finite_support) g["xi_direct"] = decay_json(gap.xi_direct);
      rep["mass_gap"] = g;
    } catch (const Error& e) {
      rep["mass_gap"] = {{"error", e.what()}};
    }
  }
  write_json(c.out, rep);
  Outcome o;
  o.params = saw_params(a.saw);
  o.params["direction"] = t.components();
  o.params["roundtrip_len"] = rt;
  o.outputs = {c.out};
  o.summary = "residual " + format_double(rep["residual"].get<double>());
  return o;
}

struct ExtrapolateArgs {
  SawArgs saw;
  std::string direction;
  std::string targets;
};

Outcome oz_extrapolate_cmd(const ExtrapolateArgs& a, const Common& c) {
  const auto model = saw_model(a.saw.beta, a.saw.dim);
  const auto ks = parse_targets(a.targets, a.saw.dim);
  DualVector t(a.saw.dim);
  if (a.direction.empty()) {
    const LatticePoint& v = ks.front().second;
    for (int i = 0; i < v.dim(); ++i) t[i] = v[i];
  } else {
    t = dual_or_axis(a.direction, a.saw.dim);
  }
  const auto dc = direct_correlation(model, t, a.saw.max_len, enum_options(c));
  std::vector<LatticePoint> xs;
  for (const auto& [k, x] : ks) xs.push_back(x);
  const auto g = oz_extrapolate(dc, xs);
  auto os = open_out(c.out);
  os << "k,g,ratio_log\n";
  double prev = 0.0;
  for (const auto& [k, x] : ks) {
    const double v = g.at(x);
    os << k << ',' << format_double(v) << ',';
    if (prev > 0.0 && v > 0.0) os << format_double(std::log(v / prev));
    os << '\n';
    prev = v;
  }
  Outcome o;
  o.params = saw_params(a.saw);
  o.params["direction"] = t.components();
  o.params["targets"] = a.targets;
  o.outputs = {c.out};
  o.summary = std::to_string(ks.size()) + " targets";
  return o;
}

struct SkeletonArgs {
  double beta = 0.0;
  int dim = 2;
  int max_len = 12;
  int resolution = 64;
  double K = 3.0;
  double delta = 0.1;
  std::string path_file;
  std::string t;
  std::string histogram_target;
  std::vector<double> histogram_K;
};

Outcome skeleton_cmd(const SkeletonArgs& a, const Common& c) {
  require(!a.path_file.empty() || !a.histogram_target.empty(), ErrorKind::usage,
          "skeleton needs --path-file or --histogram-target");
  std::optional<LatticePath> path;
  int dim = a.dim;
  if (!a.path_file.empty()) {
    std::ifstream in(a.path_file);
    require(in.good(), ErrorKind::usage, "cannot open " + a.path_file);
    path = read_path_csv(in);
    dim = path->dim();
  }
  const auto model = saw_model(a.beta, dim);
  BodyOptions bo;
  bo.enumeration = enum_options(c);
  const WulffBody body = build_body(model, a.max_len, a.resolution, bo);

  auto dual_for = [&](const LatticePoint& x) {
    if (!a.t.empty()) return dual_or_axis(a.t, dim);
    DualVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = x[i];
    return body.contact_dual(v);
  };

  json rep;
  rep["K"] = a.K;
  rep["delta"] = a.delta;
  rep["body"] = {{"N", body.horizon()}, {"resolution", a.resolution}};
  Outcome o;
  if (path) {
    const DualVector t = dual_for(path->displacement());
    const auto sk = build_skeleton(*path, a.K, body);
    const auto sc = surcharge(sk, t, body);
    rep["t"] = t.components();
    rep["skeleton"] = {{"points", points_json(sk.points)}, {"indices", sk.indices}};
    rep["surcharge"] = {{"hops", sc.hops}, {"total", sc.total}};
    rep["break_points"] = break_points(*path, t, a.K, a.delta, body);
    o.inputs.emplace_back(a.path_file);
  }
  if (!a.histogram_target.empty()) {
    const LatticePoint x = parse_lattice_point(a.histogram_target);
    require(x.dim() == dim, ErrorKind::usage, "--histogram-target dimension mismatch");
    const DualVector t = dual_for(x);
    json hs = json::array();
    std::vector<double> Ks = a.histogram_K.empty() ? std::vector<double>{a.K} : a.histogram_K;
    for (const double K : Ks) {
      const auto h = surcharge_histogram(model, a.max_len, K, x, t, body, enum_options(c));
      json w = json::array();
      for (const auto& [k, v] : h.weight) w.push_back({k, v});
      hs.push_back({{"K", K}, {"threshold", h.threshold}, {"paths", h.paths}, {"weight", w},
                    {"backtracking_fraction", h.backtracking_fraction()}});
    }
    rep["histogram"] = {{"target", points_json(std::span<const LatticePoint>(&x, 1))[0]},
                        {"t", t.components()}, {"max_len", a.max_len}, {"by_K", hs}};
  }
  write_json(c.out, rep);
  o.params = {{"beta", a.beta}, {"dim", dim},     {"max_len", a.max_len}, {"resolution", a.resolution},
              {"K", a.K},       {"delta", a.delta}, {"t", a.t},             {"histogram_target", a.histogram_target},
              {"histogram_K", a.histogram_K}};
  o.outputs = {c.out};
  o.summary = "skeleton report written";
  return o;
}

struct WulffArgs {
  SawArgs saw;
  int resolution = 64;
  double tol = 1e-6;
  std::string curvature_out;
};

Outcome wulff_cmd(const WulffArgs& a, const Common& c) {
  BodyOptions bo;
  bo.enumeration = enum_options(c);
  const WulffBody body = build_body(saw_model(a.saw.beta, a.saw.dim), a.saw.max_len, a.resolution, bo);
  json j = body.to_json();
  const auto cons = body.support_consistency(a.tol);
  j["consistency"] = {{"pass", cons.pass}, {"tol", cons.tol}, {"worst", cons.worst},
                      {"worst_n", cons.worst_n}, {"worst_m", cons.worst_m}};
  Outcome o;
  o.params = saw_params(a.saw);
  o.params["resolution"] = a.resolution;
  o.params["tol"] = a.tol;
  o.outputs = {c.out};
  if (a.saw.dim == 2 && a.resolution >= 32) {
    const auto k = curvature(body);
    j["curvature"] = {{"kappa_min", k.kappa_min}, {"kappa_min_err", k.kappa_min_err},
                      {"min_excludes_zero", k.min_excludes_zero()}, {"spikes", k.spikes}, {"step", k.step}};
    const fs::path cp = a.curvature_out.empty() ? fs::path(c.out).replace_filename("curvature.csv")
                                                : fs::path(a.curvature_out);
    auto os = open_out(cp);
    os << "angle,kappa,err\n";
    for (std::size_t i = 0; i < k.angle.size(); ++i)
      os << format_double(k.angle[i]) << ',' << format_double(k.kappa[i]) << ',' << format_double(k.err[i])
         << '\n';
    o.outputs.push_back(cp);
    o.params["curvature_out"] = cp.string();
  }
  write_json(c.out, j);
  o.summary = std::string("support consistency ") + (cons.pass ? "passed" : "failed");
  return o;
}

struct IsingArgs {
  std::string config;
  int sweeps = 0;
  unsigned chains = 1;
  std::optional<std::uint64_t> seed;
  int burn_in = 1000;
  int max_distance = 0;
  std::string estimator = "cluster";
};

Outcome ising_mc(const IsingArgs& a, const Common& c) {
  const json cfg = read_config(a.config);
  require(cfg["model"] == "ising", ErrorKind::usage, "config key \"model\": ising-mc needs an ising model");
  const IsingModel model = ising_model_from_config(cfg);
  const SpinLattice lat = lattice_from_config(cfg);
  int reach = *std::min_element(lat.extents().begin(), lat.extents().end()) / 4;
  if (a.max_distance > 0) reach = a.max_distance;
  std::vector<LatticePoint> disp{LatticePoint(model.dim())};
  for (int i = 0; i < model.dim(); ++i)
    for (int k = 1; k <= reach; ++k) disp.push_back(LatticePoint::unit(model.dim(), i) * k);
  SampleOptions so;
  so.burn_in = a.burn_in;
  so.chains = a.chains;
  so.threads = c.threads;
  if (cfg.contains("beta_max")) so.beta_max = cfg["beta_max"].get<double>();
  so.estimator = a.estimator == "spin" ? CorrelationEstimator::spin : CorrelationEstimator::cluster;
  const auto stream = wolff_sample(model, lat, a.sweeps, *a.seed, disp, so);
  const auto est = measure_correlation(stream, disp);
  auto os = open_out(c.out);
  write_correlation_csv(os, est);
  Outcome o;
  o.params = {{"config", cfg},          {"sweeps", a.sweeps},   {"chains", a.chains},
              {"burn_in", a.burn_in},   {"max_distance", reach}, {"estimator", a.estimator},
              {"mean_cluster_size", stream.mean_cluster_size}};
  o.inputs = {a.config};
  o.outputs = {c.out};
  o.seeds = {*a.seed};
  o.summary = std::to_string(stream.samples()) + " samples";
  return o;
}

struct FitArgs {
  std::string in;
  std::string direction;
  std::string window;
};

Outcome oz_fit_cmd(const FitArgs& a, const Common& c) {
  std::ifstream in(a.in);
  require(in.good(), ErrorKind::usage, "cannot open " + a.in);
  const auto est = read_correlation_csv(in);
  require(!est.empty(), ErrorKind::data, "correlation file has no rows");
  const int dim = est.front().x.dim();
  const DualVector t = dual_or_axis(a.direction, dim);
  FitWindow w;
  if (!a.window.empty()) {
    static const std::regex re(R"(\s*([0-9.eE+-]*)\s*:\s*([0-9.eE+-]*)\s*)");
    std::smatch m;
    require(std::regex_match(a.window, m, re), ErrorKind::usage, "--window must look like \"8:32\"");
    if (m[1].length() > 0) w.x_min = std::stod(m[1].str());
    if (m[2].length() > 0) w.x_max = std::stod(m[2].str());
    require(w.x_min <= w.x_max, ErrorKind::usage, "--window needs min <= max");
  }
  const OzFit fit = oz_fit(est, t, dim, w);
  json j = fit.to_json();
  j["dim"] = dim;
  write_json(c.out, j);
  Outcome o;
  o.params = {{"direction", t.components()}, {"window", a.window}};
  o.inputs = {a.in};
  o.outputs = {c.out};
  o.summary = "p = " + format_double(fit.free.p) + ", xi = " + format_double(fit.free.xi);
  return o;
}

struct AxiomArgs {
  std::string model = "saw";
  SawArgs saw;
  double theta = 0.5;
  std::string norm = "euclidean";
};

Outcome axioms_cmd(const AxiomArgs& a, const Common& c) {
  require(a.model == "saw", ErrorKind::usage, "--model: only \"saw\" is available");
  const auto model = saw_model(a.saw.beta, a.saw.dim);
  MixingOptions mo;
  mo.theta = a.theta;
  mo.norm = a.norm == "l1" ? MixingNorm::l1 : a.norm == "linf" ? MixingNorm::linf : MixingNorm::euclidean;
  const auto fe = check_finite_energy(*model, a.saw.max_len);
  const auto sp = check_splitting(*model, a.saw.max_len);
  const auto mx = check_mixing(*model, a.saw.max_len, mo);
  write_json(c.out, {{"finite_energy", fe.to_json()}, {"splitting", sp.to_json()}, {"mixing", mx.to_json()}});
  Outcome o;
  o.params = saw_params(a.saw);
  o.params["model"] = a.model;
  o.params["theta"] = a.theta;
  o.params["norm"] = a.norm;
  o.outputs = {c.out};
  o.summary = "C2 = " + format_double(fe.constant) + ", C3 = " + format_double(sp.constant);
  return o;
}

int exit_code(ErrorKind k) { return k == ErrorKind::usage ? usage_error : domain_error; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ornstein-Zernike toolkit: self-avoiding walks, renewal structure, Wulff bodies, Ising sampling",
               "ozlab"};
  app.set_version_flag("--version", std::string(version()));
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(0, 1);
  std::string replay;
  app.add_option("--replay", replay, "rerun the command recorded in a manifest")->check(CLI::ExistingFile);

  std::map<std::string, std::function<Outcome()>> handlers;
  std::map<std::string, Common*> commons;
  std::vector<std::unique_ptr<Common>> keep;
  auto common_for = [&](CLI::App* sub, const std::string& help) {
    keep.push_back(std::make_unique<Common>());
    add_common(sub, *keep.back(), help);
    commons[sub->get_name()] = keep.back().get();
    return keep.back().get();
  };

  SawArgs enum_a;
  auto* s_enum = app.add_subcommand("saw-enumerate", "exact SAW two-point series g^(n)(x), CSV");
  add_saw_args(s_enum, enum_a);
  Common* c_enum = common_for(s_enum, "series CSV (x1..xd,n,coeff)");
  handlers["saw-enumerate"] = [&] { return saw_enumerate(enum_a, *c_enum); };

  RenewalArgs ren_a;
  auto* s_ren = app.add_subcommand("renewal-check", "renewal decomposition report, JSON");
  add_saw_args(s_ren, ren_a.saw);
  s_ren->add_option("--t,--direction", ren_a.direction, "dual direction t, comma separated (default e1)");
  s_ren->add_option("--roundtrip-len", ren_a.roundtrip_len, "factorization round trip up to this length")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  Common* c_ren = common_for(s_ren, "report JSON");
  handlers["renewal-check"] = [&] { return renewal_check(ren_a, *c_ren); };

  ExtrapolateArgs ext_a;
  auto* s_ext = app.add_subcommand("oz-extrapolate", "two-point function on a ray from the renewal equation, CSV");
  add_saw_args(s_ext, ext_a.saw);
  s_ext->add_option("--direction", ext_a.direction, "dual direction t (default: the ray direction)");
  s_ext->add_option("--targets", ext_a.targets, "ray, e.g. \"k*e1:20..200\"")->required();
  Common* c_ext = common_for(s_ext, "CSV (k,g,ratio_log)");
  handlers["oz-extrapolate"] = [&] { return oz_extrapolate_cmd(ext_a, *c_ext); };

  SkeletonArgs sk_a;
  auto* s_sk = app.add_subcommand("skeleton", "K-skeleton, surcharges and break points of a path, JSON");
  s_sk->add_option("--beta", sk_a.beta, "inverse temperature")->required();
  s_sk->add_option("--dim", sk_a.dim, "dimension when no path is given")->capture_default_str();
  s_sk->add_option("--max-len", sk_a.max_len, "horizon N of the body and the histogram")->capture_default_str();
  s_sk->add_option("--resolution", sk_a.resolution, "body resolution")->capture_default_str();
  s_sk->add_option("--K", sk_a.K, "skeleton scale in correlation lengths")->capture_default_str();
  s_sk->add_option("--delta", sk_a.delta, "cone opening")->capture_default_str();
  s_sk->add_option("--path-file", sk_a.path_file, "path CSV, one vertex per line")->check(CLI::ExistingFile);
  s_sk->add_option("--t", sk_a.t, "dual t (default: boundary point facing the displacement)");
  s_sk->add_option("--histogram-target", sk_a.histogram_target, "endpoint x for the surcharge histogram");
  s_sk->add_option("--histogram-K", sk_a.histogram_K, "scales for the histogram (default --K)")->delimiter(',');
  Common* c_sk = common_for(s_sk, "report JSON");
  handlers["skeleton"] = [&] { return skeleton_cmd(sk_a, *c_sk); };

  WulffArgs wu_a;
  auto* s_wu = app.add_subcommand("wulff", "boundary of K_beta, body JSON and curvature CSV");
  add_saw_args(s_wu, wu_a.saw);
  s_wu->add_option("--resolution", wu_a.resolution, "number of boundary directions")->capture_default_str();
  s_wu->add_option("--tol", wu_a.tol, "support consistency tolerance")->capture_default_str();
  s_wu->add_option("--curvature,--curvature-out", wu_a.curvature_out, "curvature CSV (default curvature.csv next to --out)");
  Common* c_wu = common_for(s_wu, "body JSON");
  handlers["wulff"] = [&] { return wulff_cmd(wu_a, *c_wu); };

  IsingArgs is_a;
  auto* s_is = app.add_subcommand("ising-mc", "Wolff sampling of <s_0 s_x> along the axes, CSV");
  s_is->add_option("--config", is_a.config, "model JSON")->required()->check(CLI::ExistingFile);
  s_is->add_option("--sweeps", is_a.sweeps, "recorded sweeps per chain")->required()->check(CLI::PositiveNumber);
  s_is->add_option("--chains", is_a.chains, "independent chains")->capture_default_str()->check(CLI::PositiveNumber);
  s_is->add_option("--seed", is_a.seed, "RNG seed")->required();
  s_is->add_option("--burn-in", is_a.burn_in, "discarded sweeps")->capture_default_str();
  s_is->add_option("--max-distance", is_a.max_distance, "largest |x| (default min extent / 4)");
  s_is->add_option("--estimator", is_a.estimator, "cluster or spin")
      ->capture_default_str()
      ->check(CLI::IsMember({"cluster", "spin"}));
  Common* c_is = common_for(s_is, "correlation CSV");
  handlers["ising-mc"] = [&] { return ising_mc(is_a, *c_is); };

  FitArgs fit_a;
  auto* s_fit = app.add_subcommand("oz-fit", "fit log g = log Psi - p log r - xi r on a ray, JSON");
  s_fit->add_option("--in", fit_a.in, "correlation CSV")->required()->check(CLI::ExistingFile);
  s_fit->add_option("--direction", fit_a.direction, "ray direction (default e1)");
  s_fit->add_option("--window", fit_a.window, "fit window min:max in |x|");
  Common* c_fit = common_for(s_fit, "fit JSON");
  handlers["oz-fit"] = [&] { return oz_fit_cmd(fit_a, *c_fit); };

  AxiomArgs ax_a;
  auto* s_ax = app.add_subcommand("axioms", "finite-energy, splitting and mixing certificates, JSON");
  s_ax->add_option("--model", ax_a.model, "path model")->capture_default_str()->check(CLI::IsMember({"saw"}));
  add_saw_args(s_ax, ax_a.saw);
  s_ax->add_option("--theta", ax_a.theta, "mixing decay base")->capture_default_str();
  s_ax->add_option("--norm", ax_a.norm, "mixing distance norm")
      ->capture_default_str()
      ->check(CLI::IsMember({"euclidean", "l1", "linf"}));
  Common* c_ax = common_for(s_ax, "axiom report JSON");
  handlers["axioms"] = [&] { return axioms_cmd(ax_a, *c_ax); };

  std::vector<std::string> storage{"ozlab"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage_error;
  }

  if (!replay.empty()) {
    if (!app.get_subcommands().empty()) {
      err << "ozlab: --replay takes no subcommand\n";
      return usage_error;
    }
    try {
      const auto m = RunManifest::read(replay);
      return run(m.argv, out, err);
    } catch (const Error& e) {
      err << "ozlab: " << e.what() << '\n';
      return exit_code(e.kind());
    }
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return usage_error;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const Common& common = *commons.at(name);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Outcome o = handlers.at(name)();
    RunManifest m;
    m.subcommand = name;
    m.argv = args;
    m.params = o.params;
    m.params["threads"] = common.threads;
    m.inputs = o.inputs;
    m.outputs = o.outputs;
    m.seeds = o.seeds;
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const fs::path mp = common.manifest.empty() ? fs::path(common.out + ".manifest.json") : fs::path(common.manifest);
    m.write(mp);
    out << name << ": " << o.summary << "; manifest " << mp.string() << '\n';
    return ok;
  } catch (const Error& e) {
    err << "ozlab " << name << ": " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "ozlab " << name << ": " << e.what() << '\n';
    return domain_error;
  }
}

}  // namespace ozlab::cli
