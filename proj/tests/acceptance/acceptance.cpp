// One PASS/FAIL line per acceptance criterion. Exit status is 0 when every
// criterion ran to completion; --strict also fails on any FAIL line.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "ozlab/coarse_grain.hpp"
#include "ozlab/error.hpp"
#include "ozlab/io.hpp"
#include "ozlab/oz_fit.hpp"
#include "ozlab/renewal.hpp"
#include "ozlab/weights.hpp"
#include "ozlab/wulff.hpp"

using namespace ozlab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok " : "FAILED ") + what);
  }
};

std::ostream* g_report = nullptr;

void emit(const std::string& line) {
  std::cout << line << '\n' << std::flush;
  if (g_report) *g_report << line << '\n' << std::flush;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// printed under the criterion they belong to
std::vector<std::string> g_info;
void info(const std::string& s) { g_info.push_back("  info: " + s); }

// 1. renewal exactness
Verdict renewal_exactness() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  for (double beta : {0.7, 0.8, 1.0}) {
    const auto m = saw_model(beta, 2);
    const double r = renewal_residual(enumerate_two_point(m, 12), direct_correlation(m, DualVector{1.0, 0.0}, 12));
    v.check(r < 1e-12, fmt("beta=%.1f N=12 residual %.3e < 1e-12", beta, r));
  }
  const auto m = saw_model(1.0, 2);
  const DualVector t{1.0, 0.0};
  std::size_t total = 0, good = 0;
  for_each_path(*m, 10, [&](const LatticePath& p) {
    ++total;
    const auto f = factorize(p, t);
    bool ok = f.reassemble() == p;
    for (const auto& b : f.bulk) ok = ok && (classify_piece(b, t) & static_cast<unsigned>(PieceClass::bulk)) != 0;
    if (f.has_cut())
      ok = ok && (classify_piece(f.left, t) & static_cast<unsigned>(PieceClass::left)) != 0 &&
           (classify_piece(f.right, t) & static_cast<unsigned>(PieceClass::right)) != 0;
    good += ok ? 1 : 0;
  });
  v.check(good == total && total == 69673, fmt("round trip %zu/%zu paths at N=10", good, total));
  const double dt = seconds_since(t0);
  v.check(dt < 120.0, fmt("runtime %.1fs < 120s", dt));
  return v;
}

// 2. axiom certification
Verdict axiom_certification() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  for (double beta : {0.7, 0.8, 1.0}) {
    const auto m = saw_model(beta, 2);
    const auto fe = check_finite_energy(*m, 4);
    const auto sp = check_splitting(*m, 4);
    const auto mx = check_mixing(*m, 4);
    v.check(fe.pass && fe.constant == beta, fmt("beta=%.1f C2=%.17g == beta", beta, fe.constant));
    // C3 is a ratio of two floating-point sums, so equality holds up to rounding
    v.check(sp.pass && std::abs(sp.constant - 1.0) <= 1e-12, fmt("beta=%.1f C3=%.17g == 1 (to 1e-12)", beta, sp.constant));
    const double ratio = mx.max_ratio.value_or(std::nan(""));
    v.check(mx.pass && std::abs(ratio - 1.0) <= 1e-14, fmt("beta=%.1f mixing ratio %.17g == 1", beta, ratio));
  }
  const double dt = seconds_since(t0);
  v.check(dt < 60.0, fmt("runtime %.1fs < 60s", dt));
  return v;
}

// 3. mass gap
Verdict mass_gap() {
  Verdict v;
  const auto m = saw_model(0.8, 2);
  const auto g = mass_gap_estimate(direct_correlation(m, DualVector{1.0, 0.0}, 14), enumerate_two_point(m, 14), {1, 0});
  v.check(g.gap_lower > 0.0, fmt("beta=0.8 N=14 gap %.6g lower bracket %.6g > 0%s", g.gap, g.gap_lower,
                                 g.direct_finite_support ? " (direct series finitely supported on the axis)" : ""));
  return v;
}

// 4. boundary duality
Verdict boundary_duality() {
  Verdict v;
  const auto m = saw_model(0.8, 2);
  const DualVector e1{1.0, 0.0};
  std::vector<DirectCorrelation> dcs;
  for (int N : {10, 12, 14}) dcs.push_back(direct_correlation(m, e1, N));
  const double s14 = solve_boundary(dcs[2], e1)[0];
  const double s12 = solve_boundary(dcs[1], e1)[0];
  const double s_bracket = std::abs(s14 - s12);
  const auto est = decay_rate_estimate(enumerate_two_point(m, 14), {1, 0});
  const double diff = std::abs(s14 - est.value);
  v.check(diff <= s_bracket + est.width(),
          fmt("|s* - decay| = |%.6g - %.6g| = %.3g <= %.3g (s* drift N=12..14 %.3g + decay width %.3g)", s14,
              est.value, diff, s_bracket + est.width(), s_bracket, est.width()));
  if (est.width() > 1.0)
    info(fmt("decay bracket [%.4g, %.4g] is wide: truncated ratios do not settle at beta=0.8", est.lower, est.upper));
  const DualVector star{s14, 0.0};
  double prev = 0.0;
  bool mono = true;
  std::string masses;
  for (std::size_t i = 0; i < dcs.size(); ++i) {
    const double w = tilted_step_mass(dcs[i], star);
    mono = mono && w >= prev;
    prev = w;
    masses += fmt("%s%.12g", i ? ", " : "", w);
  }
  v.check(prev > 0.99 && prev <= 1.0 + 1e-12, fmt("tilted step mass at s* (N=14) %.12g in (0.99, 1]", prev));
  v.check(mono, "tilted step mass nondecreasing over N=10,12,14: " + masses);
  const auto d1 = direct_correlation(saw_model(0.8, 1), DualVector{1.0}, 8);
  const double s1 = solve_boundary(d1, DualVector{1.0})[0];
  v.check(std::abs(s1 - 0.8) <= 1e-10, fmt("1D anchor s* = %.15g vs beta 0.8", s1));
  if (s14 < 0.0) info(fmt("s*(e1) = %.6g < 0 at beta=0.8: the origin lies outside K, beta=0.8 is supercritical", s14));
  return v;
}

std::vector<LatticePoint> ray(int dim, int from, int to) {
  std::vector<LatticePoint> out;
  for (int k = from; k <= to; ++k) {
    LatticePoint x(dim);
    x[0] = k;
    out.push_back(x);
  }
  return out;
}

OzFit fit_extrapolation(double beta, int dim, int N) {
  DualVector t(dim);
  t[0] = 1.0;
  const auto g = oz_extrapolate(direct_correlation(saw_model(beta, dim), t, N), ray(dim, 20, 200));
  std::vector<CorrelationEstimate> est;
  for (const auto& [x, val] : g) {
    CorrelationEstimate e;
    e.x = x;
    e.mean = val;
    est.push_back(e);
  }
  return oz_fit(est, t, dim);
}

// 5. OZ exponent
Verdict oz_exponent() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto f2 = fit_extrapolation(0.8, 2, 14);
  v.check(f2.free.p >= 0.45 && f2.free.p <= 0.55,
          fmt("d=2 beta=0.8 N=14 k=20..200: p = %.5f in [0.45, 0.55] (xi %.6g)", f2.free.p, f2.free.xi));
  const auto f1 = fit_extrapolation(0.8, 1, 14);
  // the extrapolation is exact, so sigma is at rounding level; allow that level
  const double bound = std::max(2.0 * f1.free.sigma_p(), 1e-9);
  v.check(std::abs(f1.free.p) <= bound, fmt("d=1: |p| = %.3g <= max(2 sigma, 1e-9) = %.3g", std::abs(f1.free.p), bound));
  const double dt = seconds_since(t0);
  v.check(dt < 60.0, fmt("runtime %.1fs < 60s", dt));
  if (f2.free.xi < 0.0) info("fitted xi < 0 at beta=0.8: the extrapolated two-point function grows along the axis");
  const auto sub = fit_extrapolation(1.5, 2, 14);
  info(fmt("subcritical beta=1.5: p = %.5f +- %.2g, xi = %.6g", sub.free.p, sub.free.sigma_p(), sub.free.xi));
  return v;
}

// 6. convexity and curvature
Verdict convexity_curvature() {
  Verdict v;
  try {
    const auto body = build_body(saw_model(0.8, 2), 14, 64);
    const auto rep = body.support_consistency(1e-6);
    v.check(rep.pass, fmt("beta=0.8 support consistency worst %.3g at tol 1e-6", rep.worst));
    const auto k = curvature(body);
    v.check(k.min_excludes_zero(), fmt("kappa_min %.6g +- %.3g excludes 0", k.kappa_min, k.kappa_min_err));
  } catch (const Error& e) {
    v.check(false, std::string("beta=0.8 body: ") + to_string(e.kind()) + " error: " + e.what());
  }
  double worst = 0.0;
  for (double r : {0.5, 1.0, 2.0})
    for (double kap : curvature(WulffBody::circle(r, 128)).kappa) worst = std::max(worst, std::abs(kap - 1.0 / r));
  v.check(worst <= 1e-4, fmt("circle fixture max |kappa - 1/r| = %.3g <= 1e-4", worst));

  const auto sub = build_body(saw_model(1.5, 2), 14, 64);
  const auto rep = sub.support_consistency(1e-6);
  const auto k = curvature(sub);
  info(fmt("subcritical beta=1.5 N=14: support consistency %s (worst %.3g), kappa_min %.6g +- %.3g",
           rep.pass ? "passes" : "fails", rep.worst, k.kappa_min, k.kappa_min_err));
  return v;
}

// 7. Ising oracles
Verdict ising_oracles(int sweeps_2d) {
  Verdict v;
  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = IsingModel::nearest_neighbor(1, 0.6);
    const auto xs = ray(1, 0, 8);
    SampleOptions o;
    o.burn_in = 1000;
    const auto s = wolff_sample(m, SpinLattice({256}), 40000, 20240601, xs, o);
    const auto c = measure_correlation(s, xs);
    double worst = 0.0, min_eff = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const auto& e : c) {
      const double exact = exact_1d(m, e.x[0]);
      const double z = e.stderr_ > 0.0 ? std::abs(e.mean - exact) / e.stderr_ : (e.mean == exact ? 0.0 : INFINITY);
      ok = ok && z <= 3.0;
      worst = std::max(worst, z);
      if (!e.x.is_zero()) min_eff = std::min(min_eff, static_cast<double>(e.n_samples) / (2.0 * e.tau_int));
    }
    v.check(ok, fmt("1D beta=0.6: max |MC - tanh^x| / sigma = %.2f <= 3 for x <= 8", worst));
    v.check(min_eff >= 1e4, fmt("1D decorrelated samples min n/(2 tau) = %.0f >= 1e4", min_eff));
    const double dt = seconds_since(t0);
    v.check(dt < 120.0, fmt("1D runtime %.1fs < 120s", dt));
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const double beta = 0.35;
    const auto m = IsingModel::nearest_neighbor(2, beta);
    const std::vector<int> widths{12, 13, 14};
    const auto strips = strip_sequence(m, widths);
    const double gap = std::abs(strips[2].xi - strips[1].xi);
    v.check(gap < 1e-4, fmt("strip xi W=12,13,14: %.8f %.8f %.8f, Cauchy gap |xi14 - xi13| = %.3g < 1e-4",
                            strips[0].xi, strips[1].xi, strips[2].xi, gap));
    const auto xs = ray(2, 0, 32);
    SampleOptions o;
    o.burn_in = 500;
    const auto s = wolff_sample(m, SpinLattice({128, 128}), sweeps_2d, 42, xs, o);
    const auto c = measure_correlation(s, xs);
    const auto f = oz_fit(c, DualVector{1.0, 0.0}, 2, FitWindow{8.0, 32.0});
    const double rel = std::abs(f.constrained.xi - strips[2].xi) / strips[2].xi;
    v.check(rel <= 0.02, fmt("MC xi (constrained fit) %.5f +- %.5f vs strip W=14 %.5f: rel %.4f <= 0.02",
                             f.constrained.xi, f.constrained.sigma_xi(), strips[2].xi, rel));
    v.check(f.constrained.chi2_per_dof() < 2.0, fmt("constrained chi2/dof %.3f < 2", f.constrained.chi2_per_dof()));
    v.check(f.free.p >= 0.4 && f.free.p <= 0.6, fmt("unconstrained p = %.4f +- %.4f in [0.4, 0.6]", f.free.p, f.free.sigma_p()));
    const double dt = seconds_since(t0);
    v.check(dt < 900.0, fmt("2D runtime %.1fs < 900s (%d sweeps, window %g..%g, %d points)", dt, sweeps_2d, f.x_min,
                            f.x_max, f.points));
    info(fmt("exact infinite-lattice axis xi at beta=0.35: %.6f", onsager_axis_xi(beta)));
  }
  return v;
}

std::vector<double> backtracking_fractions(double beta, int N, const LatticePoint& x, std::span<const double> Ks) {
  const auto m = saw_model(beta, 2);
  const auto body = build_body(m, N, 64);
  const DualVector t = body.contact_dual(DualVector{static_cast<double>(x[0]), static_cast<double>(x[1])});
  std::vector<double> out;
  for (double K : Ks) out.push_back(surcharge_histogram(m, N, K, x, t, body).backtracking_fraction());
  return out;
}

// 8. skeleton diagnostics
Verdict skeleton_diagnostics() {
  Verdict v;
  const std::vector<double> Ks{2.0, 3.0, 4.0};
  const auto rep = build_body(saw_model(1.0, 2), 12, 64).support_consistency(1e-6);
  info(fmt("beta=1 N=12 body support consistency %s (worst %.3g)", rep.pass ? "passes" : "fails", rep.worst));
  const auto fr = backtracking_fractions(1.0, 12, {6, 0}, Ks);
  const bool dec = fr[0] > fr[1] && fr[1] > fr[2];
  v.check(dec, fmt("beta=1 x=(6,0) N=12 backtracking fraction K=2,3,4: %.6g, %.6g, %.6g strictly decreasing", fr[0],
                   fr[1], fr[2]));
  const auto hot = backtracking_fractions(2.0, 12, {6, 0}, Ks);
  info(fmt("beta=2: fractions K=2,3,4: %.6g, %.6g, %.6g", hot[0], hot[1], hot[2]));
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 9. determinism
Verdict determinism() {
  Verdict v;
  const fs::path dir = fs::temp_directory_path() / "ozlab_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream(dir / "ising.json") << R"({"beta": 0.3, "extents": [24, 24]})";
    std::vector<CorrelationEstimate> est;
    for (int k = 1; k <= 24; ++k) {
      CorrelationEstimate e;
      e.x = {k, 0};
      e.mean = 0.9 * std::pow(k, -0.5) * std::exp(-0.3 * k) * (1.0 + 0.01 * std::sin(k));
      e.stderr_ = 0.01 * e.mean;
      e.n_samples = 10000;
      est.push_back(e);
    }
    std::ofstream os(dir / "corr.csv");
    write_correlation_csv(os, est);
  }
  struct Case {
    std::string name;
    std::vector<std::string> args;
    std::string ext;
    bool curvature = false;
  };
  const std::vector<Case> cases{
      {"saw-enumerate", {"--dim", "2", "--beta", "1", "--max-len", "8"}, ".csv"},
      {"renewal-check", {"--dim", "2", "--beta", "1", "--max-len", "8"}, ".json"},
      {"oz-extrapolate", {"--dim", "2", "--beta", "1.5", "--max-len", "10", "--targets", "k*e1:20..60"}, ".csv"},
      {"skeleton",
       {"--beta", "1.5", "--max-len", "10", "--resolution", "32", "--histogram-target", "4,0", "--histogram-K", "2,3"},
       ".json"},
      {"wulff", {"--beta", "1.5", "--max-len", "10", "--resolution", "32"}, ".json", true},
      {"axioms", {"--beta", "1", "--max-len", "3"}, ".json"},
      {"oz-fit", {"--in", (dir / "corr.csv").string()}, ".json"},
      {"ising-mc",
       {"--config", (dir / "ising.json").string(), "--sweeps", "300", "--burn-in", "50", "--chains", "2", "--seed", "77"},
       ".csv"},
  };
  for (const auto& c : cases) {
    std::string outputs[2];
    bool ran = true;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / (c.name + (run ? "_b" : "_a") + c.ext);
      std::vector<std::string> args{c.name};
      args.insert(args.end(), c.args.begin(), c.args.end());
      args.insert(args.end(), {"--out", out.string(), "--threads", run ? "1" : "0"});
      const fs::path curv = dir / (c.name + (run ? "_b" : "_a") + "_curvature.csv");
      if (c.curvature) args.insert(args.end(), {"--curvature-out", curv.string()});
      std::ostringstream so, se;
      if (cli::run(args, so, se) != cli::ok) {
        ran = false;
        v.check(false, c.name + " failed: " + se.str());
        break;
      }
      outputs[run] = slurp(out) + (c.curvature ? slurp(curv) : std::string());
    }
    if (ran) v.check(!outputs[0].empty() && outputs[0] == outputs[1],
                     c.name + " byte-identical across runs (" + std::to_string(outputs[0].size()) + " bytes)");
  }
  fs::remove_all(dir);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ozlab acceptance suite"};
  bool strict = false;
  std::vector<int> only;
  std::string report;
  int sweeps_2d = 20000;
  app.add_flag("--strict", strict, "exit 1 when any criterion fails");
  app.add_option("--only", only, "run only these criteria")->delimiter(',')->check(CLI::Range(1, 9));
  app.add_option("--report", report, "also write the lines to this file");
  app.add_option("--sweeps-2d", sweeps_2d, "recorded sweeps for the 2D Ising run")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::ofstream rep;
  if (!report.empty()) {
    rep.open(report);
    g_report = &rep;
  }

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"renewal exactness", renewal_exactness},
      {"axiom certification", axiom_certification},
      {"mass gap", mass_gap},
      {"boundary duality", boundary_duality},
      {"OZ exponent", oz_exponent},
      {"convexity and curvature", convexity_curvature},
      {"Ising oracles", [&] { return ising_oracles(sweeps_2d); }},
      {"skeleton diagnostics", skeleton_diagnostics},
      {"determinism", determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failed = 0, crashed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.check(false, std::string("aborted: ") + e.what());
      ++crashed;
    }
    emit(fmt("criterion %d %s: %s (%.1fs)", id, criteria[i].first.c_str(), v.pass ? "PASS" : "FAIL", seconds_since(t0)));
    for (const auto& n : v.notes) emit("  " + n);
    for (const auto& n : g_info) emit(n);
    g_info.clear();
    failed += v.pass ? 0 : 1;
  }
  emit(fmt("acceptance: %d criteria failed", failed));
  if (crashed) return 2;
  return strict && failed ? 1 : 0;
}
