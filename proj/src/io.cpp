#include "ozlab/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ozlab/error.hpp"
#include "ozlab/series.hpp"

#ifndef OZLAB_VERSION
#define OZLAB_VERSION "0.0.0"
#endif

namespace ozlab {

const char* version() noexcept { return OZLAB_VERSION; }

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  fail(ErrorKind::usage, "config key \"" + key + "\": " + what);
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) bad(key, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(key, "must be finite");
  return v;
}

int integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) bad(key, "expected an integer");
  return j.get<int>();
}

std::vector<int> int_list(const json& j, const std::string& key) {
  if (!j.is_array()) bad(key, "expected an array of integers");
  std::vector<int> out;
  for (const auto& e : j) out.push_back(integer(e, key));
  return out;
}

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    fail(ErrorKind::usage, "not a number: \"" + s + "\"");
  }
  require(pos == s.size(), ErrorKind::usage, "not a number: \"" + s + "\"");
  return v;
}

int parse_int(const std::string& s) {
  const double v = parse_number(s);
  require(v == std::floor(v) && std::abs(v) < 1e9, ErrorKind::usage, "not an integer: \"" + s + "\"");
  return static_cast<int>(v);
}

}  // namespace

json validate_config(const json& raw) {
  require(raw.is_object(), ErrorKind::usage, "config must be a JSON object");
  static const std::array<const char*, 10> known = {"dim",   "beta",       "couplings", "extents", "periodic",
                                                    "resolution", "delta", "K",       "beta_max", "model"};
  for (const auto& [k, v] : raw.items())
    if (std::find_if(known.begin(), known.end(), [&](const char* s) { return k == s; }) == known.end())
      bad(k, "unknown key");

  json out;
  out["model"] = raw.value("model", "ising");
  if (!out["model"].is_string() || (out["model"] != "ising" && out["model"] != "saw"))
    bad("model", "expected \"ising\" or \"saw\"");

  if (!raw.contains("beta")) bad("beta", "missing required key");
  const double beta = number(raw["beta"], "beta");
  if (beta < 0.0) bad("beta", "must be nonnegative");
  out["beta"] = beta;

  const int dim = raw.contains("dim") ? integer(raw["dim"], "dim") : 2;
  if (dim < 1 || dim > kMaxDim) bad("dim", "must lie in 1.." + std::to_string(kMaxDim));
  out["dim"] = dim;

  json couplings = json::array();
  if (raw.contains("couplings")) {
    if (!raw["couplings"].is_array() || raw["couplings"].empty()) bad("couplings", "expected a nonempty array");
    std::map<std::vector<int>, double> J;
    for (const auto& c : raw["couplings"]) {
      if (!c.is_object() || !c.contains("v") || !c.contains("J"))
        bad("couplings", "each entry needs \"v\" and \"J\"");
      const auto v = int_list(c["v"], "couplings.v");
      if (static_cast<int>(v.size()) != dim) bad("couplings.v", "length differs from dim");
      const double j = number(c["J"], "couplings.J");
      if (j < 0.0) bad("couplings.J", "couplings must be ferromagnetic (J >= 0)");
      if (std::all_of(v.begin(), v.end(), [](int a) { return a == 0; }) && j != 0.0)
        bad("couplings.v", "self coupling J_0 must vanish");
      if (!J.emplace(v, j).second) bad("couplings.v", "duplicate vector");
    }
    for (const auto& [v, j] : J) {
      std::vector<int> m(v.size());
      std::transform(v.begin(), v.end(), m.begin(), [](int a) { return -a; });
      auto it = J.find(m);
      if (it == J.end() || it->second != j) {
        std::ostringstream msg;
        msg << "couplings must be symmetric, J_v = J_{-v}; v = [";
        for (std::size_t i = 0; i < v.size(); ++i) msg << (i ? "," : "") << v[i];
        msg << "] has J = " << format_double(j) << " but -v has "
            << (it == J.end() ? std::string("no entry") : "J = " + format_double(it->second));
        bad("couplings", msg.str());
      }
      couplings.push_back({{"v", v}, {"J", j}});
    }
  } else {
    for (int i = 0; i < dim; ++i)
      for (int s : {1, -1}) {
        std::vector<int> v(static_cast<std::size_t>(dim), 0);
        v[static_cast<std::size_t>(i)] = s;
        couplings.push_back({{"v", v}, {"J", 1.0}});
      }
  }
  out["couplings"] = couplings;

  if (raw.contains("extents")) {
    const auto e = int_list(raw["extents"], "extents");
    if (static_cast<int>(e.size()) != dim) bad("extents", "length differs from dim");
    if (std::any_of(e.begin(), e.end(), [](int a) { return a < 1; })) bad("extents", "must be positive");
    out["extents"] = e;
  } else {
    out["extents"] = std::vector<int>(static_cast<std::size_t>(dim), 64);
  }
  if (raw.contains("periodic") && !raw["periodic"].is_boolean()) bad("periodic", "expected a boolean");
  out["periodic"] = raw.value("periodic", true);

  const int resolution = raw.contains("resolution") ? integer(raw["resolution"], "resolution") : 64;
  if (resolution < 4) bad("resolution", "must be at least 4");
  out["resolution"] = resolution;
  const double delta = raw.contains("delta") ? number(raw["delta"], "delta") : 0.1;
  if (!(delta > 0.0 && delta < 1.0)) bad("delta", "must lie in (0, 1)");
  out["delta"] = delta;
  const double K = raw.contains("K") ? number(raw["K"], "K") : 3.0;
  if (!(K > 0.0)) bad("K", "must be positive");
  out["K"] = K;
  if (raw.contains("beta_max")) {
    const double bm = number(raw["beta_max"], "beta_max");
    if (!(bm > 0.0)) bad("beta_max", "must be positive");
    out["beta_max"] = bm;
  }
  return out;
}

json read_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  require(in.good(), ErrorKind::usage, "cannot open config " + file.string());
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::usage, "config " + file.string() + " is not valid JSON: " + e.what());
  }
  return validate_config(raw);
}

IsingModel ising_model_from_config(const json& config) {
  const int dim = config.at("dim").get<int>();
  std::vector<Coupling> cs;
  for (const auto& c : config.at("couplings")) {
    const auto v = c.at("v").get<std::vector<int>>();
    cs.push_back({LatticePoint(std::span<const int>(v)), c.at("J").get<double>()});
  }
  return IsingModel(dim, std::move(cs), config.at("beta").get<double>());
}

SpinLattice lattice_from_config(const json& config) {
  return SpinLattice(config.at("extents").get<std::vector<int>>(), config.at("periodic").get<bool>());
}

std::string file_digest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  require(in.good(), ErrorKind::usage, "cannot open " + file.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

json RunManifest::to_json() const {
  json in = json::array();
  for (const auto& p : inputs) in.push_back({{"path", p.string()}, {"sha256", file_digest(p)}});
  json out = json::array();
  for (const auto& p : outputs) out.push_back({{"path", p.string()}, {"sha256", file_digest(p)}});
  return {{"tool", "ozlab"}, {"version", version()}, {"subcommand", subcommand}, {"argv", argv},
          {"params", params}, {"inputs", in}, {"outputs", out}, {"seeds", seeds},
          {"wall_seconds", wall_seconds}};
}

void RunManifest::write(const std::filesystem::path& file) const {
  std::ofstream os(file);
  require(os.good(), ErrorKind::usage, "cannot write manifest " + file.string());
  os << to_json().dump(2) << '\n';
}

RunManifest RunManifest::read(const std::filesystem::path& file) {
  std::ifstream in(file);
  require(in.good(), ErrorKind::usage, "cannot open manifest " + file.string());
  RunManifest m;
  try {
    const json j = json::parse(in);
    m.subcommand = j.at("subcommand").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.params = j.at("params");
    for (const auto& p : j.at("outputs")) m.outputs.emplace_back(p.at("path").get<std::string>());
    for (const auto& p : j.at("inputs")) m.inputs.emplace_back(p.at("path").get<std::string>());
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorKind::usage, "malformed manifest " + file.string() + ": " + e.what());
  }
  return m;
}

void write_correlation_csv(std::ostream& os, const std::vector<CorrelationEstimate>& est) {
  const int dim = est.empty() ? 1 : est.front().x.dim();
  for (int i = 0; i < dim; ++i) os << "x_" << i + 1 << ',';
  os << "mean,stderr,tau_int,n_samples\n";
  for (const auto& e : est) {
    for (int i = 0; i < dim; ++i) os << e.x[i] << ',';
    os << format_double(e.mean) << ',' << format_double(e.stderr_) << ',' << format_double(e.tau_int) << ','
       << e.n_samples << '\n';
  }
}

std::vector<CorrelationEstimate> read_correlation_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorKind::data, "empty correlation file");
  const auto head = split(trim(line), ',');
  const int dim = static_cast<int>(head.size()) - 4;
  require(dim >= 1 && dim <= kMaxDim, ErrorKind::data, "correlation header has the wrong number of columns");
  for (int i = 0; i < dim; ++i)
    require(head[static_cast<std::size_t>(i)] == "x_" + std::to_string(i + 1), ErrorKind::data,
            "correlation header must start with x_1..x_d");
  require(head[static_cast<std::size_t>(dim)] == "mean" && head[static_cast<std::size_t>(dim) + 1] == "stderr",
          ErrorKind::data, "correlation header must continue with mean,stderr,tau_int,n_samples");
  std::vector<CorrelationEstimate> out;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    line = trim(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    require(f.size() == head.size(), ErrorKind::data, "row " + std::to_string(row) + " has the wrong width");
    CorrelationEstimate e;
    e.x = LatticePoint(dim);
    try {
      for (int i = 0; i < dim; ++i) e.x[i] = parse_int(f[static_cast<std::size_t>(i)]);
      e.mean = parse_number(f[static_cast<std::size_t>(dim)]);
      e.stderr_ = parse_number(f[static_cast<std::size_t>(dim) + 1]);
      e.tau_int = parse_number(f[static_cast<std::size_t>(dim) + 2]);
      e.n_samples = static_cast<std::size_t>(parse_int(f[static_cast<std::size_t>(dim) + 3]));
    } catch (const Error& err) {
      fail(ErrorKind::data, "row " + std::to_string(row) + ": " + err.what());
    }
    out.push_back(e);
  }
  return out;
}

LatticePath read_path_csv(std::istream& is) {
  std::vector<LatticePoint> vs;
  std::string line;
  while (std::getline(is, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    try {
      vs.push_back(parse_lattice_point(line));
    } catch (const Error& err) {
      fail(ErrorKind::data, std::string("path file: ") + err.what());
    }
  }
  require(!vs.empty(), ErrorKind::data, "path file has no vertices");
  for (const auto& v : vs) require(v.dim() == vs.front().dim(), ErrorKind::data, "path vertices differ in dimension");
  try {
    return LatticePath(std::move(vs));
  } catch (const Error& err) {
    fail(ErrorKind::data, std::string("path file: ") + err.what());
  }
}

LatticePoint parse_lattice_point(const std::string& text) {
  const auto f = split(trim(text), ',');
  require(!f.empty() && f.size() <= static_cast<std::size_t>(kMaxDim), ErrorKind::usage,
          "expected 1.." + std::to_string(kMaxDim) + " comma separated integers: \"" + text + "\"");
  std::vector<int> c;
  for (const auto& s : f) c.push_back(parse_int(s));
  return LatticePoint(std::span<const int>(c));
}

DualVector parse_dual(const std::string& text) {
  const auto f = split(trim(text), ',');
  require(!f.empty() && f.size() <= static_cast<std::size_t>(kMaxDim), ErrorKind::usage,
          "expected 1.." + std::to_string(kMaxDim) + " comma separated numbers: \"" + text + "\"");
  std::vector<double> c;
  for (const auto& s : f) c.push_back(parse_number(s));
  return DualVector(std::span<const double>(c));
}

}  // namespace ozlab
