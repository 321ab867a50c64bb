#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ozlab/ising.hpp"

namespace ozlab {

const char* version() noexcept;

// Run configuration. Required: beta. Defaults: dim 2, nearest-neighbour
// couplings with J = 1, extents 64^dim, periodic, resolution 64, delta 0.1,
// K 3 (in correlation lengths). Unknown keys and bad values raise usage
// errors naming the key.
nlohmann::json validate_config(const nlohmann::json& raw);
nlohmann::json read_config(const std::filesystem::path& file);

IsingModel ising_model_from_config(const nlohmann::json& config);
SpinLattice lattice_from_config(const nlohmann::json& config);

// hex SHA-256 of the file contents
std::string file_digest(const std::filesystem::path& file);

struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;  // arguments after the program name
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  std::vector<std::uint64_t> seeds;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& file) const;
  static RunManifest read(const std::filesystem::path& file);
};

// corr.csv: x_1..x_d, mean, stderr, tau_int, n_samples
void write_correlation_csv(std::ostream& os, const std::vector<CorrelationEstimate>& est);
std::vector<CorrelationEstimate> read_correlation_csv(std::istream& is);

// one vertex per line, comma separated coordinates; '#' starts a comment
LatticePath read_path_csv(std::istream& is);

LatticePoint parse_lattice_point(const std::string& text);
DualVector parse_dual(const std::string& text);

}  // namespace ozlab
