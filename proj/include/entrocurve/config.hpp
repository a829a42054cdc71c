#pragma once
// Experiment configuration shared by the CLI subcommands, with a canonical
// JSON form (round-trips exactly) and a stable hash of that form.

#include <cstdint>
#include <string>
#include <vector>

#include "entrocurve/graph_space.hpp"
#include "json.hpp"

namespace entrocurve {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
  std::string model = "hypercube:n=3,alpha=0.5";
  std::string nu0 = "random";   // dirac:i | uniform | measure | random[:seed[:k]] | JSON array
  std::string nu1 = "random";
  std::string tgrid = "0.1:0.9:9";  // a:b:n or a comma list
  std::vector<double> gammas{5e-2, 2.5e-2, 1.25e-2, 6.25e-3};
  double tol = 1e-11;      // IPFP residual tolerance
  double gap_tol = 1e-8;   // convexity gap tolerance
  std::uint64_t seed = 1;
  std::string out;         // empty: stdout
  double ct_scale = 1.0;   // test hook: multiplies C_t

  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
// FNV-1a (64 bit) of the compact canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// "a:b:n" (n evenly spaced points, ends included) or "t1,t2,...".
std::vector<double> parse_tgrid(const std::string& spec);
std::vector<double> parse_double_list(const std::string& spec);

// Marginal presets. A bare "random" draws from default_seed; random weights
// are integers in 1..100 on k distinct vertices (all vertices if k is omitted).
Vec parse_marginal(const std::string& spec, const GraphSpace& space, std::uint64_t default_seed);

}  // namespace entrocurve
