#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "collapse/bench.hpp"
#include "collapse/stern_gerlach.hpp"

namespace collapse::cli {

enum class ExperimentKind { SternGerlach, Environment, VisibilityCurve, Scaling };

std::string_view to_string(ExperimentKind kind);
/// Subcommand name: stern-gerlach, environment, visibility, bench.
std::string_view subcommand_name(ExperimentKind kind);

struct SternGerlachParams {
  double u_mean = 0.0;
  double d_mean = 0.0;
  std::vector<double> t_grid;
  std::size_t samples = 10'000;
  sg::NoiseDistribution distribution = sg::NoiseDistribution::UniformSymmetric;
};

struct EnvironmentParams {
  double u_mean = 0.0;
  double d_mean = 0.0;
  std::vector<double> t_grid;
  std::size_t samples = 1'000;
  sg::NoiseDistribution distribution = sg::NoiseDistribution::UniformSymmetric;
  /// CSV with header u,d,w; replaces the sampled spectrum when set.
  std::optional<std::string> spectrum_file;
};

struct VisibilityParams {
  /// a = (u_mean + d_mean) t / hbar, strictly increasing and >= 0.
  std::vector<double> a_grid;
  double t = 1.0;
  /// u_mean = u_fraction * a hbar / t, d_mean takes the rest.
  double u_fraction = 0.5;
  std::size_t samples = 10'000;
  sg::NoiseDistribution distribution = sg::NoiseDistribution::UniformSymmetric;
};

struct ScalingParams {
  std::size_t n_min = 4;
  std::size_t n_max = 10;
  std::vector<bench::Backend> backends{bench::Backend::SparseStep};
  std::vector<std::size_t> product_sizes;
  double coupling = 1.0;
  double field_scale = 1.0;
  double t = 0.1;
  std::size_t repeats = 3;
};

using ExperimentParams = std::variant<SternGerlachParams, EnvironmentParams, VisibilityParams, ScalingParams>;

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::SternGerlach;
  std::uint64_t seed = 0;
  double hbar = 1.0;
  ExperimentParams params;

  /// Normalized echo with every default filled in; parse_config accepts it.
  nlohmann::json to_json() const;
};

/// Parses and validates JSON text. Throws ParseError on malformed input and
/// ValidationError listing every violation with its field path. When
/// `expected` is set, a missing "kind" defaults to it and a different one is
/// rejected.
ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> expected = std::nullopt);

}  // namespace collapse::cli
