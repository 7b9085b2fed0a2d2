#include "collapse/config.hpp"

#include <cmath>
#include <set>

#include "collapse/errors.hpp"

namespace collapse::cli {

using nlohmann::json;

namespace {

ExperimentKind kind_from_string(std::string_view s, bool& ok) {
  ok = true;
  if (s == "SternGerlach") return ExperimentKind::SternGerlach;
  if (s == "Environment") return ExperimentKind::Environment;
  if (s == "VisibilityCurve") return ExperimentKind::VisibilityCurve;
  if (s == "Scaling") return ExperimentKind::Scaling;
  ok = false;
  return ExperimentKind::SternGerlach;
}

// Reads typed fields from one JSON object and records every problem instead
// of stopping at the first.
class FieldReader {
 public:
  explicit FieldReader(const json& obj) : obj_(obj) {}

  std::vector<std::string>& violations() { return violations_; }

  void fail(const std::string& path, const std::string& what) { violations_.push_back(path + ": " + what); }

  bool has(const char* key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  std::optional<double> number(const char* key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_number()) {
      fail(key, "expected a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      fail(key, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<std::uint64_t> count(const char* key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      fail(key, "must be >= 0");
      return std::nullopt;
    }
    fail(key, "expected a non-negative integer");
    return std::nullopt;
  }

  std::optional<std::string> string(const char* key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_string()) {
      fail(key, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const char* key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_array()) {
      fail(key, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    bool good = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string path = std::string(key) + "[" + std::to_string(i) + "]";
      if (!v[i].is_number()) {
        fail(path, "expected a number");
        good = false;
      } else {
        out.push_back(v[i].get<double>());
      }
    }
    if (!good) return std::nullopt;
    return out;
  }

  std::optional<std::vector<std::string>> strings(const char* key) {
    if (!has(key)) return std::nullopt;
    const auto& v = obj_.at(key);
    if (!v.is_array()) {
      fail(key, "expected an array of strings");
      return std::nullopt;
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) {
        fail(std::string(key) + "[" + std::to_string(i) + "]", "expected a string");
        return std::nullopt;
      }
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  void reject_unknown() {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.count(key)) fail(key, "unknown field");
    }
  }

 private:
  const json& obj_;
  std::set<std::string> seen_;
  std::vector<std::string> violations_;
};

void check_increasing(FieldReader& r, const char* key, const std::vector<double>& grid) {
  if (grid.empty()) r.fail(key, "must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      r.fail(std::string(key) + "[" + std::to_string(i) + "]", "grid must be strictly increasing");
      return;
    }
  }
}

void read_energy(FieldReader& r, const char* key, double& dst, bool required) {
  if (auto v = r.number(key)) {
    if (*v < 0.0) r.fail(key, "must be >= 0");
    dst = *v;
  } else if (required && !r.has(key)) {
    r.fail(key, "is required");
  }
}

void read_samples(FieldReader& r, std::size_t& dst) {
  if (auto v = r.count("samples")) {
    if (*v < 1) r.fail("samples", "must be >= 1");
    dst = static_cast<std::size_t>(*v);
  }
}

void read_distribution(FieldReader& r, sg::NoiseDistribution& dst) {
  if (auto s = r.string("distribution")) {
    try {
      dst = sg::distribution_from_string(*s);
    } catch (const UnsupportedDistribution&) {
      r.fail("distribution", "must be UniformSymmetric, GaussianSigmaEqualsMean or None");
    }
  }
}

// Accepts either "t" (single value) or "t_grid".
void read_time_grid(FieldReader& r, std::vector<double>& grid) {
  const bool has_t = r.has("t");
  const bool has_grid = r.has("t_grid");
  if (has_t && has_grid) {
    r.fail("t", "give either t or t_grid, not both");
    return;
  }
  if (has_t) {
    if (auto v = r.number("t")) grid = {*v};
  } else if (has_grid) {
    if (auto v = r.numbers("t_grid")) {
      grid = *v;
      check_increasing(r, "t_grid", grid);
    }
  } else {
    r.fail("t", "t or t_grid is required");
  }
}

SternGerlachParams read_stern_gerlach(FieldReader& r) {
  SternGerlachParams p;
  read_energy(r, "u_mean", p.u_mean, true);
  read_energy(r, "d_mean", p.d_mean, true);
  read_time_grid(r, p.t_grid);
  read_samples(r, p.samples);
  read_distribution(r, p.distribution);
  return p;
}

EnvironmentParams read_environment(FieldReader& r) {
  EnvironmentParams p;
  p.spectrum_file = r.string("spectrum_file");
  const bool sampled = !p.spectrum_file.has_value();
  read_energy(r, "u_mean", p.u_mean, sampled);
  read_energy(r, "d_mean", p.d_mean, sampled);
  read_time_grid(r, p.t_grid);
  read_samples(r, p.samples);
  read_distribution(r, p.distribution);
  return p;
}

VisibilityParams read_visibility(FieldReader& r) {
  VisibilityParams p;
  if (auto v = r.numbers("a_grid")) {
    p.a_grid = *v;
    check_increasing(r, "a_grid", p.a_grid);
    if (!p.a_grid.empty() && p.a_grid.front() < 0.0) r.fail("a_grid[0]", "must be >= 0");
  } else if (!r.has("a_grid")) {
    r.fail("a_grid", "is required");
  }
  if (auto v = r.number("t")) {
    if (!(*v > 0.0)) r.fail("t", "must be > 0");
    p.t = *v;
  }
  if (auto v = r.number("u_fraction")) {
    if (*v < 0.0 || *v > 1.0) r.fail("u_fraction", "must lie in [0, 1]");
    p.u_fraction = *v;
  }
  read_samples(r, p.samples);
  read_distribution(r, p.distribution);
  return p;
}

ScalingParams read_scaling(FieldReader& r) {
  ScalingParams p;
  if (auto v = r.count("n_min")) p.n_min = static_cast<std::size_t>(*v);
  if (auto v = r.count("n_max")) p.n_max = static_cast<std::size_t>(*v);
  if (p.n_min < 1) r.fail("n_min", "must be >= 1");
  if (p.n_max < p.n_min) r.fail("n_max", "must be >= n_min");
  if (auto names = r.strings("backends")) {
    p.backends.clear();
    for (std::size_t i = 0; i < names->size(); ++i) {
      try {
        p.backends.push_back(bench::backend_from_string((*names)[i]));
      } catch (const InvalidArgument&) {
        r.fail("backends[" + std::to_string(i) + "]", "must be DenseExpm, SparseStep or ProductExact");
      }
    }
    if (names->empty()) r.fail("backends", "must not be empty");
  }
  for (auto b : p.backends) {
    if (b == bench::Backend::DenseExpm && p.n_max > bench::kMaxDenseSpins)
      r.fail("n_max", "DenseExpm supports at most 12 spins");
    if (b == bench::Backend::SparseStep && p.n_max > bench::kMaxSparseSpins)
      r.fail("n_max", "SparseStep supports at most 24 spins");
  }
  if (auto v = r.numbers("product_sizes")) {
    for (std::size_t i = 0; i < v->size(); ++i) {
      const double n = (*v)[i];
      if (n < 1 || n != std::floor(n)) r.fail("product_sizes[" + std::to_string(i) + "]", "must be a positive integer");
      else p.product_sizes.push_back(static_cast<std::size_t>(n));
    }
  }
  if (auto v = r.number("coupling")) p.coupling = *v;
  if (auto v = r.number("field_scale")) {
    if (*v < 0.0) r.fail("field_scale", "must be >= 0");
    p.field_scale = *v;
  }
  if (auto v = r.number("t")) p.t = *v;
  if (auto v = r.count("repeats")) {
    if (*v < 3) r.fail("repeats", "must be >= 3");
    p.repeats = static_cast<std::size_t>(*v);
  }
  return p;
}

json grid_json(const std::vector<double>& grid) { return json(grid); }

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SternGerlach: return "SternGerlach";
    case ExperimentKind::Environment: return "Environment";
    case ExperimentKind::VisibilityCurve: return "VisibilityCurve";
    case ExperimentKind::Scaling: return "Scaling";
  }
  return "?";
}

std::string_view subcommand_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SternGerlach: return "stern-gerlach";
    case ExperimentKind::Environment: return "environment";
    case ExperimentKind::VisibilityCurve: return "visibility";
    case ExperimentKind::Scaling: return "bench";
  }
  return "?";
}

ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> expected) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed configuration: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("configuration must be a JSON object");

  FieldReader r(doc);
  ExperimentConfig cfg;

  if (auto k = r.string("kind")) {
    bool ok = false;
    cfg.kind = kind_from_string(*k, ok);
    if (!ok) r.fail("kind", "must be SternGerlach, Environment, VisibilityCurve or Scaling");
    else if (expected && *expected != cfg.kind)
      r.fail("kind", "is " + *k + " but the subcommand expects " + std::string(to_string(*expected)));
  } else if (expected) {
    cfg.kind = *expected;
  } else if (!r.has("kind")) {
    r.fail("kind", "is required");
  }

  if (auto s = r.count("seed")) cfg.seed = *s;
  if (auto h = r.number("hbar")) {
    if (!(*h > 0.0)) r.fail("hbar", "must be > 0");
    cfg.hbar = *h;
  }

  switch (cfg.kind) {
    case ExperimentKind::SternGerlach: cfg.params = read_stern_gerlach(r); break;
    case ExperimentKind::Environment: cfg.params = read_environment(r); break;
    case ExperimentKind::VisibilityCurve: cfg.params = read_visibility(r); break;
    case ExperimentKind::Scaling: cfg.params = read_scaling(r); break;
  }
  r.reject_unknown();

  if (!r.violations().empty()) throw ValidationError(std::move(r.violations()));
  return cfg;
}

json ExperimentConfig::to_json() const {
  json j;
  j["kind"] = std::string(to_string(kind));
  j["seed"] = seed;
  j["hbar"] = hbar;
  std::visit(
      [&j](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SternGerlachParams>) {
          j["u_mean"] = p.u_mean;
          j["d_mean"] = p.d_mean;
          j["t_grid"] = grid_json(p.t_grid);
          j["samples"] = p.samples;
          j["distribution"] = std::string(sg::to_string(p.distribution));
        } else if constexpr (std::is_same_v<P, EnvironmentParams>) {
          j["u_mean"] = p.u_mean;
          j["d_mean"] = p.d_mean;
          j["t_grid"] = grid_json(p.t_grid);
          j["samples"] = p.samples;
          j["distribution"] = std::string(sg::to_string(p.distribution));
          if (p.spectrum_file) j["spectrum_file"] = *p.spectrum_file;
        } else if constexpr (std::is_same_v<P, VisibilityParams>) {
          j["a_grid"] = grid_json(p.a_grid);
          j["t"] = p.t;
          j["u_fraction"] = p.u_fraction;
          j["samples"] = p.samples;
          j["distribution"] = std::string(sg::to_string(p.distribution));
        } else {
          j["n_min"] = p.n_min;
          j["n_max"] = p.n_max;
          json names = json::array();
          for (auto b : p.backends) names.push_back(std::string(bench::to_string(b)));
          j["backends"] = names;
          j["product_sizes"] = p.product_sizes;
          j["coupling"] = p.coupling;
          j["field_scale"] = p.field_scale;
          j["t"] = p.t;
          j["repeats"] = p.repeats;
        }
      },
      params);
  return j;
}

}  // namespace collapse::cli
