#include "collapse/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "collapse/csv.hpp"
#include "collapse/errors.hpp"

namespace collapse::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kEnergyUnit = "energy, hbar = 1 (angular frequency)";
const char* kTimeUnit = "time (same units as 1/energy when hbar = 1)";
const char* kProbability = "probability, dimensionless";

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json column_units(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SternGerlach:
      return {{"u_mean", kEnergyUnit},       {"d_mean", kEnergyUnit},       {"t", kTimeUnit},
              {"samples", "count"},          {"mc_mean", kProbability},     {"mc_stderr", kProbability},
              {"analytic_paper", kProbability}, {"analytic_exact", kProbability}};
    case ExperimentKind::VisibilityCurve:
      return {{"a", "phase spread (u_mean + d_mean) t / hbar, radians"},
              {"u_mean", kEnergyUnit},
              {"d_mean", kEnergyUnit},
              {"t", kTimeUnit},
              {"mean_cos_paper", "dimensionless"},
              {"mean_cos_exact", "dimensionless"},
              {"mc_mean", "dimensionless (Monte-Carlo mean of cos zeta)"},
              {"mc_stderr", "dimensionless"}};
    case ExperimentKind::Environment:
      return {{"K", "count (detector configurations)"},
              {"t", kTimeUnit},
              {"exact_prob", kProbability},
              {"mc_prob", kProbability},
              {"abs_deviation", kProbability},
              {"coherence", "dimensionless |rho_01|"}};
    case ExperimentKind::Scaling:
      return {{"n_spins", "count"},
              {"dim", "count (2^N)"},
              {"param_count", "count (2^N - 1)"},
              {"backend", "name"},
              {"matvec_count", "operator rows applied"},
              {"wall_time_s", "seconds (median of repeats, not deterministic)"},
              {"peak_state_bytes", "bytes"}};
  }
  return json::object();
}

sg::NoiseSpec noise_spec(double u, double d, sg::NoiseDistribution dist, std::uint64_t seed) {
  sg::NoiseSpec spec;
  spec.u_mean = u;
  spec.d_mean = d;
  spec.distribution = dist;
  spec.seed = seed;
  return spec;
}

json run_stern_gerlach(const ExperimentConfig& cfg, const SternGerlachParams& p, const fs::path& csv,
                       const sg::McOptions& mc) {
  CsvWriter out(csv, csv_header(cfg.kind));
  const auto spec = noise_spec(p.u_mean, p.d_mean, p.distribution, cfg.seed);
  for (double t : p.t_grid) {
    const double phase_t = t / cfg.hbar;
    const auto est = sg::mc_expected_probability(spec, phase_t, p.samples, mc);
    out.row({format_number(p.u_mean), format_number(p.d_mean), format_number(t),
             format_number(static_cast<std::uint64_t>(p.samples)), format_number(est.mean),
             format_number(est.standard_error),
             format_number(sg::expected_probability_analytic(spec, phase_t, sg::AveragingVariant::UniformPhase)),
             format_number(sg::expected_probability_analytic(spec, phase_t, sg::AveragingVariant::ExactConvolution))});
  }
  out.close();
  return json::object();
}

json run_visibility(const ExperimentConfig& cfg, const VisibilityParams& p, const fs::path& csv,
                    const sg::McOptions& mc) {
  CsvWriter out(csv, csv_header(cfg.kind));
  const double phase_t = p.t / cfg.hbar;
  for (double a : p.a_grid) {
    const double u = p.u_fraction * a / phase_t;
    const double d = (1.0 - p.u_fraction) * a / phase_t;
    const auto spec = noise_spec(u, d, p.distribution, cfg.seed);
    const auto est = sg::mc_mean_cos(spec, phase_t, p.samples, mc);
    out.row({format_number(a), format_number(u), format_number(d), format_number(p.t),
             format_number(sg::mean_cos_uniform_phase(spec, phase_t)), format_number(sg::mean_cos_exact(spec, phase_t)),
             format_number(est.mean), format_number(est.standard_error)});
  }
  out.close();
  return json::object();
}

json run_environment(const ExperimentConfig& cfg, const EnvironmentParams& p, const fs::path& csv,
                     const RunOptions& options, const sg::McOptions& mc) {
  CsvWriter out(csv, csv_header(cfg.kind));
  if (p.spectrum_file) {
    fs::path path = *p.spectrum_file;
    if (path.is_relative()) path = options.base_dir / path;
    const auto spectrum = read_spectrum_csv(path);
    for (double t : p.t_grid) {
      const double phase_t = t / cfg.hbar;
      const double exact = env::exact_probability(spectrum, phase_t);
      const auto est = env::mc_configuration_probability(spectrum, phase_t, p.samples, cfg.seed);
      out.row({format_number(static_cast<std::uint64_t>(spectrum.size())), format_number(t), format_number(exact),
               format_number(est.mean), format_number(std::abs(exact - est.mean)),
               format_number(env::coherence_closed_form(spectrum, phase_t))});
    }
  } else {
    const auto spec = noise_spec(p.u_mean, p.d_mean, p.distribution, cfg.seed);
    const auto spectrum = env::spectrum_from_noise(spec, p.samples);
    for (double t : p.t_grid) {
      const double phase_t = t / cfg.hbar;
      const double exact = env::exact_probability(spectrum, phase_t);
      const auto est = sg::mc_expected_probability(spec, phase_t, p.samples, mc);
      out.row({format_number(static_cast<std::uint64_t>(spectrum.size())), format_number(t), format_number(exact),
               format_number(est.mean), format_number(std::abs(exact - est.mean)),
               format_number(env::coherence_closed_form(spectrum, phase_t))});
    }
  }
  out.close();
  return json::object();
}

json run_bench(const ExperimentConfig& cfg, const ScalingParams& p, const fs::path& csv) {
  bench::ScalingRequest req;
  req.n_min = p.n_min;
  req.n_max = p.n_max;
  req.backends = p.backends;
  req.product_sizes = p.product_sizes;
  req.coupling = p.coupling;
  req.field_scale = p.field_scale;
  req.t = p.t / cfg.hbar;
  req.repeats = p.repeats;
  req.seed = cfg.seed;
  const auto summary = bench::run_scaling(req);

  CsvWriter out(csv, csv_header(cfg.kind));
  for (const auto& r : summary.medians) {
    out.row({format_number(static_cast<std::uint64_t>(r.n_spins)), format_number(r.dim), format_number(r.param_count),
             std::string(bench::to_string(r.backend)), format_number(r.matvec_count), format_number(r.wall_time_s),
             format_number(r.peak_state_bytes)});
  }
  out.close();

  json fits = json::object();
  for (const auto& [backend, slope] : summary.exponential_slopes)
    fits[std::string(bench::to_string(backend)) + "_log2_time_per_spin"] = slope;
  if (summary.product_degree) fits["ProductExact_loglog_degree"] = *summary.product_degree;
  return fits;
}

}  // namespace

const std::vector<std::string>& csv_header(ExperimentKind kind) {
  static const std::vector<std::string> sg_header{"u_mean",  "d_mean",    "t",
                                                  "samples", "mc_mean",   "mc_stderr",
                                                  "analytic_paper", "analytic_exact"};
  static const std::vector<std::string> vis_header{"a",              "u_mean",         "d_mean",  "t",
                                                   "mean_cos_paper", "mean_cos_exact", "mc_mean", "mc_stderr"};
  static const std::vector<std::string> env_header{"K", "t", "exact_prob", "mc_prob", "abs_deviation", "coherence"};
  static const std::vector<std::string> bench_header{"n_spins",      "dim",         "param_count",     "backend",
                                                     "matvec_count", "wall_time_s", "peak_state_bytes"};
  switch (kind) {
    case ExperimentKind::SternGerlach: return sg_header;
    case ExperimentKind::VisibilityCurve: return vis_header;
    case ExperimentKind::Environment: return env_header;
    case ExperimentKind::Scaling: return bench_header;
  }
  return sg_header;
}

std::string csv_file_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SternGerlach: return "stern_gerlach.csv";
    case ExperimentKind::VisibilityCurve: return "visibility.csv";
    case ExperimentKind::Environment: return "environment.csv";
    case ExperimentKind::Scaling: return "scaling.csv";
  }
  return "results.csv";
}

env::DetectorSpectrum read_spectrum_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw BadSpectrum("cannot open spectrum file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw BadSpectrum("spectrum file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "u,d,w") throw BadSpectrum("spectrum file header must be 'u,d,w'");

  env::DetectorSpectrum spectrum;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double values[3];
    int n = 0;
    while (std::getline(ss, cell, ',')) {
      if (n == 3) throw BadSpectrum("too many fields on line " + std::to_string(line_no));
      try {
        std::size_t used = 0;
        values[n] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw BadSpectrum("bad number '" + cell + "' on line " + std::to_string(line_no));
      }
      ++n;
    }
    if (n != 3) throw BadSpectrum("expected 3 fields on line " + std::to_string(line_no));
    spectrum.u_energies.push_back(values[0]);
    spectrum.d_energies.push_back(values[1]);
    spectrum.weights.push_back(values[2]);
  }
  spectrum.validate();
  return spectrum;
}

unsigned threads_from_environment() {
  const char* raw = std::getenv("COLLAPSE_SIM_THREADS");
  if (!raw || !*raw) return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (*end != '\0') throw InvalidArgument("COLLAPSE_SIM_THREADS must be a non-negative integer");
  return static_cast<unsigned>(v);
}

RunOutputs run(const ExperimentConfig& config, const RunOptions& options) {
  fs::create_directories(options.out_dir);
  RunOutputs outputs{options.out_dir / csv_file_name(config.kind), options.out_dir / "manifest.json"};
  const sg::McOptions mc{options.threads};

  json fits = std::visit(
      [&](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SternGerlachParams>) return run_stern_gerlach(config, p, outputs.csv, mc);
        else if constexpr (std::is_same_v<P, VisibilityParams>) return run_visibility(config, p, outputs.csv, mc);
        else if constexpr (std::is_same_v<P, EnvironmentParams>)
          return run_environment(config, p, outputs.csv, options, mc);
        else return run_bench(config, p, outputs.csv);
      },
      config.params);

  json manifest;
  manifest["artifact"] = "collapse_sim";
  manifest["version"] = COLLAPSE_SIM_VERSION;
  manifest["kind"] = std::string(to_string(config.kind));
  manifest["seed"] = config.seed;
  manifest["config"] = config.to_json();
  manifest["results"] = outputs.csv.filename().string();
  manifest["columns"] = column_units(config.kind);
  manifest["created_utc"] = utc_timestamp();
  if (!fits.empty()) manifest["fits"] = fits;

  std::ofstream out(outputs.manifest, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + outputs.manifest.string());
  out << manifest.dump(2) << '\n';
  if (!out) throw Error("manifest write failed");
  return outputs;
}

}  // namespace collapse::cli
