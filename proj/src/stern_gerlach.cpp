#include "collapse/stern_gerlach.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "collapse/rng.hpp"
#include "collapse/summation.hpp"

namespace collapse::sg {

namespace {

unsigned resolve_threads(unsigned requested, std::size_t work) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (work < 4096) n = 1;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

// Fills out[i] = f(i) for i in [0, out.size()), split over contiguous chunks.
template <typename F>
void parallel_fill(std::vector<double>& out, unsigned threads, F f) {
  const std::size_t n = out.size();
  const unsigned workers = resolve_threads(threads, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&out, &f, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = f(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::string_view to_string(NoiseDistribution d) {
  switch (d) {
    case NoiseDistribution::UniformSymmetric: return "UniformSymmetric";
    case NoiseDistribution::GaussianSigmaEqualsMean: return "GaussianSigmaEqualsMean";
    case NoiseDistribution::None: return "None";
  }
  return "?";
}

NoiseDistribution distribution_from_string(std::string_view name) {
  if (name == "UniformSymmetric") return NoiseDistribution::UniformSymmetric;
  if (name == "GaussianSigmaEqualsMean") return NoiseDistribution::GaussianSigmaEqualsMean;
  if (name == "None") return NoiseDistribution::None;
  throw UnsupportedDistribution("unknown noise distribution '" + std::string(name) + "'");
}

std::string_view to_string(AveragingVariant v) {
  switch (v) {
    case AveragingVariant::UniformPhase: return "UniformPhase";
    case AveragingVariant::ExactConvolution: return "ExactConvolution";
  }
  return "?";
}

void NoiseSpec::validate() const {
  if (!std::isfinite(u_mean) || u_mean < 0.0) throw InvalidArgument("u_mean must be finite and >= 0");
  if (!std::isfinite(d_mean) || d_mean < 0.0) throw InvalidArgument("d_mean must be finite and >= 0");
}

double sinc(double x) noexcept {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

State spin_up() { return State::basis(2, 0); }
State spin_down() { return State::basis(2, 1); }

State initial_state_xplus() {
  const double a = 1.0 / std::numbers::sqrt2;
  State::Vector v(2);
  v << a, a;
  return State(std::move(v));
}

NoiseSample sample_noise(const NoiseSpec& spec, std::uint64_t substream) {
  CounterRng rng(spec.seed, substream);
  switch (spec.distribution) {
    case NoiseDistribution::UniformSymmetric: {
      const double du = rng.uniform(-spec.u_mean, spec.u_mean);
      const double dd = rng.uniform(-spec.d_mean, spec.d_mean);
      return {du, dd};
    }
    case NoiseDistribution::GaussianSigmaEqualsMean: {
      const double du = spec.u_mean * rng.normal();
      const double dd = spec.d_mean * rng.normal();
      return {du, dd};
    }
    case NoiseDistribution::None:
      return {};
  }
  throw UnsupportedDistribution("sample_noise: unknown distribution");
}

State evolve_sample(const State& initial, const NoiseSpec& spec, const NoiseSample& sample, double t) {
  if (initial.size() != 2) throw DimensionMismatch("evolve_sample: particle state must be two-dimensional");
  const std::array<double, 2> energies{spec.u_mean + sample.delta_u, spec.d_mean + sample.delta_d};
  return evolve_diagonal(std::span<const double>(energies), t, initial);
}

double transition_probability(const State& a, const State& b) {
  if (a.dims() != b.dims()) throw DimensionMismatch("transition_probability: dimensions differ");
  return std::norm(inner_product(a, b));
}

double spin_x_plus_probability(const State& s) { return transition_probability(initial_state_xplus(), s); }

Estimate estimate_from_probabilities(std::span<const double> probabilities, std::uint64_t seed) {
  const auto stats = mean_and_error(probabilities);
  return {std::clamp(stats.mean, 0.0, 1.0), stats.standard_error, probabilities.size(), seed};
}

Estimate estimate_from_samples(const State& initial, const State& target, const NoiseSpec& spec,
                               std::span<const NoiseSample> samples, double t) {
  std::vector<double> probs;
  probs.reserve(samples.size());
  for (const auto& s : samples) probs.push_back(transition_probability(target, evolve_sample(initial, spec, s, t)));
  return estimate_from_probabilities(probs, spec.seed);
}

std::vector<double> sampled_probabilities(const NoiseSpec& spec, double t, std::size_t samples,
                                          McOptions options) {
  spec.validate();
  if (samples < 1) throw InvalidArgument("sample count must be >= 1");
  const State initial = initial_state_xplus();
  std::vector<double> probs(samples);
  parallel_fill(probs, options.threads, [&](std::size_t i) {
    const auto sample = sample_noise(spec, i);
    return transition_probability(initial, evolve_sample(initial, spec, sample, t));
  });
  return probs;
}

TransitionEstimate mc_expected_probability(const NoiseSpec& spec, double t, std::size_t samples,
                                           McOptions options) {
  const auto probs = sampled_probabilities(spec, t, samples, options);
  return estimate_from_probabilities(probs, spec.seed);
}

Estimate mc_mean_cos(const NoiseSpec& spec, double t, std::size_t samples, McOptions options) {
  spec.validate();
  if (samples < 1) throw InvalidArgument("sample count must be >= 1");
  std::vector<double> values(samples);
  parallel_fill(values, options.threads, [&](std::size_t i) { return std::cos(sample_noise(spec, i).zeta(t)); });
  const auto stats = mean_and_error(std::span<const double>(values));
  return {stats.mean, stats.standard_error, samples, spec.seed};
}

double mean_cos_uniform_phase(const NoiseSpec& spec, double t) {
  spec.validate();
  return sinc((spec.u_mean + spec.d_mean) * t);
}

double mean_cos_exact(const NoiseSpec& spec, double t) {
  spec.validate();
  switch (spec.distribution) {
    case NoiseDistribution::UniformSymmetric:
      return sinc(spec.u_mean * t) * sinc(spec.d_mean * t);
    case NoiseDistribution::GaussianSigmaEqualsMean:
      return std::exp(-(spec.u_mean * spec.u_mean + spec.d_mean * spec.d_mean) * t * t / 2.0);
    case NoiseDistribution::None:
      return 1.0;
  }
  throw UnsupportedDistribution("mean_cos_exact: unknown distribution");
}

double mean_cos(const NoiseSpec& spec, double t, AveragingVariant variant) {
  return variant == AveragingVariant::UniformPhase ? mean_cos_uniform_phase(spec, t) : mean_cos_exact(spec, t);
}

double expected_probability_analytic(const NoiseSpec& spec, double t, AveragingVariant variant) {
  const double m = mean_cos(spec, t, variant);
  return 0.5 + 0.5 * std::cos((spec.u_mean - spec.d_mean) * t) * m;
}

std::vector<double> eigenstate_probabilities(const NoiseSpec& spec, double t, std::size_t samples) {
  spec.validate();
  if (samples < 1) throw InvalidArgument("sample count must be >= 1");
  const State up = spin_up();
  std::vector<double> probs(samples);
  for (std::size_t i = 0; i < samples; ++i)
    probs[i] = transition_probability(up, evolve_sample(up, spec, sample_noise(spec, i), t));
  return probs;
}

TransitionEstimate eigenstate_run(const NoiseSpec& spec, double t, std::size_t samples) {
  return estimate_from_probabilities(eigenstate_probabilities(spec, t, samples), spec.seed);
}

}  // namespace collapse::sg
