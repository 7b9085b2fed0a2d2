#pragma once

// Coarse-grained two-branch measurement model. A spin-1/2 particle picks up
// the phase (u_mean + delta_u) t on the up branch and (d_mean + delta_d) t on
// the down branch, where the deltas are random deviations of the interaction
// energies. Interference is read off the probability of returning to |x+>.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "collapse/qcore.hpp"

namespace collapse::sg {

enum class NoiseDistribution {
  UniformSymmetric,         // delta ~ Uniform[-mean, +mean]
  GaussianSigmaEqualsMean,  // delta ~ Normal(0, mean^2)
  None,                     // delta = 0
};

enum class AveragingVariant {
  UniformPhase,      // treats zeta as uniform on [-(u+d)t, +(u+d)t]
  ExactConvolution,  // exact expectation for independent deviations
};

std::string_view to_string(NoiseDistribution d);
NoiseDistribution distribution_from_string(std::string_view name);
std::string_view to_string(AveragingVariant v);

struct NoiseSpec {
  double u_mean = 0.0;
  double d_mean = 0.0;
  NoiseDistribution distribution = NoiseDistribution::UniformSymmetric;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument for negative or non-finite means.
  void validate() const;
};

struct NoiseSample {
  double delta_u = 0.0;
  double delta_d = 0.0;

  double zeta(double t) const noexcept { return (delta_u - delta_d) * t; }
};

/// Monte-Carlo estimate of an expectation value.
struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};
using TransitionEstimate = Estimate;

struct McOptions {
  /// Worker threads; 0 picks hardware concurrency. Results do not depend on it.
  unsigned threads = 1;
};

/// sin(x)/x with sinc(0) = 1.
double sinc(double x) noexcept;

State spin_up();
State spin_down();
/// (|up> + |down>)/sqrt(2)
State initial_state_xplus();

/// Deterministic in (spec.seed, substream).
NoiseSample sample_noise(const NoiseSpec& spec, std::uint64_t substream);

State evolve_sample(const State& initial, const NoiseSpec& spec, const NoiseSample& sample, double t);

/// |<a|b>|^2
double transition_probability(const State& a, const State& b);

/// Probability that a S_x measurement on `s` yields +1/2.
double spin_x_plus_probability(const State& s);

/// Aggregates per-sample probabilities; the mean is clamped to [0, 1].
Estimate estimate_from_probabilities(std::span<const double> probabilities, std::uint64_t seed);

/// Evolves `initial` under every sample and averages |<target|psi>|^2.
/// Probabilities are averaged, never amplitudes.
Estimate estimate_from_samples(const State& initial, const State& target, const NoiseSpec& spec,
                               std::span<const NoiseSample> samples, double t);

/// Per-sample probabilities |<x+|psi_i(t)>|^2 for substreams 0..M-1.
std::vector<double> sampled_probabilities(const NoiseSpec& spec, double t, std::size_t samples,
                                          McOptions options = {});

TransitionEstimate mc_expected_probability(const NoiseSpec& spec, double t, std::size_t samples,
                                           McOptions options = {});

/// Monte-Carlo estimate of E[cos zeta] from the same substreams.
Estimate mc_mean_cos(const NoiseSpec& spec, double t, std::size_t samples, McOptions options = {});

/// sin(a)/a with a = (u_mean + d_mean) t.
double mean_cos_uniform_phase(const NoiseSpec& spec, double t);

/// E[cos zeta] for the configured distribution.
double mean_cos_exact(const NoiseSpec& spec, double t);

double mean_cos(const NoiseSpec& spec, double t, AveragingVariant variant);

/// 1/2 + 1/2 cos((u_mean - d_mean) t) * E[cos zeta]
double expected_probability_analytic(const NoiseSpec& spec, double t, AveragingVariant variant);

/// Per-sample |<up|psi_i(t)>|^2 for |up> evolved under each sample.
std::vector<double> eigenstate_probabilities(const NoiseSpec& spec, double t, std::size_t samples);

TransitionEstimate eigenstate_run(const NoiseSpec& spec, double t, std::size_t samples);

}  // namespace collapse::sg
