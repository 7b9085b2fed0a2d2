#pragma once

// Exact finite-environment model: the particle couples to a detector whose
// orthonormal configurations |e_k> carry interaction energy u_k on the up
// branch and d_k on the down branch,
//
//   H = |up><up| (x) sum_k u_k |e_k><e_k| + |down><down| (x) sum_k d_k |e_k><e_k|.
//
// Tracing out the detector reproduces the random-phase average of the
// stochastic model when the configurations are the sampled energies.

#include <cstddef>
#include <vector>

#include "collapse/qcore.hpp"
#include "collapse/stern_gerlach.hpp"

namespace collapse::env {

/// Largest K accepted by the closed-form path.
inline constexpr std::size_t kMaxClosedFormConfigurations = 100'000;
/// Largest K accepted by the dense 2K x 2K joint path.
inline constexpr std::size_t kMaxDenseConfigurations = 64;

struct DetectorSpectrum {
  std::vector<double> u_energies;
  std::vector<double> d_energies;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }

  /// Throws BadSpectrum unless lengths agree, K >= 1, weights are
  /// non-negative and sum to 1 within 1e-12.
  void validate() const;

  /// Equal weights 1/K.
  static DetectorSpectrum uniform(std::vector<double> u, std::vector<double> d);
};

/// u_k = u_mean + delta_u_k, d_k = d_mean + delta_d_k for substreams 0..M-1.
DetectorSpectrum spectrum_from_noise(const sg::NoiseSpec& spec, std::size_t samples);

/// |particle><particle| (x) sum_k w_k |e_k><e_k|, dims [2, K].
Density build_joint(const State& particle, const DetectorSpectrum& spectrum);

/// U rho U^dagger with U = diag(e^{-i u_k t}, e^{-i d_k t}).
Density evolve_joint(const Density& rho, const DetectorSpectrum& spectrum, double t);

/// Particle state with the detector traced out.
Density reduce_to_particle(const Density& joint);

/// sum_k w_k [1/2 + 1/2 cos((u_k - d_k) t)] for an |x+> particle.
double exact_probability(const DetectorSpectrum& spectrum, double t);

/// <x+| Tr_detector(U rho U^dagger) |x+> through the dense joint matrix.
double exact_probability_dense(const DetectorSpectrum& spectrum, double t);

/// |rho_01| of a 2x2 particle density matrix.
double coherence(const Density& particle);

/// 1/2 |sum_k w_k e^{-i (u_k - d_k) t}|
double coherence_closed_form(const DetectorSpectrum& spectrum, double t);

/// Monte-Carlo estimate of exact_probability: configuration k is drawn with
/// probability w_k on substream i of `seed`.
sg::Estimate mc_configuration_probability(const DetectorSpectrum& spectrum, double t, std::size_t samples,
                                          std::uint64_t seed);

/// |exact_probability - Monte-Carlo mean| with the Monte-Carlo samples
/// doubling as K = M equally weighted detector configurations.
double equivalence_check(const sg::NoiseSpec& spec, double t, std::size_t samples, sg::McOptions options = {});

}  // namespace collapse::env
