#include "collapse/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "collapse/rng.hpp"
#include "collapse/summation.hpp"

namespace collapse::env {

namespace {

void check_dense_cap(std::size_t k) {
  if (k > kMaxDenseConfigurations)
    throw TooLarge("dense joint evolution supports at most " + std::to_string(kMaxDenseConfigurations) +
                   " detector configurations, got " + std::to_string(k));
}

}  // namespace

void DetectorSpectrum::validate() const {
  if (weights.empty()) throw BadSpectrum("spectrum needs at least one configuration");
  if (u_energies.size() != weights.size() || d_energies.size() != weights.size())
    throw BadSpectrum("spectrum lists have different lengths");
  if (weights.size() > kMaxClosedFormConfigurations)
    throw BadSpectrum("spectrum exceeds " + std::to_string(kMaxClosedFormConfigurations) + " configurations");
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!std::isfinite(u_energies[k]) || !std::isfinite(d_energies[k]))
      throw BadSpectrum("non-finite energy at configuration " + std::to_string(k));
    if (!std::isfinite(weights[k]) || weights[k] < 0.0)
      throw BadSpectrum("negative or non-finite weight at configuration " + std::to_string(k));
  }
  const double total = pairwise_sum(std::span<const double>(weights));
  if (std::abs(total - 1.0) > 1e-12) throw BadSpectrum("weights do not sum to 1");
}

DetectorSpectrum DetectorSpectrum::uniform(std::vector<double> u, std::vector<double> d) {
  const std::size_t k = u.size();
  DetectorSpectrum s{std::move(u), std::move(d), std::vector<double>(k, k ? 1.0 / static_cast<double>(k) : 0.0)};
  return s;
}

DetectorSpectrum spectrum_from_noise(const sg::NoiseSpec& spec, std::size_t samples) {
  spec.validate();
  std::vector<double> u(samples), d(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto s = sg::sample_noise(spec, i);
    u[i] = spec.u_mean + s.delta_u;
    d[i] = spec.d_mean + s.delta_d;
  }
  return DetectorSpectrum::uniform(std::move(u), std::move(d));
}

Density build_joint(const State& particle, const DetectorSpectrum& spectrum) {
  spectrum.validate();
  if (particle.size() != 2) throw DimensionMismatch("build_joint: particle must be two-dimensional");
  check_dense_cap(spectrum.size());
  const auto k = static_cast<Index>(spectrum.size());
  ComplexMatrix<double> detector = ComplexMatrix<double>::Zero(k, k);
  for (Index i = 0; i < k; ++i) detector(i, i) = spectrum.weights[static_cast<std::size_t>(i)];
  return tensor_product(Density::pure(particle), Density(std::move(detector)));
}

Density evolve_joint(const Density& rho, const DetectorSpectrum& spectrum, double t) {
  spectrum.validate();
  const auto k = static_cast<Index>(spectrum.size());
  if (rho.dims() != Dims{2, k}) throw DimensionMismatch("evolve_joint: density matrix dims must be [2, K]");
  ComplexVector<double> phases(2 * k);
  for (Index i = 0; i < k; ++i) {
    phases(i) = std::polar(1.0, -spectrum.u_energies[static_cast<std::size_t>(i)] * t);
    phases(k + i) = std::polar(1.0, -spectrum.d_energies[static_cast<std::size_t>(i)] * t);
  }
  ComplexMatrix<double> out = rho.entries().cwiseProduct(phases * phases.adjoint());
  return Density(std::move(out), rho.dims());
}

Density reduce_to_particle(const Density& joint) { return partial_trace(joint, 0); }

double exact_probability(const DetectorSpectrum& spectrum, double t) {
  spectrum.validate();
  std::vector<double> terms(spectrum.size());
  for (std::size_t k = 0; k < terms.size(); ++k)
    terms[k] = spectrum.weights[k] * (0.5 + 0.5 * std::cos((spectrum.u_energies[k] - spectrum.d_energies[k]) * t));
  return pairwise_sum(std::span<const double>(terms));
}

double exact_probability_dense(const DetectorSpectrum& spectrum, double t) {
  const State xplus = sg::initial_state_xplus();
  const Density reduced = reduce_to_particle(evolve_joint(build_joint(xplus, spectrum), spectrum, t));
  return (xplus.amplitudes().adjoint() * reduced.entries() * xplus.amplitudes())(0, 0).real();
}

double coherence(const Density& particle) {
  if (particle.size() != 2) throw DimensionMismatch("coherence: expected a 2x2 density matrix");
  return std::abs(particle(0, 1));
}

double coherence_closed_form(const DetectorSpectrum& spectrum, double t) {
  spectrum.validate();
  std::vector<double> re(spectrum.size()), im(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double phase = (spectrum.u_energies[k] - spectrum.d_energies[k]) * t;
    re[k] = spectrum.weights[k] * std::cos(phase);
    im[k] = -spectrum.weights[k] * std::sin(phase);
  }
  return 0.5 * std::hypot(pairwise_sum(std::span<const double>(re)), pairwise_sum(std::span<const double>(im)));
}

sg::Estimate mc_configuration_probability(const DetectorSpectrum& spectrum, double t, std::size_t samples,
                                          std::uint64_t seed) {
  spectrum.validate();
  if (samples < 1) throw InvalidArgument("sample count must be >= 1");
  std::vector<double> cdf(spectrum.size());
  double running = 0.0;
  for (std::size_t k = 0; k < cdf.size(); ++k) cdf[k] = (running += spectrum.weights[k]);
  std::vector<double> probs(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    CounterRng rng(seed, i);
    const double u = rng.uniform() * running;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    probs[i] = 0.5 + 0.5 * std::cos((spectrum.u_energies[k] - spectrum.d_energies[k]) * t);
  }
  return sg::estimate_from_probabilities(probs, seed);
}

double equivalence_check(const sg::NoiseSpec& spec, double t, std::size_t samples, sg::McOptions options) {
  const auto estimate = sg::mc_expected_probability(spec, t, samples, options);
  const auto spectrum = spectrum_from_noise(spec, samples);
  return std::abs(exact_probability(spectrum, t) - estimate.mean);
}

}  // namespace collapse::env
