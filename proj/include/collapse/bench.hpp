#pragma once

// Many-body cost benchmark. An interacting transverse-field Ising chain
//
//   H = J sum_i Z_i Z_{i+1} + sum_i h_i X_i      (open boundary)
//
// needs the full 2^N amplitude vector, while the non-interacting chain (J = 0)
// factorizes into N independent two-level problems.

#include <Eigen/Sparse>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "collapse/qcore.hpp"

namespace collapse::bench {

using BigInt = boost::multiprecision::cpp_int;
using SparseOperator = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;
using SpinState = Eigen::Vector2cd;
using ProductState = std::vector<SpinState>;

inline constexpr std::size_t kMaxSparseSpins = 24;
inline constexpr std::size_t kMaxDenseSpins = 12;

enum class Backend { DenseExpm, SparseStep, ProductExact };
enum class Boundary { Open };

std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view name);

struct HilbertDim {
  BigInt dim;
  BigInt param_count;
};

/// (2^N, 2^N - 1), exact for any N >= 1.
HilbertDim hilbert_dim(std::size_t n_spins);

struct SpinChainSpec {
  std::size_t n_spins = 1;
  double coupling = 0.0;
  std::vector<double> fields;
  std::uint64_t seed = 0;
  Boundary boundary = Boundary::Open;

  /// Fields drawn from Uniform[-scale, scale] on the counter stream of `seed`.
  static SpinChainSpec with_random_fields(std::size_t n_spins, double coupling, std::uint64_t seed,
                                          double scale = 1.0);

  /// Structural checks only; size caps are enforced per backend.
  void validate() const;
};

/// Sparse Hamiltonian on 2^N states; spin 0 is the most significant bit and
/// bit value 0 is spin up (Z = +1). Throws TooLarge above 24 spins.
SparseOperator build_hamiltonian(const SpinChainSpec& spec);

struct ScalingRecord {
  std::size_t n_spins = 0;
  BigInt dim;
  BigInt param_count;
  Backend backend = Backend::SparseStep;
  /// Operator rows applied: matrix-vector products times rows per product.
  std::uint64_t matvec_count = 0;
  double wall_time_s = 0.0;
  std::uint64_t peak_state_bytes = 0;
};

struct EvolveOptions {
  /// Fixed integrator step; chosen from the drift budget when empty.
  std::optional<double> step;
  /// Maximum allowed |norm(out) - norm(in)| for SparseStep.
  double drift_tolerance = 1e-9;
};

struct EvolveResult {
  State state;
  ScalingRecord record;
};

struct ProductResult {
  ProductState state;
  ScalingRecord record;
};

/// Upper bound on the spectral radius: |J| (N-1) + sum |h_i|.
double spectral_bound(const SpinChainSpec& spec);

/// Fourth-order step size whose accumulated norm drift over |t| stays within
/// `drift_tolerance`.
double sparse_step_size(const SpinChainSpec& spec, double t, double drift_tolerance);

/// Exact propagation of `initial` by exp(-i H t).
/// DenseExpm: eigendecomposition, N <= 12. SparseStep: classical RK4, N <= 24.
EvolveResult evolve_exact(const SpinChainSpec& spec, double t, const State& initial, Backend backend,
                          EvolveOptions options = {});

/// Independent single-spin propagation; requires J = 0. Cost is linear in N.
ProductResult evolve_product(const SpinChainSpec& spec, double t, const ProductState& initial);

/// Kronecker expansion of a product state (spin 0 leftmost).
State expand_product(const ProductState& state);

struct ScalingRequest {
  std::size_t n_min = 4;
  std::size_t n_max = 10;
  std::vector<Backend> backends{Backend::SparseStep};
  /// Chain lengths for ProductExact; defaults to powers of two up to 2^14.
  std::vector<std::size_t> product_sizes;
  double coupling = 1.0;
  double field_scale = 1.0;
  double t = 0.1;
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
};

struct ScalingSummary {
  /// Every timed run (warm-up runs are not recorded).
  std::vector<ScalingRecord> records;
  /// One row per (N, backend) carrying the median wall time.
  std::vector<ScalingRecord> medians;
  /// Least-squares slope of log2(median time) against N per interacting backend.
  std::map<Backend, double> exponential_slopes;
  /// Least-squares slope of log2(median time) against log2(N) for ProductExact.
  std::optional<double> product_degree;
};

ScalingSummary run_scaling(const ScalingRequest& request);

/// Ordinary least-squares slope of y on x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace collapse::bench
