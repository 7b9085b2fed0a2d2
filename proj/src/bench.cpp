#include "collapse/bench.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <string>

#include "collapse/rng.hpp"

namespace collapse::bench {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t flip_mask(std::size_t n_spins, std::size_t site) { return std::uint64_t{1} << (n_spins - 1 - site); }

void require_spins(const SpinChainSpec& spec, std::size_t cap, const char* what) {
  if (spec.n_spins > cap)
    throw TooLarge(std::string(what) + " supports at most " + std::to_string(cap) + " spins, got " +
                   std::to_string(spec.n_spins));
}

// Diagonal of J sum Z_i Z_{i+1}: each anti-aligned neighbour pair is a
// domain wall and contributes -J instead of +J.
Eigen::VectorXd ising_diagonal(const SpinChainSpec& spec) {
  const std::size_t n = spec.n_spins;
  const Index dim = Index{1} << n;
  Eigen::VectorXd diag(dim);
  const std::uint64_t bond_mask = n > 1 ? (std::uint64_t{1} << (n - 1)) - 1 : 0;
  for (Index s = 0; s < dim; ++s) {
    const auto u = static_cast<std::uint64_t>(s);
    const int walls = std::popcount((u ^ (u >> 1)) & bond_mask);
    diag(s) = spec.coupling * (static_cast<double>(n - 1) - 2.0 * walls);
  }
  return diag;
}

// out = -i H psi without materializing H.
class IsingGenerator {
 public:
  explicit IsingGenerator(const SpinChainSpec& spec) : spec_(spec), diagonal_(ising_diagonal(spec)) {}

  void apply(const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) const {
    const Index dim = psi.size();
    out = diagonal_.cast<std::complex<double>>().cwiseProduct(psi);
    for (std::size_t i = 0; i < spec_.n_spins; ++i) {
      const double h = spec_.fields[i];
      if (h == 0.0) continue;
      const auto mask = static_cast<Index>(flip_mask(spec_.n_spins, i));
      for (Index s = 0; s < dim; ++s) out(s) += h * psi(s ^ mask);
    }
    out *= std::complex<double>(0.0, -1.0);
  }

 private:
  const SpinChainSpec& spec_;
  Eigen::VectorXd diagonal_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ScalingRecord make_record(std::size_t n, Backend backend) {
  ScalingRecord r;
  r.n_spins = n;
  auto hd = hilbert_dim(n);
  r.dim = std::move(hd.dim);
  r.param_count = std::move(hd.param_count);
  r.backend = backend;
  return r;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::DenseExpm: return "DenseExpm";
    case Backend::SparseStep: return "SparseStep";
    case Backend::ProductExact: return "ProductExact";
  }
  return "?";
}

Backend backend_from_string(std::string_view name) {
  if (name == "DenseExpm") return Backend::DenseExpm;
  if (name == "SparseStep") return Backend::SparseStep;
  if (name == "ProductExact") return Backend::ProductExact;
  throw InvalidArgument("unknown backend '" + std::string(name) + "'");
}

HilbertDim hilbert_dim(std::size_t n_spins) {
  if (n_spins < 1) throw InvalidArgument("hilbert_dim: need at least one spin");
  BigInt dim = BigInt(1) << n_spins;
  BigInt params = dim - 1;
  return {std::move(dim), std::move(params)};
}

SpinChainSpec SpinChainSpec::with_random_fields(std::size_t n_spins, double coupling, std::uint64_t seed,
                                                double scale) {
  CounterRng rng(seed, 0);
  SpinChainSpec spec;
  spec.n_spins = n_spins;
  spec.coupling = coupling;
  spec.seed = seed;
  spec.fields.resize(n_spins);
  for (auto& h : spec.fields) h = rng.uniform(-scale, scale);
  return spec;
}

void SpinChainSpec::validate() const {
  if (n_spins < 1) throw InvalidArgument("spin chain needs at least one spin");
  if (fields.size() != n_spins) throw DimensionMismatch("spin chain needs one field per spin");
  if (!std::isfinite(coupling)) throw InvalidArgument("coupling must be finite");
  for (double h : fields)
    if (!std::isfinite(h)) throw InvalidArgument("fields must be finite");
}

SparseOperator build_hamiltonian(const SpinChainSpec& spec) {
  spec.validate();
  require_spins(spec, kMaxSparseSpins, "build_hamiltonian");
  const std::size_t n = spec.n_spins;
  const Index dim = Index{1} << n;
  const Eigen::VectorXd diag = ising_diagonal(spec);

  SparseOperator h(dim, dim);
  h.reserve(Eigen::VectorXi::Constant(dim, static_cast<int>(n + 1)));
  std::vector<std::pair<Index, double>> row;
  row.reserve(n + 1);
  for (Index s = 0; s < dim; ++s) {
    row.clear();
    if (diag(s) != 0.0) row.emplace_back(s, diag(s));
    for (std::size_t i = 0; i < n; ++i) {
      if (spec.fields[i] != 0.0) row.emplace_back(s ^ static_cast<Index>(flip_mask(n, i)), spec.fields[i]);
    }
    std::sort(row.begin(), row.end());
    for (const auto& [col, value] : row) h.insert(s, col) = value;
  }
  h.makeCompressed();
  return h;
}

double spectral_bound(const SpinChainSpec& spec) {
  double b = std::abs(spec.coupling) * static_cast<double>(spec.n_spins > 0 ? spec.n_spins - 1 : 0);
  for (double f : spec.fields) b += std::abs(f);
  return b;
}

double sparse_step_size(const SpinChainSpec& spec, double t, double drift_tolerance) {
  const double bound = spectral_bound(spec);
  if (bound == 0.0 || t == 0.0) return std::abs(t);
  // RK4 damps an eigenmode with x = lambda dt by |R(ix)| = 1 - x^6/144 + O(x^8)
  // per step, so steps * x^6 / 144 <= tol with steps = |t| bound / x.
  const double x = std::min(0.5, std::pow(144.0 * drift_tolerance / (std::abs(t) * bound), 0.2));
  return x / bound;
}

EvolveResult evolve_exact(const SpinChainSpec& spec, double t, const State& initial, Backend backend,
                          EvolveOptions options) {
  spec.validate();
  if (initial.size() != (Index{1} << std::min<std::size_t>(spec.n_spins, 62)))
    throw DimensionMismatch("evolve_exact: initial state must have 2^N amplitudes");

  ScalingRecord record = make_record(spec.n_spins, backend);
  const auto dim = static_cast<std::uint64_t>(initial.size());
  record.peak_state_bytes = 16 * dim;

  if (backend == Backend::DenseExpm) {
    require_spins(spec, kMaxDenseSpins, "DenseExpm");
    const auto start = Clock::now();
    const Eigen::MatrixXcd h = Eigen::MatrixXcd(build_hamiltonian(spec));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    const Eigen::VectorXcd phases =
        (solver.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0.0, -t)).array().exp().matrix();
    Eigen::VectorXcd out = solver.eigenvectors() * phases.cwiseProduct(solver.eigenvectors().adjoint() * initial.amplitudes());
    record.wall_time_s = seconds_since(start);
    record.matvec_count = 2 * dim;
    return {State(std::move(out), initial.dims()), std::move(record)};
  }

  if (backend != Backend::SparseStep) throw InvalidArgument("evolve_exact: backend must be DenseExpm or SparseStep");
  require_spins(spec, kMaxSparseSpins, "SparseStep");

  const auto start = Clock::now();
  const double step = options.step ? *options.step : sparse_step_size(spec, t, options.drift_tolerance);
  if (!(step > 0.0) && t != 0.0) throw InvalidArgument("evolve_exact: step must be positive");
  const std::uint64_t steps = t == 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(std::abs(t) / step - 1e-12));
  const double dt = steps ? t / static_cast<double>(steps) : 0.0;

  const IsingGenerator gen(spec);
  Eigen::VectorXcd psi = initial.amplitudes();
  Eigen::VectorXcd k(psi.size()), stage(psi.size()), acc(psi.size());
  for (std::uint64_t n = 0; n < steps; ++n) {
    gen.apply(psi, k);
    acc = k;
    stage = psi + (0.5 * dt) * k;
    gen.apply(stage, k);
    acc += 2.0 * k;
    stage = psi + (0.5 * dt) * k;
    gen.apply(stage, k);
    acc += 2.0 * k;
    stage = psi + dt * k;
    gen.apply(stage, k);
    acc += k;
    psi += (dt / 6.0) * acc;
  }
  record.wall_time_s = seconds_since(start);
  record.matvec_count = 4 * steps * dim;

  const double drift = std::abs(psi.norm() - initial.norm());
  if (!(drift <= options.drift_tolerance))
    throw StepUnstable("SparseStep norm drift " + std::to_string(drift) + " exceeds tolerance");
  return {State(std::move(psi), initial.dims()), std::move(record)};
}

ProductResult evolve_product(const SpinChainSpec& spec, double t, const ProductState& initial) {
  spec.validate();
  if (spec.coupling != 0.0) throw NotProductForm("evolve_product: coupling must be zero");
  if (initial.size() != spec.n_spins) throw DimensionMismatch("evolve_product: one factor per spin required");

  ScalingRecord record = make_record(spec.n_spins, Backend::ProductExact);
  const auto start = Clock::now();
  ProductState out(initial.size());
  // exp(-i h t X) = cos(ht) I - i sin(ht) X
  for (std::size_t i = 0; i < initial.size(); ++i) {
    const double c = std::cos(spec.fields[i] * t);
    const std::complex<double> s(0.0, -std::sin(spec.fields[i] * t));
    out[i] = SpinState(c * initial[i](0) + s * initial[i](1), s * initial[i](0) + c * initial[i](1));
  }
  record.wall_time_s = seconds_since(start);
  record.matvec_count = 2 * static_cast<std::uint64_t>(spec.n_spins);
  record.peak_state_bytes = 32 * static_cast<std::uint64_t>(spec.n_spins);
  return {std::move(out), std::move(record)};
}

State expand_product(const ProductState& state) {
  if (state.empty()) throw DimensionMismatch("expand_product: empty product");
  if (state.size() > kMaxSparseSpins) throw TooLarge("expand_product: too many factors");
  State out{Eigen::VectorXcd(state[0])};
  for (std::size_t i = 1; i < state.size(); ++i) out = tensor_product(out, State(Eigen::VectorXcd(state[i])));
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_slope: x values are all equal");
  return sxy / sxx;
}

ScalingSummary run_scaling(const ScalingRequest& request) {
  if (request.repeats < 3) throw InvalidArgument("run_scaling: at least three repeats are required");
  if (request.n_min < 1 || request.n_max < request.n_min) throw InvalidArgument("run_scaling: bad N range");

  ScalingSummary summary;
  auto add_median = [&](std::vector<ScalingRecord> runs) {
    std::vector<double> times;
    for (const auto& r : runs) times.push_back(r.wall_time_s);
    ScalingRecord m = runs.front();
    m.wall_time_s = median(times);
    summary.records.insert(summary.records.end(), runs.begin(), runs.end());
    summary.medians.push_back(std::move(m));
    return summary.medians.back().wall_time_s;
  };
  auto log2_time = [](double s) { return std::log2(std::max(s, 1e-9)); };

  for (Backend backend : request.backends) {
    if (backend == Backend::ProductExact) {
      std::vector<std::size_t> sizes = request.product_sizes;
      if (sizes.empty())
        for (std::size_t n = 16; n <= (std::size_t{1} << 14); n *= 2) sizes.push_back(n);
      std::vector<double> xs, ys;
      for (std::size_t n : sizes) {
        const auto spec = SpinChainSpec::with_random_fields(n, 0.0, request.seed, request.field_scale);
        const ProductState initial(n, SpinState(1.0, 0.0));
        evolve_product(spec, request.t, initial);  // warm-up
        std::vector<ScalingRecord> runs;
        for (std::size_t r = 0; r < request.repeats; ++r) runs.push_back(evolve_product(spec, request.t, initial).record);
        xs.push_back(std::log2(static_cast<double>(n)));
        ys.push_back(log2_time(add_median(std::move(runs))));
      }
      if (xs.size() >= 2) summary.product_degree = fit_slope(xs, ys);
      continue;
    }

    const std::size_t cap = backend == Backend::DenseExpm ? kMaxDenseSpins : kMaxSparseSpins;
    if (request.n_max > cap)
      throw TooLarge(std::string(to_string(backend)) + " supports at most " + std::to_string(cap) + " spins");

    // One step size for the whole range keeps the step count fixed, so
    // the operation count isolates the growth of the state.
    EvolveOptions options;
    if (backend == Backend::SparseStep) {
      const auto largest =
          SpinChainSpec::with_random_fields(request.n_max, request.coupling, request.seed, request.field_scale);
      options.step = sparse_step_size(largest, request.t, options.drift_tolerance);
    }

    std::vector<double> xs, ys;
    for (std::size_t n = request.n_min; n <= request.n_max; ++n) {
      const auto spec = SpinChainSpec::with_random_fields(n, request.coupling, request.seed, request.field_scale);
      const State initial = State::basis(Index{1} << n, 0);
      evolve_exact(spec, request.t, initial, backend, options);  // warm-up
      std::vector<ScalingRecord> runs;
      for (std::size_t r = 0; r < request.repeats; ++r)
        runs.push_back(evolve_exact(spec, request.t, initial, backend, options).record);
      xs.push_back(static_cast<double>(n));
      ys.push_back(log2_time(add_median(std::move(runs))));
    }
    if (xs.size() >= 2) summary.exponential_slopes[backend] = fit_slope(xs, ys);
  }
  return summary;
}

}  // namespace collapse::bench
