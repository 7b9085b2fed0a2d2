#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "collapse/bench.hpp"

using namespace collapse;
using namespace collapse::bench;
using Catch::Approx;
using cd = std::complex<double>;

namespace {

SpinChainSpec chain(std::size_t n, double j, std::vector<double> h) {
  SpinChainSpec s;
  s.n_spins = n;
  s.coupling = j;
  s.fields = std::move(h);
  return s;
}

State random_state(std::mt19937_64& gen, Index dim) {
  std::normal_distribution<double> g;
  State::Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = cd(g(gen), g(gen));
  return normalize(State(std::move(v)));
}

// Dense Kronecker construction, independent of the bit-twiddling builder.
Eigen::MatrixXcd kron_hamiltonian(const SpinChainSpec& s) {
  Eigen::Matrix2cd x, z, id;
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  id.setIdentity();
  auto site_op = [&](const std::vector<Eigen::Matrix2cd>& ops) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (const auto& op : ops) {
      Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
      for (Index i = 0; i < out.rows(); ++i)
        for (Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * op;
      out = next;
    }
    return out;
  };
  const Index dim = Index{1} << s.n_spins;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i + 1 < s.n_spins; ++i) {
    std::vector<Eigen::Matrix2cd> ops(s.n_spins, id);
    ops[i] = z;
    ops[i + 1] = z;
    h += s.coupling * site_op(ops);
  }
  for (std::size_t i = 0; i < s.n_spins; ++i) {
    std::vector<Eigen::Matrix2cd> ops(s.n_spins, id);
    ops[i] = x;
    h += s.fields[i] * site_op(ops);
  }
  return h;
}

ProductState random_product(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> g;
  ProductState out(n);
  for (auto& s : out) {
    s = SpinState(cd(g(gen), g(gen)), cd(g(gen), g(gen)));
    s.normalize();
  }
  return out;
}

}  // namespace

TEST_CASE("hilbert dimension", "[bench]") {
  CHECK(hilbert_dim(1).dim == 2);
  CHECK(hilbert_dim(1).param_count == 1);
  CHECK(hilbert_dim(10).dim == 1024);
  CHECK(hilbert_dim(10).param_count == 1023);
  const auto h100 = hilbert_dim(100);
  CHECK(h100.dim.str() == "1267650600228229401496703205376");
  CHECK(h100.param_count.str() == "1267650600228229401496703205375");
  for (std::size_t n = 1; n < 200; ++n) CHECK(hilbert_dim(n + 1).dim == 2 * hilbert_dim(n).dim);
  CHECK_THROWS_AS(hilbert_dim(0), InvalidArgument);
}

TEST_CASE("Ising Hamiltonian", "[bench]") {
  SECTION("single spin is h X") {
    const Eigen::MatrixXcd h = Eigen::MatrixXcd(build_hamiltonian(chain(1, 3.0, {0.7})));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    CHECK(es.eigenvalues()(0) == Approx(-0.7).margin(1e-15));
    CHECK(es.eigenvalues()(1) == Approx(0.7).margin(1e-15));
  }
  SECTION("two spins, zero field: diag(1, -1, -1, 1)") {
    const Eigen::MatrixXcd h = Eigen::MatrixXcd(build_hamiltonian(chain(2, 1.0, {0.0, 0.0})));
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
    expected.diagonal() << 1, -1, -1, 1;
    CHECK((h - expected).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("matches the Kronecker construction and is Hermitian") {
    for (std::size_t n = 1; n <= 6; ++n) {
      const auto s = SpinChainSpec::with_random_fields(n, 0.8, 40 + n);
      const SparseOperator sparse = build_hamiltonian(s);
      const Eigen::MatrixXcd dense(sparse);
      CHECK((dense - kron_hamiltonian(s)).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK((dense - dense.adjoint()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(sparse.nonZeros() <= static_cast<Index>((n + 1) << n));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().cwiseAbs().maxCoeff() <= spectral_bound(s) + 1e-12);
    }
  }
  SECTION("size guard") {
    CHECK_THROWS_AS(build_hamiltonian(SpinChainSpec::with_random_fields(25, 1.0, 1)), TooLarge);
  }
  SECTION("random fields are reproducible and nested") {
    const auto a = SpinChainSpec::with_random_fields(8, 1.0, 9);
    const auto b = SpinChainSpec::with_random_fields(12, 1.0, 9);
    CHECK(std::equal(a.fields.begin(), a.fields.end(), b.fields.begin()));
    for (double h : b.fields) CHECK(std::abs(h) <= 1.0);
  }
}

TEST_CASE("exact evolution", "[bench]") {
  std::mt19937_64 gen(17);

  SECTION("t = 0 returns the initial state") {
    const auto s = SpinChainSpec::with_random_fields(5, 1.0, 3);
    const State psi = random_state(gen, 32);
    for (auto b : {Backend::DenseExpm, Backend::SparseStep}) {
      const auto r = evolve_exact(s, 0.0, psi, b);
      CHECK((r.state.amplitudes() - psi.amplitudes()).norm() <= 1e-14);
      CHECK(r.record.wall_time_s >= 0.0);
      CHECK(r.record.peak_state_bytes == 16u * 32u);
      CHECK(r.record.dim == 32);
      CHECK(r.record.param_count == 31);
    }
  }
  SECTION("diagonal two-spin chain: phases e^{-i (+-1) t}") {
    const auto s = chain(2, 1.0, {0.0, 0.0});
    const double t = 0.9;
    const double r = 0.5;
    State::Vector v(4);
    v << r, r, r, r;
    const State psi(v);
    for (auto b : {Backend::DenseExpm, Backend::SparseStep}) {
      const State out = evolve_exact(s, t, psi, b).state;
      const double sign[4] = {1, -1, -1, 1};
      // the default step targets norm drift 1e-9; the phase error is one order larger
      for (Index i = 0; i < 4; ++i) CHECK(std::abs(out[i] - r * std::polar(1.0, -sign[i] * t)) <= 5e-8);
    }
  }
  SECTION("backends agree on random chains, N <= 10") {
    for (std::size_t n : {2u, 4u, 7u, 10u}) {
      const auto s = SpinChainSpec::with_random_fields(n, 0.9, 100 + n);
      const State psi = random_state(gen, Index{1} << n);
      const auto dense = evolve_exact(s, 1.3, psi, Backend::DenseExpm);
      const auto sparse = evolve_exact(s, 1.3, psi, Backend::SparseStep);
      CHECK((dense.state.amplitudes() - sparse.state.amplitudes()).norm() <= 1e-6);
      CHECK(std::abs(dense.state.norm() - 1.0) <= 1e-12);
      CHECK(std::abs(sparse.state.norm() - 1.0) <= 1e-9);
    }
  }
  SECTION("negative time runs backwards") {
    const auto s = SpinChainSpec::with_random_fields(4, 1.1, 8);
    const State psi = random_state(gen, 16);
    const State fwd = evolve_exact(s, 0.7, psi, Backend::SparseStep).state;
    const State back = evolve_exact(s, -0.7, fwd, Backend::SparseStep).state;
    CHECK((back.amplitudes() - psi.amplitudes()).norm() <= 1e-7);
  }
  SECTION("coarse step violates the drift bound") {
    const auto s = SpinChainSpec::with_random_fields(4, 1.0, 2);
    EvolveOptions opts;
    opts.step = 2.0;
    CHECK_THROWS_AS(evolve_exact(s, 20.0, random_state(gen, 16), Backend::SparseStep, opts), StepUnstable);
  }
  SECTION("caps and argument checks") {
    CHECK_THROWS_AS(evolve_exact(SpinChainSpec::with_random_fields(13, 1.0, 1), 1.0, State::basis(1 << 13, 0),
                                 Backend::DenseExpm),
                    TooLarge);
    CHECK_THROWS_AS(evolve_exact(SpinChainSpec::with_random_fields(3, 1.0, 1), 1.0, State::basis(4, 0),
                                 Backend::SparseStep),
                    DimensionMismatch);
    CHECK_THROWS_AS(evolve_exact(SpinChainSpec::with_random_fields(3, 1.0, 1), 1.0, State::basis(8, 0),
                                 Backend::ProductExact),
                    InvalidArgument);
  }
  SECTION("operation count") {
    const auto s = SpinChainSpec::with_random_fields(6, 1.0, 5);
    EvolveOptions opts;
    opts.step = 0.002;
    const auto r = evolve_exact(s, 0.5, State::basis(64, 0), Backend::SparseStep, opts);
    CHECK(r.record.matvec_count == 4u * 250u * 64u);
  }
}

TEST_CASE("product evolution", "[bench]") {
  std::mt19937_64 gen(23);
  SECTION("zero field is the identity") {
    const auto s = chain(20, 0.0, std::vector<double>(20, 0.0));
    const ProductState psi = random_product(gen, 20);
    const auto r = evolve_product(s, 3.0, psi);
    for (std::size_t i = 0; i < 20; ++i) CHECK((r.state[i] - psi[i]).norm() == 0.0);
    CHECK(r.record.peak_state_bytes == 32u * 20u);
  }
  SECTION("h = pi/2, t = 1 maps |up> to -i|down>") {
    const auto r = evolve_product(chain(1, 0.0, {std::numbers::pi / 2}), 1.0, {SpinState(1.0, 0.0)});
    CHECK(std::abs(r.state[0](0)) <= 1e-15);
    CHECK(std::abs(r.state[0](1) - cd(0, -1)) <= 1e-15);
  }
  SECTION("agrees with exact evolution for J = 0, N = 8") {
    const auto s = SpinChainSpec::with_random_fields(8, 0.0, 77, 2.0);
    const ProductState psi = random_product(gen, 8);
    const State full = expand_product(psi);
    const State product = expand_product(evolve_product(s, 1.7, psi).state);
    for (auto b : {Backend::DenseExpm, Backend::SparseStep}) {
      const State exact = evolve_exact(s, 1.7, full, b).state;
      CHECK((exact.amplitudes() - product.amplitudes()).norm() <= 1e-8);
    }
  }
  SECTION("rejects coupled chains") {
    CHECK_THROWS_AS(evolve_product(chain(2, 0.5, {1, 1}), 1.0, ProductState(2, SpinState(1, 0))), NotProductForm);
  }
  SECTION("large chains never materialize the full vector") {
    const auto s = SpinChainSpec::with_random_fields(16384, 0.0, 5);
    const auto r = evolve_product(s, 0.3, ProductState(16384, SpinState(1, 0)));
    CHECK(r.state.size() == 16384u);
    CHECK(r.record.dim == hilbert_dim(16384).dim);
    for (const auto& f : r.state) REQUIRE(std::abs(f.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("step size honours the drift budget", "[bench]") {
  const auto s = SpinChainSpec::with_random_fields(8, 1.0, 4);
  const double step = sparse_step_size(s, 3.0, 1e-9);
  CHECK(step * spectral_bound(s) <= 0.5);
  const double steps = std::ceil(3.0 / step);
  const double x = (3.0 / steps) * spectral_bound(s);
  CHECK(steps * std::pow(x, 6) / 144.0 <= 1e-9);
  CHECK(sparse_step_size(chain(2, 0.0, {0.0, 0.0}), 2.0, 1e-9) == 2.0);
}

TEST_CASE("slope fit", "[bench]") {
  CHECK(fit_slope({1, 2, 3, 4}, {3, 5, 7, 9}) == Approx(2.0).margin(1e-14));
  CHECK_THROWS_AS(fit_slope({1}, {1}), InvalidArgument);
  CHECK_THROWS_AS(fit_slope({2, 2}, {1, 3}), InvalidArgument);
}

TEST_CASE("scaling run schema", "[bench]") {
  ScalingRequest req;
  req.n_min = 3;
  req.n_max = 6;
  req.backends = {Backend::SparseStep, Backend::DenseExpm, Backend::ProductExact};
  req.product_sizes = {4, 8, 16};
  req.repeats = 3;
  const auto summary = run_scaling(req);
  CHECK(summary.records.size() == (4u + 4u + 3u) * 3u);
  CHECK(summary.medians.size() == 4u + 4u + 3u);
  CHECK(summary.exponential_slopes.count(Backend::SparseStep) == 1);
  CHECK(summary.exponential_slopes.count(Backend::DenseExpm) == 1);
  CHECK(summary.product_degree.has_value());
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(summary.medians[i].dim == 2 * summary.medians[i - 1].dim);
    CHECK(summary.medians[i].matvec_count == 2 * summary.medians[i - 1].matvec_count);
  }
  req.repeats = 2;
  CHECK_THROWS_AS(run_scaling(req), InvalidArgument);
}
