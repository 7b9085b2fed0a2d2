#pragma once

// Dense complex linear algebra for small quantum systems: state vectors,
// density matrices, tensor products, partial traces and propagators of
// diagonal Hamiltonians. Everything is templated on the real scalar type;
// hbar = 1, so a phase is energy * time.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "collapse/errors.hpp"

namespace collapse {

using Index = Eigen::Index;
using Dims = std::vector<Index>;

template <typename Scalar>
using Complex = std::complex<Scalar>;
template <typename Scalar>
using ComplexVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

inline Index dims_product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

inline void check_dims(const Dims& dims, Index length, const char* what) {
  if (dims.empty()) throw DimensionMismatch(std::string(what) + ": empty dimension list");
  for (Index d : dims) {
    if (d < 1) throw DimensionMismatch(std::string(what) + ": subsystem dimension must be >= 1");
  }
  if (dims_product(dims) != length) {
    throw DimensionMismatch(std::string(what) + ": length " + std::to_string(length) +
                            " does not equal the product of subsystem dimensions");
  }
}

inline Dims concat(const Dims& a, const Dims& b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace detail

/// Amplitudes over a computational basis, with the subsystem factorization.
/// Basis |up> is index 0 and |down> index 1; composite indices are row-major
/// with the left factor most significant.
template <typename Scalar = double>
class StateVector {
 public:
  using Vector = ComplexVector<Scalar>;

  StateVector() = default;

  explicit StateVector(Vector amplitudes) : StateVector(amplitudes, Dims{amplitudes.size()}) {}

  StateVector(Vector amplitudes, Dims dims) : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
    detail::check_dims(dims_, amplitudes_.size(), "StateVector");
    if (!amplitudes_.allFinite()) throw NonFinite("StateVector: non-finite amplitude");
  }

  static StateVector basis(Index dim, Index index) {
    if (index < 0 || index >= dim) throw DimensionMismatch("basis index out of range");
    Vector v = Vector::Zero(dim);
    v(index) = Complex<Scalar>(1);
    return StateVector(std::move(v));
  }

  const Vector& amplitudes() const noexcept { return amplitudes_; }
  const Dims& dims() const noexcept { return dims_; }
  Index size() const noexcept { return amplitudes_.size(); }
  Complex<Scalar> operator[](Index i) const { return amplitudes_(i); }
  Scalar norm() const { return amplitudes_.norm(); }

 private:
  Vector amplitudes_;
  Dims dims_;
};

/// Hermitian, unit-trace, positive semidefinite operator. The constructor only
/// checks shapes; the physical invariants are exposed as measurable errors so
/// callers can assert them at their own tolerance.
template <typename Scalar = double>
class DensityMatrix {
 public:
  using Matrix = ComplexMatrix<Scalar>;

  DensityMatrix() = default;

  DensityMatrix(Matrix entries, Dims dims) : entries_(std::move(entries)), dims_(std::move(dims)) {
    if (entries_.rows() != entries_.cols()) throw DimensionMismatch("DensityMatrix: not square");
    detail::check_dims(dims_, entries_.rows(), "DensityMatrix");
    if (!entries_.allFinite()) throw NonFinite("DensityMatrix: non-finite entry");
  }

  explicit DensityMatrix(Matrix entries) : DensityMatrix(entries, Dims{entries.rows()}) {}

  /// |s><s|
  static DensityMatrix pure(const StateVector<Scalar>& s) {
    return DensityMatrix(s.amplitudes() * s.amplitudes().adjoint(), s.dims());
  }

  const Matrix& entries() const noexcept { return entries_; }
  const Dims& dims() const noexcept { return dims_; }
  Index size() const noexcept { return entries_.rows(); }
  Complex<Scalar> operator()(Index i, Index j) const { return entries_(i, j); }

  Complex<Scalar> trace() const { return entries_.trace(); }

  /// max |rho_ij - conj(rho_ji)|
  Scalar hermiticity_error() const {
    if (entries_.size() == 0) return Scalar(0);
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  }

  Scalar min_eigenvalue() const {
    const Matrix hermitian = (entries_ + entries_.adjoint()) * Scalar(0.5);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

 private:
  Matrix entries_;
  Dims dims_;
};

using State = StateVector<double>;
using Density = DensityMatrix<double>;

template <typename Scalar>
StateVector<Scalar> normalize(const StateVector<Scalar>& s) {
  const Scalar n = s.norm();
  if (!(n >= Scalar(1e-300))) throw ZeroVector("normalize: vector norm is zero");
  return StateVector<Scalar>(s.amplitudes() / n, s.dims());
}

/// <a|b>, conjugate-linear in a.
template <typename Scalar>
Complex<Scalar> inner_product(const StateVector<Scalar>& a, const StateVector<Scalar>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("inner_product: lengths differ");
  return a.amplitudes().dot(b.amplitudes());
}

template <typename Scalar>
StateVector<Scalar> tensor_product(const StateVector<Scalar>& a, const StateVector<Scalar>& b) {
  if (a.size() == 0 || b.size() == 0) throw DimensionMismatch("tensor_product: empty factor");
  ComplexVector<Scalar> out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b.amplitudes();
  return StateVector<Scalar>(std::move(out), detail::concat(a.dims(), b.dims()));
}

template <typename Scalar>
DensityMatrix<Scalar> tensor_product(const DensityMatrix<Scalar>& a, const DensityMatrix<Scalar>& b) {
  const Index nb = b.size();
  ComplexMatrix<Scalar> out(a.size() * nb, a.size() * nb);
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < a.size(); ++j) out.block(i * nb, j * nb, nb, nb) = a(i, j) * b.entries();
  return DensityMatrix<Scalar>(std::move(out), detail::concat(a.dims(), b.dims()));
}

/// Traces out every subsystem except `keep`.
template <typename Scalar>
DensityMatrix<Scalar> partial_trace(const DensityMatrix<Scalar>& rho, std::size_t keep) {
  const Dims& dims = rho.dims();
  if (dims.size() < 2) throw BadSubsystem("partial_trace: need at least two subsystems");
  if (keep >= dims.size()) throw BadSubsystem("partial_trace: subsystem index out of range");

  Index left = 1;
  for (std::size_t i = 0; i < keep; ++i) left *= dims[i];
  Index right = 1;
  for (std::size_t i = keep + 1; i < dims.size(); ++i) right *= dims[i];
  const Index d = dims[keep];

  ComplexMatrix<Scalar> out = ComplexMatrix<Scalar>::Zero(d, d);
  const auto& m = rho.entries();
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) {
      Complex<Scalar> acc(0);
      for (Index l = 0; l < left; ++l) {
        const Index row = (l * d + a) * right;
        const Index col = (l * d + b) * right;
        for (Index r = 0; r < right; ++r) acc += m(row + r, col + r);
      }
      out(a, b) = acc;
    }
  }
  return DensityMatrix<Scalar>(std::move(out), Dims{d});
}

/// Applies exp(-i H t) for H = diag(energies).
template <typename Scalar>
StateVector<Scalar> evolve_diagonal(std::span<const Scalar> energies, Scalar t, const StateVector<Scalar>& s) {
  if (static_cast<Index>(energies.size()) != s.size())
    throw DimensionMismatch("evolve_diagonal: energy list length differs from state length");
  ComplexVector<Scalar> out(s.size());
  for (Index i = 0; i < s.size(); ++i) out(i) = std::polar(Scalar(1), -energies[i] * t) * s[i];
  return StateVector<Scalar>(std::move(out), s.dims());
}

template <typename Scalar>
StateVector<Scalar> evolve_diagonal(const std::vector<Scalar>& energies, Scalar t, const StateVector<Scalar>& s) {
  return evolve_diagonal(std::span<const Scalar>(energies), t, s);
}

}  // namespace collapse
