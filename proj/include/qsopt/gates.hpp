#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Core>

#include "qsopt/circuit.hpp"

namespace qsopt {

template <class Real>
using Matrix2 = Eigen::Matrix<std::complex<Real>, 2, 2>;
template <class Real>
using Matrix4 = Eigen::Matrix<std::complex<Real>, 4, 4>;

enum class Pauli : std::uint8_t { X, Y, Z };

template <class Real>
Matrix2<Real> pauli_matrix(Pauli p) {
  using C = std::complex<Real>;
  Matrix2<Real> m;
  switch (p) {
    case Pauli::X: m << C(0), C(1), C(1), C(0); break;
    case Pauli::Y: m << C(0), C(0, -1), C(0, 1), C(0); break;
    case Pauli::Z: m << C(1), C(0), C(0), C(-1); break;
  }
  return m;
}

/// Unitary of a single-qubit gate in the {|0>, |1>} basis.
/// RX(t) = exp(-i t X / 2), RZ(t) = exp(-i t Z / 2).
template <class Real>
Matrix2<Real> single_qubit_unitary(GateKind kind, Real angle) {
  using C = std::complex<Real>;
  Matrix2<Real> m;
  const Real c = std::cos(angle / 2), s = std::sin(angle / 2);
  switch (kind) {
    case GateKind::H: {
      const Real r = Real(1) / std::sqrt(Real(2));
      m << C(r), C(r), C(r), C(-r);
      break;
    }
    case GateKind::RX: m << C(c), C(0, -s), C(0, -s), C(c); break;
    case GateKind::RZ: m << C(c, -s), C(0), C(0), C(c, s); break;
    default: m.setIdentity(); break;
  }
  return m;
}

/// Unitary of a two-qubit gate on (q0, q1) in the basis |b0 b1>, index 2*b0 + b1.
template <class Real>
Matrix4<Real> two_qubit_unitary(GateKind kind) {
  Matrix4<Real> m = Matrix4<Real>::Zero();
  switch (kind) {
    case GateKind::CX: m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1; break;
    case GateKind::CZ: m(0, 0) = m(1, 1) = m(2, 2) = 1; m(3, 3) = -1; break;
    case GateKind::SWAP: m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1; break;
    default: m.setIdentity(); break;
  }
  return m;
}

/// Same gate with its two qubit operands exchanged.
template <class Real>
Matrix4<Real> exchange_operands(const Matrix4<Real>& u) {
  Matrix4<Real> p = two_qubit_unitary<Real>(GateKind::SWAP);
  return p * u * p;
}

}  // namespace qsopt
