#include "qsopt/statevector.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "qsopt/entropy.hpp"
#include "qsopt/error.hpp"

namespace qsopt {

template <class Real>
DenseStateT<Real>::DenseStateT(int n_qubits) : n_(n_qubits) {
  if (n_ < 1 || n_ > 30) throw SimulationError("dense state supports 1..30 qubits");
  amps_ = Vector::Zero(Eigen::Index{1} << n_);
  amps_(0) = Complex(1);
}

template <class Real>
DenseStateT<Real> DenseStateT<Real>::from_basis(std::string_view bitstring) {
  DenseStateT s(static_cast<int>(bitstring.size()));
  s.amps_(0) = Complex(0);
  s.amps_(static_cast<Eigen::Index>(bits_from_string(bitstring))) = Complex(1);
  return s;
}

template <class Real>
void DenseStateT<Real>::check_qubit(int q) const {
  if (q < 0 || q >= n_) throw SimulationError("qubit index " + std::to_string(q) + " out of range");
}

template <class Real>
void DenseStateT<Real>::apply(const Gate& g) {
  if (is_two_qubit(g.kind)) {
    apply_2q(two_qubit_unitary<Real>(g.kind), g.q0, g.q1);
  } else {
    apply_1q(single_qubit_unitary<Real>(g.kind, static_cast<Real>(g.angle)), g.q0);
  }
}

template <class Real>
void DenseStateT<Real>::apply_1q(const Matrix2<Real>& u, int q) {
  check_qubit(q);
  const Eigen::Index stride = Eigen::Index{1} << (n_ - 1 - q);
  const Eigen::Index dim = amps_.size();
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index i0 = base; i0 < base + stride; ++i0) {
      const Eigen::Index i1 = i0 + stride;
      const Complex a0 = amps_(i0), a1 = amps_(i1);
      amps_(i0) = u(0, 0) * a0 + u(0, 1) * a1;
      amps_(i1) = u(1, 0) * a0 + u(1, 1) * a1;
    }
  }
}

template <class Real>
void DenseStateT<Real>::apply_2q(const Matrix4<Real>& u, int a, int b) {
  check_qubit(a);
  check_qubit(b);
  if (a == b) throw SimulationError("two-qubit gate on a single qubit");
  const Eigen::Index ma = Eigen::Index{1} << (n_ - 1 - a);
  const Eigen::Index mb = Eigen::Index{1} << (n_ - 1 - b);
  const Eigen::Index dim = amps_.size();
  Eigen::Matrix<Complex, 4, 1> v;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if ((i & ma) || (i & mb)) continue;
    const Eigen::Index idx[4] = {i, i | mb, i | ma, i | ma | mb};
    for (int k = 0; k < 4; ++k) v(k) = amps_(idx[k]);
    v = u * v;
    for (int k = 0; k < 4; ++k) amps_(idx[k]) = v(k);
  }
}

template <class Real>
void DenseStateT<Real>::reset(int q, Rng& rng) {
  check_qubit(q);
  const Eigen::Index m = Eigen::Index{1} << (n_ - 1 - q);
  Real p0 = 0, p1 = 0;
  for (Eigen::Index i = 0; i < amps_.size(); ++i) {
    ((i & m) ? p1 : p0) += std::norm(amps_(i));
  }
  const bool one = rng.uniform() * static_cast<double>(p0 + p1) < static_cast<double>(p1);
  const Real scale = Real(1) / std::sqrt(one ? p1 : p0);
  for (Eigen::Index i = 0; i < amps_.size(); ++i) {
    if (i & m) continue;
    amps_(i) = one ? amps_(i | m) * scale : amps_(i) * scale;
    amps_(i | m) = Complex(0);
  }
}

template <class Real>
DenseStateT<Real> run_statevector(const Circuit& c, int max_qubits) {
  max_qubits = std::min(max_qubits, kStatevectorMaxCap);
  if (c.n_qubits() > max_qubits) {
    throw SimulationError("statevector backend refuses " + std::to_string(c.n_qubits()) +
                          " qubits (cap " + std::to_string(max_qubits) + ")");
  }
  DenseStateT<Real> s(c.n_qubits());
  for (const Gate& g : c.gates()) s.apply(g);
  return s;
}

template class DenseStateT<float>;
template class DenseStateT<double>;
template DenseStateT<float> run_statevector<float>(const Circuit&, int);
template DenseStateT<double> run_statevector<double>(const Circuit&, int);

Distribution exact_distribution(const DenseState& s) {
  Distribution d;
  const auto& a = s.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double p = std::norm(a(i));
    if (p > 0.0) d.emplace_hint(d.end(), static_cast<Bits>(i), p);
  }
  return d;
}

Eigen::VectorXd exact_schmidt(const DenseState& s, int cut) {
  const int n = s.n_qubits();
  if (cut < 1 || cut >= n) throw SimulationError("cut " + std::to_string(cut) + " out of range");
  using RowMajor = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> m(s.amplitudes().data(), Eigen::Index{1} << cut, Eigen::Index{1} << (n - cut));
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues();
}

double exact_bond_entropy(const DenseState& s, int cut) { return von_neumann_entropy(exact_schmidt(s, cut)); }

OutcomeCounts sample_dense(const DenseState& s, std::uint64_t shots, Rng& rng) {
  const auto& a = s.amplitudes();
  std::vector<double> cdf(static_cast<std::size_t>(a.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    acc += std::norm(a(i));
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  OutcomeCounts out{s.n_qubits(), shots, {}};
  for (std::uint64_t k = 0; k < shots; ++k) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    ++out.counts[static_cast<Bits>(it - cdf.begin())];
  }
  return out;
}

}  // namespace qsopt
