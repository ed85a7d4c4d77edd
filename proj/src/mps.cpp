#include "qsopt/mps.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "qsopt/entropy.hpp"
#include "qsopt/error.hpp"

namespace qsopt {

namespace {

using Matrix = MpsState::Matrix;

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  Matrix m(top.rows() + bottom.rows(), top.cols());
  m << top, bottom;
  return m;
}

Matrix stack_cols(const Matrix& left, const Matrix& right) {
  Matrix m(left.rows(), left.cols() + right.cols());
  m << left, right;
  return m;
}

// Number of singular values to keep and the discarded squared weight.
std::pair<Eigen::Index, double> truncation(const Eigen::VectorXd& s, const MpsOptions& opt) {
  Eigen::Index keep = 0;
  while (keep < s.size() && s(keep) > MpsState::kZeroSingular) ++keep;
  keep = std::max<Eigen::Index>(keep, 1);
  const double total = s.squaredNorm();
  double discarded = s.tail(s.size() - keep).squaredNorm();
  while (keep > 1) {
    const double w = s(keep - 1) * s(keep - 1);
    if (discarded + w > opt.trunc_tol * total) break;
    discarded += w;
    --keep;
  }
  if (keep > opt.chi_max) {
    discarded += s.segment(opt.chi_max, keep - opt.chi_max).squaredNorm();
    keep = opt.chi_max;
  }
  return {keep, total > 0.0 ? discarded / total : 0.0};
}

}  // namespace

MpsState::MpsState(int n_qubits, MpsOptions options) : options_(options) {
  if (n_qubits < 1) throw SimulationError("MPS needs at least one qubit");
  if (options_.chi_max < 1) throw SimulationError("chi_max must be at least 1");
  if (!(options_.trunc_tol >= 0.0)) throw SimulationError("trunc_tol must be nonnegative");
  sites_.resize(static_cast<std::size_t>(n_qubits));
  for (Site& s : sites_) {
    s[0] = Matrix::Ones(1, 1);
    s[1] = Matrix::Zero(1, 1);
  }
  track_peak();
}

MpsState MpsState::from_basis(std::string_view bitstring, MpsOptions options) {
  for (char ch : bitstring) {
    if (ch != '0' && ch != '1') throw SimulationError("bitstring may only contain '0' and '1'");
  }
  MpsState s(static_cast<int>(bitstring.size()), options);
  for (std::size_t k = 0; k < bitstring.size(); ++k) {
    if (bitstring[k] == '1') std::swap(s.sites_[k][0], s.sites_[k][1]);
  }
  return s;
}

int MpsState::bond_dimension(int bond) const {
  if (bond < 1 || bond >= n_qubits()) throw SimulationError("bond " + std::to_string(bond) + " out of range");
  return static_cast<int>(sites_[static_cast<std::size_t>(bond)][0].rows());
}

void MpsState::check_qubit(int q) const {
  if (q < 0 || q >= n_qubits()) throw SimulationError("qubit index " + std::to_string(q) + " out of range");
}

void MpsState::track_peak() {
  std::size_t elements = 0;
  for (std::size_t k = 0; k < sites_.size(); ++k) {
    elements += static_cast<std::size_t>(2 * sites_[k][0].size());
    if (k > 0) peak_.max_bond = std::max(peak_.max_bond, static_cast<int>(sites_[k][0].rows()));
  }
  peak_.memory_estimate_bytes = std::max(peak_.memory_estimate_bytes, elements * sizeof(Complex));
}

void MpsState::shift_center_right() {
  const auto i = static_cast<std::size_t>(center_);
  Site& a = sites_[i];
  Site& b = sites_[i + 1];
  const Eigen::Index dl = a[0].rows();
  const Matrix m = stack_rows(a[0], a[1]);
  Eigen::HouseholderQR<Matrix> qr(m);
  const Eigen::Index r = std::min(m.rows(), m.cols());
  const Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), r);
  const Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  a[0] = q.topRows(dl);
  a[1] = q.bottomRows(dl);
  b[0] = rr * b[0];
  b[1] = rr * b[1];
  ++center_;
}

void MpsState::shift_center_left() {
  const auto i = static_cast<std::size_t>(center_);
  Site& a = sites_[i];
  Site& b = sites_[i - 1];
  const Eigen::Index dr = a[0].cols();
  const Matrix m = stack_cols(a[0], a[1]);
  Eigen::HouseholderQR<Matrix> qr(m.adjoint());
  const Eigen::Index r = std::min(m.rows(), m.cols());
  const Matrix q = qr.householderQ() * Matrix::Identity(m.cols(), r);
  const Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Matrix qa = q.adjoint();
  a[0] = qa.leftCols(dr);
  a[1] = qa.rightCols(dr);
  const Matrix radj = rr.adjoint();
  b[0] = b[0] * radj;
  b[1] = b[1] * radj;
  --center_;
}

void MpsState::move_center(int k) {
  while (center_ < k) shift_center_right();
  while (center_ > k) shift_center_left();
}

void MpsState::update_pair(int i, const Matrix4<double>& u) {
  move_center(i);
  Site& a = sites_[static_cast<std::size_t>(i)];
  Site& b = sites_[static_cast<std::size_t>(i) + 1];
  const Eigen::Index dl = a[0].rows();
  const Eigen::Index dr = b[0].cols();

  Matrix theta[2][2];
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) theta[s1][s2] = a[s1] * b[s2];

  Matrix m = Matrix::Zero(2 * dl, 2 * dr);
  for (int t1 = 0; t1 < 2; ++t1) {
    for (int t2 = 0; t2 < 2; ++t2) {
      auto block = m.block(t1 * dl, t2 * dr, dl, dr);
      for (int s1 = 0; s1 < 2; ++s1) {
        for (int s2 = 0; s2 < 2; ++s2) {
          const Complex c = u(2 * t1 + t2, 2 * s1 + s2);
          if (c != Complex(0.0)) block += c * theta[s1][s2];
        }
      }
    }
  }

  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const auto [keep, discarded] = truncation(s, options_);
  const double kept_norm = s.head(keep).norm();

  const Matrix& uu = svd.matrixU();
  a[0] = uu.block(0, 0, dl, keep);
  a[1] = uu.block(dl, 0, dl, keep);
  const Matrix sv = (s.head(keep) / kept_norm).asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
  b[0] = sv.leftCols(dr);
  b[1] = sv.rightCols(dr);
  center_ = i + 1;

  last_discarded_ = discarded;
  total_discarded_ += discarded;
}

void MpsState::apply(const Gate& g) {
  if (is_two_qubit(g.kind)) {
    apply_2q(two_qubit_unitary<double>(g.kind), g.q0, g.q1);
  } else {
    apply_1q(single_qubit_unitary<double>(g.kind, g.angle), g.q0);
  }
}

void MpsState::apply_1q(const Matrix2<double>& u, int q) {
  check_qubit(q);
  Site& a = sites_[static_cast<std::size_t>(q)];
  Matrix n0 = u(0, 0) * a[0] + u(0, 1) * a[1];
  Matrix n1 = u(1, 0) * a[0] + u(1, 1) * a[1];
  a[0] = std::move(n0);
  a[1] = std::move(n1);
}

void MpsState::apply_2q(const Matrix4<double>& u, int qa, int qb) {
  check_qubit(qa);
  check_qubit(qb);
  if (qa == qb) throw SimulationError("two-qubit gate on a single qubit");
  const int lo = std::min(qa, qb);
  const int hi = std::max(qa, qb);
  const Matrix4<double> oriented = qa == lo ? u : exchange_operands(u);
  const Matrix4<double> swap = two_qubit_unitary<double>(GateKind::SWAP);

  last_discarded_ = 0.0;
  double op_discarded = 0.0;
  // Walk qubit `lo` up to site hi-1, apply, walk it back.
  for (int s = lo; s < hi - 1; ++s) {
    update_pair(s, swap);
    op_discarded += last_discarded_;
  }
  update_pair(hi - 1, oriented);
  op_discarded += last_discarded_;
  for (int s = hi - 2; s >= lo; --s) {
    update_pair(s, swap);
    op_discarded += last_discarded_;
  }
  last_discarded_ = op_discarded;
  track_peak();
}

void MpsState::reset(int q, Rng& rng) {
  check_qubit(q);
  move_center(q);
  Site& a = sites_[static_cast<std::size_t>(q)];
  const double p0 = a[0].squaredNorm();
  const double p1 = a[1].squaredNorm();
  if (rng.uniform() * (p0 + p1) < p1) {
    a[0] = a[1] / std::sqrt(p1);
  } else {
    a[0] /= std::sqrt(p0);
  }
  a[1].setZero();
}

Eigen::VectorXd MpsState::schmidt(int bond) {
  if (bond < 1 || bond >= n_qubits()) throw SimulationError("bond " + std::to_string(bond) + " out of range");
  move_center(bond - 1);
  const Site& a = sites_[static_cast<std::size_t>(bond - 1)];
  Eigen::BDCSVD<Matrix> svd(stack_rows(a[0], a[1]));
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::Index keep = 0;
  while (keep < s.size() && s(keep) > kZeroSingular) ++keep;
  return s.head(keep);
}

double MpsState::bond_entropy(int bond) { return von_neumann_entropy(schmidt(bond)); }

std::vector<double> MpsState::bond_entropies() {
  std::vector<double> out;
  out.reserve(sites_.size());
  for (int k = 1; k < n_qubits(); ++k) out.push_back(bond_entropy(k));
  return out;
}

MpsState::Complex MpsState::amplitude(Bits b) const {
  const int n = n_qubits();
  if (n > kMaxPackedQubits) throw SimulationError("amplitude lookup supports at most 64 qubits");
  Eigen::RowVectorXcd v = sites_[0][static_cast<std::size_t>(bit_of(b, 0, n))];
  for (int k = 1; k < n; ++k) v = v * sites_[static_cast<std::size_t>(k)][static_cast<std::size_t>(bit_of(b, k, n))];
  return v(0);
}

MpsState::Complex MpsState::amplitude(std::string_view bitstring) const {
  if (static_cast<int>(bitstring.size()) != n_qubits()) throw SimulationError("bitstring length does not match qubit count");
  return amplitude(bits_from_string(bitstring));
}

double MpsState::norm_squared() const {
  Matrix env = Matrix::Ones(1, 1);
  for (const Site& s : sites_) env = s[0].adjoint() * env * s[0] + s[1].adjoint() * env * s[1];
  return env(0, 0).real();
}

Distribution MpsState::exact_distribution() const {
  const int n = n_qubits();
  if (n > 24) throw SimulationError("exact distribution limited to 24 qubits");
  Distribution d;
  // Depth-first over prefixes; branches with zero weight are pruned.
  struct Frame {
    int k;
    Bits prefix;
    Eigen::RowVectorXcd env;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, Eigen::RowVectorXcd::Ones(1)});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.k == n) {
      const double p = std::norm(f.env(0));
      if (p > 0.0) d[f.prefix] = p;
      continue;
    }
    for (int s = 1; s >= 0; --s) {
      Eigen::RowVectorXcd next = f.env * sites_[static_cast<std::size_t>(f.k)][static_cast<std::size_t>(s)];
      if (next.squaredNorm() == 0.0) continue;
      stack.push_back({f.k + 1, (f.prefix << 1) | static_cast<Bits>(s), std::move(next)});
    }
  }
  return d;
}

void MpsState::sample_branch(int k, const Eigen::RowVectorXcd& env, Bits prefix, std::uint64_t count, Rng& rng,
                             OutcomeCounts& out) const {
  if (k == n_qubits()) {
    out.counts[prefix] += count;
    return;
  }
  const Site& a = sites_[static_cast<std::size_t>(k)];
  Eigen::RowVectorXcd w0 = env * a[0];
  Eigen::RowVectorXcd w1 = env * a[1];
  const double p0 = w0.squaredNorm();
  const double p1 = w1.squaredNorm();
  const double prob0 = std::clamp(p0 / (p0 + p1), 0.0, 1.0);
  std::binomial_distribution<std::uint64_t> split(count, prob0);
  const std::uint64_t c0 = split(rng.engine());
  if (c0 > 0) sample_branch(k + 1, w0 / std::sqrt(p0), prefix << 1, c0, rng, out);
  if (count - c0 > 0) sample_branch(k + 1, w1 / std::sqrt(p1), (prefix << 1) | 1U, count - c0, rng, out);
}

OutcomeCounts MpsState::sample(std::uint64_t shots, Rng& rng) {
  if (n_qubits() > kMaxPackedQubits) throw SimulationError("sampling supports at most 64 qubits");
  OutcomeCounts out{n_qubits(), shots, {}};
  if (shots == 0) return out;
  // With the center on site 0 every later site is right-orthonormal, so the
  // squared norm of env * A_k[s] is the unnormalized conditional marginal.
  move_center(0);
  sample_branch(0, Eigen::RowVectorXcd::Ones(1), 0, shots, rng, out);
  return out;
}

MpsState run_mps(const Circuit& c, MpsOptions options) {
  MpsState s(c.n_qubits(), options);
  for (const Gate& g : c.gates()) s.apply(g);
  return s;
}

}  // namespace qsopt
