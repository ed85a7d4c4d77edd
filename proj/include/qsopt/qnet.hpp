#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

namespace qsopt {

/// Layer sizes of the value network.
struct QNetShape {
  int channels = 9;
  int rows = 5;
  int cols = 30;
  int aux = 7;
  int actions = 55;
  int conv1 = 16;
  int conv2 = 32;
  int hidden = 256;

  int pixels() const { return rows * cols; }
  int grid_size() const { return channels * pixels(); }
  int features() const { return conv2 * pixels() + aux; }
  std::size_t parameter_count() const;

  friend bool operator==(const QNetShape&, const QNetShape&) = default;
};

/// Dueling convolutional Q-network:
///
///   grid -> conv3x3(conv1) -> ReLU -> conv3x3(conv2) -> ReLU -> flatten
///        ++ aux -> dense(hidden) -> ReLU -> {advantage A, value V}
///   Q(s, a) = V(s) + A(s, a) - mean_a A(s, a)
///
/// Convolutions use stride 1 and zero padding so the grid keeps its size.
/// All weights live in one flat vector; the layer views below index into it.
/// Inputs are batched by column: `grid` is grid_size x B (each column laid
/// out [channel][row][col]), `aux` is aux x B.
template <class Scalar>
class QNet {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  /// Activations kept by forward() for gradient().
  struct Cache {
    Matrix col1, act1, col2, act2, features, hidden, advantage, value;
  };

  /// Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases.
  QNet(const QNetShape& shape, std::uint64_t seed);

  const QNetShape& shape() const noexcept { return shape_; }
  Vector& parameters() noexcept { return params_; }
  const Vector& parameters() const noexcept { return params_; }

  /// Q values, actions x B.
  Matrix forward(const Matrix& grid, const Matrix& aux, Cache* cache = nullptr) const;

  /// Gradient of sum(dq .* Q) with respect to the parameters, using the
  /// activations of the forward pass that filled `cache`.
  Vector gradient(const Cache& cache, const Matrix& dq) const;

  /// Copies parameters bitwise; shapes must match.
  void copy_from(const QNet& other);

 private:
  struct Offsets {
    std::size_t w1, b1, w2, b2, wd, bd, wa, ba, wv, bv, end;
  };

  Eigen::Map<const Matrix> mat(std::size_t at, int r, int c) const {
    return {params_.data() + at, r, c};
  }
  Eigen::Map<const Vector> vec(std::size_t at, int n) const { return {params_.data() + at, n}; }

  QNetShape shape_;
  Offsets off_;
  Vector params_;
};

extern template class QNet<float>;
extern template class QNet<double>;

/// Adam with bias correction on a flat parameter vector.
template <class Scalar>
class Adam {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit Adam(Eigen::Index size, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : m_(Vector::Zero(size)), v_(Vector::Zero(size)), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(Vector& params, const Vector& grad, double lr) {
    ++t_;
    m_ = Scalar(beta1_) * m_ + Scalar(1 - beta1_) * grad;
    v_ = Scalar(beta2_) * v_ + Scalar(1 - beta2_) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const Scalar rate = Scalar(lr / c1);
    const Scalar root_c2 = Scalar(std::sqrt(c2));
    params_update(params, rate, root_c2);
  }

  std::uint64_t steps() const noexcept { return t_; }
  const Vector& first_moment() const noexcept { return m_; }
  const Vector& second_moment() const noexcept { return v_; }

 private:
  void params_update(Vector& params, Scalar rate, Scalar root_c2) {
    params.array() -= rate * m_.array() / (v_.array().sqrt() / root_c2 + Scalar(eps_));
  }

  Vector m_, v_;
  double beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
};

}  // namespace qsopt
