#include "qsopt/qnet.hpp"

#include <cmath>

#include "qsopt/error.hpp"
#include "qsopt/random.hpp"

namespace qsopt {

std::size_t QNetShape::parameter_count() const {
  const auto c1 = static_cast<std::size_t>(conv1), c2 = static_cast<std::size_t>(conv2);
  const auto h = static_cast<std::size_t>(hidden), a = static_cast<std::size_t>(actions);
  return c1 * static_cast<std::size_t>(channels) * 9 + c1 + c2 * c1 * 9 + c2 +
         h * static_cast<std::size_t>(features()) + h + a * h + a + h + 1;
}

namespace {

// Patches of a 3x3 same-padded convolution. `x` is channels x (batch * rows * cols);
// row index of `col` is channel * 9 + ky * 3 + kx.
template <class Matrix>
void im2col(const Matrix& x, int rows, int cols, Matrix& col) {
  const Eigen::Index channels = x.rows();
  const Eigen::Index pixels = rows * cols;
  const Eigen::Index batch = x.cols() / pixels;
  col.setZero(channels * 9, x.cols());
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int y = 0; y < rows; ++y) {
      for (int xc = 0; xc < cols; ++xc) {
        const Eigen::Index j = b * pixels + y * cols + xc;
        for (int ky = 0; ky < 3; ++ky) {
          const int yy = y + ky - 1;
          if (yy < 0 || yy >= rows) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int xx = xc + kx - 1;
            if (xx < 0 || xx >= cols) continue;
            const Eigen::Index src = b * pixels + yy * cols + xx;
            for (Eigen::Index c = 0; c < channels; ++c) col(c * 9 + ky * 3 + kx, j) = x(c, src);
          }
        }
      }
    }
  }
}

// Adjoint of im2col.
template <class Matrix>
void col2im(const Matrix& col, int rows, int cols, Eigen::Index channels, Matrix& x) {
  const Eigen::Index pixels = rows * cols;
  const Eigen::Index batch = col.cols() / pixels;
  x.setZero(channels, col.cols());
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int y = 0; y < rows; ++y) {
      for (int xc = 0; xc < cols; ++xc) {
        const Eigen::Index j = b * pixels + y * cols + xc;
        for (int ky = 0; ky < 3; ++ky) {
          const int yy = y + ky - 1;
          if (yy < 0 || yy >= rows) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int xx = xc + kx - 1;
            if (xx < 0 || xx >= cols) continue;
            const Eigen::Index dst = b * pixels + yy * cols + xx;
            for (Eigen::Index c = 0; c < channels; ++c) x(c, dst) += col(c * 9 + ky * 3 + kx, j);
          }
        }
      }
    }
  }
}

}  // namespace

template <class Scalar>
QNet<Scalar>::QNet(const QNetShape& shape, std::uint64_t seed) : shape_(shape) {
  if (shape.channels < 1 || shape.rows < 1 || shape.cols < 1 || shape.aux < 0 || shape.actions < 1 ||
      shape.conv1 < 1 || shape.conv2 < 1 || shape.hidden < 1) {
    throw ConfigError("network layer sizes must be positive");
  }
  const QNetShape& s = shape_;
  std::size_t at = 0;
  auto take = [&](std::size_t n) {
    const std::size_t here = at;
    at += n;
    return here;
  };
  off_.w1 = take(static_cast<std::size_t>(s.conv1) * s.channels * 9);
  off_.b1 = take(static_cast<std::size_t>(s.conv1));
  off_.w2 = take(static_cast<std::size_t>(s.conv2) * s.conv1 * 9);
  off_.b2 = take(static_cast<std::size_t>(s.conv2));
  off_.wd = take(static_cast<std::size_t>(s.hidden) * static_cast<std::size_t>(s.features()));
  off_.bd = take(static_cast<std::size_t>(s.hidden));
  off_.wa = take(static_cast<std::size_t>(s.actions) * s.hidden);
  off_.ba = take(static_cast<std::size_t>(s.actions));
  off_.wv = take(static_cast<std::size_t>(s.hidden));
  off_.bv = take(1);
  off_.end = at;

  params_ = Vector::Zero(static_cast<Eigen::Index>(at));
  Rng rng(seed);
  auto fill = [&](std::size_t from, std::size_t count, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t i = 0; i < count; ++i) {
      params_(static_cast<Eigen::Index>(from + i)) = static_cast<Scalar>((2.0 * rng.uniform() - 1.0) * limit);
    }
  };
  fill(off_.w1, off_.b1 - off_.w1, s.channels * 9.0, s.conv1 * 9.0);
  fill(off_.w2, off_.b2 - off_.w2, s.conv1 * 9.0, s.conv2 * 9.0);
  fill(off_.wd, off_.bd - off_.wd, s.features(), s.hidden);
  fill(off_.wa, off_.ba - off_.wa, s.hidden, s.actions);
  fill(off_.wv, off_.bv - off_.wv, s.hidden, 1.0);
}

template <class Scalar>
typename QNet<Scalar>::Matrix QNet<Scalar>::forward(const Matrix& grid, const Matrix& aux, Cache* cache) const {
  const QNetShape& s = shape_;
  if (grid.rows() != s.grid_size() || aux.rows() != s.aux || grid.cols() != aux.cols()) {
    throw TrainingError("network input shape mismatch");
  }
  const Eigen::Index batch = grid.cols();
  const Eigen::Index pixels = s.pixels();

  Cache local;
  Cache& c = cache ? *cache : local;

  // Column b of `grid` is [channel][pixel]: a pixels x channels column-major block.
  Matrix input(s.channels, batch * pixels);
  for (Eigen::Index b = 0; b < batch; ++b) {
    input.middleCols(b * pixels, pixels) =
        Eigen::Map<const Matrix>(grid.col(b).data(), pixels, s.channels).transpose();
  }

  im2col(input, s.rows, s.cols, c.col1);
  c.act1.noalias() = mat(off_.w1, s.conv1, s.channels * 9) * c.col1;
  c.act1 = (c.act1.colwise() + vec(off_.b1, s.conv1)).cwiseMax(Scalar(0));

  im2col(c.act1, s.rows, s.cols, c.col2);
  c.act2.noalias() = mat(off_.w2, s.conv2, s.conv1 * 9) * c.col2;
  c.act2 = (c.act2.colwise() + vec(off_.b2, s.conv2)).cwiseMax(Scalar(0));

  // act2 stores each sample's conv2 x pixels block contiguously.
  const Eigen::Index flat = static_cast<Eigen::Index>(s.conv2) * pixels;
  c.features.resize(s.features(), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    c.features.col(b).head(flat) = Eigen::Map<const Vector>(c.act2.data() + b * flat, flat);
  }
  c.features.bottomRows(s.aux) = aux;

  c.hidden.noalias() = mat(off_.wd, s.hidden, s.features()) * c.features;
  c.hidden = (c.hidden.colwise() + vec(off_.bd, s.hidden)).cwiseMax(Scalar(0));

  c.advantage.noalias() = mat(off_.wa, s.actions, s.hidden) * c.hidden;
  c.advantage.colwise() += vec(off_.ba, s.actions);
  c.value.noalias() = mat(off_.wv, 1, s.hidden) * c.hidden;
  c.value.array() += params_(static_cast<Eigen::Index>(off_.bv));

  Matrix q = c.advantage.rowwise() - c.advantage.colwise().mean();
  q.rowwise() += c.value.row(0);
  return q;
}

template <class Scalar>
typename QNet<Scalar>::Vector QNet<Scalar>::gradient(const Cache& c, const Matrix& dq) const {
  const QNetShape& s = shape_;
  const Eigen::Index batch = dq.cols();
  const Eigen::Index pixels = s.pixels();
  Vector g = Vector::Zero(params_.size());
  auto gmat = [&](std::size_t at, Eigen::Index r, Eigen::Index cols) {
    return Eigen::Map<Matrix>(g.data() + at, r, cols);
  };
  auto gvec = [&](std::size_t at, Eigen::Index n) { return Eigen::Map<Vector>(g.data() + at, n); };

  const Matrix d_adv = dq.rowwise() - dq.colwise().mean();
  const RowVector d_val = dq.colwise().sum();

  gmat(off_.wa, s.actions, s.hidden).noalias() = d_adv * c.hidden.transpose();
  gvec(off_.ba, s.actions) = d_adv.rowwise().sum();
  gmat(off_.wv, 1, s.hidden).noalias() = d_val * c.hidden.transpose();
  g(static_cast<Eigen::Index>(off_.bv)) = d_val.sum();

  Matrix d_hidden = mat(off_.wa, s.actions, s.hidden).transpose() * d_adv;
  d_hidden.noalias() += mat(off_.wv, 1, s.hidden).transpose() * d_val;
  d_hidden = d_hidden.cwiseProduct((c.hidden.array() > Scalar(0)).template cast<Scalar>().matrix());

  gmat(off_.wd, s.hidden, s.features()).noalias() = d_hidden * c.features.transpose();
  gvec(off_.bd, s.hidden) = d_hidden.rowwise().sum();
  const Matrix d_features = mat(off_.wd, s.hidden, s.features()).transpose() * d_hidden;

  const Eigen::Index flat = static_cast<Eigen::Index>(s.conv2) * pixels;
  Matrix d_act2(s.conv2, batch * pixels);
  for (Eigen::Index b = 0; b < batch; ++b) {
    Eigen::Map<Vector>(d_act2.data() + b * flat, flat) = d_features.col(b).head(flat);
  }
  d_act2 = d_act2.cwiseProduct((c.act2.array() > Scalar(0)).template cast<Scalar>().matrix());

  gmat(off_.w2, s.conv2, s.conv1 * 9).noalias() = d_act2 * c.col2.transpose();
  gvec(off_.b2, s.conv2) = d_act2.rowwise().sum();
  const Matrix d_col2 = mat(off_.w2, s.conv2, s.conv1 * 9).transpose() * d_act2;

  Matrix d_act1;
  col2im(d_col2, s.rows, s.cols, s.conv1, d_act1);
  d_act1 = d_act1.cwiseProduct((c.act1.array() > Scalar(0)).template cast<Scalar>().matrix());

  gmat(off_.w1, s.conv1, s.channels * 9).noalias() = d_act1 * c.col1.transpose();
  gvec(off_.b1, s.conv1) = d_act1.rowwise().sum();
  return g;
}

template <class Scalar>
void QNet<Scalar>::copy_from(const QNet& other) {
  if (!(other.shape_ == shape_)) throw TrainingError("cannot copy parameters between different network shapes");
  params_ = other.params_;
}

template class QNet<float>;
template class QNet<double>;

}  // namespace qsopt
