// SPDX-License-Identifier: Apache-2.0
#include "mvmt/autodiff/ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mvmt/error.hpp"

namespace mvmt::ad {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const RowMat>;
using MMap = Eigen::Map<RowMat>;
using CVec = Eigen::Map<const Eigen::ArrayXd>;
using MVec = Eigen::Map<Eigen::ArrayXd>;
using StridedVec = Eigen::Map<const Eigen::ArrayXd, 0, Eigen::InnerStride<>>;
using MStridedVec = Eigen::Map<Eigen::ArrayXd, 0, Eigen::InnerStride<>>;

CMap cmat(const Tensor& t) { return CMap(t.data().data(), t.dim(0), t.dim(1)); }
MMap mmat(const Tensor& t) { return MMap(t.mutable_data().data(), t.dim(0), t.dim(1)); }
CMap cgrad(const Tensor& t) { return CMap(t.grad().data(), t.dim(0), t.dim(1)); }
MMap gmat(const Tensor& t) { return MMap(t.grad_buffer().data(), t.dim(0), t.dim(1)); }
CVec cvec(const Tensor& t) { return CVec(t.data().data(), static_cast<Eigen::Index>(t.size())); }
CVec gvec_c(const Tensor& t) { return CVec(t.grad().data(), static_cast<Eigen::Index>(t.size())); }
MVec gvec(const Tensor& t) { return MVec(t.grad_buffer().data(), static_cast<Eigen::Index>(t.size())); }

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (!t.defined()) throw ShapeError(std::string(op) + ": undefined operand");
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_str(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  }
}

}  // namespace

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  if (a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: inner dimensions differ: " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  }
  Tensor out = Tensor::zeros({a.dim(0), b.dim(1)});
  mmat(out).noalias() = cmat(a) * cmat(b);
  if (tape.wants_grad({&a, &b})) {
    tape.record(out, [a, b, out]() mutable {
      const auto dc = cgrad(out);
      if (a.requires_grad()) gmat(a).noalias() += dc * cmat(b).transpose();
      if (b.requires_grad()) gmat(b).noalias() += cmat(a).transpose() * dc;
    });
  }
  return out;
}

Tensor matmul_bt(Tape& tape, const Tensor& a, const Tensor& b, double alpha) {
  require_rank(a, 2, "matmul_bt");
  require_rank(b, 2, "matmul_bt");
  if (a.dim(1) != b.dim(1)) {
    throw ShapeError("matmul_bt: inner dimensions differ: " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()) + "^T");
  }
  Tensor out = Tensor::zeros({a.dim(0), b.dim(0)});
  mmat(out).noalias() = alpha * (cmat(a) * cmat(b).transpose());
  if (tape.wants_grad({&a, &b})) {
    tape.record(out, [a, b, out, alpha]() mutable {
      const auto dc = cgrad(out);
      if (a.requires_grad()) gmat(a).noalias() += alpha * (dc * cmat(b));
      if (b.requires_grad()) gmat(b).noalias() += alpha * (dc.transpose() * cmat(a));
    });
  }
  return out;
}

Tensor transpose(Tape& tape, const Tensor& x) {
  require_rank(x, 2, "transpose");
  Tensor out = Tensor::zeros({x.dim(1), x.dim(0)});
  mmat(out) = cmat(x).transpose();
  if (tape.wants_grad({&x})) {
    tape.record(out, [x, out]() mutable { gmat(x) += cgrad(out).transpose(); });
  }
  return out;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = a.clone();
  MVec(out.mutable_data().data(), static_cast<Eigen::Index>(out.size())) += cvec(b);
  if (tape.wants_grad({&a, &b})) {
    tape.record(out, [a, b, out]() mutable {
      if (a.requires_grad()) gvec(a) += gvec_c(out);
      if (b.requires_grad()) gvec(b) += gvec_c(out);
    });
  }
  return out;
}

Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.clone();
  MVec(out.mutable_data().data(), static_cast<Eigen::Index>(out.size())) -= cvec(b);
  if (tape.wants_grad({&a, &b})) {
    tape.record(out, [a, b, out]() mutable {
      if (a.requires_grad()) gvec(a) += gvec_c(out);
      if (b.requires_grad()) gvec(b) -= gvec_c(out);
    });
  }
  return out;
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.clone();
  MVec(out.mutable_data().data(), static_cast<Eigen::Index>(out.size())) *= cvec(b);
  if (tape.wants_grad({&a, &b})) {
    tape.record(out, [a, b, out]() mutable {
      if (a.requires_grad()) gvec(a) += gvec_c(out) * cvec(b);
      if (b.requires_grad()) gvec(b) += gvec_c(out) * cvec(a);
    });
  }
  return out;
}

Tensor scale(Tape& tape, const Tensor& x, double factor) {
  Tensor out = x.clone();
  MVec(out.mutable_data().data(), static_cast<Eigen::Index>(out.size())) *= factor;
  if (tape.wants_grad({&x})) {
    tape.record(out, [x, out, factor]() mutable { gvec(x) += factor * gvec_c(out); });
  }
  return out;
}

Tensor scale_by(Tape& tape, const Tensor& x, const Tensor& s) {
  if (s.size() != 1) throw ShapeError("scale_by: scale must have one element, got " + shape_str(s.shape()));
  const double factor = s[0];
  Tensor out = x.clone();
  MVec(out.mutable_data().data(), static_cast<Eigen::Index>(out.size())) *= factor;
  if (tape.wants_grad({&x, &s})) {
    tape.record(out, [x, s, out]() mutable {
      if (x.requires_grad()) gvec(x) += s[0] * gvec_c(out);
      if (s.requires_grad()) s.grad_buffer()[0] += (gvec_c(out) * cvec(x)).sum();
    });
  }
  return out;
}

Tensor add_bias(Tape& tape, const Tensor& x, const Tensor& bias) {
  require_rank(x, 2, "add_bias");
  if (bias.size() != x.dim(1)) {
    throw ShapeError("add_bias: bias " + shape_str(bias.shape()) + " does not match columns of " +
                     shape_str(x.shape()));
  }
  Tensor out = x.clone();
  const Eigen::Map<const Eigen::RowVectorXd> b(bias.data().data(), static_cast<Eigen::Index>(bias.size()));
  mmat(out).rowwise() += b;
  if (tape.wants_grad({&x, &bias})) {
    tape.record(out, [x, bias, out]() mutable {
      if (x.requires_grad()) gvec(x) += gvec_c(out);
      if (bias.requires_grad()) {
        Eigen::Map<Eigen::RowVectorXd> gb(bias.grad_buffer().data(), static_cast<Eigen::Index>(bias.size()));
        gb += cgrad(out).colwise().sum();
      }
    });
  }
  return out;
}

Tensor relu(Tape& tape, const Tensor& x) {
  Tensor out = x.clone();
  for (auto& v : out.mutable_data()) v = v > 0.0 ? v : 0.0;
  if (tape.wants_grad({&x})) {
    tape.record(out, [x, out]() mutable {
      auto g = x.grad_buffer();
      const auto go = out.grad();
      const auto xs = x.data();
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (xs[i] > 0.0) g[i] += go[i];
      }
    });
  }
  return out;
}

Tensor sigmoid(Tape& tape, const Tensor& x) {
  Tensor out = x.clone();
  for (auto& v : out.mutable_data()) {
    if (v >= 0.0) {
      v = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      v = e / (1.0 + e);
    }
  }
  if (tape.wants_grad({&x})) {
    tape.record(out, [x, out]() mutable {
      const auto y = cvec(out);
      gvec(x) += gvec_c(out) * y * (1.0 - y);
    });
  }
  return out;
}

Tensor softmax_rows(Tape& tape, const Tensor& x) {
  require_rank(x, 2, "softmax_rows");
  const auto in = x.data();
  for (double v : in) {
    if (!std::isfinite(v)) throw DomainError("softmax_rows: non-finite input");
  }
  const std::size_t rows = x.dim(0);
  const std::size_t cols = x.dim(1);
  Tensor out = Tensor::zeros({rows, cols});
  auto o = out.mutable_data();
  const auto n = static_cast<Eigen::Index>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const CVec row(in.data() + r * cols, n);
    MVec dst(o.data() + r * cols, n);
    dst = (row - row.maxCoeff()).exp();
    dst *= 1.0 / dst.sum();
  }
  if (tape.wants_grad({&x})) {
    tape.record(out, [x, out]() mutable {
      const auto y = cmat(out);
      const auto dy = cgrad(out);
      const Eigen::VectorXd dots = (y.array() * dy.array()).rowwise().sum();
      gmat(x).array() += y.array() * (dy.colwise() - dots).array();
    });
  }
  return out;
}

Tensor layer_norm(Tape& tape, const Tensor& x, const Tensor& gain, const Tensor& shift, double eps) {
  require_rank(x, 2, "layer_norm");
  const std::size_t rows = x.dim(0);
  const std::size_t cols = x.dim(1);
  if (cols < 2) throw ShapeError("layer_norm: needs at least 2 columns, got " + shape_str(x.shape()));
  if (gain.size() != cols || shift.size() != cols) {
    throw ShapeError("layer_norm: gain/shift " + shape_str(gain.shape()) + "/" + shape_str(shift.shape()) +
                     " do not match " + shape_str(x.shape()));
  }
  if (!(eps > 0.0)) throw ContractError("layer_norm: eps must be positive");

  RowMat xhat(rows, cols);
  Eigen::VectorXd inv_std(rows);
  const auto xm = cmat(x);
  for (std::size_t r = 0; r < rows; ++r) {
    const double mu = xm.row(r).mean();
    const double var = (xm.row(r).array() - mu).square().mean();
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (xm.row(r).array() - mu) * inv_std[r];
  }
  const Eigen::Map<const Eigen::RowVectorXd> g(gain.data().data(), static_cast<Eigen::Index>(cols));
  const Eigen::Map<const Eigen::RowVectorXd> b(shift.data().data(), static_cast<Eigen::Index>(cols));
  Tensor out = Tensor::zeros({rows, cols});
  mmat(out) = (xhat.array().rowwise() * g.array()).rowwise() + b.array();

  if (tape.wants_grad({&x, &gain, &shift})) {
    tape.record(out, [x, gain, shift, out, xhat = std::move(xhat), inv_std = std::move(inv_std)]() mutable {
      const auto dy = cgrad(out);
      const auto n = static_cast<double>(dy.cols());
      if (gain.requires_grad()) {
        Eigen::Map<Eigen::RowVectorXd> gg(gain.grad_buffer().data(), dy.cols());
        gg += (dy.array() * xhat.array()).colwise().sum().matrix();
      }
      if (shift.requires_grad()) {
        Eigen::Map<Eigen::RowVectorXd> gs(shift.grad_buffer().data(), dy.cols());
        gs += dy.colwise().sum();
      }
      if (x.requires_grad()) {
        const Eigen::Map<const Eigen::RowVectorXd> gv(gain.data().data(), dy.cols());
        const RowMat dxhat = (dy.array().rowwise() * gv.array()).matrix();
        const Eigen::VectorXd s1 = dxhat.rowwise().sum();
        const Eigen::VectorXd s2 = (dxhat.array() * xhat.array()).rowwise().sum();
        auto gx = gmat(x);
        for (Eigen::Index r = 0; r < dy.rows(); ++r) {
          gx.row(r).array() +=
              (inv_std[r] / n) * (n * dxhat.row(r).array() - s1[r] - xhat.row(r).array() * s2[r]);
        }
      }
    });
  }
  return out;
}

Tensor dropout(Tape& tape, const Tensor& x, double rate, Rng& rng, bool train) {
  if (rate < 0.0 || rate >= 1.0) throw ContractError("dropout: rate must be in [0, 1)");
  if (!train || rate == 0.0) return x;
  const double keep = 1.0 - rate;
  const double inv_keep = 1.0 / keep;
  std::vector<double> mask(x.size());
  for (auto& m : mask) m = rng.bernoulli(keep) ? inv_keep : 0.0;
  Tensor out = x.clone();
  auto o = out.mutable_data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= mask[i];
  if (tape.wants_grad({&x})) {
    tape.record(out, [x, out, mask = std::move(mask)]() mutable {
      gvec(x) += gvec_c(out) * CVec(mask.data(), static_cast<Eigen::Index>(mask.size()));
    });
  }
  return out;
}

namespace {

struct ConvGeometry {
  std::size_t channels, height, width, filters, kh, kw, stride, padding, out_h, out_w;

  // Range of output columns whose input column ox*stride + j - padding lies in [0, width).
  std::pair<std::size_t, std::size_t> valid_cols(std::size_t j) const {
    return valid(j, width, out_w);
  }
  std::pair<std::size_t, std::size_t> valid_rows(std::size_t i) const {
    return valid(i, height, out_h);
  }

 private:
  std::pair<std::size_t, std::size_t> valid(std::size_t k, std::size_t extent, std::size_t out) const {
    const long s = static_cast<long>(stride);
    const long off = static_cast<long>(k) - static_cast<long>(padding);
    long lo = off >= 0 ? 0 : (-off + s - 1) / s;
    long hi = (static_cast<long>(extent) - 1 - off);
    hi = hi < 0 ? -1 : hi / s;
    hi = std::min(hi, static_cast<long>(out) - 1);
    if (hi < lo) return {0, 0};
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi + 1)};
  }
};

}  // namespace

Tensor conv2d(Tape& tape, const Tensor& input, const Tensor& kernels, const Tensor& bias,
              std::size_t stride, std::size_t padding) {
  require_rank(input, 3, "conv2d");
  require_rank(kernels, 4, "conv2d");
  if (stride == 0) throw ContractError("conv2d: stride must be positive");
  if (kernels.dim(1) != input.dim(0)) {
    throw ShapeError("conv2d: kernel channels " + shape_str(kernels.shape()) + " do not match input " +
                     shape_str(input.shape()));
  }
  if (bias.size() != kernels.dim(0)) {
    throw ShapeError("conv2d: bias " + shape_str(bias.shape()) + " does not match filters " +
                     shape_str(kernels.shape()));
  }
  ConvGeometry geo{input.dim(0), input.dim(1), input.dim(2), kernels.dim(0), kernels.dim(2), kernels.dim(3),
                   stride, padding, 0, 0};
  const std::size_t ph = geo.height + 2 * padding;
  const std::size_t pw = geo.width + 2 * padding;
  if (geo.kh > ph || geo.kw > pw) {
    throw ShapeError("conv2d: kernel " + shape_str(kernels.shape()) + " larger than padded input " +
                     shape_str(input.shape()) + " with padding " + std::to_string(padding));
  }
  geo.out_h = (ph - geo.kh) / stride + 1;
  geo.out_w = (pw - geo.kw) / stride + 1;

  Tensor out = Tensor::zeros({geo.filters, geo.out_h, geo.out_w});
  auto o = out.mutable_data();
  const auto in = input.data();
  const auto k = kernels.data();
  for (std::size_t f = 0; f < geo.filters; ++f) {
    double* of = o.data() + f * geo.out_h * geo.out_w;
    std::fill(of, of + geo.out_h * geo.out_w, bias[f]);
    for (std::size_t c = 0; c < geo.channels; ++c) {
      const double* ic = in.data() + c * geo.height * geo.width;
      for (std::size_t i = 0; i < geo.kh; ++i) {
        const auto [ylo, yhi] = geo.valid_rows(i);
        for (std::size_t j = 0; j < geo.kw; ++j) {
          const auto [xlo, xhi] = geo.valid_cols(j);
          const double w = k[((f * geo.channels + c) * geo.kh + i) * geo.kw + j];
          if (xhi <= xlo) continue;
          const auto n = static_cast<Eigen::Index>(xhi - xlo);
          for (std::size_t oy = ylo; oy < yhi; ++oy) {
            const double* irow = ic + (oy * stride + i - padding) * geo.width + j - padding;
            MVec(of + oy * geo.out_w + xlo, n) += w * StridedVec(irow + xlo * stride, n, Eigen::InnerStride<>(stride));
          }
        }
      }
    }
  }

  if (tape.wants_grad({&input, &kernels, &bias})) {
    tape.record(out, [input, kernels, bias, out, geo]() mutable {
      const auto go = out.grad();
      const auto in = input.data();
      const auto k = kernels.data();
      const std::size_t plane = geo.out_h * geo.out_w;
      if (bias.requires_grad()) {
        auto gb = bias.grad_buffer();
        for (std::size_t f = 0; f < geo.filters; ++f) {
          double s = 0.0;
          for (std::size_t p = 0; p < plane; ++p) s += go[f * plane + p];
          gb[f] += s;
        }
      }
      std::span<double> gi = input.requires_grad() ? input.grad_buffer() : std::span<double>();
      std::span<double> gk = kernels.requires_grad() ? kernels.grad_buffer() : std::span<double>();
      const std::size_t stride = geo.stride;
      const std::size_t padding = geo.padding;
      for (std::size_t f = 0; f < geo.filters; ++f) {
        const double* gof = go.data() + f * plane;
        for (std::size_t c = 0; c < geo.channels; ++c) {
          const std::size_t ioff = c * geo.height * geo.width;
          for (std::size_t i = 0; i < geo.kh; ++i) {
            const auto [ylo, yhi] = geo.valid_rows(i);
            for (std::size_t j = 0; j < geo.kw; ++j) {
              const auto [xlo, xhi] = geo.valid_cols(j);
              const std::size_t kidx = ((f * geo.channels + c) * geo.kh + i) * geo.kw + j;
              const double w = k[kidx];
              double acc = 0.0;
              if (xhi <= xlo) continue;
              const auto n = static_cast<Eigen::Index>(xhi - xlo);
              for (std::size_t oy = ylo; oy < yhi; ++oy) {
                const std::size_t base = ioff + (oy * stride + i - padding) * geo.width + j - padding + xlo * stride;
                const CVec grow(gof + oy * geo.out_w + xlo, n);
                acc += (grow * StridedVec(in.data() + base, n, Eigen::InnerStride<>(stride))).sum();
                if (!gi.empty()) MStridedVec(gi.data() + base, n, Eigen::InnerStride<>(stride)) += w * grow;
              }
              if (!gk.empty()) gk[kidx] += acc;
            }
          }
        }
      }
    });
  }
  return out;
}

Tensor max_pool2d(Tape& tape, const Tensor& input, std::size_t size) {
  require_rank(input, 3, "max_pool2d");
  if (size == 0) throw ContractError("max_pool2d: window size must be positive");
  const std::size_t channels = input.dim(0);
  const std::size_t height = input.dim(1);
  const std::size_t width = input.dim(2);
  const std::size_t oh = height / size;
  const std::size_t ow = width / size;
  if (oh == 0 || ow == 0) {
    throw ShapeError("max_pool2d: window " + std::to_string(size) + " larger than input " +
                     shape_str(input.shape()));
  }
  Tensor out = Tensor::zeros({channels, oh, ow});
  std::vector<std::size_t> argmax(out.size());
  auto o = out.mutable_data();
  const auto in = input.data();
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        std::size_t best = c * height * width + (y * size) * width + x * size;
        for (std::size_t dy = 0; dy < size; ++dy) {
          for (std::size_t dx = 0; dx < size; ++dx) {
            const std::size_t idx = c * height * width + (y * size + dy) * width + x * size + dx;
            if (in[idx] > in[best]) best = idx;
          }
        }
        const std::size_t oidx = (c * oh + y) * ow + x;
        o[oidx] = in[best];
        argmax[oidx] = best;
      }
    }
  }
  if (tape.wants_grad({&input})) {
    tape.record(out, [input, out, argmax = std::move(argmax)]() mutable {
      auto gi = input.grad_buffer();
      const auto go = out.grad();
      for (std::size_t i = 0; i < go.size(); ++i) gi[argmax[i]] += go[i];
    });
  }
  return out;
}

Tensor reshape(Tape& tape, const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) {
    throw ShapeError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  }
  Tensor out(std::move(shape), std::vector<double>(x.data().begin(), x.data().end()));
  if (tape.wants_grad({&x})) {
    tape.record(out, [x, out]() mutable { gvec(x) += gvec_c(out); });
  }
  return out;
}

Tensor slice_cols(Tape& tape, const Tensor& x, std::size_t begin, std::size_t count) {
  require_rank(x, 2, "slice_cols");
  if (count == 0 || begin + count > x.dim(1)) {
    throw ShapeError("slice_cols: columns [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                     ") out of range for " + shape_str(x.shape()));
  }
  Tensor out = Tensor::zeros({x.dim(0), count});
  mmat(out) = cmat(x).middleCols(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
  if (tape.wants_grad({&x})) {
    tape.record(out, [x, out, begin, count]() mutable {
      gmat(x).middleCols(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count)) += cgrad(out);
    });
  }
  return out;
}

Tensor concat_cols(Tape& tape, const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no operands");
  std::size_t cols = 0;
  for (const auto& p : parts) {
    require_rank(p, 2, "concat_cols");
    if (p.dim(0) != parts.front().dim(0)) {
      throw ShapeError("concat_cols: row counts differ: " + shape_str(parts.front().shape()) + " vs " +
                       shape_str(p.shape()));
    }
    cols += p.dim(1);
  }
  Tensor out = Tensor::zeros({parts.front().dim(0), cols});
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    mmat(out).middleCols(at, static_cast<Eigen::Index>(p.dim(1))) = cmat(p);
    at += static_cast<Eigen::Index>(p.dim(1));
  }
  if (tape.wants_grad(parts)) {
    tape.record(out, [parts, out]() mutable {
      Eigen::Index at = 0;
      for (auto& p : parts) {
        const auto w = static_cast<Eigen::Index>(p.dim(1));
        if (p.requires_grad()) gmat(p) += cgrad(out).middleCols(at, w);
        at += w;
      }
    });
  }
  return out;
}

Tensor concat_rows(Tape& tape, const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no operands");
  std::size_t rows = 0;
  for (const auto& p : parts) {
    require_rank(p, 2, "concat_rows");
    if (p.dim(1) != parts.front().dim(1)) {
      throw ShapeError("concat_rows: column counts differ: " + shape_str(parts.front().shape()) + " vs " +
                       shape_str(p.shape()));
    }
    rows += p.dim(0);
  }
  std::vector<double> data;
  data.reserve(rows * parts.front().dim(1));
  for (const auto& p : parts) data.insert(data.end(), p.data().begin(), p.data().end());
  Tensor out({rows, parts.front().dim(1)}, std::move(data));
  if (tape.wants_grad(parts)) {
    tape.record(out, [parts, out]() mutable {
      std::size_t at = 0;
      const auto go = out.grad();
      for (auto& p : parts) {
        if (p.requires_grad()) p.accumulate_grad(go.subspan(at, p.size()));
        at += p.size();
      }
    });
  }
  return out;
}

Tensor broadcast_rows(Tape& tape, const Tensor& row, std::size_t rows) {
  if (rows == 0) throw ShapeError("broadcast_rows: row count must be positive");
  const std::size_t cols = row.size();
  Tensor out = Tensor::zeros({rows, cols});
  const Eigen::Map<const Eigen::RowVectorXd> r(row.data().data(), static_cast<Eigen::Index>(cols));
  mmat(out).rowwise() = r;
  if (tape.wants_grad({&row})) {
    tape.record(out, [row, out]() mutable {
      Eigen::Map<Eigen::RowVectorXd> g(row.grad_buffer().data(), static_cast<Eigen::Index>(row.size()));
      g += cgrad(out).colwise().sum();
    });
  }
  return out;
}

Tensor sum(Tape& tape, const Tensor& x) {
  Tensor out = Tensor::scalar(cvec(x).sum());
  if (tape.wants_grad({&x})) {
    tape.record(out, [x, out]() mutable { gvec(x) += out.grad()[0]; });
  }
  return out;
}

Tensor mean(Tape& tape, const Tensor& x) {
  const double n = static_cast<double>(x.size());
  Tensor out = Tensor::scalar(cvec(x).sum() / n);
  if (tape.wants_grad({&x})) {
    tape.record(out, [x, out, n]() mutable { gvec(x) += out.grad()[0] / n; });
  }
  return out;
}

}  // namespace mvmt::ad
