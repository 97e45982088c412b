#include "fouriernet/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "fouriernet/error.hpp"

namespace fouriernet::ad {

namespace {

template <typename T>
using MatR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapR = Eigen::Map<MatR<T>>;
template <typename T>
using CMapR = Eigen::Map<const MatR<T>>;

void require_rank4(const Shape& s, const char* op) {
  if (s.size() != 4) throw ShapeMismatch(std::string(op) + " expects an NCHW tensor, got " + to_string(s));
}

// Unfolds one CHW image into a (C*9) x (H*W) patch matrix (zero padding 1).
template <typename T>
void im2col(const T* image, std::size_t channels, std::size_t height, std::size_t width, T* col) {
  const std::size_t plane = height * width;
  const auto h = static_cast<long>(height), w = static_cast<long>(width);
  for (std::size_t c = 0; c < channels; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* dst = col + (c * 9 + ky * 3 + kx) * plane;
        const long dy = ky - 1, dx = kx - 1;
        const long x_lo = std::max(0L, -dx), x_hi = std::min(w, w - dx);
        for (long y = 0; y < h; ++y) {
          T* row = dst + y * w;
          const long sy = y + dy;
          if (sy < 0 || sy >= h || x_lo >= x_hi) {
            std::fill(row, row + w, T(0));
            continue;
          }
          const T* src = image + c * plane + sy * w;
          std::fill(row, row + x_lo, T(0));
          std::memcpy(row + x_lo, src + x_lo + dx, static_cast<std::size_t>(x_hi - x_lo) * sizeof(T));
          std::fill(row + x_hi, row + w, T(0));
        }
      }
    }
  }
}

// Adjoint of im2col: scatters patch-matrix gradients back onto the image.
template <typename T>
void col2im_add(const T* col, std::size_t channels, std::size_t height, std::size_t width, T* image) {
  const std::size_t plane = height * width;
  const auto h = static_cast<long>(height), w = static_cast<long>(width);
  for (std::size_t c = 0; c < channels; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* src = col + (c * 9 + ky * 3 + kx) * plane;
        const long dy = ky - 1, dx = kx - 1;
        const long x_lo = std::max(0L, -dx), x_hi = std::min(w, w - dx);
        for (long y = 0; y < h; ++y) {
          const long sy = y + dy;
          if (sy < 0 || sy >= h) continue;
          const T* row = src + y * w;
          T* dst = image + c * plane + sy * w + dx;
          for (long x = x_lo; x < x_hi; ++x) dst[x] += row[x];
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weights, const Tensor<T>& bias) {
  require_rank4(input.shape(), "conv2d");
  const auto& ws = weights.shape();
  if (ws.size() != 4 || ws[2] != 3 || ws[3] != 3) {
    throw ShapeMismatch("conv2d weights must be OutC x InC x 3 x 3, got " + to_string(ws));
  }
  const std::size_t batch = input.dim(0), in_c = input.dim(1), h = input.dim(2), w = input.dim(3);
  const std::size_t out_c = ws[0];
  if (ws[1] != in_c) {
    throw ShapeMismatch("conv2d channel mismatch: input has " + std::to_string(in_c) +
                        ", weights expect " + std::to_string(ws[1]));
  }
  if (bias.numel() != out_c) throw ShapeMismatch("conv2d bias length must equal output channels");
  if (h == 0 || w == 0) throw ShapeMismatch("conv2d needs non-empty spatial dims");

  const std::size_t plane = h * w, k = in_c * 9;
  std::vector<T> out(batch * out_c * plane);
  std::vector<T> col(k * plane);
  CMapR<T> wm(weights.data().data(), out_c, k);
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> bv(bias.data().data(), out_c);
  for (std::size_t n = 0; n < batch; ++n) {
    im2col(input.data().data() + n * in_c * plane, in_c, h, w, col.data());
    MapR<T> ym(out.data() + n * out_c * plane, out_c, plane);
    ym.noalias() = wm * CMapR<T>(col.data(), k, plane);
    ym.colwise() += bv;
  }

  return Tensor<T>::make_result(
      {batch, out_c, h, w}, std::move(out), {input, weights, bias},
      [batch, in_c, out_c, h, w](Node<T>& self) {
        const std::size_t plane = h * w, k = in_c * 9;
        Node<T>& x = *self.parents[0];
        Node<T>& wt = *self.parents[1];
        Node<T>& b = *self.parents[2];
        std::vector<T> col(k * plane);
        CMapR<T> wm(wt.value.data(), out_c, k);
        for (std::size_t n = 0; n < batch; ++n) {
          CMapR<T> dy(self.grad.data() + n * out_c * plane, out_c, plane);
          if (wt.requires_grad || x.requires_grad) {
            im2col(x.value.data() + n * in_c * plane, in_c, h, w, col.data());
          }
          if (wt.requires_grad) {
            MapR<T>(wt.grad.data(), out_c, k).noalias() += dy * CMapR<T>(col.data(), k, plane).transpose();
          }
          if (b.requires_grad) {
            for (std::size_t o = 0; o < out_c; ++o) {
              double acc = 0.0;
              const T* g = self.grad.data() + (n * out_c + o) * plane;
              for (std::size_t i = 0; i < plane; ++i) acc += g[i];
              b.grad[o] += static_cast<T>(acc);
            }
          }
          if (x.requires_grad) {
            MapR<T>(col.data(), k, plane).noalias() = wm.transpose() * dy;
            col2im_add(col.data(), in_c, h, w, x.grad.data() + n * in_c * plane);
          }
        }
      });
}

template <typename T>
Tensor<T> maxpool2(const Tensor<T>& input) {
  require_rank4(input.shape(), "maxpool2");
  const std::size_t batch = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
  if (h % 2 || w % 2) {
    throw OddSpatialDim("maxpool2 needs even spatial dims, got " + to_string(input.shape()));
  }
  const std::size_t oh = h / 2, ow = w / 2;
  std::vector<T> out(batch * c * oh * ow);
  std::vector<std::size_t> argmax(out.size());
  const T* x = input.data().data();
  for (std::size_t p = 0; p < batch * c; ++p) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const std::size_t base = p * h * w + 2 * oy * w + 2 * ox;
        const std::size_t cand[4] = {base, base + 1, base + w, base + w + 1};
        std::size_t best = cand[0];
        for (int i = 1; i < 4; ++i)
          if (x[cand[i]] > x[best]) best = cand[i];
        const std::size_t o = (p * oh + oy) * ow + ox;
        out[o] = x[best];
        argmax[o] = best;
      }
    }
  }
  return Tensor<T>::make_result({batch, c, oh, ow}, std::move(out), {input},
                                [argmax = std::move(argmax)](Node<T>& self) {
                                  auto& g = self.parents[0]->grad;
                                  for (std::size_t o = 0; o < argmax.size(); ++o) g[argmax[o]] += self.grad[o];
                                });
}

template <typename T>
Tensor<T> upsample2(const Tensor<T>& input) {
  require_rank4(input.shape(), "upsample2");
  const std::size_t batch = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
  const std::size_t oh = 2 * h, ow = 2 * w;
  std::vector<T> out(batch * c * oh * ow);
  const T* x = input.data().data();
  for (std::size_t p = 0; p < batch * c; ++p) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      const T* src = x + p * h * w + (oy / 2) * w;
      T* dst = out.data() + (p * oh + oy) * ow;
      for (std::size_t ox = 0; ox < ow; ++ox) dst[ox] = src[ox / 2];
    }
  }
  return Tensor<T>::make_result({batch, c, oh, ow}, std::move(out), {input},
                                [batch, c, h, w](Node<T>& self) {
                                  auto& g = self.parents[0]->grad;
                                  const std::size_t oh = 2 * h, ow = 2 * w;
                                  for (std::size_t p = 0; p < batch * c; ++p)
                                    for (std::size_t oy = 0; oy < oh; ++oy)
                                      for (std::size_t ox = 0; ox < ow; ++ox)
                                        g[p * h * w + (oy / 2) * w + ox / 2] +=
                                            self.grad[(p * oh + oy) * ow + ox];
                                });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& input) {
  std::vector<T> out(input.data().begin(), input.data().end());
  for (auto& v : out) v = v > T(0) ? v : T(0);
  return Tensor<T>::make_result(input.shape(), std::move(out), {input}, [](Node<T>& self) {
    auto& parent = *self.parents[0];
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      if (parent.value[i] > T(0)) parent.grad[i] += self.grad[i];
  });
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& input, double rate, bool training, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must lie in [0, 1)");
  if (!training || rate == 0.0) return input;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<T> mask(input.numel());
  for (auto& m : mask) m = uniform(rng) < rate ? T(0) : keep_scale;
  std::vector<T> out(input.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = input.data()[i] * mask[i];
  return Tensor<T>::make_result(input.shape(), std::move(out), {input},
                                [mask = std::move(mask)](Node<T>& self) {
                                  auto& g = self.parents[0]->grad;
                                  for (std::size_t i = 0; i < mask.size(); ++i) g[i] += self.grad[i] * mask[i];
                                });
}

template <typename T>
Tensor<T> softmax_channels(const Tensor<T>& input) {
  require_rank4(input.shape(), "softmax_channels");
  const std::size_t batch = input.dim(0), c = input.dim(1), plane = input.dim(2) * input.dim(3);
  std::vector<T> out(input.numel());
  const T* x = input.data().data();
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t base = n * c * plane + i;
      T mx = -std::numeric_limits<T>::infinity();
      for (std::size_t k = 0; k < c; ++k) mx = std::max(mx, x[base + k * plane]);
      double total = 0.0;
      for (std::size_t k = 0; k < c; ++k) {
        const double e = std::exp(static_cast<double>(x[base + k * plane] - mx));
        out[base + k * plane] = static_cast<T>(e);
        total += e;
      }
      for (std::size_t k = 0; k < c; ++k)
        out[base + k * plane] = static_cast<T>(static_cast<double>(out[base + k * plane]) / total);
    }
  }
  return Tensor<T>::make_result(input.shape(), out, {input}, [batch, c, plane, out](Node<T>& self) {
    auto& g = self.parents[0]->grad;
    for (std::size_t n = 0; n < batch; ++n) {
      for (std::size_t i = 0; i < plane; ++i) {
        const std::size_t base = n * c * plane + i;
        double dot = 0.0;
        for (std::size_t k = 0; k < c; ++k)
          dot += static_cast<double>(out[base + k * plane]) * self.grad[base + k * plane];
        for (std::size_t k = 0; k < c; ++k) {
          const std::size_t j = base + k * plane;
          g[j] += static_cast<T>(out[j] * (self.grad[j] - dot));
        }
      }
    }
  });
}

template <typename T>
Tensor<T> concat_channels(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ShapeMismatch("concat_channels needs at least one tensor");
  for (const auto& p : parts) require_rank4(p.shape(), "concat_channels");
  const std::size_t batch = parts[0].dim(0), h = parts[0].dim(2), w = parts[0].dim(3);
  std::size_t total_c = 0;
  std::vector<std::size_t> channels;
  for (const auto& p : parts) {
    if (p.dim(0) != batch || p.dim(2) != h || p.dim(3) != w) {
      throw ShapeMismatch("concat_channels: " + to_string(p.shape()) + " vs " + to_string(parts[0].shape()));
    }
    channels.push_back(p.dim(1));
    total_c += p.dim(1);
  }
  const std::size_t plane = h * w;
  std::vector<T> out(batch * total_c * plane);
  for (std::size_t n = 0; n < batch; ++n) {
    std::size_t offset = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const std::size_t len = channels[i] * plane;
      std::copy_n(parts[i].data().data() + n * len, len, out.data() + (n * total_c + offset) * plane);
      offset += channels[i];
    }
  }
  return Tensor<T>::make_result({batch, total_c, h, w}, std::move(out), parts,
                                [batch, total_c, plane, channels](Node<T>& self) {
                                  for (std::size_t n = 0; n < batch; ++n) {
                                    std::size_t offset = 0;
                                    for (std::size_t i = 0; i < channels.size(); ++i) {
                                      const std::size_t len = channels[i] * plane;
                                      auto& parent = *self.parents[i];
                                      if (parent.requires_grad) {
                                        const T* src = self.grad.data() + (n * total_c + offset) * plane;
                                        T* dst = parent.grad.data() + n * len;
                                        for (std::size_t j = 0; j < len; ++j) dst[j] += src[j];
                                      }
                                      offset += channels[i];
                                    }
                                  }
                                });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) throw ShapeMismatch("add: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return Tensor<T>::make_result(a.shape(), std::move(out), {a, b}, [](Node<T>& self) {
    for (auto& parent : self.parents) {
      if (!parent->requires_grad) continue;
      for (std::size_t i = 0; i < self.grad.size(); ++i) parent->grad[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, double factor) {
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<T>(a.data()[i] * factor);
  return Tensor<T>::make_result(a.shape(), std::move(out), {a}, [factor](Node<T>& self) {
    auto& g = self.parents[0]->grad;
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += static_cast<T>(self.grad[i] * factor);
  });
}

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& prediction, const Tensor<T>& target) {
  if (prediction.shape() != target.shape()) {
    throw ShapeMismatch("mse_loss: " + to_string(prediction.shape()) + " vs " + to_string(target.shape()));
  }
  const std::size_t count = prediction.numel();
  double acc = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = static_cast<double>(prediction.data()[i]) - static_cast<double>(target.data()[i]);
    acc += d * d;
  }
  const double loss = count ? acc / static_cast<double>(count) : 0.0;
  return Tensor<T>::make_result({1}, {static_cast<T>(loss)}, {prediction, target}, [count](Node<T>& self) {
    const double upstream = static_cast<double>(self.grad[0]) * 2.0 / static_cast<double>(count);
    auto& p = *self.parents[0];
    auto& t = *self.parents[1];
    for (std::size_t i = 0; i < count; ++i) {
      const double d = static_cast<double>(p.value[i]) - static_cast<double>(t.value[i]);
      if (p.requires_grad) p.grad[i] += static_cast<T>(upstream * d);
      if (t.requires_grad) t.grad[i] -= static_cast<T>(upstream * d);
    }
  });
}

template <typename T>
Tensor<T> cross_entropy_loss(const Tensor<T>& posteriors, const Tensor<T>& labels) {
  require_rank4(posteriors.shape(), "cross_entropy_loss");
  if (posteriors.shape() != labels.shape()) {
    throw ShapeMismatch("cross_entropy_loss: " + to_string(posteriors.shape()) + " vs " +
                        to_string(labels.shape()));
  }
  const std::size_t pixels = posteriors.dim(0) * posteriors.dim(2) * posteriors.dim(3);
  double acc = 0.0;
  for (std::size_t i = 0; i < posteriors.numel(); ++i) {
    const double y = labels.data()[i];
    if (y == 0.0) continue;
    acc -= y * std::log(std::max(static_cast<double>(posteriors.data()[i]), kPosteriorFloor));
  }
  const double loss = acc / static_cast<double>(pixels);
  return Tensor<T>::make_result({1}, {static_cast<T>(loss)}, {posteriors, labels}, [pixels](Node<T>& self) {
    auto& p = *self.parents[0];
    auto& y = *self.parents[1];
    const double upstream = static_cast<double>(self.grad[0]) / static_cast<double>(pixels);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double pv = p.value[i];
      const bool floored = pv < kPosteriorFloor;
      const double logp = std::log(std::max(pv, kPosteriorFloor));
      if (p.requires_grad && !floored && y.value[i] != T(0)) {
        p.grad[i] += static_cast<T>(-upstream * y.value[i] / pv);
      }
      if (y.requires_grad) y.grad[i] += static_cast<T>(-upstream * logp);
    }
  });
}

template <typename T>
Tensor<T> softmax_cross_entropy(const Tensor<T>& logits, const Tensor<T>& labels) {
  require_rank4(logits.shape(), "softmax_cross_entropy");
  if (logits.shape() != labels.shape()) {
    throw ShapeMismatch("softmax_cross_entropy: " + to_string(logits.shape()) + " vs " + to_string(labels.shape()));
  }
  const std::size_t batch = logits.dim(0), c = logits.dim(1), plane = logits.dim(2) * logits.dim(3);
  const std::size_t pixels = batch * plane;
  // log-sum-exp per pixel, kept for the backward pass
  std::vector<double> lse(pixels);
  const T* z = logits.data().data();
  const T* y = labels.data().data();
  double acc = 0.0;
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t i = 0; i < plane; ++i) {
      const std::size_t base = n * c * plane + i;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < c; ++k) mx = std::max(mx, static_cast<double>(z[base + k * plane]));
      double total = 0.0;
      for (std::size_t k = 0; k < c; ++k) total += std::exp(static_cast<double>(z[base + k * plane]) - mx);
      const double l = mx + std::log(total);
      lse[n * plane + i] = l;
      for (std::size_t k = 0; k < c; ++k) {
        const double yk = y[base + k * plane];
        if (yk != 0.0) acc -= yk * (static_cast<double>(z[base + k * plane]) - l);
      }
    }
  }
  const double loss = acc / static_cast<double>(pixels);
  return Tensor<T>::make_result(
      {1}, {static_cast<T>(loss)}, {logits, labels}, [batch, c, plane, pixels, lse](Node<T>& self) {
        auto& zn = *self.parents[0];
        auto& yn = *self.parents[1];
        const double upstream = static_cast<double>(self.grad[0]) / static_cast<double>(pixels);
        for (std::size_t n = 0; n < batch; ++n) {
          for (std::size_t i = 0; i < plane; ++i) {
            const std::size_t base = n * c * plane + i;
            const double l = lse[n * plane + i];
            double ysum = 0.0;
            for (std::size_t k = 0; k < c; ++k) ysum += yn.value[base + k * plane];
            for (std::size_t k = 0; k < c; ++k) {
              const std::size_t j = base + k * plane;
              const double logp = static_cast<double>(zn.value[j]) - l;
              if (zn.requires_grad) zn.grad[j] += static_cast<T>(upstream * (ysum * std::exp(logp) - yn.value[j]));
              if (yn.requires_grad) yn.grad[j] += static_cast<T>(-upstream * logp);
            }
          }
        }
      });
}

#define FOURIERNET_INSTANTIATE_OPS(T)                                                      \
  template Tensor<T> conv2d<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);      \
  template Tensor<T> maxpool2<T>(const Tensor<T>&);                                        \
  template Tensor<T> upsample2<T>(const Tensor<T>&);                                       \
  template Tensor<T> relu<T>(const Tensor<T>&);                                            \
  template Tensor<T> dropout<T>(const Tensor<T>&, double, bool, Rng&);                     \
  template Tensor<T> softmax_channels<T>(const Tensor<T>&);                                \
  template Tensor<T> concat_channels<T>(const std::vector<Tensor<T>>&);                    \
  template Tensor<T> add<T>(const Tensor<T>&, const Tensor<T>&);                           \
  template Tensor<T> scale<T>(const Tensor<T>&, double);                                   \
  template Tensor<T> mse_loss<T>(const Tensor<T>&, const Tensor<T>&);                      \
  template Tensor<T> cross_entropy_loss<T>(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> softmax_cross_entropy<T>(const Tensor<T>&, const Tensor<T>&);

FOURIERNET_INSTANTIATE_OPS(float)
FOURIERNET_INSTANTIATE_OPS(double)

#undef FOURIERNET_INSTANTIATE_OPS

}  // namespace fouriernet::ad
