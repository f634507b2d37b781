#pragma once

#include "tryon/ag/ops.hpp"

namespace tryon::ag {

namespace detail {

// im2col for one sample: x[C,H,W] -> col[C*k*k, Ho*Wo] (zero padding).
template <typename T>
void im2col(const T* x, int cin, int h, int w, int k, int stride, int pad,
            int ho, int wo, T* col) {
  for (int c = 0; c < cin; ++c)
    for (int ky = 0; ky < k; ++ky)
      for (int kx = 0; kx < k; ++kx) {
        T* dst = col + ((static_cast<size_t>(c) * k + ky) * k + kx) * (static_cast<size_t>(ho) * wo);
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) {
            for (int ox = 0; ox < wo; ++ox) dst[oy * wo + ox] = T(0);
            continue;
          }
          const T* src = x + (static_cast<size_t>(c) * h + iy) * w;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride - pad + kx;
            dst[oy * wo + ox] = (ix >= 0 && ix < w) ? src[ix] : T(0);
          }
        }
      }
}

template <typename T>
void col2im_accum(const T* col, int cin, int h, int w, int k, int stride, int pad,
                  int ho, int wo, T* x) {
  for (int c = 0; c < cin; ++c)
    for (int ky = 0; ky < k; ++ky)
      for (int kx = 0; kx < k; ++kx) {
        const T* src = col + ((static_cast<size_t>(c) * k + ky) * k + kx) * (static_cast<size_t>(ho) * wo);
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) continue;
          T* dst = x + (static_cast<size_t>(c) * h + iy) * w;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < w) dst[ix] += src[oy * wo + ox];
          }
        }
      }
}

}  // namespace detail

// 2-D convolution, NCHW. weight [Cout,Cin,k,k], bias [Cout] (optional:
// pass an empty Var for no bias).
template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias,
              int stride = 1, int pad = 0) {
  const int n = x.shape()[0], cin = x.shape()[1], h = x.shape()[2], w = x.shape()[3];
  const int cout = weight.shape()[0], k = weight.shape()[2];
  assert(weight.shape()[1] == cin && weight.shape()[3] == k);
  const int ho = (h + 2 * pad - k) / stride + 1;
  const int wo = (w + 2 * pad - k) / stride + 1;
  const int ck = cin * k * k;
  const std::int64_t owo = static_cast<std::int64_t>(ho) * wo;

  Tensor<T> out({n, cout, ho, wo});
  Tensor<T> col({std::max(ck, 1), std::max(static_cast<int>(owo), 1)});
  const bool has_bias = bias.defined();
  for (int ni = 0; ni < n; ++ni) {
    detail::im2col(x.value().data() + static_cast<size_t>(ni) * cin * h * w, cin, h, w,
                   k, stride, pad, ho, wo, col.data());
    ConstMatMap<T> W(weight.value().data(), cout, ck);
    ConstMatMap<T> C(col.data(), ck, owo);
    MatMap<T> O(out.data() + static_cast<size_t>(ni) * cout * owo, cout, owo);
    O.noalias() = W * C;
    if (has_bias)
      for (int co = 0; co < cout; ++co)
        O.row(co).array() += bias.value().v[static_cast<size_t>(co)];
  }

  std::vector<Var<T>> parents = has_bias ? std::vector<Var<T>>{x, weight, bias}
                                         : std::vector<Var<T>>{x, weight};
  return Var<T>::make_op(std::move(out), parents,
                         [n, cin, h, w, cout, k, stride, pad, ho, wo, ck, owo,
                          has_bias](Node<T>& self) {
    auto& px = *self.parents[0];
    auto& pw = *self.parents[1];
    Tensor<T> col({ck, static_cast<int>(owo)});
    Tensor<T> dcol({ck, static_cast<int>(owo)});
    const bool need_x = px.requires_grad;
    const bool need_w = pw.requires_grad;
    if (need_x) px.ensure_grad();
    if (need_w) pw.ensure_grad();
    for (int ni = 0; ni < n; ++ni) {
      ConstMatMap<T> G(self.grad.data() + static_cast<size_t>(ni) * cout * owo, cout, owo);
      if (need_w) {
        detail::im2col(px.val.data() + static_cast<size_t>(ni) * cin * h * w, cin, h, w,
                       k, stride, pad, ho, wo, col.data());
        ConstMatMap<T> C(col.data(), ck, owo);
        MatMap<T>(pw.grad.data(), cout, ck).noalias() += G * C.transpose();
      }
      if (need_x) {
        ConstMatMap<T> W(pw.val.data(), cout, ck);
        MatMap<T>(dcol.data(), ck, owo).noalias() = W.transpose() * G;
        detail::col2im_accum(dcol.data(), cin, h, w, k, stride, pad, ho, wo,
                             px.grad.data() + static_cast<size_t>(ni) * cin * h * w);
      }
    }
    if (has_bias && self.parents[2]->requires_grad) {
      auto& pb = *self.parents[2];
      pb.ensure_grad();
      for (int ni = 0; ni < n; ++ni)
        for (int co = 0; co < cout; ++co) {
          T s = T(0);
          const T* g = self.grad.data() + (static_cast<size_t>(ni) * cout + co) * owo;
          for (std::int64_t i = 0; i < owo; ++i) s += g[i];
          pb.grad.v[static_cast<size_t>(co)] += s;
        }
    }
  });
}

// 2x2 average pooling, stride 2.
template <typename T>
Var<T> avg_pool2(const Var<T>& x) {
  const int n = x.shape()[0], c = x.shape()[1], h = x.shape()[2], w = x.shape()[3];
  const int ho = h / 2, wo = w / 2;
  Tensor<T> out({n, c, ho, wo});
  for (int ni = 0; ni < n; ++ni)
    for (int ci = 0; ci < c; ++ci)
      for (int y = 0; y < ho; ++y)
        for (int xx = 0; xx < wo; ++xx)
          out.at(ni, ci, y, xx) =
              T(0.25) * (x.value().at(ni, ci, 2 * y, 2 * xx) + x.value().at(ni, ci, 2 * y, 2 * xx + 1) +
                         x.value().at(ni, ci, 2 * y + 1, 2 * xx) + x.value().at(ni, ci, 2 * y + 1, 2 * xx + 1));
  return Var<T>::make_op(std::move(out), {x}, [n, c, ho, wo](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int ni = 0; ni < n; ++ni)
      for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < ho; ++y)
          for (int xx = 0; xx < wo; ++xx) {
            const T g = T(0.25) * self.grad.at(ni, ci, y, xx);
            p.grad.at(ni, ci, 2 * y, 2 * xx) += g;
            p.grad.at(ni, ci, 2 * y, 2 * xx + 1) += g;
            p.grad.at(ni, ci, 2 * y + 1, 2 * xx) += g;
            p.grad.at(ni, ci, 2 * y + 1, 2 * xx + 1) += g;
          }
  });
}

template <typename T>
Var<T> upsample_nearest2(const Var<T>& x) {
  const int n = x.shape()[0], c = x.shape()[1], h = x.shape()[2], w = x.shape()[3];
  Tensor<T> out({n, c, 2 * h, 2 * w});
  for (int ni = 0; ni < n; ++ni)
    for (int ci = 0; ci < c; ++ci)
      for (int y = 0; y < 2 * h; ++y)
        for (int xx = 0; xx < 2 * w; ++xx)
          out.at(ni, ci, y, xx) = x.value().at(ni, ci, y / 2, xx / 2);
  return Var<T>::make_op(std::move(out), {x}, [n, c, h, w](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int ni = 0; ni < n; ++ni)
      for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < 2 * h; ++y)
          for (int xx = 0; xx < 2 * w; ++xx)
            p.grad.at(ni, ci, y / 2, xx / 2) += self.grad.at(ni, ci, y, xx);
  });
}

namespace detail {
struct BilinearTap {
  int x0, x1, y0, y1;
  double fx, fy;
};
inline BilinearTap tap_at(double x, double y, int w, int h) {
  x = std::min(std::max(x, 0.0), static_cast<double>(w - 1));
  y = std::min(std::max(y, 0.0), static_cast<double>(h - 1));
  BilinearTap t;
  t.x0 = std::min(static_cast<int>(x), w - 1);
  t.y0 = std::min(static_cast<int>(y), h - 1);
  t.x1 = std::min(t.x0 + 1, w - 1);
  t.y1 = std::min(t.y0 + 1, h - 1);
  t.fx = x - t.x0;
  t.fy = y - t.y0;
  return t;
}
}  // namespace detail

// Bilinear resize to (ho, wo) with the half-pixel-aligned source mapping.
// Gradient flows to the input only (the grid is fixed).
template <typename T>
Var<T> resize_bilinear(const Var<T>& x, int ho, int wo) {
  const int n = x.shape()[0], c = x.shape()[1], h = x.shape()[2], w = x.shape()[3];
  if (ho == h && wo == w) return x;
  Tensor<T> out({n, c, ho, wo});
  const double sx = static_cast<double>(w) / wo, sy = static_cast<double>(h) / ho;
  for (int ni = 0; ni < n; ++ni)
    for (int y = 0; y < ho; ++y)
      for (int xx = 0; xx < wo; ++xx) {
        const auto t = detail::tap_at((xx + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5, w, h);
        for (int ci = 0; ci < c; ++ci) {
          const T v00 = x.value().at(ni, ci, t.y0, t.x0);
          const T v01 = x.value().at(ni, ci, t.y0, t.x1);
          const T v10 = x.value().at(ni, ci, t.y1, t.x0);
          const T v11 = x.value().at(ni, ci, t.y1, t.x1);
          out.at(ni, ci, y, xx) =
              (T(1) - T(t.fy)) * ((T(1) - T(t.fx)) * v00 + T(t.fx) * v01) +
              T(t.fy) * ((T(1) - T(t.fx)) * v10 + T(t.fx) * v11);
        }
      }
  return Var<T>::make_op(std::move(out), {x}, [n, c, h, w, ho, wo, sx, sy](Node<T>& self) {
    auto& p = *self.parents[0];
    if (!p.requires_grad) return;
    p.ensure_grad();
    for (int ni = 0; ni < n; ++ni)
      for (int y = 0; y < ho; ++y)
        for (int xx = 0; xx < wo; ++xx) {
          const auto t = detail::tap_at((xx + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5, w, h);
          for (int ci = 0; ci < c; ++ci) {
            const T g = self.grad.at(ni, ci, y, xx);
            p.grad.at(ni, ci, t.y0, t.x0) += g * (T(1) - T(t.fy)) * (T(1) - T(t.fx));
            p.grad.at(ni, ci, t.y0, t.x1) += g * (T(1) - T(t.fy)) * T(t.fx);
            p.grad.at(ni, ci, t.y1, t.x0) += g * T(t.fy) * (T(1) - T(t.fx));
            p.grad.at(ni, ci, t.y1, t.x1) += g * T(t.fy) * T(t.fx);
          }
        }
  });
}

// Bilinear sampling of x [N,C,H,W] at grid [N,2,Ho,Wo] pixel coordinates
// (channel 0 = x, channel 1 = y), clamp-to-edge. Differentiable in both the
// input and the grid; the coordinate gradient is zero where the position is
// clamped outside the raster, matching the clamp's true derivative.
template <typename T>
Var<T> grid_sample(const Var<T>& x, const Var<T>& grid) {
  const int n = x.shape()[0], c = x.shape()[1], h = x.shape()[2], w = x.shape()[3];
  const int ho = grid.shape()[2], wo = grid.shape()[3];
  assert(grid.shape()[1] == 2 && grid.shape()[0] == n);
  Tensor<T> out({n, c, ho, wo});
  for (int ni = 0; ni < n; ++ni)
    for (int y = 0; y < ho; ++y)
      for (int xx = 0; xx < wo; ++xx) {
        const auto t = detail::tap_at(static_cast<double>(grid.value().at(ni, 0, y, xx)),
                                       static_cast<double>(grid.value().at(ni, 1, y, xx)), w, h);
        for (int ci = 0; ci < c; ++ci) {
          const T v00 = x.value().at(ni, ci, t.y0, t.x0);
          const T v01 = x.value().at(ni, ci, t.y0, t.x1);
          const T v10 = x.value().at(ni, ci, t.y1, t.x0);
          const T v11 = x.value().at(ni, ci, t.y1, t.x1);
          out.at(ni, ci, y, xx) =
              (T(1) - T(t.fy)) * ((T(1) - T(t.fx)) * v00 + T(t.fx) * v01) +
              T(t.fy) * ((T(1) - T(t.fx)) * v10 + T(t.fx) * v11);
        }
      }
  return Var<T>::make_op(std::move(out), {x, grid}, [n, c, h, w, ho, wo](Node<T>& self) {
    auto& px = *self.parents[0];
    auto& pg = *self.parents[1];
    const bool need_x = px.requires_grad, need_g = pg.requires_grad;
    if (need_x) px.ensure_grad();
    if (need_g) pg.ensure_grad();
    for (int ni = 0; ni < n; ++ni)
      for (int y = 0; y < ho; ++y)
        for (int xx = 0; xx < wo; ++xx) {
          const T gx = pg.val.at(ni, 0, y, xx);
          const T gy = pg.val.at(ni, 1, y, xx);
          const auto t = detail::tap_at(static_cast<double>(gx), static_cast<double>(gy), w, h);
          const bool inx = gx > T(0) && gx < T(w - 1);
          const bool iny = gy > T(0) && gy < T(h - 1);
          T dgx = T(0), dgy = T(0);
          for (int ci = 0; ci < c; ++ci) {
            const T g = self.grad.at(ni, ci, y, xx);
            if (g == T(0)) continue;
            const T v00 = px.val.at(ni, ci, t.y0, t.x0);
            const T v01 = px.val.at(ni, ci, t.y0, t.x1);
            const T v10 = px.val.at(ni, ci, t.y1, t.x0);
            const T v11 = px.val.at(ni, ci, t.y1, t.x1);
            if (need_x) {
              px.grad.at(ni, ci, t.y0, t.x0) += g * (T(1) - T(t.fy)) * (T(1) - T(t.fx));
              px.grad.at(ni, ci, t.y0, t.x1) += g * (T(1) - T(t.fy)) * T(t.fx);
              px.grad.at(ni, ci, t.y1, t.x0) += g * T(t.fy) * (T(1) - T(t.fx));
              px.grad.at(ni, ci, t.y1, t.x1) += g * T(t.fy) * T(t.fx);
            }
            if (need_g) {
              if (inx) dgx += g * ((T(1) - T(t.fy)) * (v01 - v00) + T(t.fy) * (v11 - v10));
              if (iny) dgy += g * ((T(1) - T(t.fx)) * (v10 - v00) + T(t.fx) * (v11 - v01));
            }
          }
          if (need_g) {
            pg.grad.at(ni, 0, y, xx) += dgx;
            pg.grad.at(ni, 1, y, xx) += dgy;
          }
        }
  });
}

// Instance normalization over spatial positions, per (n, c). gamma/beta are
// optional [C] affine parameters (pass undefined Vars for parameter-free IN).
template <typename T>
Var<T> instance_norm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta,
                     T eps = T(1e-5)) {
  const int n = x.shape()[0], c = x.shape()[1], h = x.shape()[2], w = x.shape()[3];
  const std::int64_t hw = static_cast<std::int64_t>(h) * w;
  Tensor<T> out({n, c, h, w});
  Tensor<T> inv_sigma({n, c});
  const bool affine = gamma.defined();
  for (int ni = 0; ni < n; ++ni)
    for (int ci = 0; ci < c; ++ci) {
      const T* src = x.value().data() + (static_cast<size_t>(ni) * c + ci) * hw;
      T mu = T(0);
      for (std::int64_t i = 0; i < hw; ++i) mu += src[i];
      mu /= static_cast<T>(hw);
      T var = T(0);
      for (std::int64_t i = 0; i < hw; ++i) var += (src[i] - mu) * (src[i] - mu);
      var /= static_cast<T>(hw);
      const T is = T(1) / std::sqrt(var + eps);
      inv_sigma.m(ni, ci) = is;
      T* dst = out.data() + (static_cast<size_t>(ni) * c + ci) * hw;
      const T g = affine ? gamma.value().v[static_cast<size_t>(ci)] : T(1);
      const T b = affine ? beta.value().v[static_cast<size_t>(ci)] : T(0);
      for (std::int64_t i = 0; i < hw; ++i) dst[i] = (src[i] - mu) * is * g + b;
    }
  auto is_ptr = std::make_shared<Tensor<T>>(std::move(inv_sigma));
  std::vector<Var<T>> parents = affine ? std::vector<Var<T>>{x, gamma, beta}
                                       : std::vector<Var<T>>{x};
  return Var<T>::make_op(std::move(out), parents, [n, c, hw, affine, is_ptr](Node<T>& self) {
    auto& px = *self.parents[0];
    for (int ni = 0; ni < n; ++ni)
      for (int ci = 0; ci < c; ++ci) {
        const T is = is_ptr->m(ni, ci);
        const T g = affine ? self.parents[1]->val.v[static_cast<size_t>(ci)] : T(1);
        const T b = affine ? self.parents[2]->val.v[static_cast<size_t>(ci)] : T(0);
        const T* go = self.grad.data() + (static_cast<size_t>(ni) * c + ci) * hw;
        const T* yo = self.val.data() + (static_cast<size_t>(ni) * c + ci) * hw;
        // Recover the normalized activation y_hat = (out - beta) / gamma.
        T sum_g = T(0), sum_gy = T(0);
        for (std::int64_t i = 0; i < hw; ++i) {
          const T yh = g != T(0) ? (yo[i] - b) / g : T(0);
          sum_g += go[i];
          sum_gy += go[i] * yh;
        }
        if (affine) {
          auto& pg = *self.parents[1];
          auto& pb = *self.parents[2];
          if (pg.requires_grad) {
            pg.ensure_grad();
            pg.grad.v[static_cast<size_t>(ci)] += sum_gy;
          }
          if (pb.requires_grad) {
            pb.ensure_grad();
            pb.grad.v[static_cast<size_t>(ci)] += sum_g;
          }
        }
        if (px.requires_grad) {
          px.ensure_grad();
          T* gx = px.grad.data() + (static_cast<size_t>(ni) * c + ci) * hw;
          const T mean_g = sum_g / static_cast<T>(hw);
          const T mean_gy = sum_gy / static_cast<T>(hw);
          for (std::int64_t i = 0; i < hw; ++i) {
            const T yh = g != T(0) ? (yo[i] - b) / g : T(0);
            gx[i] += g * is * (go[i] - mean_g - yh * mean_gy);
          }
        }
      }
  });
}

}  // namespace tryon::ag
