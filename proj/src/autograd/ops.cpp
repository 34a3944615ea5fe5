#include "panosr/autograd/ops.hpp"

#include <algorithm>
#include <cmath>

#include "panosr/core/image.hpp"
#include "panosr/core/kernels.hpp"

namespace panosr::ag {

namespace {

inline std::size_t usize(std::int64_t n) { return static_cast<std::size_t>(n); }

}  // namespace

Var add(const Var& a, const Var& b) {
  require_same_shape(a->value, b->value, "add");
  Tensor out(a->value.shape());
  kern::add(out.data(), a->value.data(), b->value.data(), usize(out.numel()));
  return make_node(std::move(out), {a, b}, [a, b](Node& n) {
    if (a->requires_grad) a->accumulate(n.grad);
    if (b->requires_grad) b->accumulate(n.grad);
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a->value, b->value, "sub");
  Tensor out(a->value.shape());
  kern::sub(out.data(), a->value.data(), b->value.data(), usize(out.numel()));
  return make_node(std::move(out), {a, b}, [a, b](Node& n) {
    if (a->requires_grad) a->accumulate(n.grad);
    if (b->requires_grad) {
      Tensor g(n.grad.shape());
      kern::axpy(g.data(), n.grad.data(), -1.0, usize(g.numel()));
      b->accumulate(g);
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a->value, b->value, "mul");
  Tensor out(a->value.shape());
  kern::mul(out.data(), a->value.data(), b->value.data(), usize(out.numel()));
  return make_node(std::move(out), {a, b}, [a, b](Node& n) {
    Tensor g(n.grad.shape());
    if (a->requires_grad) {
      kern::mul(g.data(), n.grad.data(), b->value.data(), usize(g.numel()));
      a->accumulate(g);
    }
    if (b->requires_grad) {
      kern::mul(g.data(), n.grad.data(), a->value.data(), usize(g.numel()));
      b->accumulate(g);
    }
  });
}

Var scale(const Var& a, double s) {
  Tensor out = a->value;
  kern::scale(out.data(), s, usize(out.numel()));
  return make_node(std::move(out), {a}, [a, s](Node& n) {
    Tensor g = n.grad;
    kern::scale(g.data(), s, usize(g.numel()));
    a->accumulate(g);
  });
}

Var add_scalar(const Var& a, double c) {
  Tensor out = a->value;
  for (std::int64_t i = 0; i < out.numel(); ++i) out[i] += c;
  return make_node(std::move(out), {a},
                   [a](Node& n) { a->accumulate(n.grad); });
}

Var neg(const Var& a) { return scale(a, -1.0); }

Var relu(const Var& a) {
  Tensor out = a->value;
  for (std::int64_t i = 0; i < out.numel(); ++i) out[i] = std::max(0.0, out[i]);
  return make_node(std::move(out), {a}, [a](Node& n) {
    Tensor g(n.grad.shape());
    for (std::int64_t i = 0; i < g.numel(); ++i)
      g[i] = a->value[i] > 0.0 ? n.grad[i] : 0.0;
    a->accumulate(g);
  });
}

Var leaky_relu(const Var& a, double slope) {
  Tensor out = a->value;
  for (std::int64_t i = 0; i < out.numel(); ++i)
    if (out[i] < 0.0) out[i] *= slope;
  return make_node(std::move(out), {a}, [a, slope](Node& n) {
    Tensor g(n.grad.shape());
    for (std::int64_t i = 0; i < g.numel(); ++i)
      g[i] = a->value[i] > 0.0 ? n.grad[i] : slope * n.grad[i];
    a->accumulate(g);
  });
}

Var sigmoid(const Var& a) {
  Tensor out = a->value;
  for (std::int64_t i = 0; i < out.numel(); ++i)
    out[i] = 1.0 / (1.0 + std::exp(-out[i]));
  auto node = make_node(std::move(out), {a}, nullptr);
  if (node->requires_grad) {
    node->backprop = [a](Node& n) {
      Tensor g(n.grad.shape());
      for (std::int64_t i = 0; i < g.numel(); ++i) {
        const double s = n.value[i];
        g[i] = n.grad[i] * s * (1.0 - s);
      }
      a->accumulate(g);
    };
  }
  return node;
}

Var add_channel_bias(const Var& x, const Var& bias) {
  require_chw(x->value, "add_channel_bias");
  const std::int64_t c = x->value.dim(0);
  if (bias->value.numel() != c)
    throw std::invalid_argument("add_channel_bias: bias size mismatch");
  const std::int64_t plane = x->value.dim(1) * x->value.dim(2);
  Tensor out = x->value;
  for (std::int64_t ch = 0; ch < c; ++ch) {
    const double b = bias->value[ch];
    double* p = out.data() + ch * plane;
    for (std::int64_t i = 0; i < plane; ++i) p[i] += b;
  }
  return make_node(std::move(out), {x, bias}, [x, bias, c, plane](Node& n) {
    if (x->requires_grad) x->accumulate(n.grad);
    if (bias->requires_grad) {
      Tensor g({c});
      for (std::int64_t ch = 0; ch < c; ++ch)
        g[ch] = kern::sum(n.grad.data() + ch * plane, usize(plane));
      bias->accumulate(g);
    }
  });
}

namespace {

struct ConvDims {
  std::int64_t cin, h, w;
  std::int64_t cout, cin_g, kh, kw;
  std::int64_t oh, ow;
  int stride, pad, groups;
};

ConvDims conv_dims(const Tensor& x, const Tensor& w, int stride, int pad,
                   int groups) {
  require_chw(x, "conv2d input");
  if (w.rank() != 4) throw std::invalid_argument("conv2d: weight must be 4-D");
  ConvDims d;
  d.cin = x.dim(0);
  d.h = x.dim(1);
  d.w = x.dim(2);
  d.cout = w.dim(0);
  d.cin_g = w.dim(1);
  d.kh = w.dim(2);
  d.kw = w.dim(3);
  d.stride = stride;
  d.pad = pad;
  d.groups = groups;
  if (stride < 1 || pad < 0 || groups < 1)
    throw std::invalid_argument("conv2d: bad stride/pad/groups");
  if (d.cin % groups != 0 || d.cout % groups != 0 ||
      d.cin / groups != d.cin_g)
    throw std::invalid_argument("conv2d: channel/group mismatch");
  d.oh = (d.h + 2 * pad - d.kh) / stride + 1;
  d.ow = (d.w + 2 * pad - d.kw) / stride + 1;
  if (d.oh < 1 || d.ow < 1)
    throw std::invalid_argument("conv2d: output would be empty");
  return d;
}

void conv2d_forward(const Tensor& x, const Tensor& w, const Tensor* bias,
                    const ConvDims& d, Tensor& out) {
  const std::int64_t cout_g = d.cout / d.groups;
  for (std::int64_t co = 0; co < d.cout; ++co) {
    double* out_plane = out.data() + co * d.oh * d.ow;
    if (bias) {
      const double b = (*bias)[co];
      for (std::int64_t i = 0; i < d.oh * d.ow; ++i) out_plane[i] = b;
    }
    const std::int64_t g = co / cout_g;
    for (std::int64_t ci_g = 0; ci_g < d.cin_g; ++ci_g) {
      const std::int64_t ci = g * d.cin_g + ci_g;
      const double* in_plane = x.data() + ci * d.h * d.w;
      const double* wk = w.data() + ((co * d.cin_g + ci_g) * d.kh) * d.kw;
      for (std::int64_t ky = 0; ky < d.kh; ++ky) {
        for (std::int64_t kx = 0; kx < d.kw; ++kx) {
          const double wv = wk[ky * d.kw + kx];
          if (wv == 0.0) continue;
          if (d.stride == 1) {
            // valid output column range for this tap
            const std::int64_t ox0 = std::max<std::int64_t>(0, d.pad - kx);
            const std::int64_t ox1 =
                std::min<std::int64_t>(d.ow, d.w - kx + d.pad);
            if (ox1 <= ox0) continue;
            for (std::int64_t oy = 0; oy < d.oh; ++oy) {
              const std::int64_t iy = oy + ky - d.pad;
              if (iy < 0 || iy >= d.h) continue;
              kern::axpy(out_plane + oy * d.ow + ox0,
                         in_plane + iy * d.w + (ox0 + kx - d.pad), wv,
                         usize(ox1 - ox0));
            }
          } else {
            for (std::int64_t oy = 0; oy < d.oh; ++oy) {
              const std::int64_t iy = oy * d.stride + ky - d.pad;
              if (iy < 0 || iy >= d.h) continue;
              for (std::int64_t ox = 0; ox < d.ow; ++ox) {
                const std::int64_t ix = ox * d.stride + kx - d.pad;
                if (ix < 0 || ix >= d.w) continue;
                out_plane[oy * d.ow + ox] += wv * in_plane[iy * d.w + ix];
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace

Var conv2d(const Var& x, const Var& w, const Var& bias, int stride, int pad,
           int groups) {
  const ConvDims d = conv_dims(x->value, w->value, stride, pad, groups);
  if (bias && bias->value.numel() != d.cout)
    throw std::invalid_argument("conv2d: bias size mismatch");

  Tensor out({d.cout, d.oh, d.ow});
  conv2d_forward(x->value, w->value, bias ? &bias->value : nullptr, d, out);

  std::vector<Var> parents{x, w};
  if (bias) parents.push_back(bias);
  return make_node(std::move(out), std::move(parents),
                   [x, w, bias, d](Node& n) {
    const Tensor& go = n.grad;
    const std::int64_t cout_g = d.cout / d.groups;

    if (x->requires_grad) {
      Tensor gx(x->value.shape());
      for (std::int64_t co = 0; co < d.cout; ++co) {
        const double* go_plane = go.data() + co * d.oh * d.ow;
        const std::int64_t g = co / cout_g;
        for (std::int64_t ci_g = 0; ci_g < d.cin_g; ++ci_g) {
          const std::int64_t ci = g * d.cin_g + ci_g;
          double* gx_plane = gx.data() + ci * d.h * d.w;
          const double* wk =
              w->value.data() + ((co * d.cin_g + ci_g) * d.kh) * d.kw;
          for (std::int64_t ky = 0; ky < d.kh; ++ky) {
            for (std::int64_t kx = 0; kx < d.kw; ++kx) {
              const double wv = wk[ky * d.kw + kx];
              if (wv == 0.0) continue;
              if (d.stride == 1) {
                const std::int64_t ox0 = std::max<std::int64_t>(0, d.pad - kx);
                const std::int64_t ox1 =
                    std::min<std::int64_t>(d.ow, d.w - kx + d.pad);
                if (ox1 <= ox0) continue;
                for (std::int64_t oy = 0; oy < d.oh; ++oy) {
                  const std::int64_t iy = oy + ky - d.pad;
                  if (iy < 0 || iy >= d.h) continue;
                  kern::axpy(gx_plane + iy * d.w + (ox0 + kx - d.pad),
                             go_plane + oy * d.ow + ox0, wv, usize(ox1 - ox0));
                }
              } else {
                for (std::int64_t oy = 0; oy < d.oh; ++oy) {
                  const std::int64_t iy = oy * d.stride + ky - d.pad;
                  if (iy < 0 || iy >= d.h) continue;
                  for (std::int64_t ox = 0; ox < d.ow; ++ox) {
                    const std::int64_t ix = ox * d.stride + kx - d.pad;
                    if (ix < 0 || ix >= d.w) continue;
                    gx_plane[iy * d.w + ix] += wv * go_plane[oy * d.ow + ox];
                  }
                }
              }
            }
          }
        }
      }
      x->accumulate(gx);
    }

    if (w->requires_grad) {
      Tensor gw(w->value.shape());
      for (std::int64_t co = 0; co < d.cout; ++co) {
        const double* go_plane = go.data() + co * d.oh * d.ow;
        const std::int64_t g = co / cout_g;
        for (std::int64_t ci_g = 0; ci_g < d.cin_g; ++ci_g) {
          const std::int64_t ci = g * d.cin_g + ci_g;
          const double* in_plane = x->value.data() + ci * d.h * d.w;
          double* gwk = gw.data() + ((co * d.cin_g + ci_g) * d.kh) * d.kw;
          for (std::int64_t ky = 0; ky < d.kh; ++ky) {
            for (std::int64_t kx = 0; kx < d.kw; ++kx) {
              double acc = 0.0;
              if (d.stride == 1) {
                const std::int64_t ox0 = std::max<std::int64_t>(0, d.pad - kx);
                const std::int64_t ox1 =
                    std::min<std::int64_t>(d.ow, d.w - kx + d.pad);
                if (ox1 <= ox0) continue;
                for (std::int64_t oy = 0; oy < d.oh; ++oy) {
                  const std::int64_t iy = oy + ky - d.pad;
                  if (iy < 0 || iy >= d.h) continue;
                  acc += kern::dot(go_plane + oy * d.ow + ox0,
                                   in_plane + iy * d.w + (ox0 + kx - d.pad),
                                   usize(ox1 - ox0));
                }
              } else {
                for (std::int64_t oy = 0; oy < d.oh; ++oy) {
                  const std::int64_t iy = oy * d.stride + ky - d.pad;
                  if (iy < 0 || iy >= d.h) continue;
                  for (std::int64_t ox = 0; ox < d.ow; ++ox) {
                    const std::int64_t ix = ox * d.stride + kx - d.pad;
                    if (ix < 0 || ix >= d.w) continue;
                    acc += go_plane[oy * d.ow + ox] * in_plane[iy * d.w + ix];
                  }
                }
              }
              gwk[ky * d.kw + kx] += acc;
            }
          }
        }
      }
      w->accumulate(gw);
    }

    if (bias && bias->requires_grad) {
      Tensor gb({d.cout});
      for (std::int64_t co = 0; co < d.cout; ++co)
        gb[co] = kern::sum(go.data() + co * d.oh * d.ow, usize(d.oh * d.ow));
      bias->accumulate(gb);
    }
  });
}

Var linear(const Var& x, const Var& w, const Var& bias) {
  if (w->value.rank() != 2)
    throw std::invalid_argument("linear: weight must be 2-D");
  const std::int64_t m = w->value.dim(0);
  const std::int64_t k = w->value.dim(1);
  if (x->value.numel() != k)
    throw std::invalid_argument("linear: input size mismatch");
  if (bias && bias->value.numel() != m)
    throw std::invalid_argument("linear: bias size mismatch");

  Tensor out({m});
  for (std::int64_t i = 0; i < m; ++i) {
    out[i] = kern::dot(w->value.data() + i * k, x->value.data(), usize(k)) +
             (bias ? bias->value[i] : 0.0);
  }
  std::vector<Var> parents{x, w};
  if (bias) parents.push_back(bias);
  return make_node(std::move(out), std::move(parents),
                   [x, w, bias, m, k](Node& n) {
    if (x->requires_grad) {
      Tensor gx(x->value.shape());
      for (std::int64_t i = 0; i < m; ++i)
        kern::axpy(gx.data(), w->value.data() + i * k, n.grad[i], usize(k));
      x->accumulate(gx);
    }
    if (w->requires_grad) {
      Tensor gw(w->value.shape());
      for (std::int64_t i = 0; i < m; ++i)
        kern::axpy(gw.data() + i * k, x->value.data(), n.grad[i], usize(k));
      w->accumulate(gw);
    }
    if (bias && bias->requires_grad) bias->accumulate(n.grad);
  });
}

Var matmul(const Var& a, const Var& b) {
  if (a->value.rank() != 2 || b->value.rank() != 2 ||
      a->value.dim(1) != b->value.dim(0))
    throw std::invalid_argument("matmul: shape mismatch");
  const std::int64_t m = a->value.dim(0);
  const std::int64_t k = a->value.dim(1);
  const std::int64_t n_cols = b->value.dim(1);

  Tensor out({m, n_cols});
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t kk = 0; kk < k; ++kk)
      kern::axpy(out.data() + i * n_cols, b->value.data() + kk * n_cols,
                 a->value[i * k + kk], usize(n_cols));

  return make_node(std::move(out), {a, b}, [a, b, m, k, n_cols](Node& n) {
    if (a->requires_grad) {
      Tensor ga({m, k});
      for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t kk = 0; kk < k; ++kk)
          ga[i * k + kk] = kern::dot(n.grad.data() + i * n_cols,
                                     b->value.data() + kk * n_cols,
                                     usize(n_cols));
      a->accumulate(ga);
    }
    if (b->requires_grad) {
      Tensor gb({k, n_cols});
      for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t kk = 0; kk < k; ++kk)
          kern::axpy(gb.data() + kk * n_cols, n.grad.data() + i * n_cols,
                     a->value[i * k + kk], usize(n_cols));
      b->accumulate(gb);
    }
  });
}

Var scale_rows(const Var& a, const Var& s) {
  if (a->value.rank() != 2 || s->value.numel() != a->value.dim(0))
    throw std::invalid_argument("scale_rows: shape mismatch");
  const std::int64_t m = a->value.dim(0);
  const std::int64_t n_cols = a->value.dim(1);
  Tensor out = a->value;
  for (std::int64_t i = 0; i < m; ++i)
    kern::scale(out.data() + i * n_cols, s->value[i], usize(n_cols));
  return make_node(std::move(out), {a, s}, [a, s, m, n_cols](Node& n) {
    if (a->requires_grad) {
      Tensor ga(a->value.shape());
      for (std::int64_t i = 0; i < m; ++i)
        kern::axpy(ga.data() + i * n_cols, n.grad.data() + i * n_cols,
                   s->value[i], usize(n_cols));
      a->accumulate(ga);
    }
    if (s->requires_grad) {
      Tensor gs(s->value.shape());
      for (std::int64_t i = 0; i < m; ++i)
        gs[i] = kern::dot(n.grad.data() + i * n_cols,
                          a->value.data() + i * n_cols, usize(n_cols));
      s->accumulate(gs);
    }
  });
}

Var mix_rows(const Var& bank, const Var& w) {
  if (bank->value.rank() != 2 || w->value.numel() != bank->value.dim(0))
    throw std::invalid_argument("mix_rows: shape mismatch");
  const std::int64_t k = bank->value.dim(0);
  const std::int64_t n_cols = bank->value.dim(1);
  Tensor out({n_cols});
  for (std::int64_t i = 0; i < k; ++i)
    kern::axpy(out.data(), bank->value.data() + i * n_cols, w->value[i],
               usize(n_cols));
  return make_node(std::move(out), {bank, w}, [bank, w, k, n_cols](Node& n) {
    if (bank->requires_grad) {
      Tensor gb(bank->value.shape());
      for (std::int64_t i = 0; i < k; ++i)
        kern::axpy(gb.data() + i * n_cols, n.grad.data(), w->value[i],
                   usize(n_cols));
      bank->accumulate(gb);
    }
    if (w->requires_grad) {
      Tensor gw(w->value.shape());
      for (std::int64_t i = 0; i < k; ++i)
        gw[i] = kern::dot(n.grad.data(), bank->value.data() + i * n_cols,
                          usize(n_cols));
      w->accumulate(gw);
    }
  });
}

Var softmax(const Var& x) {
  const std::int64_t k = x->value.numel();
  Tensor out(x->value.shape());
  double maxv = x->value[0];
  for (std::int64_t i = 1; i < k; ++i) maxv = std::max(maxv, x->value[i]);
  double total = 0.0;
  for (std::int64_t i = 0; i < k; ++i) {
    out[i] = std::exp(x->value[i] - maxv);
    total += out[i];
  }
  for (std::int64_t i = 0; i < k; ++i) out[i] /= total;
  auto node = make_node(std::move(out), {x}, nullptr);
  if (node->requires_grad) {
    node->backprop = [x, k](Node& n) {
      const double inner = kern::dot(n.grad.data(), n.value.data(), usize(k));
      Tensor g(x->value.shape());
      for (std::int64_t i = 0; i < k; ++i)
        g[i] = n.value[i] * (n.grad[i] - inner);
      x->accumulate(g);
    };
  }
  return node;
}

Var reshape(const Var& x, std::vector<std::int64_t> shape) {
  Tensor out = x->value.reshaped(std::move(shape));
  return make_node(std::move(out), {x}, [x](Node& n) {
    x->accumulate(n.grad.reshaped(x->value.shape()));
  });
}

Var concat_channels(const Var& a, const Var& b) {
  require_chw(a->value, "concat");
  require_chw(b->value, "concat");
  if (a->value.dim(1) != b->value.dim(1) || a->value.dim(2) != b->value.dim(2))
    throw std::invalid_argument("concat: spatial mismatch");
  const std::int64_t ca = a->value.dim(0);
  const std::int64_t cb = b->value.dim(0);
  const std::int64_t plane = a->value.dim(1) * a->value.dim(2);
  Tensor out({ca + cb, a->value.dim(1), a->value.dim(2)});
  std::copy_n(a->value.data(), ca * plane, out.data());
  std::copy_n(b->value.data(), cb * plane, out.data() + ca * plane);
  return make_node(std::move(out), {a, b}, [a, b, ca, cb, plane](Node& n) {
    if (a->requires_grad) {
      Tensor ga(a->value.shape());
      std::copy_n(n.grad.data(), ca * plane, ga.data());
      a->accumulate(ga);
    }
    if (b->requires_grad) {
      Tensor gb(b->value.shape());
      std::copy_n(n.grad.data() + ca * plane, cb * plane, gb.data());
      b->accumulate(gb);
    }
  });
}

Var concat_vec(const Var& a, const Var& b) {
  const std::int64_t na = a->value.numel();
  const std::int64_t nb = b->value.numel();
  Tensor out({na + nb});
  std::copy_n(a->value.data(), na, out.data());
  std::copy_n(b->value.data(), nb, out.data() + na);
  return make_node(std::move(out), {a, b}, [a, b, na, nb](Node& n) {
    if (a->requires_grad) {
      Tensor ga(a->value.shape());
      std::copy_n(n.grad.data(), na, ga.data());
      a->accumulate(ga);
    }
    if (b->requires_grad) {
      Tensor gb(b->value.shape());
      std::copy_n(n.grad.data() + na, nb, gb.data());
      b->accumulate(gb);
    }
  });
}

namespace {

// index maps for the three permutation ops; out[i] = in[map[i]]
std::vector<std::int64_t> pixel_shuffle_map(std::int64_t c, std::int64_t h,
                                            std::int64_t w, int r) {
  const std::int64_t oc = c / (r * r);
  std::vector<std::int64_t> map(usize(c * h * w));
  std::int64_t idx = 0;
  for (std::int64_t co = 0; co < oc; ++co)
    for (std::int64_t y = 0; y < h * r; ++y)
      for (std::int64_t x = 0; x < w * r; ++x) {
        const std::int64_t iy = y / r, ry = y % r;
        const std::int64_t ix = x / r, rx = x % r;
        const std::int64_t ci = (co * r + ry) * r + rx;
        map[usize(idx++)] = (ci * h + iy) * w + ix;
      }
  return map;
}

Var permutation_op(const Var& x, std::vector<std::int64_t> map,
                   std::vector<std::int64_t> out_shape, const char* what) {
  if (static_cast<std::int64_t>(map.size()) != x->value.numel())
    throw std::logic_error(std::string(what) + ": bad permutation");
  Tensor out(std::move(out_shape));
  for (std::int64_t i = 0; i < out.numel(); ++i)
    out[i] = x->value[map[usize(i)]];
  return make_node(std::move(out), {x}, [x, map = std::move(map)](Node& n) {
    Tensor g(x->value.shape());
    for (std::int64_t i = 0; i < n.grad.numel(); ++i)
      g[map[usize(i)]] += n.grad[i];
    x->accumulate(g);
  });
}

}  // namespace

Var pixel_shuffle(const Var& x, int r) {
  require_chw(x->value, "pixel_shuffle");
  const std::int64_t c = x->value.dim(0);
  if (r < 1 || c % (static_cast<std::int64_t>(r) * r) != 0)
    throw std::invalid_argument(
        "pixel_shuffle: channels must be divisible by r^2");
  if (r == 1) return reshape(x, x->value.shape());
  const std::int64_t h = x->value.dim(1);
  const std::int64_t w = x->value.dim(2);
  return permutation_op(x, pixel_shuffle_map(c, h, w, r),
                        {c / (r * r), h * r, w * r}, "pixel_shuffle");
}

Var pixel_unshuffle(const Var& x, int r) {
  require_chw(x->value, "pixel_unshuffle");
  const std::int64_t c = x->value.dim(0);
  const std::int64_t h = x->value.dim(1);
  const std::int64_t w = x->value.dim(2);
  if (r < 1 || h % r != 0 || w % r != 0)
    throw std::invalid_argument(
        "pixel_unshuffle: spatial dims must be divisible by r");
  if (r == 1) return reshape(x, x->value.shape());
  // inverse permutation of pixel_shuffle on the output shape
  const auto fwd = pixel_shuffle_map(c * r * r, h / r, w / r, r);
  std::vector<std::int64_t> inv(fwd.size());
  for (std::size_t i = 0; i < fwd.size(); ++i)
    inv[usize(fwd[i])] = static_cast<std::int64_t>(i);
  return permutation_op(x, std::move(inv), {c * r * r, h / r, w / r},
                        "pixel_unshuffle");
}

Var channel_shuffle(const Var& x, int groups) {
  require_chw(x->value, "channel_shuffle");
  const std::int64_t c = x->value.dim(0);
  if (groups < 1 || c % groups != 0)
    throw std::invalid_argument(
        "channel_shuffle: channels must be divisible by groups");
  if (groups == 1) return reshape(x, x->value.shape());
  const std::int64_t h = x->value.dim(1);
  const std::int64_t w = x->value.dim(2);
  const std::int64_t plane = h * w;
  const std::int64_t per = c / groups;
  std::vector<std::int64_t> map(usize(c * plane));
  std::int64_t idx = 0;
  // out channel (j * groups + g) reads in channel (g * per + j)
  for (std::int64_t j = 0; j < per; ++j)
    for (std::int64_t g = 0; g < groups; ++g) {
      const std::int64_t src = g * per + j;
      for (std::int64_t i = 0; i < plane; ++i)
        map[usize(idx++)] = src * plane + i;
    }
  return permutation_op(x, std::move(map), x->value.shape(),
                        "channel_shuffle");
}

Var avg_pool2(const Var& x) {
  require_chw(x->value, "avg_pool2");
  const std::int64_t c = x->value.dim(0);
  const std::int64_t h = x->value.dim(1);
  const std::int64_t w = x->value.dim(2);
  if (h % 2 != 0 || w % 2 != 0)
    throw std::invalid_argument("avg_pool2: dims must be even");
  Tensor out({c, h / 2, w / 2});
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t y = 0; y < h / 2; ++y)
      for (std::int64_t x2 = 0; x2 < w / 2; ++x2)
        out.at(ch, y, x2) =
            0.25 * (x->value.at(ch, 2 * y, 2 * x2) +
                    x->value.at(ch, 2 * y, 2 * x2 + 1) +
                    x->value.at(ch, 2 * y + 1, 2 * x2) +
                    x->value.at(ch, 2 * y + 1, 2 * x2 + 1));
  return make_node(std::move(out), {x}, [x, c, h, w](Node& n) {
    Tensor g(x->value.shape());
    for (std::int64_t ch = 0; ch < c; ++ch)
      for (std::int64_t y = 0; y < h / 2; ++y)
        for (std::int64_t x2 = 0; x2 < w / 2; ++x2) {
          const double gv = 0.25 * n.grad.at(ch, y, x2);
          g.at(ch, 2 * y, 2 * x2) += gv;
          g.at(ch, 2 * y, 2 * x2 + 1) += gv;
          g.at(ch, 2 * y + 1, 2 * x2) += gv;
          g.at(ch, 2 * y + 1, 2 * x2 + 1) += gv;
        }
    x->accumulate(g);
  });
}

Var sum_all(const Var& x) {
  Tensor out({1}, kern::sum(x->value.data(), usize(x->value.numel())));
  return make_node(std::move(out), {x}, [x](Node& n) {
    Tensor g(x->value.shape(), n.grad[0]);
    x->accumulate(g);
  });
}

Var mean_all(const Var& x) {
  return scale(sum_all(x), 1.0 / static_cast<double>(x->value.numel()));
}

Var channel_mean(const Var& x) {
  require_chw(x->value, "channel_mean");
  const std::int64_t c = x->value.dim(0);
  const std::int64_t plane = x->value.dim(1) * x->value.dim(2);
  Tensor out({c});
  for (std::int64_t ch = 0; ch < c; ++ch)
    out[ch] = kern::sum(x->value.data() + ch * plane, usize(plane)) / plane;
  return make_node(std::move(out), {x}, [x, c, plane](Node& n) {
    Tensor g(x->value.shape());
    for (std::int64_t ch = 0; ch < c; ++ch) {
      const double gv = n.grad[ch] / plane;
      double* p = g.data() + ch * plane;
      for (std::int64_t i = 0; i < plane; ++i) p[i] = gv;
    }
    x->accumulate(g);
  });
}

Var charbonnier(const Var& a, const Var& b, double eps) {
  require_same_shape(a->value, b->value, "charbonnier");
  const std::int64_t n_el = a->value.numel();
  Tensor rho({n_el});
  for (std::int64_t i = 0; i < n_el; ++i) {
    const double diff = a->value[i] - b->value[i];
    rho[i] = std::sqrt(diff * diff + eps * eps);
  }
  Tensor out({1}, kern::sum(rho.data(), usize(n_el)) / n_el);
  return make_node(std::move(out), {a, b},
                   [a, b, eps, n_el, rho = std::move(rho)](Node& n) {
    const double g0 = n.grad[0] / n_el;
    Tensor ga(a->value.shape());
    for (std::int64_t i = 0; i < n_el; ++i)
      ga[i] = g0 * (a->value[i] - b->value[i]) / rho[i];
    if (a->requires_grad) a->accumulate(ga);
    if (b->requires_grad) {
      kern::scale(ga.data(), -1.0, usize(n_el));
      b->accumulate(ga);
    }
  });
}

Tensor pixel_shuffle_tensor(const Tensor& x, int r) {
  return pixel_shuffle(constant(x), r)->value;
}
Tensor pixel_unshuffle_tensor(const Tensor& x, int r) {
  return pixel_unshuffle(constant(x), r)->value;
}
Tensor channel_shuffle_tensor(const Tensor& x, int groups) {
  return channel_shuffle(constant(x), groups)->value;
}

}  // namespace panosr::ag
