#include "adrev/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adrev/error.hpp"

namespace adrev {

namespace {

using detail::Node;
using BackwardFn = std::function<void(Node&)>;

Tensor make_op(const char* name, Shape shape, std::vector<double> values, std::vector<Tensor> inputs,
               BackwardFn fn) {
  if (finite_checks()) {
    for (double v : values) {
      if (!std::isfinite(v)) throw NumericError(std::string("non-finite value produced by ") + name);
    }
  }
  Tensor out = Tensor::from(std::move(shape), std::move(values));
  if (!grad_enabled()) return out;
  bool needs = false;
  for (const auto& t : inputs) needs = needs || t.requires_grad();
  if (!needs) return out;
  auto& node = *out.node();
  node.requires_grad = true;
  node.parents.reserve(inputs.size());
  for (auto& t : inputs) node.parents.push_back(t.node());
  node.backward = std::move(fn);
  return out;
}

// Gradient sink for parent i, or nullptr when it does not need one.
double* sink(Node& self, std::size_t i) {
  auto& p = *self.parents[i];
  return p.requires_grad ? p.ensure_grad().data() : nullptr;
}

const double* in(Node& self, std::size_t i) { return self.parents[i]->values.data(); }

void require_same(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

std::size_t normalize_axis(const char* op, int axis, std::size_t rank) {
  const int r = static_cast<int>(rank);
  if (axis < -r || axis >= r) {
    throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) + " invalid for rank " + std::to_string(rank));
  }
  return static_cast<std::size_t>(axis < 0 ? axis + r : axis);
}

struct AxisSplit {
  std::size_t outer = 1, n = 1, inner = 1;
};

AxisSplit split_at(const Shape& s, std::size_t axis) {
  AxisSplit a;
  for (std::size_t i = 0; i < axis; ++i) a.outer *= s[i];
  a.n = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) a.inner *= s[i];
  return a;
}

template <class F, class G>
Tensor unary(const char* name, const Tensor& x, F forward, G derivative) {
  const auto xs = x.data();
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = forward(xs[i]);
  return make_op(name, x.shape(), std::move(out), {x}, [derivative](Node& self) {
    double* gx = sink(self, 0);
    if (!gx) return;
    const double* xv = in(self, 0);
    for (std::size_t i = 0; i < self.values.size(); ++i) gx[i] += self.grad[i] * derivative(xv[i], self.values[i]);
  });
}

double stable_sigmoid(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

// C[m,n] += A[m,k] B[k,n], four rows of A per pass over B.
void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* A, const double* B, double* C) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    double* c0 = C + i * n;
    double* c1 = c0 + n;
    double* c2 = c1 + n;
    double* c3 = c2 + n;
    for (std::size_t p = 0; p < k; ++p) {
      const double a0 = A[i * k + p], a1 = A[(i + 1) * k + p], a2 = A[(i + 2) * k + p], a3 = A[(i + 3) * k + p];
      const double* b = B + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        c0[j] += a0 * b[j];
        c1[j] += a1 * b[j];
        c2[j] += a2 * b[j];
        c3[j] += a3 * b[j];
      }
    }
  }
  for (; i < m; ++i) {
    double* c = C + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double a = A[i * k + p];
      const double* b = B + p * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += a * b[j];
    }
  }
}

// C[m,k] += A[m,n] B[k,n]^T
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* A, const double* B, double* C) {
  std::vector<double> bt(n * k);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t j = 0; j < n; ++j) bt[j * k + p] = B[p * n + j];
  gemm_nn(m, n, k, A, bt.data(), C);
}

// C[k,n] += A[m,k]^T B[m,n]
void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* A, const double* B, double* C) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const double* b0 = B + i * n;
    const double* b1 = b0 + n;
    const double* b2 = b1 + n;
    const double* b3 = b2 + n;
    for (std::size_t p = 0; p < k; ++p) {
      const double a0 = A[i * k + p], a1 = A[(i + 1) * k + p], a2 = A[(i + 2) * k + p], a3 = A[(i + 3) * k + p];
      double* c = C + p * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
    }
  }
  for (; i < m; ++i) {
    const double* b = B + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double a = A[i * k + p];
      double* c = C + p * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += a * b[j];
    }
  }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same("add", a, b);
  const auto av = a.data(), bv = b.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return make_op("add", a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (std::size_t p = 0; p < 2; ++p) {
      if (double* g = sink(self, p)) {
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
      }
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same("sub", a, b);
  const auto av = a.data(), bv = b.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return make_op("sub", a.shape(), std::move(out), {a, b}, [](Node& self) {
    if (double* g = sink(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
    if (double* g = sink(self, 1)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same("mul", a, b);
  const auto av = a.data(), bv = b.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return make_op("mul", a.shape(), std::move(out), {a, b}, [](Node& self) {
    const double* av = in(self, 0);
    const double* bv = in(self, 1);
    if (double* g = sink(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * bv[i];
    }
    if (double* g = sink(self, 1)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * av[i];
    }
  });
}

Tensor div(const Tensor& a, const Tensor& b) {
  require_same("div", a, b);
  const auto av = a.data(), bv = b.data();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] / bv[i];
  return make_op("div", a.shape(), std::move(out), {a, b}, [](Node& self) {
    const double* bv = in(self, 1);
    if (double* g = sink(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] / bv[i];
    }
    if (double* g = sink(self, 1)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i] * self.values[i] / bv[i];
    }
  });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  const std::size_t n = bias.numel();
  if (x.shape().back() != n || bias.rank() != 1) {
    throw ShapeError("add_bias: bias " + shape_str(bias.shape()) + " does not match last axis of " +
                     shape_str(x.shape()));
  }
  const auto xv = x.data(), bv = bias.data();
  std::vector<double> out(xv.size());
  const std::size_t rows = n ? out.size() / n : 0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] = xv[r * n + j] + bv[j];
  return make_op("add_bias", x.shape(), std::move(out), {x, bias}, [n, rows](Node& self) {
    const double* grad = self.grad.data();
    if (double* g = sink(self, 0)) {
      for (std::size_t i = 0; i < rows * n; ++i) g[i] += grad[i];
    }
    if (double* g = sink(self, 1)) {
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < n; ++j) g[j] += grad[r * n + j];
    }
  });
}

Tensor scale(const Tensor& x, double factor) {
  return unary("scale", x, [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double value) {
  return unary("add_scalar", x, [value](double v) { return v + value; }, [](double, double) { return 1.0; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: cannot multiply " + shape_str(a.shape()) + " by " + shape_str(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  gemm_nn(m, k, n, a.data().data(), b.data().data(), out.data());
  return make_op("matmul", {m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
    const double* g = self.grad.data();
    if (double* ga = sink(self, 0)) gemm_nt(m, n, k, g, in(self, 1), ga);
    if (double* gb = sink(self, 1)) gemm_tn(m, k, n, in(self, 0), g, gb);
  });
}

Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b) {
  if (a.rank() != 3 || b.rank() != 3 || a.dim(0) != b.dim(0) ||
      a.dim(2) != (transpose_b ? b.dim(2) : b.dim(1))) {
    throw ShapeError("bmm: cannot multiply " + shape_str(a.shape()) + " by " + shape_str(b.shape()) +
                     (transpose_b ? " (transposed)" : ""));
  }
  const std::size_t batch = a.dim(0), m = a.dim(1), k = a.dim(2);
  const std::size_t n = transpose_b ? b.dim(1) : b.dim(2);
  const double* av = a.data().data();
  const double* bv = b.data().data();
  std::vector<double> out(batch * m * n, 0.0);
  for (std::size_t s = 0; s < batch; ++s) {
    double* c = out.data() + s * m * n;
    if (transpose_b) {
      gemm_nt(m, k, n, av + s * m * k, bv + s * k * n, c);
    } else {
      gemm_nn(m, k, n, av + s * m * k, bv + s * k * n, c);
    }
  }
  return make_op("bmm", {batch, m, n}, std::move(out), {a, b}, [batch, m, k, n, transpose_b](Node& self) {
    const double* av = in(self, 0);
    const double* bv = in(self, 1);
    double* ga = sink(self, 0);
    double* gb = sink(self, 1);
    for (std::size_t s = 0; s < batch; ++s) {
      const double* A = av + s * m * k;
      const double* B = bv + s * k * n;
      const double* G = self.grad.data() + s * m * n;
      if (transpose_b) {
        // C = A B^T with B [n, k]
        if (ga) gemm_nn(m, n, k, G, B, ga + s * m * k);
        if (gb) gemm_tn(m, n, k, G, A, gb + s * k * n);
      } else {
        if (ga) gemm_nt(m, n, k, G, B, ga + s * m * k);
        if (gb) gemm_tn(m, k, n, A, G, gb + s * k * n);
      }
    }
  });
}

Tensor sigmoid(const Tensor& x) {
  return unary("sigmoid", x, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& x) {
  return unary("tanh", x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& x) {
  return unary("relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
               [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor elu(const Tensor& x, double alpha) {
  return unary("elu", x, [alpha](double v) { return v > 0.0 ? v : alpha * std::expm1(v); },
               [alpha](double v, double y) { return v > 0.0 ? 1.0 : y + alpha; });
}

Tensor softplus(const Tensor& x) {
  return unary("softplus", x,
               [](double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); },
               [](double v, double) { return stable_sigmoid(v); });
}

Tensor exp(const Tensor& x) {
  return unary("exp", x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  return unary("log", x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor square(const Tensor& x) {
  return unary("square", x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor softmax(const Tensor& x, int axis) {
  const auto ax = normalize_axis("softmax", axis, x.rank());
  const auto sp = split_at(x.shape(), ax);
  const auto xv = x.data();
  std::vector<double> out(xv.size());
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t in = 0; in < sp.inner; ++in) {
      const std::size_t base = o * sp.n * sp.inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < sp.n; ++j) mx = std::max(mx, xv[base + j * sp.inner]);
      double total = 0.0;
      for (std::size_t j = 0; j < sp.n; ++j) {
        const double e = std::exp(xv[base + j * sp.inner] - mx);
        out[base + j * sp.inner] = e;
        total += e;
      }
      for (std::size_t j = 0; j < sp.n; ++j) out[base + j * sp.inner] /= total;
    }
  }
  return make_op("softmax", x.shape(), std::move(out), {x}, [sp](Node& self) {
    double* gx = sink(self, 0);
    if (!gx) return;
    const auto& y = self.values;
    const auto& g = self.grad;
    for (std::size_t o = 0; o < sp.outer; ++o) {
      for (std::size_t in = 0; in < sp.inner; ++in) {
        const std::size_t base = o * sp.n * sp.inner + in;
        double dot = 0.0;
        for (std::size_t j = 0; j < sp.n; ++j) dot += y[base + j * sp.inner] * g[base + j * sp.inner];
        for (std::size_t j = 0; j < sp.n; ++j) {
          const std::size_t idx = base + j * sp.inner;
          gx[idx] += y[idx] * (g[idx] - dot);
        }
      }
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  const std::size_t n = x.shape().back();
  if (gain.numel() != n || bias.numel() != n) {
    throw ShapeError("layer_norm: gain " + shape_str(gain.shape()) + " / bias " + shape_str(bias.shape()) +
                     " do not match last axis of " + shape_str(x.shape()));
  }
  const std::size_t rows = x.numel() / n;
  const auto xv = x.data(), gv = gain.data(), bv = bias.data();
  std::vector<double> out(xv.size());
  std::vector<double> xhat(xv.size());
  std::vector<double> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xv.data() + r * n;
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += row[j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_std[r] = inv;
    for (std::size_t j = 0; j < n; ++j) {
      const double h = (row[j] - mu) * inv;
      xhat[r * n + j] = h;
      out[r * n + j] = h * gv[j] + bv[j];
    }
  }
  return make_op("layer_norm", x.shape(), std::move(out), {x, gain, bias},
                 [n, rows, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
                   const double* gv = in(self, 1);
                   const auto& g = self.grad;
                   double* gx = sink(self, 0);
                   double* gg = sink(self, 1);
                   double* gb = sink(self, 2);
                   std::vector<double> dh(n);
                   for (std::size_t r = 0; r < rows; ++r) {
                     double mean_dh = 0.0, mean_dh_h = 0.0;
                     for (std::size_t j = 0; j < n; ++j) {
                       const std::size_t idx = r * n + j;
                       if (gg) gg[j] += g[idx] * xhat[idx];
                       if (gb) gb[j] += g[idx];
                       dh[j] = g[idx] * gv[j];
                       mean_dh += dh[j];
                       mean_dh_h += dh[j] * xhat[idx];
                     }
                     if (!gx) continue;
                     mean_dh /= static_cast<double>(n);
                     mean_dh_h /= static_cast<double>(n);
                     for (std::size_t j = 0; j < n; ++j) {
                       const std::size_t idx = r * n + j;
                       gx[idx] += inv_std[r] * (dh[j] - mean_dh - xhat[idx] * mean_dh_h);
                     }
                   }
                 });
}

Tensor sum(const Tensor& x) {
  const auto xv = x.data();
  const double total = std::accumulate(xv.begin(), xv.end(), 0.0);
  return make_op("sum", {1}, {total}, {x}, [](Node& self) {
    if (double* g = sink(self, 0)) {
      const std::size_t n = self.parents[0]->values.size();
      for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0];
    }
  });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.numel())); }

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw ShapeError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return make_op("reshape", std::move(shape), std::move(out), {x}, [](Node& self) {
    if (double* g = sink(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor transpose(const Tensor& x) {
  if (x.rank() != 2) throw ShapeError("transpose: expected a matrix, got " + shape_str(x.shape()));
  const std::size_t r = x.dim(0), c = x.dim(1);
  const auto xv = x.data();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = xv[i * c + j];
  return make_op("transpose", {c, r}, std::move(out), {x}, [r, c](Node& self) {
    if (double* g = sink(self, 0)) {
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) g[i * c + j] += self.grad[j * r + i];
    }
  });
}

Tensor transpose01(const Tensor& x) {
  if (x.rank() != 3) throw ShapeError("transpose01: expected rank 3, got " + shape_str(x.shape()));
  const std::size_t a = x.dim(0), b = x.dim(1), c = x.dim(2);
  const auto xv = x.data();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j)
      std::copy_n(xv.data() + (i * b + j) * c, c, out.data() + (j * a + i) * c);
  return make_op("transpose01", {b, a, c}, std::move(out), {x}, [a, b, c](Node& self) {
    if (double* g = sink(self, 0)) {
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) {
          const double* src = self.grad.data() + (j * a + i) * c;
          double* dst = g + (i * b + j) * c;
          for (std::size_t t = 0; t < c; ++t) dst[t] += src[t];
        }
    }
  });
}

Tensor concat(std::span<const Tensor> parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const auto ax = normalize_axis("concat", axis, parts[0].rank());
  Shape shape = parts[0].shape();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    Shape s = p.shape();
    if (s.size() != shape.size()) throw ShapeError("concat: rank mismatch");
    s[ax] = shape[ax];
    if (s != shape) {
      throw ShapeError("concat: incompatible shapes " + shape_str(parts[0].shape()) + " and " + shape_str(p.shape()));
    }
    widths.push_back(p.dim(ax));
    total += p.dim(ax);
  }
  shape[ax] = total;
  const auto sp = split_at(shape, ax);
  std::vector<double> out(shape_numel(shape));
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto pv = parts[k].data();
    const std::size_t chunk = widths[k] * sp.inner;
    for (std::size_t o = 0; o < sp.outer; ++o) {
      std::copy_n(pv.data() + o * chunk, chunk, out.data() + o * total * sp.inner + offset * sp.inner);
    }
    offset += widths[k];
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return make_op("concat", shape, std::move(out), std::move(inputs), [sp, total, widths](Node& self) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      const std::size_t chunk = widths[k] * sp.inner;
      if (double* g = sink(self, k)) {
        for (std::size_t o = 0; o < sp.outer; ++o) {
          const double* src = self.grad.data() + o * total * sp.inner + offset * sp.inner;
          for (std::size_t t = 0; t < chunk; ++t) g[o * chunk + t] += src[t];
        }
      }
      offset += widths[k];
    }
  });
}

Tensor slice(const Tensor& x, int axis, std::size_t start, std::size_t length) {
  const auto ax = normalize_axis("slice", axis, x.rank());
  if (length == 0 || start + length > x.dim(ax)) {
    throw ShapeError("slice: range [" + std::to_string(start) + ", " + std::to_string(start + length) +
                     ") outside axis " + std::to_string(ax) + " of " + shape_str(x.shape()));
  }
  const auto sp = split_at(x.shape(), ax);
  Shape shape = x.shape();
  shape[ax] = length;
  const auto xv = x.data();
  std::vector<double> out(shape_numel(shape));
  const std::size_t chunk = length * sp.inner;
  for (std::size_t o = 0; o < sp.outer; ++o) {
    std::copy_n(xv.data() + o * sp.n * sp.inner + start * sp.inner, chunk, out.data() + o * chunk);
  }
  return make_op("slice", std::move(shape), std::move(out), {x}, [sp, start, chunk](Node& self) {
    if (double* g = sink(self, 0)) {
      for (std::size_t o = 0; o < sp.outer; ++o) {
        double* dst = g + o * sp.n * sp.inner + start * sp.inner;
        const double* src = self.grad.data() + o * chunk;
        for (std::size_t t = 0; t < chunk; ++t) dst[t] += src[t];
      }
    }
  });
}

Tensor repeat_tile(const Tensor& x, std::size_t times) {
  if (times == 0) throw ShapeError("repeat_tile: times must be positive");
  Shape shape = x.shape();
  shape[0] *= times;
  const auto xv = x.data();
  std::vector<double> out;
  out.reserve(xv.size() * times);
  for (std::size_t t = 0; t < times; ++t) out.insert(out.end(), xv.begin(), xv.end());
  const std::size_t block = xv.size();
  return make_op("repeat_tile", std::move(shape), std::move(out), {x}, [times, block](Node& self) {
    if (double* g = sink(self, 0)) {
      for (std::size_t t = 0; t < times; ++t)
        for (std::size_t i = 0; i < block; ++i) g[i] += self.grad[t * block + i];
    }
  });
}

Tensor repeat_interleave(const Tensor& x, std::size_t times) {
  if (times == 0) throw ShapeError("repeat_interleave: times must be positive");
  Shape shape = x.shape();
  const std::size_t rows = shape[0];
  const std::size_t width = x.numel() / rows;
  shape[0] *= times;
  const auto xv = x.data();
  std::vector<double> out(xv.size() * times);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t t = 0; t < times; ++t)
      std::copy_n(xv.data() + r * width, width, out.data() + (r * times + t) * width);
  return make_op("repeat_interleave", std::move(shape), std::move(out), {x}, [rows, width, times](Node& self) {
    if (double* g = sink(self, 0)) {
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t t = 0; t < times; ++t)
          for (std::size_t i = 0; i < width; ++i) g[r * width + i] += self.grad[(r * times + t) * width + i];
    }
  });
}

Tensor masked_fill(const Tensor& x, const std::vector<bool>& keep, double fill) {
  const std::size_t period = keep.size();
  if (period == 0 || x.numel() % period != 0) {
    throw ContractError("masked_fill: mask of " + std::to_string(period) + " entries does not tile " +
                        shape_str(x.shape()));
  }
  const auto xv = x.data();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = keep[i % period] ? xv[i] : fill;
  return make_op("masked_fill", x.shape(), std::move(out), {x}, [keep, period](Node& self) {
    if (double* g = sink(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i)
        if (keep[i % period]) g[i] += self.grad[i];
    }
  });
}

Tensor embedding(const Tensor& table, std::span<const int> indices) {
  if (table.rank() != 2) throw ShapeError("embedding: table must be a matrix, got " + shape_str(table.shape()));
  const std::size_t vocab = table.dim(0), width = table.dim(1);
  const auto tv = table.data();
  std::vector<double> out(indices.size() * width);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const int idx = indices[r];
    if (idx < 0 || static_cast<std::size_t>(idx) >= vocab) {
      throw DataError("embedding: index " + std::to_string(idx) + " outside vocabulary of size " +
                      std::to_string(vocab));
    }
    std::copy_n(tv.data() + static_cast<std::size_t>(idx) * width, width, out.data() + r * width);
  }
  std::vector<int> idx(indices.begin(), indices.end());
  return make_op("embedding", {indices.size(), width}, std::move(out), {table},
                 [idx = std::move(idx), width](Node& self) {
                   if (double* g = sink(self, 0)) {
                     for (std::size_t r = 0; r < idx.size(); ++r)
                       for (std::size_t j = 0; j < width; ++j)
                         g[static_cast<std::size_t>(idx[r]) * width + j] += self.grad[r * width + j];
                   }
                 });
}

Tensor dropout(const Tensor& x, double p, bool training, std::mt19937_64* rng) {
  if (p < 0.0 || p >= 1.0) throw ContractError("dropout probability must lie in [0, 1)");
  if (!training || p == 0.0) return x;
  if (!rng) throw ContractError("dropout in training mode needs a random generator");
  std::bernoulli_distribution keep(1.0 - p);
  const double factor = 1.0 / (1.0 - p);
  std::vector<double> mask(x.numel());
  for (auto& m : mask) m = keep(*rng) ? factor : 0.0;
  const auto xv = x.data();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * mask[i];
  return make_op("dropout", x.shape(), std::move(out), {x}, [mask = std::move(mask)](Node& self) {
    if (double* g = sink(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * mask[i];
    }
  });
}

}  // namespace adrev
