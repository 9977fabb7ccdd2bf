#include <cmath>
#include <cstddef>

#include "hetrinet/kernels.hpp"

namespace hetrinet::kernels {
namespace {

void add_scalar(const real_t* a, const real_t* b, real_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void mul_scalar(const real_t* a, const real_t* b, real_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_scalar(const real_t* a, real_t s, real_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * s;
}

void axpy_scalar(real_t alpha, const real_t* x, real_t* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

real_t dot_scalar(const real_t* a, const real_t* b, std::size_t n) {
  real_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

real_t sum_scalar(const real_t* a, std::size_t n) {
  real_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

real_t max_scalar(const real_t* a, std::size_t n) {
  real_t best = a[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (a[i] > best) best = a[i];
  }
  return best;
}

void leaky_relu_scalar(const real_t* x, real_t slope, real_t* out,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0 ? x[i] : slope * x[i];
}

void leaky_relu_bwd_scalar(const real_t* x, const real_t* dy, real_t slope,
                           real_t* dx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dx[i] += dy[i] * (x[i] > 0 ? real_t{1} : slope);
}

void gemm_nn_scalar(std::size_t m, std::size_t k, std::size_t n,
                    const real_t* a, const real_t* b, real_t* c) {
  for (std::size_t i = 0; i < m; ++i) {
    real_t* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const real_t av = a[i * k + p];
      const real_t* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt_scalar(std::size_t m, std::size_t k, std::size_t n,
                    const real_t* a, const real_t* b, real_t* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const real_t* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      c[i * n + j] += dot_scalar(arow, b + j * k, k);
    }
  }
}

void gemm_tn_scalar(std::size_t m, std::size_t k, std::size_t n,
                    const real_t* a, const real_t* b, real_t* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const real_t* brow = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const real_t av = a[i * k + p];
      real_t* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void adam_update_scalar(std::size_t n, real_t* p, const real_t* g, real_t* m,
                        real_t* v, real_t lr, real_t beta1, real_t beta2,
                        real_t eps, real_t bc1, real_t bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (real_t{1} - beta1) * g[i];
    v[i] = beta2 * v[i] + (real_t{1} - beta2) * (g[i] * g[i]);
    const real_t mhat = m[i] / bc1;
    const real_t vhat = v[i] / bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table table = {
      "scalar",         add_scalar,
      mul_scalar,       scale_scalar,
      axpy_scalar,      dot_scalar,
      sum_scalar,       max_scalar,
      leaky_relu_scalar, leaky_relu_bwd_scalar,
      gemm_nn_scalar,   gemm_nt_scalar,
      gemm_tn_scalar,   adam_update_scalar,
  };
  return table;
}

}  // namespace hetrinet::kernels
