#pragma once

#include <cstddef>
#include <string>

#include "hetrinet/common.hpp"

namespace hetrinet::kernels {

// Dense numeric primitives behind runtime dispatch. Matrices are row-major.
// The gemm variants accumulate into C; callers zero C when they need a plain
// product. Scalar implementations are the reference; SIMD variants must agree
// bit-for-bit on elementwise ops and to tight relative error on reductions
// (see tests/test_kernels.cpp).
struct Table {
  const char* name;

  void (*add)(const real_t* a, const real_t* b, real_t* out, std::size_t n);
  void (*mul)(const real_t* a, const real_t* b, real_t* out, std::size_t n);
  void (*scale)(const real_t* a, real_t s, real_t* out, std::size_t n);
  // y += alpha * x
  void (*axpy)(real_t alpha, const real_t* x, real_t* y, std::size_t n);
  real_t (*dot)(const real_t* a, const real_t* b, std::size_t n);
  real_t (*sum)(const real_t* a, std::size_t n);
  // max element; n must be >= 1
  real_t (*max)(const real_t* a, std::size_t n);
  void (*leaky_relu)(const real_t* x, real_t slope, real_t* out, std::size_t n);
  // dx += dy * (x > 0 ? 1 : slope)
  void (*leaky_relu_bwd)(const real_t* x, const real_t* dy, real_t slope,
                         real_t* dx, std::size_t n);
  // C(mxn) += A(mxk) * B(kxn)
  void (*gemm_nn)(std::size_t m, std::size_t k, std::size_t n, const real_t* a,
                  const real_t* b, real_t* c);
  // C(mxn) += A(mxk) * B(nxk)^T
  void (*gemm_nt)(std::size_t m, std::size_t k, std::size_t n, const real_t* a,
                  const real_t* b, real_t* c);
  // C(kxn) += A(mxk)^T * B(mxn)
  void (*gemm_tn)(std::size_t m, std::size_t k, std::size_t n, const real_t* a,
                  const real_t* b, real_t* c);
  // In-place Adam update with precomputed bias corrections
  // bc1 = 1 - beta1^t, bc2 = 1 - beta2^t.
  void (*adam_update)(std::size_t n, real_t* p, const real_t* g, real_t* m,
                      real_t* v, real_t lr, real_t beta1, real_t beta2,
                      real_t eps, real_t bc1, real_t bc2);
};

const Table& scalar_table();

/// AVX2 variant table, or nullptr when not compiled in.
const Table* avx2_table();

/// Active table. Selected on first use: the HETRINET_KERNELS environment
/// variable ("scalar", "avx2", "auto") wins, otherwise the best variant the
/// CPU supports. The selection is fixed for the lifetime of the process.
const Table& active();

/// Force a variant ("scalar", "avx2", "auto"). Throws Error when the
/// requested variant is unavailable. Returns the name of the selected table.
std::string select(const std::string& mode);

/// Name of the active table ("scalar" or "avx2").
std::string active_name();

}  // namespace hetrinet::kernels
