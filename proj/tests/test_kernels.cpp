#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hetrinet/common.hpp"
#include "hetrinet/kernels.hpp"

using namespace hetrinet;
namespace K = hetrinet::kernels;

namespace {

std::vector<real_t> random_vec(std::size_t n, Rng& rng, double lo = -2.0,
                               double hi = 2.0) {
  std::vector<real_t> v(n);
  for (auto& x : v) x = static_cast<real_t>(rng.uniform(lo, hi));
  return v;
}

// Sizes chosen to hit the SIMD body, the unrolled body and scalar tails.
const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8,
                                         9, 15, 16, 31, 64, 67, 255};

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(std::string(K::scalar_table().name) == "scalar");
  CHECK_FALSE(K::active_name().empty());
}

TEST_CASE("elementwise kernels agree bit-for-bit across variants") {
  const K::Table* avx2 = K::avx2_table();
  if (avx2 == nullptr) {
    MESSAGE("avx2 variant not compiled in; skipping equivalence checks");
    return;
  }
  const K::Table& ref = K::scalar_table();
  Rng rng(11);
  for (const std::size_t n : kSizes) {
    const auto a = random_vec(n, rng);
    const auto b = random_vec(n, rng);
    std::vector<real_t> r1(n), r2(n);

    ref.add(a.data(), b.data(), r1.data(), n);
    avx2->add(a.data(), b.data(), r2.data(), n);
    CHECK(r1 == r2);

    ref.mul(a.data(), b.data(), r1.data(), n);
    avx2->mul(a.data(), b.data(), r2.data(), n);
    CHECK(r1 == r2);

    ref.scale(a.data(), real_t{1.7}, r1.data(), n);
    avx2->scale(a.data(), real_t{1.7}, r2.data(), n);
    CHECK(r1 == r2);

    auto y1 = b, y2 = b;
    ref.axpy(real_t{-0.3}, a.data(), y1.data(), n);
    avx2->axpy(real_t{-0.3}, a.data(), y2.data(), n);
    CHECK(y1 == y2);

    ref.leaky_relu(a.data(), real_t{0.2}, r1.data(), n);
    avx2->leaky_relu(a.data(), real_t{0.2}, r2.data(), n);
    CHECK(r1 == r2);

    auto dx1 = random_vec(n, rng);
    auto dx2 = dx1;
    const auto dy = random_vec(n, rng);
    ref.leaky_relu_bwd(a.data(), dy.data(), real_t{0.2}, dx1.data(), n);
    avx2->leaky_relu_bwd(a.data(), dy.data(), real_t{0.2}, dx2.data(), n);
    CHECK(dx1 == dx2);
  }
}

TEST_CASE("reductions agree to rounding error across variants") {
  const K::Table* avx2 = K::avx2_table();
  if (avx2 == nullptr) return;
  const K::Table& ref = K::scalar_table();
  Rng rng(12);
  for (const std::size_t n : kSizes) {
    if (n == 0) continue;
    const auto a = random_vec(n, rng);
    const auto b = random_vec(n, rng);

    const double d1 = ref.dot(a.data(), b.data(), n);
    const double d2 = avx2->dot(a.data(), b.data(), n);
    CHECK(std::abs(d1 - d2) <= 1e-13 * (1.0 + std::abs(d1)));

    const double s1 = ref.sum(a.data(), n);
    const double s2 = avx2->sum(a.data(), n);
    CHECK(std::abs(s1 - s2) <= 1e-13 * (1.0 + std::abs(s1)));

    // max is order-independent, so it must match exactly.
    CHECK(ref.max(a.data(), n) == avx2->max(a.data(), n));
  }
}

TEST_CASE("gemm variants match the scalar reference") {
  const K::Table* avx2 = K::avx2_table();
  if (avx2 == nullptr) return;
  const K::Table& ref = K::scalar_table();
  Rng rng(13);
  const int dims[][3] = {{1, 1, 1},  {2, 3, 4},   {5, 7, 3}, {8, 8, 8},
                         {3, 17, 5}, {16, 9, 33}, {1, 64, 1}};
  for (const auto& d : dims) {
    const int m = d[0], k = d[1], n = d[2];
    const auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
    const auto b_nn = random_vec(static_cast<std::size_t>(k) * n, rng);
    const auto b_nt = random_vec(static_cast<std::size_t>(n) * k, rng);
    const auto b_tn = random_vec(static_cast<std::size_t>(m) * n, rng);

    // Same per-element accumulation order: bitwise equal.
    std::vector<real_t> c1(static_cast<std::size_t>(m) * n, real_t{0.5});
    auto c2 = c1;
    ref.gemm_nn(m, k, n, a.data(), b_nn.data(), c1.data());
    avx2->gemm_nn(m, k, n, a.data(), b_nn.data(), c2.data());
    CHECK(c1 == c2);

    std::vector<real_t> t1(static_cast<std::size_t>(k) * n, real_t{-0.25});
    auto t2 = t1;
    ref.gemm_tn(m, k, n, a.data(), b_tn.data(), t1.data());
    avx2->gemm_tn(m, k, n, a.data(), b_tn.data(), t2.data());
    CHECK(t1 == t2);

    // Dot-product based: reassociated, tolerance applies.
    std::vector<real_t> u1(static_cast<std::size_t>(m) * n, real_t{0});
    auto u2 = u1;
    ref.gemm_nt(m, k, n, a.data(), b_nt.data(), u1.data());
    avx2->gemm_nt(m, k, n, a.data(), b_nt.data(), u2.data());
    for (std::size_t i = 0; i < u1.size(); ++i) {
      CHECK(std::abs(u1[i] - u2[i]) <=
            1e-13 * (1.0 + std::abs(static_cast<double>(u1[i]))));
    }
  }
}

TEST_CASE("gemm_nn computes a plain matrix product") {
  const std::vector<real_t> a = {1, 2, 3, 4, 5, 6};
  const std::vector<real_t> b = {7, 8, 9, 10, 11, 12};
  std::vector<real_t> c(4, 0);
  K::scalar_table().gemm_nn(2, 3, 2, a.data(), b.data(), c.data());
  CHECK(c == std::vector<real_t>{58, 64, 139, 154});
}

TEST_CASE("adam kernel is bitwise identical across variants") {
  const K::Table* avx2 = K::avx2_table();
  if (avx2 == nullptr) return;
  Rng rng(14);
  for (const std::size_t n : kSizes) {
    auto p1 = random_vec(n, rng);
    auto p2 = p1;
    const auto g = random_vec(n, rng);
    auto m1 = random_vec(n, rng, 0.0, 0.1);
    auto m2 = m1;
    auto v1 = random_vec(n, rng, 0.0, 0.1);
    auto v2 = v1;
    K::scalar_table().adam_update(n, p1.data(), g.data(), m1.data(), v1.data(),
                                  0.005, 0.9, 0.999, 1e-8, 0.1, 0.001);
    avx2->adam_update(n, p2.data(), g.data(), m2.data(), v2.data(), 0.005, 0.9,
                      0.999, 1e-8, 0.1, 0.001);
    CHECK(p1 == p2);
    CHECK(m1 == m2);
    CHECK(v1 == v2);
  }
}

TEST_CASE("select rejects unknown variants and honors explicit ones") {
  CHECK_THROWS_AS(K::select("sse9"), Error);
  CHECK(K::select("scalar") == "scalar");
  CHECK(K::active_name() == "scalar");
  CHECK_FALSE(K::select("auto").empty());
}
