#pragma once

#include <cassert>
#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "hetrinet/common.hpp"

namespace hetrinet {

/// Dense row-major 2-D array of real_t. Row and column vectors are 1xN / Nx1.
class Tensor {
 public:
  Tensor() = default;

  Tensor(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw ShapeError("Tensor: negative dimension");
    v_.assign(static_cast<std::size_t>(rows) * cols, real_t{0});
  }

  Tensor(int rows, int cols, std::vector<real_t> values)
      : rows_(rows), cols_(cols), v_(std::move(values)) {
    if (v_.size() != static_cast<std::size_t>(rows) * cols) {
      throw ShapeError("Tensor: value count " + std::to_string(v_.size()) +
                       " does not match shape " + std::to_string(rows) + "x" +
                       std::to_string(cols));
    }
  }

  static Tensor from(int rows, int cols, std::initializer_list<real_t> values) {
    return Tensor(rows, cols, std::vector<real_t>(values));
  }

  static Tensor row(std::initializer_list<real_t> values) {
    return Tensor(1, static_cast<int>(values.size()),
                  std::vector<real_t>(values));
  }

  static Tensor column(std::initializer_list<real_t> values) {
    return Tensor(static_cast<int>(values.size()), 1,
                  std::vector<real_t>(values));
  }

  static Tensor identity(int n) {
    Tensor t(n, n);
    for (int i = 0; i < n; ++i) t.at(i, i) = 1;
    return t;
  }

  static Tensor filled(int rows, int cols, real_t value) {
    Tensor t(rows, cols);
    t.set_all(value);
    return t;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  real_t* data() { return v_.data(); }
  const real_t* data() const { return v_.data(); }

  real_t& at(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return v_[static_cast<std::size_t>(r) * cols_ + c];
  }
  real_t at(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return v_[static_cast<std::size_t>(r) * cols_ + c];
  }

  real_t& operator[](std::size_t i) { return v_[i]; }
  real_t operator[](std::size_t i) const { return v_[i]; }

  void set_all(real_t value) {
    for (auto& x : v_) x = value;
  }
  void zero() { set_all(real_t{0}); }

  bool same_shape(const Tensor& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool all_finite() const {
    for (const auto x : v_) {
      if (!std::isfinite(static_cast<double>(x))) return false;
    }
    return true;
  }

  std::string shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

  bool operator==(const Tensor& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && v_ == other.v_;
  }

  const std::vector<real_t>& values() const { return v_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<real_t> v_;
};

/// Largest absolute componentwise difference; shapes must match.
inline real_t max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw ShapeError("max_abs_diff: " + a.shape_str() + " vs " + b.shape_str());
  }
  real_t worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const real_t d = std::abs(a[i] - b[i]);
    if (d > worst) worst = d;
  }
  return worst;
}

}  // namespace hetrinet
