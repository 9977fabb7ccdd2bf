#include "hetrinet/tape.hpp"

#include <cmath>

#include "hetrinet/kernels.hpp"

namespace hetrinet {

namespace {

// Forward results are checked for NaN/Inf in debug builds only.
#ifndef NDEBUG
constexpr bool kCheckFinite = true;
#else
constexpr bool kCheckFinite = false;
#endif

void require(bool cond, const std::string& msg) {
  if (!cond) throw ShapeError(msg);
}

}  // namespace

Var Tape::push(Node node, Tensor value) {
  if (kCheckFinite && !value.all_finite()) {
    throw Error("tape: non-finite value produced by op " +
                std::to_string(static_cast<int>(node.op)));
  }
  nodes_.push_back(std::move(node));
  values_.push_back(std::move(value));
  grads_.emplace_back();
  has_grad_.push_back(0);
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tensor& Tape::grad_slot(int id) {
  if (!has_grad_[id]) {
    grads_[id] = Tensor(values_[id].rows(), values_[id].cols());
    has_grad_[id] = 1;
  }
  return grads_[id];
}

const Tensor& Tape::value(Var v) const { return values_.at(v.id); }

const Tensor& Tape::grad(Var v) { return grad_slot(v.id); }

Var Tape::leaf(Tensor value) {
  Node n;
  n.op = Op::Leaf;
  return push(std::move(n), std::move(value));
}

Var Tape::matmul(Var a, Var b) {
  const Tensor& va = val(a.id);
  const Tensor& vb = val(b.id);
  require(va.cols() == vb.rows(),
          "matmul: " + va.shape_str() + " vs " + vb.shape_str());
  Tensor out(va.rows(), vb.cols());
  kernels::active().gemm_nn(va.rows(), va.cols(), vb.cols(), va.data(),
                            vb.data(), out.data());
  Node n;
  n.op = Op::Matmul;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n), std::move(out));
}

Var Tape::add(Var a, Var b) {
  const Tensor& va = val(a.id);
  const Tensor& vb = val(b.id);
  require(va.same_shape(vb), "add: " + va.shape_str() + " vs " + vb.shape_str());
  Tensor out(va.rows(), va.cols());
  kernels::active().add(va.data(), vb.data(), out.data(), va.size());
  Node n;
  n.op = Op::Add;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n), std::move(out));
}

Var Tape::add_row(Var x, Var bias) {
  const Tensor& vx = val(x.id);
  const Tensor& vb = val(bias.id);
  require(vb.rows() == 1 && vb.cols() == vx.cols(),
          "add_row: " + vx.shape_str() + " vs bias " + vb.shape_str());
  Tensor out(vx.rows(), vx.cols());
  for (int r = 0; r < vx.rows(); ++r) {
    kernels::active().add(vx.data() + static_cast<std::size_t>(r) * vx.cols(),
                          vb.data(),
                          out.data() + static_cast<std::size_t>(r) * vx.cols(),
                          vx.cols());
  }
  Node n;
  n.op = Op::AddRow;
  n.a = x.id;
  n.b = bias.id;
  return push(std::move(n), std::move(out));
}

Var Tape::concat_cols(std::span<const Var> parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const int rows = val(parts[0].id).rows();
  int cols = 0;
  for (const Var p : parts) {
    require(val(p.id).rows() == rows,
            "concat_cols: row mismatch " + val(p.id).shape_str());
    cols += val(p.id).cols();
  }
  Tensor out(rows, cols);
  int offset = 0;
  for (const Var p : parts) {
    const Tensor& vp = val(p.id);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < vp.cols(); ++c) out.at(r, offset + c) = vp.at(r, c);
    }
    offset += vp.cols();
  }
  Node n;
  n.op = Op::ConcatCols;
  for (const Var p : parts) n.inputs.push_back(p.id);
  return push(std::move(n), std::move(out));
}

Var Tape::concat_cols(std::initializer_list<Var> parts) {
  return concat_cols(std::span<const Var>(parts.begin(), parts.size()));
}

Var Tape::concat_rows(std::span<const Var> parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  const int cols = val(parts[0].id).cols();
  int rows = 0;
  for (const Var p : parts) {
    require(val(p.id).cols() == cols,
            "concat_rows: column mismatch " + val(p.id).shape_str());
    rows += val(p.id).rows();
  }
  Tensor out(rows, cols);
  int offset = 0;
  for (const Var p : parts) {
    const Tensor& vp = val(p.id);
    for (int r = 0; r < vp.rows(); ++r) {
      for (int c = 0; c < cols; ++c) out.at(offset + r, c) = vp.at(r, c);
    }
    offset += vp.rows();
  }
  Node n;
  n.op = Op::ConcatRows;
  for (const Var p : parts) n.inputs.push_back(p.id);
  return push(std::move(n), std::move(out));
}

Var Tape::concat_rows(std::initializer_list<Var> parts) {
  return concat_rows(std::span<const Var>(parts.begin(), parts.size()));
}

Var Tape::scale(Var a, real_t s) {
  const Tensor& va = val(a.id);
  Tensor out(va.rows(), va.cols());
  kernels::active().scale(va.data(), s, out.data(), va.size());
  Node n;
  n.op = Op::Scale;
  n.a = a.id;
  n.s0 = s;
  return push(std::move(n), std::move(out));
}

Var Tape::add_const(Var a, real_t c) {
  const Tensor& va = val(a.id);
  Tensor out(va.rows(), va.cols());
  for (std::size_t i = 0; i < va.size(); ++i) out[i] = va[i] + c;
  Node n;
  n.op = Op::AddConst;
  n.a = a.id;
  n.s0 = c;
  return push(std::move(n), std::move(out));
}

Var Tape::mul_scalar(Var x, Var w) {
  const Tensor& vx = val(x.id);
  const Tensor& vw = val(w.id);
  require(vw.rows() == 1 && vw.cols() == 1,
          "mul_scalar: gate must be 1x1, got " + vw.shape_str());
  Tensor out(vx.rows(), vx.cols());
  kernels::active().scale(vx.data(), vw[0], out.data(), vx.size());
  Node n;
  n.op = Op::MulScalar;
  n.a = x.id;
  n.b = w.id;
  return push(std::move(n), std::move(out));
}

Var Tape::elem_prod(Var a, Var b) {
  const Tensor& va = val(a.id);
  const Tensor& vb = val(b.id);
  require(va.same_shape(vb),
          "elem_prod: " + va.shape_str() + " vs " + vb.shape_str());
  Tensor out(va.rows(), va.cols());
  kernels::active().mul(va.data(), vb.data(), out.data(), va.size());
  Node n;
  n.op = Op::ElemProd;
  n.a = a.id;
  n.b = b.id;
  return push(std::move(n), std::move(out));
}

Var Tape::sum_rows(Var a) {
  const Tensor& va = val(a.id);
  Tensor out(1, va.cols());
  for (int r = 0; r < va.rows(); ++r) {
    kernels::active().add(out.data(),
                          va.data() + static_cast<std::size_t>(r) * va.cols(),
                          out.data(), va.cols());
  }
  Node n;
  n.op = Op::SumRows;
  n.a = a.id;
  return push(std::move(n), std::move(out));
}

Var Tape::sum_all(Var a) {
  const Tensor& va = val(a.id);
  Tensor out(1, 1);
  out[0] = kernels::active().sum(va.data(), va.size());
  Node n;
  n.op = Op::SumAll;
  n.a = a.id;
  return push(std::move(n), std::move(out));
}

Var Tape::leaky_relu(Var a, real_t slope) {
  const Tensor& va = val(a.id);
  Tensor out(va.rows(), va.cols());
  kernels::active().leaky_relu(va.data(), slope, out.data(), va.size());
  Node n;
  n.op = Op::LeakyRelu;
  n.a = a.id;
  n.s0 = slope;
  return push(std::move(n), std::move(out));
}

Var Tape::relu(Var a) {
  const Tensor& va = val(a.id);
  Tensor out(va.rows(), va.cols());
  kernels::active().leaky_relu(va.data(), real_t{0}, out.data(), va.size());
  Node n;
  n.op = Op::Relu;
  n.a = a.id;
  return push(std::move(n), std::move(out));
}

Var Tape::elu(Var a, real_t alpha) {
  const Tensor& va = val(a.id);
  Tensor out(va.rows(), va.cols());
  for (std::size_t i = 0; i < va.size(); ++i) {
    out[i] = va[i] > 0 ? va[i] : alpha * (std::exp(va[i]) - real_t{1});
  }
  Node n;
  n.op = Op::Elu;
  n.a = a.id;
  n.s0 = alpha;
  return push(std::move(n), std::move(out));
}

Var Tape::sigmoid(Var a) {
  const Tensor& va = val(a.id);
  Tensor out(va.rows(), va.cols());
  // Clamped to the open interval: scores must stay strictly inside (0,1)
  // even where the exponential saturates.
  const real_t lo = std::numeric_limits<real_t>::min();
  const real_t hi = real_t{1} - std::numeric_limits<real_t>::epsilon() / 2;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const real_t y = real_t{1} / (real_t{1} + std::exp(-va[i]));
    out[i] = y < lo ? lo : (y > hi ? hi : y);
  }
  Node n;
  n.op = Op::Sigmoid;
  n.a = a.id;
  return push(std::move(n), std::move(out));
}

Var Tape::softmax_rows(Var a) {
  const Tensor& va = val(a.id);
  if (va.size() == 0) throw Error("softmax: empty input");
  Tensor out(va.rows(), va.cols());
  for (int r = 0; r < va.rows(); ++r) {
    const real_t* row = va.data() + static_cast<std::size_t>(r) * va.cols();
    real_t* orow = out.data() + static_cast<std::size_t>(r) * va.cols();
    const real_t m = kernels::active().max(row, va.cols());
    for (int c = 0; c < va.cols(); ++c) orow[c] = std::exp(row[c] - m);
    const real_t s = kernels::active().sum(orow, va.cols());
    kernels::active().scale(orow, real_t{1} / s, orow, va.cols());
  }
  Node n;
  n.op = Op::SoftmaxRows;
  n.a = a.id;
  return push(std::move(n), std::move(out));
}

Var Tape::log(Var a) {
  const Tensor& va = val(a.id);
  Tensor out(va.rows(), va.cols());
  for (std::size_t i = 0; i < va.size(); ++i) out[i] = std::log(va[i]);
  Node n;
  n.op = Op::Log;
  n.a = a.id;
  return push(std::move(n), std::move(out));
}

Var Tape::clamp_min(Var a, real_t lo) {
  const Tensor& va = val(a.id);
  Tensor out(va.rows(), va.cols());
  for (std::size_t i = 0; i < va.size(); ++i) out[i] = va[i] > lo ? va[i] : lo;
  Node n;
  n.op = Op::ClampMin;
  n.a = a.id;
  n.s0 = lo;
  return push(std::move(n), std::move(out));
}

Var Tape::dropout(Var a, real_t rate, bool training, Rng& rng) {
  if (rate < 0 || rate >= 1) {
    throw InputError("dropout: rate must be in [0,1), got " +
                     std::to_string(static_cast<double>(rate)));
  }
  if (!training) return a;
  const Tensor& va = val(a.id);
  const real_t keep_scale = real_t{1} / (real_t{1} - rate);
  Tensor mask(va.rows(), va.cols());
  Tensor out(va.rows(), va.cols());
  for (std::size_t i = 0; i < va.size(); ++i) {
    mask[i] = rng.bernoulli(static_cast<double>(rate)) ? real_t{0} : keep_scale;
    out[i] = va[i] * mask[i];
  }
  Node n;
  n.op = Op::Dropout;
  n.a = a.id;
  n.s0 = rate;
  n.aux = std::move(mask);
  return push(std::move(n), std::move(out));
}

Var Tape::gather_rows(Var a, std::vector<int> indices) {
  const Tensor& va = val(a.id);
  Tensor out(static_cast<int>(indices.size()), va.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const int src = indices[r];
    require(src >= 0 && src < va.rows(),
            "gather_rows: index " + std::to_string(src) + " out of " +
                std::to_string(va.rows()));
    for (int c = 0; c < va.cols(); ++c) {
      out.at(static_cast<int>(r), c) = va.at(src, c);
    }
  }
  Node n;
  n.op = Op::GatherRows;
  n.a = a.id;
  n.idx = std::move(indices);
  return push(std::move(n), std::move(out));
}

Var Tape::transpose(Var a) {
  const Tensor& va = val(a.id);
  Tensor out(va.cols(), va.rows());
  for (int r = 0; r < va.rows(); ++r) {
    for (int c = 0; c < va.cols(); ++c) out.at(c, r) = va.at(r, c);
  }
  Node n;
  n.op = Op::Transpose;
  n.a = a.id;
  return push(std::move(n), std::move(out));
}

Var Tape::slice_cols(Var a, int begin, int end) {
  const Tensor& va = val(a.id);
  require(begin >= 0 && begin < end && end <= va.cols(),
          "slice_cols: [" + std::to_string(begin) + "," + std::to_string(end) +
              ") out of " + va.shape_str());
  Tensor out(va.rows(), end - begin);
  for (int r = 0; r < va.rows(); ++r) {
    for (int c = begin; c < end; ++c) out.at(r, c - begin) = va.at(r, c);
  }
  Node n;
  n.op = Op::SliceCols;
  n.a = a.id;
  n.c0 = begin;
  n.c1 = end;
  return push(std::move(n), std::move(out));
}

void Tape::backward(Var loss) {
  if (!loss.valid() || static_cast<std::size_t>(loss.id) >= nodes_.size()) {
    throw Error("backward: loss is not on this tape");
  }
  const Tensor& lv = values_[loss.id];
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw Error("backward: loss must be scalar (1x1), got " + lv.shape_str());
  }
  grad_slot(loss.id)[0] = 1;

  const auto& K = kernels::active();
  for (int id = loss.id; id >= 0; --id) {
    if (!has_grad_[id]) continue;
    const Node& n = nodes_[id];
    const Tensor& g = grads_[id];
    const Tensor& y = values_[id];
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::Matmul: {
        const Tensor& va = values_[n.a];
        const Tensor& vb = values_[n.b];
        // dA += dC * B^T ; dB += A^T * dC
        K.gemm_nt(va.rows(), vb.cols(), va.cols(), g.data(), vb.data(),
                  grad_slot(n.a).data());
        K.gemm_tn(va.rows(), va.cols(), vb.cols(), va.data(), g.data(),
                  grad_slot(n.b).data());
        break;
      }
      case Op::Add: {
        K.axpy(1, g.data(), grad_slot(n.a).data(), g.size());
        K.axpy(1, g.data(), grad_slot(n.b).data(), g.size());
        break;
      }
      case Op::AddRow: {
        K.axpy(1, g.data(), grad_slot(n.a).data(), g.size());
        Tensor& gb = grad_slot(n.b);
        for (int r = 0; r < g.rows(); ++r) {
          K.axpy(1, g.data() + static_cast<std::size_t>(r) * g.cols(),
                 gb.data(), g.cols());
        }
        break;
      }
      case Op::ConcatCols: {
        int offset = 0;
        for (const int in : n.inputs) {
          Tensor& gi = grad_slot(in);
          for (int r = 0; r < g.rows(); ++r) {
            for (int c = 0; c < gi.cols(); ++c) {
              gi.at(r, c) += g.at(r, offset + c);
            }
          }
          offset += gi.cols();
        }
        break;
      }
      case Op::ConcatRows: {
        int offset = 0;
        for (const int in : n.inputs) {
          Tensor& gi = grad_slot(in);
          K.axpy(1, g.data() + static_cast<std::size_t>(offset) * g.cols(),
                 gi.data(), gi.size());
          offset += gi.rows();
        }
        break;
      }
      case Op::Scale: {
        K.axpy(n.s0, g.data(), grad_slot(n.a).data(), g.size());
        break;
      }
      case Op::AddConst: {
        K.axpy(1, g.data(), grad_slot(n.a).data(), g.size());
        break;
      }
      case Op::MulScalar: {
        const Tensor& vx = values_[n.a];
        const real_t w = values_[n.b][0];
        K.axpy(w, g.data(), grad_slot(n.a).data(), g.size());
        grad_slot(n.b)[0] += K.dot(g.data(), vx.data(), g.size());
        break;
      }
      case Op::ElemProd: {
        const Tensor& va = values_[n.a];
        const Tensor& vb = values_[n.b];
        Tensor& ga = grad_slot(n.a);
        Tensor& gb = grad_slot(n.b);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] * vb[i];
          gb[i] += g[i] * va[i];
        }
        break;
      }
      case Op::SumRows: {
        Tensor& ga = grad_slot(n.a);
        for (int r = 0; r < ga.rows(); ++r) {
          K.axpy(1, g.data(),
                 ga.data() + static_cast<std::size_t>(r) * ga.cols(),
                 ga.cols());
        }
        break;
      }
      case Op::SumAll: {
        Tensor& ga = grad_slot(n.a);
        const real_t gs = g[0];
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gs;
        break;
      }
      case Op::LeakyRelu: {
        const Tensor& vx = values_[n.a];
        K.leaky_relu_bwd(vx.data(), g.data(), n.s0, grad_slot(n.a).data(),
                         g.size());
        break;
      }
      case Op::Relu: {
        const Tensor& vx = values_[n.a];
        K.leaky_relu_bwd(vx.data(), g.data(), real_t{0}, grad_slot(n.a).data(),
                         g.size());
        break;
      }
      case Op::Elu: {
        const Tensor& vx = values_[n.a];
        Tensor& ga = grad_slot(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] * (vx[i] > 0 ? real_t{1} : y[i] + n.s0);
        }
        break;
      }
      case Op::Sigmoid: {
        Tensor& ga = grad_slot(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga[i] += g[i] * y[i] * (real_t{1} - y[i]);
        }
        break;
      }
      case Op::SoftmaxRows: {
        Tensor& ga = grad_slot(n.a);
        for (int r = 0; r < g.rows(); ++r) {
          const std::size_t off = static_cast<std::size_t>(r) * g.cols();
          const real_t inner = K.dot(g.data() + off, y.data() + off, g.cols());
          for (int c = 0; c < g.cols(); ++c) {
            ga[off + c] += y[off + c] * (g[off + c] - inner);
          }
        }
        break;
      }
      case Op::Log: {
        const Tensor& vx = values_[n.a];
        Tensor& ga = grad_slot(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / vx[i];
        break;
      }
      case Op::ClampMin: {
        const Tensor& vx = values_[n.a];
        Tensor& ga = grad_slot(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (vx[i] > n.s0) ga[i] += g[i];
        }
        break;
      }
      case Op::Dropout: {
        Tensor& ga = grad_slot(n.a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.aux[i];
        break;
      }
      case Op::GatherRows: {
        Tensor& ga = grad_slot(n.a);
        for (std::size_t r = 0; r < n.idx.size(); ++r) {
          K.axpy(1, g.data() + r * g.cols(),
                 ga.data() + static_cast<std::size_t>(n.idx[r]) * ga.cols(),
                 g.cols());
        }
        break;
      }
      case Op::Transpose: {
        Tensor& ga = grad_slot(n.a);
        for (int r = 0; r < g.rows(); ++r) {
          for (int c = 0; c < g.cols(); ++c) ga.at(c, r) += g.at(r, c);
        }
        break;
      }
      case Op::SliceCols: {
        Tensor& ga = grad_slot(n.a);
        for (int r = 0; r < g.rows(); ++r) {
          for (int c = 0; c < g.cols(); ++c) ga.at(r, n.c0 + c) += g.at(r, c);
        }
        break;
      }
    }
  }
}

Var ParamBinding::bind(Tape& tape, Parameter& p) {
  for (const auto& [param, var] : bound_) {
    if (param == &p) return var;
  }
  const Var v = tape.leaf(p.value);
  bound_.emplace_back(&p, v);
  return v;
}

void ParamBinding::accumulate_grads(Tape& tape) {
  const auto& K = kernels::active();
  for (auto& [param, var] : bound_) {
    const Tensor& g = tape.grad(var);
    K.axpy(1, g.data(), param->grad.data(), g.size());
  }
}

}  // namespace hetrinet
