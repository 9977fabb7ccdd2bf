#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hetrinet/common.hpp"
#include "hetrinet/tensor.hpp"

namespace hetrinet {

/// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Reverse-mode differentiation tape. Forward operations append a node and
/// produce a new Var; backward() walks the nodes in exact reverse execution
/// order and accumulates adjoints additively. One tape per training step;
/// tapes are not shared across threads.
class Tape {
 public:
  Var leaf(Tensor value);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  /// (m x n) + (1 x n), the bias row broadcast over all rows.
  Var add_row(Var x, Var bias);
  Var concat_cols(std::span<const Var> parts);
  Var concat_cols(std::initializer_list<Var> parts);
  Var concat_rows(std::span<const Var> parts);
  Var concat_rows(std::initializer_list<Var> parts);
  Var scale(Var a, real_t s);
  Var add_const(Var a, real_t c);
  /// Elementwise product with a 1x1 variable (trainable scalar gate).
  Var mul_scalar(Var x, Var w);
  Var elem_prod(Var a, Var b);
  /// Sum over rows -> 1 x cols.
  Var sum_rows(Var a);
  /// Sum of all elements -> 1 x 1.
  Var sum_all(Var a);
  Var leaky_relu(Var a, real_t slope);
  Var relu(Var a);
  Var elu(Var a, real_t alpha = 1.0);
  Var sigmoid(Var a);
  /// Row-wise softmax with max-subtraction for stability.
  Var softmax_rows(Var a);
  Var log(Var a);
  Var clamp_min(Var a, real_t lo);
  /// Inverted dropout. In eval mode (training == false) this is the identity
  /// and records nothing.
  Var dropout(Var a, real_t rate, bool training, Rng& rng);
  Var gather_rows(Var a, std::vector<int> indices);
  Var transpose(Var a);
  Var slice_cols(Var a, int begin, int end);

  /// Backpropagate from a scalar (1x1) loss. Throws on non-scalar input.
  void backward(Var loss);

  const Tensor& value(Var v) const;
  /// Gradient of the given var; zero tensor if backward never touched it.
  const Tensor& grad(Var v);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    Leaf,
    Matmul,
    Add,
    AddRow,
    ConcatCols,
    ConcatRows,
    Scale,
    AddConst,
    MulScalar,
    ElemProd,
    SumRows,
    SumAll,
    LeakyRelu,
    Relu,
    Elu,
    Sigmoid,
    SoftmaxRows,
    Log,
    ClampMin,
    Dropout,
    GatherRows,
    Transpose,
    SliceCols,
  };

  struct Node {
    Op op = Op::Leaf;
    int a = -1;
    int b = -1;
    std::vector<int> inputs;  // variadic ops
    real_t s0 = 0;            // slope / scale / constant / alpha
    int c0 = 0;
    int c1 = 0;
    std::vector<int> idx;  // gather indices
    Tensor aux;            // dropout mask
  };

  Var push(Node node, Tensor value);
  const Tensor& val(int id) const { return values_[id]; }
  Tensor& grad_slot(int id);

  // Deques keep references returned by value()/grad() valid while further
  // ops are recorded.
  std::deque<Node> nodes_;
  std::deque<Tensor> values_;
  std::deque<Tensor> grads_;
  std::vector<char> has_grad_;
};

/// Named trainable (or frozen) tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  Parameter() = default;
  Parameter(std::string n, Tensor v, bool train = true)
      : name(std::move(n)),
        value(std::move(v)),
        grad(value.rows(), value.cols()),
        trainable(train) {}

  void zero_grad() { grad.zero(); }
};

/// Binds Parameters onto a tape as leaves (once each) and copies tape
/// gradients back into the parameters after backward().
class ParamBinding {
 public:
  Var bind(Tape& tape, Parameter& p);
  /// p.grad += tape gradient, for every bound parameter.
  void accumulate_grads(Tape& tape);
  const std::vector<std::pair<Parameter*, Var>>& bound() const {
    return bound_;
  }

 private:
  std::vector<std::pair<Parameter*, Var>> bound_;
};

}  // namespace hetrinet
