#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nmt/tensor.hpp"

namespace nmt {

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid for the tape's lifetime.
struct Var {
  Tape* tape = nullptr;
  std::int32_t id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Mat& value() const;
  const Mat& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;
};

enum class OpKind : std::uint8_t {
  kLeaf,
  kMatMul,
  kTranspose,
  kAdd,
  kSub,
  kHadamard,
  kScale,       // constant scalar multiply
  kMulScalar,   // multiply by a 1x1 node
  kTanh,
  kSigmoid,
  kSoftmax,     // vector softmax, composite Jacobian
  kLogSoftmax,
  kConcat,      // vector concatenation
  kExpandCols,  // replicate a column vector across columns
  kLookupRow,   // single row of a matrix, as a column vector
  kPick,        // single component of a vector, as a 1x1
  kStackRows,   // J vectors -> J x d matrix
  kSum,         // sum of all components, as a 1x1
};

// Append-only record of one primitive evaluation. Parents always precede the
// node, so the tape is topologically ordered by construction.
struct Node {
  OpKind op = OpKind::kLeaf;
  std::int32_t p0 = -1;
  std::int32_t p1 = -1;
  std::vector<std::int32_t> rest;  // parents of variadic ops (concat, stack)
  std::int32_t aux = 0;            // row / component / column-count argument
  double coeff = 0.0;              // constant of kScale
  Mat value;
  Mat grad;  // same shape as value, zero until backward touches it
};

class Tape {
 public:
  Var leaf(Mat m);

  const Node& node(std::int32_t id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes_.size(); }
  void reserve(std::size_t n) { nodes_.reserve(n); }

  // Reverse sweep from a scalar loss; accumulates d(loss)/d(node) into every
  // node's grad. May be called repeatedly (grads keep accumulating).
  void backward(Var loss);

  // Low-level append used by the op functions below.
  Var emit(Node n);

 private:
  std::vector<Node> nodes_;
};

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double c);
Var mul_scalar(Var v, Var s);
Var tanh(Var a);
Var sigmoid(Var a);
Var softmax(Var x);
Var log_softmax(Var x);
Var concat(std::span<const Var> parts);
Var concat(Var a, Var b);
Var expand_cols(Var v, std::int32_t n);
Var lookup_row(Var table, std::int32_t row);
Var pick(Var v, std::int32_t i);
Var stack_rows(std::span<const Var> rows);
Var sum(Var a);

inline void backward(Var loss) { loss.tape->backward(loss); }

}  // namespace nmt
