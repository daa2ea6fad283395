#include "nmt/tape.hpp"

#include <cmath>
#include <utility>

namespace nmt {

const Mat& Var::value() const { return tape->node(id).value; }
const Mat& Var::grad() const { return tape->node(id).grad; }

double Var::scalar() const {
  const Mat& v = value();
  if (v.rows() != 1 || v.cols() != 1)
    throw DomainError("scalar() on a " + shape_str(v) + " node");
  return v(0, 0);
}

Var Tape::emit(Node n) {
  n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::leaf(Mat m) {
  Node n;
  n.op = OpKind::kLeaf;
  n.value = std::move(m);
  return emit(std::move(n));
}

namespace {

void require_same_shape(const char* op, const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) +
                     " differ");
}

void require_vector(const char* op, const Mat& v) {
  if (v.cols() != 1) throw ShapeError(std::string(op) + ": expected a column vector, got " + shape_str(v));
}

Node binary(OpKind op, Var a, Var b, Mat value) {
  Node n;
  n.op = op;
  n.p0 = a.id;
  n.p1 = b.id;
  n.value = std::move(value);
  return n;
}

Node unary(OpKind op, Var a, Mat value) {
  Node n;
  n.op = op;
  n.p0 = a.id;
  n.value = std::move(value);
  return n;
}

Mat softmax_value(const Mat& x) {
  const double m = x.maxCoeff();
  Mat y = (x.array() - m).exp();
  y /= y.sum();
  return y;
}

Mat log_softmax_value(const Mat& x) {
  const double m = x.maxCoeff();
  const double lse = m + std::log((x.array() - m).exp().sum());
  return x.array() - lse;
}

}  // namespace

Var matmul(Var a, Var b) {
  const Mat& av = a.value();
  const Mat& bv = b.value();
  if (av.cols() != bv.rows())
    throw ShapeError("matmul: inner dimensions of " + shape_str(av) + " and " + shape_str(bv) +
                     " do not agree");
  return a.tape->emit(binary(OpKind::kMatMul, a, b, av * bv));
}

Var transpose(Var a) { return a.tape->emit(unary(OpKind::kTranspose, a, a.value().transpose())); }

Var add(Var a, Var b) {
  require_same_shape("add", a.value(), b.value());
  return a.tape->emit(binary(OpKind::kAdd, a, b, a.value() + b.value()));
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a.value(), b.value());
  return a.tape->emit(binary(OpKind::kSub, a, b, a.value() - b.value()));
}

Var hadamard(Var a, Var b) {
  require_same_shape("hadamard", a.value(), b.value());
  return a.tape->emit(binary(OpKind::kHadamard, a, b, a.value().cwiseProduct(b.value())));
}

Var scale(Var a, double c) {
  Node n = unary(OpKind::kScale, a, a.value() * c);
  n.coeff = c;
  return a.tape->emit(std::move(n));
}

Var mul_scalar(Var v, Var s) {
  const Mat& sv = s.value();
  if (sv.rows() != 1 || sv.cols() != 1)
    throw ShapeError("mul_scalar: scale factor must be 1x1, got " + shape_str(sv));
  return v.tape->emit(binary(OpKind::kMulScalar, v, s, v.value() * sv(0, 0)));
}

Var tanh(Var a) { return a.tape->emit(unary(OpKind::kTanh, a, a.value().array().tanh())); }

Var sigmoid(Var a) {
  Mat y = (1.0 / (1.0 + (-a.value().array()).exp()));
  return a.tape->emit(unary(OpKind::kSigmoid, a, std::move(y)));
}

Var softmax(Var x) {
  const Mat& v = x.value();
  require_vector("softmax", v);
  if (v.rows() < 1) throw DomainError("softmax: empty vector");
  return x.tape->emit(unary(OpKind::kSoftmax, x, softmax_value(v)));
}

Var log_softmax(Var x) {
  const Mat& v = x.value();
  require_vector("log_softmax", v);
  if (v.rows() < 1) throw DomainError("log_softmax: empty vector");
  return x.tape->emit(unary(OpKind::kLogSoftmax, x, log_softmax_value(v)));
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw DomainError("concat: no parts");
  Eigen::Index total = 0;
  for (const Var& p : parts) {
    require_vector("concat", p.value());
    total += p.rows();
  }
  Mat out(total, 1);
  Eigen::Index at = 0;
  Node n;
  n.op = OpKind::kConcat;
  n.rest.reserve(parts.size());
  for (const Var& p : parts) {
    out.block(at, 0, p.rows(), 1) = p.value();
    at += p.rows();
    n.rest.push_back(p.id);
  }
  n.value = std::move(out);
  return parts[0].tape->emit(std::move(n));
}

Var concat(Var a, Var b) {
  const Var parts[] = {a, b};
  return concat(std::span<const Var>(parts, 2));
}

Var expand_cols(Var v, std::int32_t ncols) {
  require_vector("expand_cols", v.value());
  if (ncols < 1) throw DomainError("expand_cols: column count must be positive");
  Node n = unary(OpKind::kExpandCols, v, v.value().replicate(1, ncols));
  n.aux = ncols;
  return v.tape->emit(std::move(n));
}

Var lookup_row(Var table, std::int32_t row) {
  const Mat& t = table.value();
  if (row < 0 || row >= t.rows())
    throw IndexError("lookup_row: row " + std::to_string(row) + " out of range for " +
                     shape_str(t));
  Node n = unary(OpKind::kLookupRow, table, t.row(row).transpose());
  n.aux = row;
  return table.tape->emit(std::move(n));
}

Var pick(Var v, std::int32_t i) {
  require_vector("pick", v.value());
  if (i < 0 || i >= v.rows())
    throw IndexError("pick: component " + std::to_string(i) + " out of range for " +
                     shape_str(v.value()));
  Node n = unary(OpKind::kPick, v, Mat::Constant(1, 1, v.value()(i, 0)));
  n.aux = i;
  return v.tape->emit(std::move(n));
}

Var stack_rows(std::span<const Var> rows) {
  if (rows.empty()) throw DomainError("stack_rows: no rows");
  const Eigen::Index width = rows[0].rows();
  Mat out(static_cast<Eigen::Index>(rows.size()), width);
  Node n;
  n.op = OpKind::kStackRows;
  n.rest.reserve(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    require_vector("stack_rows", rows[j].value());
    if (rows[j].rows() != width)
      throw ShapeError("stack_rows: row " + std::to_string(j) + " has shape " +
                       shape_str(rows[j].value()) + ", expected " + shape_str(width, 1));
    out.row(static_cast<Eigen::Index>(j)) = rows[j].value().transpose();
    n.rest.push_back(rows[j].id);
  }
  n.value = std::move(out);
  return rows[0].tape->emit(std::move(n));
}

Var sum(Var a) {
  return a.tape->emit(unary(OpKind::kSum, a, Mat::Constant(1, 1, a.value().sum())));
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw DomainError("backward: loss lives on a different tape");
  const Mat& lv = loss.value();
  if (lv.rows() != 1 || lv.cols() != 1)
    throw DomainError("backward: loss must be scalar, got " + shape_str(lv));

  nodes_[static_cast<std::size_t>(loss.id)].grad(0, 0) += 1.0;

  for (std::int32_t i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    const Mat& g = n.grad;
    if (g.isZero(0.0) && n.op != OpKind::kLeaf) {
      // nothing flowed here; parents get nothing either
      continue;
    }
    switch (n.op) {
      case OpKind::kLeaf:
        break;
      case OpKind::kMatMul: {
        Node& a = nodes_[static_cast<std::size_t>(n.p0)];
        Node& b = nodes_[static_cast<std::size_t>(n.p1)];
        a.grad.noalias() += g * b.value.transpose();
        b.grad.noalias() += a.value.transpose() * g;
        break;
      }
      case OpKind::kTranspose:
        nodes_[static_cast<std::size_t>(n.p0)].grad += g.transpose();
        break;
      case OpKind::kAdd:
        nodes_[static_cast<std::size_t>(n.p0)].grad += g;
        nodes_[static_cast<std::size_t>(n.p1)].grad += g;
        break;
      case OpKind::kSub:
        nodes_[static_cast<std::size_t>(n.p0)].grad += g;
        nodes_[static_cast<std::size_t>(n.p1)].grad -= g;
        break;
      case OpKind::kHadamard: {
        Node& a = nodes_[static_cast<std::size_t>(n.p0)];
        Node& b = nodes_[static_cast<std::size_t>(n.p1)];
        a.grad.array() += g.array() * b.value.array();
        b.grad.array() += g.array() * a.value.array();
        break;
      }
      case OpKind::kScale:
        nodes_[static_cast<std::size_t>(n.p0)].grad += n.coeff * g;
        break;
      case OpKind::kMulScalar: {
        Node& v = nodes_[static_cast<std::size_t>(n.p0)];
        Node& s = nodes_[static_cast<std::size_t>(n.p1)];
        v.grad += s.value(0, 0) * g;
        s.grad(0, 0) += (g.array() * v.value.array()).sum();
        break;
      }
      case OpKind::kTanh:
        nodes_[static_cast<std::size_t>(n.p0)].grad.array() +=
            g.array() * (1.0 - n.value.array().square());
        break;
      case OpKind::kSigmoid:
        nodes_[static_cast<std::size_t>(n.p0)].grad.array() +=
            g.array() * n.value.array() * (1.0 - n.value.array());
        break;
      case OpKind::kSoftmax: {
        // J^T g = y .* (g - <y, g>)
        const double dot = (n.value.array() * g.array()).sum();
        nodes_[static_cast<std::size_t>(n.p0)].grad.array() +=
            n.value.array() * (g.array() - dot);
        break;
      }
      case OpKind::kLogSoftmax: {
        const double gsum = g.sum();
        nodes_[static_cast<std::size_t>(n.p0)].grad.array() +=
            g.array() - n.value.array().exp() * gsum;
        break;
      }
      case OpKind::kConcat: {
        Eigen::Index at = 0;
        for (std::int32_t pid : n.rest) {
          Node& p = nodes_[static_cast<std::size_t>(pid)];
          p.grad += g.block(at, 0, p.value.rows(), 1);
          at += p.value.rows();
        }
        break;
      }
      case OpKind::kExpandCols:
        nodes_[static_cast<std::size_t>(n.p0)].grad += g.rowwise().sum();
        break;
      case OpKind::kLookupRow:
        nodes_[static_cast<std::size_t>(n.p0)].grad.row(n.aux) += g.transpose();
        break;
      case OpKind::kPick:
        nodes_[static_cast<std::size_t>(n.p0)].grad(n.aux, 0) += g(0, 0);
        break;
      case OpKind::kStackRows: {
        for (std::size_t j = 0; j < n.rest.size(); ++j) {
          Node& p = nodes_[static_cast<std::size_t>(n.rest[j])];
          p.grad += g.row(static_cast<Eigen::Index>(j)).transpose();
        }
        break;
      }
      case OpKind::kSum:
        nodes_[static_cast<std::size_t>(n.p0)].grad.array() += g(0, 0);
        break;
    }
  }
}

}  // namespace nmt
