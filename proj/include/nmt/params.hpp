#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "nmt/tape.hpp"
#include "nmt/tensor.hpp"

namespace nmt {

// Ordered collection of uniquely named tensors. Order is insertion order and
// is what checkpointing, the optimizer, and grad reports iterate in.
class ParamStore {
 public:
  Mat& add(const std::string& name, Mat m);
  bool has(const std::string& name) const { return index_.count(name) > 0; }
  Mat& at(const std::string& name);
  const Mat& at(const std::string& name) const;

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  Mat& value(std::size_t i) { return values_[i]; }
  const Mat& value(std::size_t i) const { return values_[i]; }

  // A store with the same names and all-zero tensors (gradient / optimizer
  // accumulator layout).
  ParamStore zeros_like() const;

 private:
  std::vector<std::string> names_;
  std::vector<Mat> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Per-tape leaf bindings for every tensor of a store, in store order.
struct BoundParams {
  const ParamStore* store = nullptr;
  std::vector<Var> vars;

  Var operator[](const std::string& name) const;
};

BoundParams bind_params(Tape& tape, const ParamStore& store);

// Adds tape gradients of the bound leaves into `accum`, scaled.
void accumulate_grads(const BoundParams& bound, ParamStore& accum, double scale = 1.0);

}  // namespace nmt
