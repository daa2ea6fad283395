#include "nmt/params.hpp"

#include <stdexcept>
#include <utility>

namespace nmt {

Mat& ParamStore::add(const std::string& name, Mat m) {
  if (has(name)) throw std::invalid_argument("ParamStore: duplicate tensor name '" + name + "'");
  index_[name] = names_.size();
  names_.push_back(name);
  values_.push_back(std::move(m));
  return values_.back();
}

Mat& ParamStore::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("ParamStore: no tensor named '" + name + "'");
  return values_[it->second];
}

const Mat& ParamStore::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::invalid_argument("ParamStore: no tensor named '" + name + "'");
  return values_[it->second];
}

ParamStore ParamStore::zeros_like() const {
  ParamStore z;
  for (std::size_t i = 0; i < size(); ++i)
    z.add(names_[i], Mat::Zero(values_[i].rows(), values_[i].cols()));
  return z;
}

Var BoundParams::operator[](const std::string& name) const {
  for (std::size_t i = 0; i < store->names().size(); ++i)
    if (store->names()[i] == name) return vars[i];
  throw std::invalid_argument("BoundParams: no tensor named '" + name + "'");
}

BoundParams bind_params(Tape& tape, const ParamStore& store) {
  BoundParams b;
  b.store = &store;
  b.vars.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) b.vars.push_back(tape.leaf(store.value(i)));
  return b;
}

void accumulate_grads(const BoundParams& bound, ParamStore& accum, double scale) {
  for (std::size_t i = 0; i < bound.vars.size(); ++i) {
    const Mat& g = bound.vars[i].grad();
    accum.value(i) += scale * g;
  }
}

}  // namespace nmt
