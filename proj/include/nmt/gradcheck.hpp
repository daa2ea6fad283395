#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nmt/params.hpp"

namespace nmt {

// Scalar function of the parameters. When `grads` is non-null the callee must
// also fill it (zeros_like layout) with the analytic gradient.
using LossFn = std::function<double(const ParamStore& params, ParamStore* grads)>;

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
  int checked = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> per_tensor;
  double worst = 0.0;

  bool passes(double tol) const { return worst < tol; }
};

struct GradCheckOptions {
  double step = 1e-3;
  // Components checked per tensor; tensors at or below this size are checked
  // exhaustively, larger ones on a seeded random sample.
  int samples_per_tensor = 50;
  std::uint64_t seed = 1234;
  // Negative-control hook: perturbs one analytic gradient component so the
  // check must fail.
  bool corrupt = false;
};

// Central-difference comparison of analytic gradients, component-sampled.
// Relative error is |a - n| / max(|a|, |n|, 1e-8). Reports, never throws.
GradCheckReport grad_check(const LossFn& f, const ParamStore& params, const GradCheckOptions& opt);

}  // namespace nmt
