#include "nmt/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace nmt {

GradCheckReport grad_check(const LossFn& f, const ParamStore& params, const GradCheckOptions& opt) {
  GradCheckReport report;
  ParamStore grads = params.zeros_like();
  f(params, &grads);

  if (opt.corrupt && grads.size() > 0 && grads.value(0).size() > 0) grads.value(0)(0, 0) += 0.5;

  Rng rng(opt.seed);
  ParamStore work = params;

  for (std::size_t t = 0; t < params.size(); ++t) {
    const Mat& g = grads.value(t);
    const Eigen::Index n = g.size();

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    if (n > opt.samples_per_tensor) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<std::size_t>(opt.samples_per_tensor));
    }

    GradCheckEntry entry;
    entry.name = params.names()[t];
    for (Eigen::Index flat : idx) {
      double* slot = work.value(t).data() + flat;
      const double saved = *slot;
      *slot = saved + opt.step;
      const double f_plus = f(work, nullptr);
      *slot = saved - opt.step;
      const double f_minus = f(work, nullptr);
      *slot = saved;

      const double numeric = (f_plus - f_minus) / (2.0 * opt.step);
      const double analytic = *(g.data() + flat);
      const double rel =
          std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      entry.max_rel_err = std::max(entry.max_rel_err, rel);
      ++entry.checked;
    }
    report.worst = std::max(report.worst, entry.max_rel_err);
    report.per_tensor.push_back(std::move(entry));
  }
  return report;
}

}  // namespace nmt
