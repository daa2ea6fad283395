#pragma once

#include <functional>
#include <vector>

#include "nmt/tensor.hpp"

namespace nmt::test {

inline double rel_err(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
}

// Central finite differences of a scalar function over every component of the
// chosen leaf. `eval` must rebuild the computation from the leaf values.
using BuildLoss = std::function<double(const std::vector<Mat>&)>;

inline Mat fd_grad(const BuildLoss& eval, std::vector<Mat> leaves, std::size_t which,
                   double step) {
  Mat g(leaves[which].rows(), leaves[which].cols());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    double* slot = leaves[which].data() + i;
    const double saved = *slot;
    *slot = saved + step;
    const double up = eval(leaves);
    *slot = saved - step;
    const double down = eval(leaves);
    *slot = saved;
    *(g.data() + i) = (up - down) / (2.0 * step);
  }
  return g;
}

inline double max_rel_err(const Mat& analytic, const Mat& numeric) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i)
    worst = std::max(worst, rel_err(*(analytic.data() + i), *(numeric.data() + i)));
  return worst;
}

}  // namespace nmt::test
