#pragma once

#include <functional>

namespace delegate {

struct QuadratureOptions {
  double abs_tol = 1e-9;
  int max_depth = 40;
};

/// Adaptive Simpson integration of f over [a, b].
///
/// Each interval is split until the Richardson estimate |S2 - S1| / 15 falls
/// below its share of the tolerance. Throws QUADRATURE_NONCONVERGENT when the
/// recursion bottoms out with the local error still above its share, or when
/// the integrand produces a non-finite value.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& options = {});

}  // namespace delegate
