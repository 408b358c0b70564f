#pragma once

#include <functional>

namespace plap {

/// Adaptive quadrature of a smooth integrand over [a, b]; either bound may
/// be infinite. Long finite ranges are cut into geometrically growing pieces
/// from both ends (and at 0 when inside) so narrow features are not skipped.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-13);

}  // namespace plap
