#include "plap/quadrature.hpp"

#include "plap/error.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace plap {

namespace {

double gk(const std::function<double(double)>& f, double a, double b, double tol) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0, l1 = 0.0;
    const double r0 = gauss_kronrod<double, 31>::integrate(f, a, b, 0, tol, &err, &l1);
    // the error estimate has an absolute floor of a few ulps; on short pieces
    // with small integrals a pure relative tolerance would never be met
    const double floor = 64.0 * std::numeric_limits<double>::epsilon();
    const double eff = std::min(std::max(tol, floor / std::max(l1, 1e-300)), 1e-10);
    if (err <= eff * l1) return r0;
    return gauss_kronrod<double, 31>::integrate(f, a, b, 15, eff);
}

double finite_piecewise(const std::function<double(double)>& f, double a, double b, double tol) {
    std::vector<double> cuts{a};
    if (a < 0.0 && b > 0.0) cuts.push_back(0.0);
    cuts.push_back(b);

    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k];
        const double hi = cuts[k + 1];
        const double len = hi - lo;
        if (len <= 16.0) {
            sum += gk(f, lo, hi, tol);
            continue;
        }
        // pieces of length 1, 2, 4, ... from each end toward the middle
        std::vector<double> left{lo}, right{hi};
        double step = 1.0;
        while (left.back() + step < right.back() - step) {
            left.push_back(left.back() + step);
            right.push_back(right.back() - step);
            step *= 2.0;
        }
        for (auto it = right.rbegin(); it != right.rend(); ++it) left.push_back(*it);
        for (std::size_t i = 0; i + 1 < left.size(); ++i)
            if (left[i + 1] > left[i]) sum += gk(f, left[i], left[i + 1], tol);
    }
    return sum;
}

double half_infinite(const std::function<double(double)>& f, double a, double b, double tol) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(f, a, b, tol);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol) {
    require(!(std::isnan(a) || std::isnan(b)), ErrorKind::InvalidInput, "NaN integration bound");
    if (a == b) return 0.0;
    if (a > b) return -integrate_adaptive(f, b, a, rel_tol);
    const bool inf_a = std::isinf(a);
    const bool inf_b = std::isinf(b);
    // exp_sinh only needs a pure tail; keep the finite part on Gauss-Kronrod
    if (inf_a && inf_b)
        return integrate_adaptive(f, a, -1.0, rel_tol) + finite_piecewise(f, -1.0, 1.0, rel_tol) +
               integrate_adaptive(f, 1.0, b, rel_tol);
    const double tail_tol = std::sqrt(rel_tol) * 1e-3;
    if (inf_b) return half_infinite(f, a, b, tail_tol);
    if (inf_a) return half_infinite(f, a, b, tail_tol);
    return finite_piecewise(f, a, b, rel_tol);
}

}  // namespace plap
