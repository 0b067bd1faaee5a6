#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "finiteroc/errors.hpp"
#include "finiteroc/posterior.hpp"

namespace finiteroc {

struct QuadratureOptions {
    double rel_tol = 1e-6;
    unsigned max_depth = 15;
    // quantile level used to bracket the integrand's effective support
    double support_eps = 1e-9;
};

namespace detail {

template <class F>
double integrate_checked(const F& f, double a, double b, const QuadratureOptions& opt) {
    if (!(b > a)) return 0.0;
    double error = 0.0, l1 = 0.0;
    double r = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, opt.max_depth, opt.rel_tol * 1e-2, &error, &l1);
    if (!(error <= opt.rel_tol * std::max(1.0, l1))) {
        throw numeric_error("ratio posterior quadrature did not converge");
    }
    return r;
}

}  // namespace detail

// Posterior of the per-bin likelihood ratio zeta = theta_{H1} / theta_{H0}
// under independent beta posteriors for the two class bins. Density and CDF
// are computed by adaptive quadrature over the denominator variable.
class RatioPosterior {
public:
    RatioPosterior() = default;

    RatioPosterior(BetaPosterior numerator, BetaPosterior denominator,
                   QuadratureOptions opt = {})
        : num_(numerator), den_(denominator), opt_(opt) {
        den_lo_ = den_.quantile(opt_.support_eps);
        den_hi_ = den_.quantile(1.0 - opt_.support_eps);
        num_lo_ = num_.quantile(opt_.support_eps);
        num_hi_ = num_.quantile(1.0 - opt_.support_eps);
        if (den_lo_ <= 0.0) den_lo_ = std::numeric_limits<double>::min();
    }

    const BetaPosterior& numerator() const { return num_; }
    const BetaPosterior& denominator() const { return den_; }

    // p(zeta = z) = integral over x of x * f1(z x) * f0(x)
    double density(double z) const {
        if (!(z >= 0.0)) throw validation_error("ratio density: z >= 0 required");
        if (z == 0.0) {
            auto f = [&](double x) { return x * num_.pdf(0.0) * den_.pdf(x); };
            return detail::integrate_checked(f, den_lo_, den_hi_, opt_);
        }
        double lo = std::max(den_lo_, num_lo_ / z);
        double hi = std::min({den_hi_, num_hi_ / z, 1.0 / z});
        auto f = [&](double x) { return x * num_.pdf(z * x) * den_.pdf(x); };
        return detail::integrate_checked(f, lo, hi, opt_);
    }

    // P{zeta <= z} = integral over x of f0(x) * F1(min(1, z x))
    double cdf(double z) const {
        if (!(z >= 0.0)) throw validation_error("ratio cdf: z >= 0 required");
        if (z == 0.0) return 0.0;
        // below x = num_lo/z the inner CDF is ~0; above num_hi/z it is ~1
        double split_lo = std::min(std::max(den_lo_, num_lo_ / z), den_hi_);
        double split_hi = std::min(std::max(den_lo_, num_hi_ / z), den_hi_);
        double result = 1.0 - den_.cdf(split_hi);
        auto f = [&](double x) { return den_.pdf(x) * num_.cdf(std::min(1.0, z * x)); };
        double kink = 1.0 / z;
        if (kink > split_lo && kink < split_hi) {
            result += detail::integrate_checked(f, split_lo, kink, opt_);
            result += detail::integrate_checked(f, kink, split_hi, opt_);
        } else {
            result += detail::integrate_checked(f, split_lo, split_hi, opt_);
        }
        return std::clamp(result, 0.0, 1.0);
    }

    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0)) throw validation_error("ratio quantile: p in (0,1) required");
        // bracket by doubling around a moment-based initial guess
        double guess = num_.mean() / std::max(den_.mean(), 1e-300);
        double lo = guess, hi = guess;
        int steps = 0;
        while (cdf(lo) > p && steps++ < 2000) lo *= 0.5;
        steps = 0;
        while (cdf(hi) < p && steps++ < 2000) hi *= 2.0;
        for (int i = 0; i < 200; ++i) {
            double mid = std::sqrt(lo * hi);  // bisection in log space
            if (cdf(mid) < p) {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo <= 1e-9 * hi) break;
        }
        return std::sqrt(lo * hi);
    }

    double median() const { return quantile(0.5); }

    // n_i >> 1 and n_i - k >> 1 for both posteriors, made concrete as
    // k >= max(8, 0.02 n) and n - k >= max(8, 0.02 n).
    bool normal_approx_applicable() const {
        auto ok = [](const BetaPosterior& p) {
            double n = static_cast<double>(p.n());
            double k = static_cast<double>(p.k());
            double floor = std::max(8.0, 0.02 * n);
            return k >= floor && (n - k) >= floor;
        };
        return ok(num_) && ok(den_);
    }

    // One-sided normal-ratio density using the beta means and variances.
    double normal_approx(double z) const {
        if (!normal_approx_applicable()) {
            throw numeric_error("ratio normal approximation invalid outside its regime");
        }
        if (!(z >= 0.0)) throw validation_error("ratio normal approx: z >= 0 required");
        double mu1 = num_.mean(), mu0 = den_.mean();
        double v1 = num_.variance(), v0 = den_.variance();
        double a2 = z * z / v1 + 1.0 / v0;
        double b = mu1 * z / v1 + mu0 / v0;
        double resid = mu1 - mu0 * z;
        double scale2 = v0 * z * z + v1;  // = v1 * v0 * a2
        double expo = -resid * resid / (2.0 * scale2);
        return b / (a2 * std::sqrt(a2) * std::sqrt(2.0 * M_PI * v1 * v0)) * std::exp(expo);
    }

private:
    BetaPosterior num_, den_;
    QuadratureOptions opt_;
    double den_lo_ = 0.0, den_hi_ = 1.0, num_lo_ = 0.0, num_hi_ = 1.0;
};

inline RatioPosterior ratio_posterior(std::uint64_t k1, std::uint64_t n1, std::uint64_t k0,
                                      std::uint64_t n0, QuadratureOptions opt = {}) {
    return RatioPosterior(BetaPosterior(k1, n1), BetaPosterior(k0, n0), opt);
}

inline double ratio_density(const RatioPosterior& r, double z) { return r.density(z); }
inline double ratio_cdf(const RatioPosterior& r, double z) { return r.cdf(z); }
inline double ratio_normal_approx(const RatioPosterior& r, double z) { return r.normal_approx(z); }

}  // namespace finiteroc
