#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "finiteroc/errors.hpp"

namespace finiteroc {

// Posterior of a single bin probability after observing k successes in n
// samples under the uniform prior: beta(k+1, n-k+1).
class BetaPosterior {
public:
    BetaPosterior() = default;

    BetaPosterior(std::uint64_t k, std::uint64_t n) : k_(k), n_(n) {
        if (k > n) {
            throw validation_error("beta posterior: k=" + std::to_string(k) +
                                   " exceeds n=" + std::to_string(n));
        }
        log_norm_ = boost::math::lgamma(a()) + boost::math::lgamma(b()) -
                    boost::math::lgamma(a() + b());
    }

    std::uint64_t k() const { return k_; }
    std::uint64_t n() const { return n_; }
    double a() const { return static_cast<double>(k_) + 1.0; }
    double b() const { return static_cast<double>(n_ - k_) + 1.0; }

    double mean() const { return a() / (static_cast<double>(n_) + 2.0); }

    // k/n for interior k; boundary posteriors are one-sided with the mode at
    // the boundary. The n = 0 prior is flat; its midpoint is reported.
    double mode() const {
        if (n_ == 0) return 0.5;
        return static_cast<double>(k_) / static_cast<double>(n_);
    }

    double variance() const {
        double n = static_cast<double>(n_);
        return a() * b() / ((n + 2.0) * (n + 2.0) * (n + 3.0));
    }

    double sd() const { return std::sqrt(variance()); }

    double pdf(double x) const {
        if (x < 0.0 || x > 1.0) return 0.0;
        if (x == 0.0) return k_ == 0 ? std::exp(-log_norm_) : 0.0;
        if (x == 1.0) return k_ == n_ ? std::exp(-log_norm_) : 0.0;
        double lg = (a() - 1.0) * std::log(x) + (b() - 1.0) * std::log1p(-x) - log_norm_;
        return std::exp(lg);
    }

    double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return boost::math::ibeta(a(), b(), x);
    }

    // Quantile by bisection on the regularized incomplete-beta CDF; absolute
    // tolerance 1e-10.
    double quantile(double p) const {
        if (p <= 0.0) return 0.0;
        if (p >= 1.0) return 1.0;
        double lo = 0.0, hi = 1.0;
        while (hi - lo > 1e-10) {
            double mid = 0.5 * (lo + hi);
            if (cdf(mid) < p) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    double w90() const { return quantile(0.95) - quantile(0.05); }

private:
    std::uint64_t k_ = 0, n_ = 0;
    double log_norm_ = 0.0;
};

inline BetaPosterior bin_posterior(std::uint64_t k, std::uint64_t n) {
    return BetaPosterior(k, n);
}

inline double percentile_width_w90(const BetaPosterior& p) { return p.w90(); }

// Chebychev tail bound on P{|theta - mu| > nu} from the frequency estimate.
inline double chebychev_tail(std::uint64_t k, std::uint64_t n, double nu) {
    if (n < 1) throw validation_error("chebychev_tail: n >= 1 required");
    if (!(nu > 0.0)) throw validation_error("chebychev_tail: nu > 0 required");
    if (k > n) throw validation_error("chebychev_tail: k exceeds n");
    double th = static_cast<double>(k) / static_cast<double>(n);
    double b = th * (1.0 - th) / (static_cast<double>(n) * nu * nu);
    return std::min(1.0, b);
}

// Distribution-free form of the same bound.
inline double chebychev_tail_universal(std::uint64_t n, double nu) {
    if (n < 1) throw validation_error("chebychev_tail_universal: n >= 1 required");
    if (!(nu > 0.0)) throw validation_error("chebychev_tail_universal: nu > 0 required");
    return std::min(1.0, 1.0 / (4.0 * static_cast<double>(n) * nu * nu));
}

}  // namespace finiteroc
