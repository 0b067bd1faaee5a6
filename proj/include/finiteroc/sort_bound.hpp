#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <tuple>
#include <vector>

#include "finiteroc/design.hpp"
#include "finiteroc/errors.hpp"
#include "finiteroc/model.hpp"
#include "finiteroc/ratio.hpp"

namespace finiteroc {

// Union-bound on the posterior probability that the estimated likelihood
// ratio ranking is wrong: per bin, the probability that its ratio posterior
// leaves the interval between the separating thresholds.
struct SortBound {
    std::vector<double> thresholds;  // L+1 non-decreasing, [0] = 0, [L] = +inf
    std::vector<double> per_bin;     // violation probability, indexed by bin
    double bound = 0.0;              // min(1, sum of per-bin terms)
};

// Memoizes ratio-posterior medians and CDF values across repeated count
// tables (the experiment harness reuses one cache across replications).
class RatioStatCache {
public:
    double median(const RatioPosterior& r) {
        Key key{r.numerator().k(), r.numerator().n(), r.denominator().k(), r.denominator().n()};
        auto it = medians_.find(key);
        if (it != medians_.end()) return it->second;
        double m = r.median();
        medians_.emplace(key, m);
        return m;
    }

    double cdf(const RatioPosterior& r, double z) {
        CdfKey key{r.numerator().k(), r.numerator().n(), r.denominator().k(),
                   r.denominator().n(), z};
        auto it = cdfs_.find(key);
        if (it != cdfs_.end()) return it->second;
        double v = r.cdf(z);
        cdfs_.emplace(key, v);
        return v;
    }

private:
    using Key = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>;
    using CdfKey = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t, double>;
    std::map<Key, double> medians_;
    std::map<CdfKey, double> cdfs_;
};

namespace detail {

inline std::vector<RatioPosterior> bin_ratio_posteriors(const std::vector<std::uint64_t>& c1,
                                                        const std::vector<std::uint64_t>& c0,
                                                        std::uint64_t n1, std::uint64_t n0,
                                                        const QuadratureOptions& opt) {
    // posteriors are determined by (k1, k0); build one object per distinct pair
    std::map<std::pair<std::uint64_t, std::uint64_t>, RatioPosterior> pool;
    std::vector<RatioPosterior> rp;
    rp.reserve(c1.size());
    for (std::size_t j = 0; j < c1.size(); ++j) {
        std::pair<std::uint64_t, std::uint64_t> key{c1[j], c0[j]};
        auto it = pool.find(key);
        if (it == pool.end()) {
            it = pool.emplace(key, RatioPosterior(BetaPosterior(key.first, n1),
                                                  BetaPosterior(key.second, n0), opt))
                     .first;
        }
        rp.push_back(it->second);
    }
    return rp;
}

// Thresholds from medians listed in ascending ratio order: gamma between
// neighbors is the geometric mean of the two medians, kept non-decreasing.
inline std::vector<double> thresholds_from_medians(const std::vector<double>& medians) {
    std::size_t L = medians.size();
    std::vector<double> g(L + 1);
    g[0] = 0.0;
    for (std::size_t p = 1; p < L; ++p) {
        double lo = medians[p - 1], hi = medians[p];
        double gamma;
        if (!std::isfinite(lo) || !std::isfinite(hi)) {
            gamma = 1.0;
        } else if (lo == hi) {
            gamma = lo;
        } else {
            gamma = std::sqrt(lo * hi);
            gamma = std::clamp(gamma, std::min(lo, hi), std::max(lo, hi));
        }
        g[p] = std::max(gamma, g[p - 1]);
    }
    g[L] = std::numeric_limits<double>::infinity();
    return g;
}

inline SortBound sort_error_bound_impl(const std::vector<std::uint64_t>& c1,
                                       const std::vector<std::uint64_t>& c0, std::uint64_t n1,
                                       std::uint64_t n0, const QuadratureOptions& opt,
                                       RatioStatCache* cache, bool clip_early) {
    std::size_t L = c1.size();
    Ranking r = rank_exact(c1, c0);
    auto rp = bin_ratio_posteriors(c1, c0, n1, n0, opt);
    RatioStatCache local;
    RatioStatCache& c = cache ? *cache : local;

    std::vector<double> medians(L);
    for (std::size_t p = 0; p < L; ++p) {
        // ascending position p holds the bin at descending rank L-1-p
        medians[p] = c.median(rp[r.order[L - 1 - p]]);
    }
    SortBound sb;
    sb.thresholds = thresholds_from_medians(medians);
    sb.per_bin.assign(L, 0.0);
    double total = 0.0;
    for (std::size_t p = 0; p < L; ++p) {
        std::size_t bin = r.order[L - 1 - p];
        double lo = sb.thresholds[p], hi = sb.thresholds[p + 1];
        double v = 0.0;
        if (lo > 0.0) v += c.cdf(rp[bin], lo);
        if (std::isfinite(hi)) v += 1.0 - c.cdf(rp[bin], hi);
        v = std::clamp(v, 0.0, 1.0);
        sb.per_bin[bin] = v;
        total += v;
        if (clip_early && total >= 1.0) break;
    }
    sb.bound = std::min(1.0, total);
    return sb;
}

}  // namespace detail

// Separating thresholds for the given ranking (descending ratio order):
// thresholds[p] separates the bins at ascending ratio positions p-1 and p.
inline std::vector<double> select_thresholds(const std::vector<RatioPosterior>& per_bin,
                                             const Ranking& r, RatioStatCache* cache = nullptr) {
    if (per_bin.size() != r.size()) {
        throw validation_error("select_thresholds: posterior count != ranking size");
    }
    std::size_t L = per_bin.size();
    std::vector<double> medians(L);
    RatioStatCache local;
    RatioStatCache& c = cache ? *cache : local;
    for (std::size_t p = 0; p < L; ++p) {
        medians[p] = c.median(per_bin[r.order[L - 1 - p]]);
    }
    return detail::thresholds_from_medians(medians);
}

inline SortBound sort_error_bound(const HistogramPair& h, const QuadratureOptions& opt = {},
                                  RatioStatCache* cache = nullptr) {
    return detail::sort_error_bound_impl(h.counts_h1(), h.counts_h0(), h.n1(), h.n0(), opt, cache,
                                         /*clip_early=*/false);
}

// Bound only, stopping as soon as the running sum clips at 1. Used by the
// experiment harness where large-l tables saturate after a few terms.
inline double sort_error_bound_clipped(const HistogramPair& h, const QuadratureOptions& opt = {},
                                       RatioStatCache* cache = nullptr) {
    return detail::sort_error_bound_impl(h.counts_h1(), h.counts_h0(), h.n1(), h.n0(), opt, cache,
                                         /*clip_early=*/true)
        .bound;
}

inline double sort_error_bound_clipped(const std::vector<std::uint64_t>& counts_h1,
                                       const std::vector<std::uint64_t>& counts_h0,
                                       std::uint64_t n1, std::uint64_t n0,
                                       const QuadratureOptions& opt = {},
                                       RatioStatCache* cache = nullptr) {
    return detail::sort_error_bound_impl(counts_h1, counts_h0, n1, n0, opt, cache,
                                         /*clip_early=*/true)
        .bound;
}

// Whether a drawn pair of theta vectors is consistent with the estimated
// ranking: the drawn ratios must be non-increasing along the estimated
// descending order (any adjacent inversion counts as a sort violation).
inline bool ranking_consistent(const Ranking& estimated, const std::vector<double>& theta_h0,
                               const std::vector<double>& theta_h1) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t rank = 0; rank < estimated.size(); ++rank) {
        std::size_t j = estimated.order[rank];
        double ratio = theta_h1[j] / theta_h0[j];
        if (ratio > prev) return false;
        prev = ratio;
    }
    return true;
}

}  // namespace finiteroc
