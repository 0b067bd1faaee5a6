#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "finiteroc/errors.hpp"
#include "finiteroc/model.hpp"

namespace finiteroc {

// Permutation of bins sorted by decreasing likelihood ratio.
// order[r] is the bin at rank r; alpha[j] is the rank of bin j.
struct Ranking {
    std::vector<std::uint32_t> order;
    std::vector<std::uint32_t> alpha;

    std::size_t size() const { return order.size(); }
};

struct RocPoint {
    std::size_t m = 0;  // support classifier index: bins with rank < m are labeled 1
    double pf = 0.0;
    double pd = 0.0;
};

struct RocCurve {
    std::string source;  // "true", "estimated", or the naming contract below
    Ranking ranking;
    std::vector<RocPoint> points;  // L+1 points, (0,0) .. (1,1)
};

namespace detail {

// Likelihood ratio as a non-negative rational. Conventions for degenerate
// bins: positive/zero -> (1,0) infinity marker; zero/zero -> (1,1) neutral,
// ordered as the value 1 with ties broken by ascending bin index.
struct RatioFrac {
    std::uint64_t num = 0;
    std::uint64_t den = 0;
};

inline RatioFrac ratio_frac(std::uint64_t k1, std::uint64_t k0) {
    if (k1 == 0 && k0 == 0) return {1, 1};
    if (k0 == 0) return {1, 0};
    return {k1, k0};
}

// a strictly greater than b, exact cross multiplication
inline int compare_frac(const RatioFrac& a, const RatioFrac& b) {
    if (a.den == 0 && b.den == 0) return 0;
    if (a.den == 0) return 1;
    if (b.den == 0) return -1;
    unsigned __int128 lhs = static_cast<unsigned __int128>(a.num) * b.den;
    unsigned __int128 rhs = static_cast<unsigned __int128>(b.num) * a.den;
    if (lhs > rhs) return 1;
    if (lhs < rhs) return -1;
    return 0;
}

template <class Greater>
Ranking rank_with(std::size_t L, const Greater& strictly_greater) {
    Ranking r;
    r.order.resize(L);
    std::iota(r.order.begin(), r.order.end(), 0u);
    std::stable_sort(r.order.begin(), r.order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return strictly_greater(a, b); });
    r.alpha.resize(L);
    for (std::size_t rank = 0; rank < L; ++rank) r.alpha[r.order[rank]] = rank;
    return r;
}

inline Ranking rank_exact(const std::vector<std::uint64_t>& w1,
                          const std::vector<std::uint64_t>& w0) {
    std::vector<RatioFrac> fr(w1.size());
    for (std::size_t j = 0; j < w1.size(); ++j) fr[j] = ratio_frac(w1[j], w0[j]);
    return rank_with(w1.size(), [&](std::uint32_t a, std::uint32_t b) {
        return compare_frac(fr[a], fr[b]) > 0;
    });
}

// Per-class mass of each bin, carrying an exact integer form when available.
struct EvalMass {
    std::vector<double> m0, m1;
    std::vector<std::uint64_t> w0, w1;  // empty when no exact form
    std::uint64_t t0 = 0, t1 = 0;
    bool exact() const { return !w0.empty(); }
};

inline EvalMass eval_mass(const DistributionPair& d) {
    EvalMass e;
    e.m0 = d.theta_h0();
    e.m1 = d.theta_h1();
    if (d.has_weights()) {
        e.w0 = d.weights_h0();
        e.w1 = d.weights_h1();
        e.t0 = d.weight_total_h0();
        e.t1 = d.weight_total_h1();
    }
    return e;
}

inline EvalMass eval_mass(const HistogramPair& h) {
    if (h.n0() == 0 || h.n1() == 0) {
        throw validation_error("np design evaluation needs n0 > 0 and n1 > 0");
    }
    EvalMass e;
    e.w0 = h.counts_h0();
    e.w1 = h.counts_h1();
    e.t0 = h.n0();
    e.t1 = h.n1();
    e.m0.resize(e.w0.size());
    e.m1.resize(e.w1.size());
    for (std::size_t j = 0; j < e.w0.size(); ++j) {
        e.m0[j] = static_cast<double>(e.w0[j]) / static_cast<double>(e.t0);
        e.m1[j] = static_cast<double>(e.w1[j]) / static_cast<double>(e.t1);
    }
    return e;
}

// Trace the curve by cumulative mass along the ranking; integer accumulation
// with a single final division when the eval source is exact.
inline std::vector<RocPoint> trace_points(const Ranking& r, const EvalMass& e) {
    std::size_t L = r.size();
    std::vector<RocPoint> pts(L + 1);
    if (e.exact()) {
        std::uint64_t c0 = 0, c1 = 0;
        pts[0] = {0, 0.0, 0.0};
        for (std::size_t m = 1; m <= L; ++m) {
            c0 += e.w0[r.order[m - 1]];
            c1 += e.w1[r.order[m - 1]];
            pts[m] = {m, static_cast<double>(c0) / static_cast<double>(e.t0),
                      static_cast<double>(c1) / static_cast<double>(e.t1)};
        }
    } else {
        double c0 = 0.0, c1 = 0.0;
        pts[0] = {0, 0.0, 0.0};
        for (std::size_t m = 1; m <= L; ++m) {
            c0 += e.m0[r.order[m - 1]];
            c1 += e.m1[r.order[m - 1]];
            pts[m] = {m, std::min(c0, 1.0), std::min(c1, 1.0)};
        }
        pts[L].pf = 1.0;
        pts[L].pd = 1.0;
    }
    return pts;
}

}  // namespace detail

// Eq-3 / Eq-8 ratios with the degenerate-bin conventions: positive/0 gives
// +infinity, 0/0 gives a NaN neutral marker (ordered as the value 1).
inline std::vector<double> likelihood_ratios(const DistributionPair& d) {
    std::vector<double> z(d.space().L);
    for (std::size_t j = 0; j < z.size(); ++j) {
        double t1 = d.theta_h1()[j], t0 = d.theta_h0()[j];
        if (t0 == 0.0 && t1 == 0.0) {
            z[j] = std::numeric_limits<double>::quiet_NaN();
        } else if (t0 == 0.0) {
            z[j] = std::numeric_limits<double>::infinity();
        } else {
            z[j] = t1 / t0;
        }
    }
    return z;
}

inline std::vector<double> likelihood_ratios(const HistogramPair& h) {
    std::vector<double> z(h.space().L);
    for (std::size_t j = 0; j < z.size(); ++j) {
        std::uint64_t k1 = h.counts_h1()[j], k0 = h.counts_h0()[j];
        if (k0 == 0 && k1 == 0) {
            z[j] = std::numeric_limits<double>::quiet_NaN();
        } else if (k0 == 0) {
            z[j] = std::numeric_limits<double>::infinity();
        } else {
            double f1 = static_cast<double>(k1) / static_cast<double>(h.n1());
            double f0 = static_cast<double>(k0) / static_cast<double>(h.n0());
            z[j] = f1 / f0;
        }
    }
    return z;
}

// Stable sort by decreasing ratio; ties broken by ascending bin index; NaN
// neutral markers ordered as 1.
inline Ranking rank_bins(const std::vector<double>& ratios) {
    auto value = [&](std::uint32_t j) {
        double v = ratios[j];
        return std::isnan(v) ? 1.0 : v;
    };
    return detail::rank_with(ratios.size(), [&](std::uint32_t a, std::uint32_t b) {
        return value(a) > value(b);
    });
}

inline Ranking rank_bins(const DistributionPair& d) {
    if (d.has_weights()) return detail::rank_exact(d.weights_h1(), d.weights_h0());
    return rank_bins(likelihood_ratios(d));
}

inline Ranking rank_bins(const HistogramPair& h) {
    return detail::rank_exact(h.counts_h1(), h.counts_h0());
}

// Gamma^m: bin x labeled 1 iff alpha(x) < m.
inline Classifier support_classifier(const FeatureSpace& space, const Ranking& r, std::size_t m) {
    if (r.size() != space.L) throw validation_error("support_classifier: ranking length != L");
    if (m > space.L) throw validation_error("support_classifier: m out of range");
    std::vector<std::uint8_t> labels(space.L);
    for (std::size_t j = 0; j < space.L; ++j) labels[j] = r.alpha[j] < m ? 1 : 0;
    return Classifier(space, std::move(labels));
}

// Neyman-Pearson design: rank bins by the source's likelihood ratios and
// evaluate the L+1 support classifiers on eval_on. Curve naming:
//   truth/truth        -> "ROC"
//   counts/same counts -> "NEPC"
//   counts/other counts-> "EPC"
//   counts/truth       -> "TOC"
inline RocCurve np_design(const DistributionPair& source, const DistributionPair& eval_on) {
    if (source.space() != eval_on.space()) throw validation_error("np_design: space mismatch");
    RocCurve c;
    c.source = "ROC";
    c.ranking = rank_bins(source);
    c.points = detail::trace_points(c.ranking, detail::eval_mass(eval_on));
    return c;
}

inline RocCurve np_design(const HistogramPair& source, const DistributionPair& eval_on) {
    if (source.space() != eval_on.space()) throw validation_error("np_design: space mismatch");
    RocCurve c;
    c.source = "TOC";
    c.ranking = rank_bins(source);
    c.points = detail::trace_points(c.ranking, detail::eval_mass(eval_on));
    return c;
}

inline RocCurve np_design(const HistogramPair& source, const HistogramPair& eval_on) {
    if (source.space() != eval_on.space()) throw validation_error("np_design: space mismatch");
    RocCurve c;
    c.source = (source == eval_on) ? "NEPC" : "EPC";
    c.ranking = rank_bins(source);
    c.points = detail::trace_points(c.ranking, detail::eval_mass(eval_on));
    return c;
}

inline RocCurve np_design(const DistributionPair& source, const HistogramPair& eval_on) {
    if (source.space() != eval_on.space()) throw validation_error("np_design: space mismatch");
    RocCurve c;
    c.source = "estimated";
    c.ranking = rank_bins(source);
    c.points = detail::trace_points(c.ranking, detail::eval_mass(eval_on));
    return c;
}

// All 2^L labelings with their exact operating points. Guarded to l <= 4.
inline std::vector<std::pair<std::uint64_t, OperatingPoint>> enumerate_aos(
    const DistributionPair& dist) {
    const FeatureSpace& sp = dist.space();
    if (sp.l > 4) throw validation_error("enumerate_aos: l <= 4 required (2^(2^l) growth)");
    std::uint64_t count = std::uint64_t{1} << sp.L;
    std::vector<std::pair<std::uint64_t, OperatingPoint>> out;
    out.reserve(count);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        if (dist.has_weights()) {
            std::uint64_t s0 = 0, s1 = 0;
            for (std::size_t j = 0; j < sp.L; ++j) {
                if ((idx >> j) & 1u) {
                    s0 += dist.weights_h0()[j];
                    s1 += dist.weights_h1()[j];
                }
            }
            out.emplace_back(idx, OperatingPoint{
                static_cast<double>(s0) / static_cast<double>(dist.weight_total_h0()),
                static_cast<double>(s1) / static_cast<double>(dist.weight_total_h1())});
        } else {
            double pf = 0.0, pd = 0.0;
            for (std::size_t j = 0; j < sp.L; ++j) {
                if ((idx >> j) & 1u) {
                    pf += dist.theta_h0()[j];
                    pd += dist.theta_h1()[j];
                }
            }
            out.emplace_back(idx, OperatingPoint{pf, pd});
        }
    }
    return out;
}

// Upper-left convex hull from (0,0) to (1,1). Dominated, interior, duplicate
// and collinear points are removed.
inline std::vector<OperatingPoint> upper_hull(std::vector<OperatingPoint> pts,
                                              double tol = 1e-12) {
    if (pts.empty()) throw validation_error("upper_hull: empty point set");
    pts.push_back({0.0, 0.0});
    pts.push_back({1.0, 1.0});
    std::sort(pts.begin(), pts.end(), [](const OperatingPoint& a, const OperatingPoint& b) {
        return a.pf != b.pf ? a.pf < b.pf : a.pd < b.pd;
    });
    // keep only the max-pd point at each pf
    std::vector<OperatingPoint> best;
    for (const auto& p : pts) {
        if (!best.empty() && std::abs(best.back().pf - p.pf) <= tol) {
            best.back() = p;
        } else {
            best.push_back(p);
        }
    }
    std::vector<OperatingPoint> hull;
    for (const auto& p : best) {
        while (hull.size() >= 2) {
            const auto& o = hull[hull.size() - 2];
            const auto& a = hull[hull.size() - 1];
            double cross = (a.pf - o.pf) * (p.pd - o.pd) - (a.pd - o.pd) * (p.pf - o.pf);
            if (cross >= -tol) {
                hull.pop_back();  // non-right turn: a is below or on chord o-p
            } else {
                break;
            }
        }
        hull.push_back(p);
    }
    // anchor at (0,0) even when a pf=0 point with pd>0 starts the hull
    if (hull.front().pd > tol) hull.insert(hull.begin(), {0.0, 0.0});
    return hull;
}

// Eq-7 slope change when bins a and b are interchanged in the ranking.
inline double swap_slope_metric(const DistributionPair& dist, std::size_t a, std::size_t b) {
    if (a >= dist.space().L || b >= dist.space().L) {
        throw validation_error("swap_slope_metric: bin out of range");
    }
    double pa1 = dist.theta_h1()[a], pb1 = dist.theta_h1()[b];
    double pa0 = dist.theta_h0()[a], pb0 = dist.theta_h0()[b];
    if (pb1 == 0.0 || pb0 == 0.0) {
        throw validation_error("swap_slope_metric: zero reference-bin probability");
    }
    double eta1 = pa1 / pb1;
    double eta0 = pa0 / pb0;
    if (eta0 == 1.0) throw validation_error("swap_slope_metric: eta0 = 1 is degenerate");
    return pa1 * (1.0 - eta1) * eta0 / (pa0 * (1.0 - eta0) * eta1);
}

inline double auc(const std::vector<OperatingPoint>& polyline) {
    double area = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        area += 0.5 * (polyline[i].pd + polyline[i - 1].pd) * (polyline[i].pf - polyline[i - 1].pf);
    }
    return area;
}

inline std::vector<OperatingPoint> curve_points(const RocCurve& c) {
    std::vector<OperatingPoint> pts;
    pts.reserve(c.points.size());
    for (const auto& p : c.points) pts.push_back({p.pf, p.pd});
    return pts;
}

inline double auc(const RocCurve& c) { return auc(curve_points(c)); }

// Piecewise-linear evaluation of the curve polyline at a false-alarm rate.
inline double curve_value_at(const std::vector<OperatingPoint>& polyline, double pf) {
    if (!(pf >= 0.0 && pf <= 1.0)) throw validation_error("curve_value_at: pf in [0,1] required");
    if (polyline.empty()) throw validation_error("curve_value_at: empty polyline");
    if (pf < polyline.front().pf) return polyline.front().pd;
    // vertical segments allowed: take the max pd attained at or before pf
    std::size_t i = 0;
    double val = polyline.front().pd;
    for (std::size_t k = 1; k < polyline.size(); ++k) {
        if (polyline[k].pf <= pf) {
            i = k;
            val = std::max(val, polyline[k].pd);
        } else {
            double dx = polyline[k].pf - polyline[i].pf;
            double t = dx > 0.0 ? (pf - polyline[i].pf) / dx : 0.0;
            return std::max(val, polyline[i].pd + t * (polyline[k].pd - polyline[i].pd));
        }
    }
    return val;
}

inline double curve_value_at(const RocCurve& c, double pf) {
    return curve_value_at(curve_points(c), pf);
}

}  // namespace finiteroc
