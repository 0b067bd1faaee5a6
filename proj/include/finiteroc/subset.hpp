#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "finiteroc/design.hpp"
#include "finiteroc/errors.hpp"
#include "finiteroc/model.hpp"
#include "finiteroc/random.hpp"
#include "finiteroc/sort_bound.hpp"

namespace finiteroc {

// Labeled binary samples over the full feature set. Feature f of a pattern is
// stored at bit f; projections re-bin by masking feature bits, no resampling.
struct SampleSet {
    std::uint32_t n_features = 0;
    std::vector<std::uint32_t> class0, class1;
};

// Bin index of a pattern under an ordered feature subset; the first listed
// feature is the most significant bit of the projected index.
inline std::size_t project_pattern(std::uint32_t pattern, const std::vector<std::uint32_t>& subset) {
    std::size_t j = 0;
    for (std::uint32_t f : subset) j = (j << 1) | ((pattern >> f) & 1u);
    return j;
}

namespace detail {

inline std::vector<std::uint64_t> count_projected(const std::vector<std::uint32_t>& patterns,
                                                  const std::vector<std::uint32_t>& subset,
                                                  std::size_t stride, std::size_t offset,
                                                  std::size_t bins) {
    std::vector<std::uint64_t> counts(bins, 0);
    for (std::size_t i = offset; i < patterns.size(); i += stride) {
        ++counts[project_pattern(patterns[i], subset)];
    }
    return counts;
}

}  // namespace detail

inline HistogramPair project_counts(const SampleSet& data,
                                    const std::vector<std::uint32_t>& subset,
                                    std::size_t stride = 1, std::size_t offset = 0) {
    if (subset.empty()) throw validation_error("project_counts: empty subset");
    for (std::uint32_t f : subset) {
        if (f >= data.n_features) throw validation_error("project_counts: feature out of range");
    }
    FeatureSpace sp(static_cast<std::uint32_t>(subset.size()));
    return HistogramPair::from_counts(
        sp, detail::count_projected(data.class0, subset, stride, offset, sp.L),
        detail::count_projected(data.class1, subset, stride, offset, sp.L));
}

// Marginalize a full-space distribution onto an ordered feature subset.
inline DistributionPair project_distribution(const DistributionPair& full,
                                             const std::vector<std::uint32_t>& subset) {
    if (subset.empty()) throw validation_error("project_distribution: empty subset");
    std::uint32_t l = full.space().l;
    for (std::uint32_t f : subset) {
        if (f >= l) throw validation_error("project_distribution: feature out of range");
    }
    FeatureSpace sp(static_cast<std::uint32_t>(subset.size()));
    auto project_bin = [&](std::size_t j) {
        std::size_t out = 0;
        for (std::uint32_t f : subset) out = (out << 1) | ((j >> (l - 1 - f)) & 1u);
        return out;
    };
    if (full.has_weights()) {
        std::vector<std::uint64_t> w0(sp.L, 0), w1(sp.L, 0);
        for (std::size_t j = 0; j < full.space().L; ++j) {
            w0[project_bin(j)] += full.weights_h0()[j];
            w1[project_bin(j)] += full.weights_h1()[j];
        }
        return DistributionPair::from_weights(sp, std::move(w0), std::move(w1));
    }
    std::vector<double> t0(sp.L, 0.0), t1(sp.L, 0.0);
    for (std::size_t j = 0; j < full.space().L; ++j) {
        t0[project_bin(j)] += full.theta_h0()[j];
        t1[project_bin(j)] += full.theta_h1()[j];
    }
    return DistributionPair::from_probabilities(sp, std::move(t0), std::move(t1), true);
}

// c1 dominates c2 at every false-alarm rate (vertex dominance; sufficient for
// concave polylines).
inline bool uniformly_preferable(const std::vector<OperatingPoint>& c1,
                                 const std::vector<OperatingPoint>& c2, double tol = 1e-12) {
    for (const auto& v : c2) {
        if (curve_value_at(c1, v.pf) < v.pd - tol) return false;
    }
    return true;
}

inline bool uniformly_preferable(const RocCurve& c1, const RocCurve& c2, double tol = 1e-12) {
    return uniformly_preferable(curve_points(c1), curve_points(c2), tol);
}

inline std::vector<OperatingPoint> hull_of_union(std::vector<OperatingPoint> c1,
                                                 const std::vector<OperatingPoint>& c2) {
    c1.insert(c1.end(), c2.begin(), c2.end());
    return upper_hull(std::move(c1));
}

inline std::vector<OperatingPoint> hull_of_union(const RocCurve& c1, const RocCurve& c2) {
    return hull_of_union(curve_points(c1), curve_points(c2));
}

struct SubsetReport {
    std::vector<std::uint32_t> subset;
    RocCurve curve;
    SortBound bound;
    double auc_value = 0.0;
};

struct ForwardSelectConfig {
    double z = 2.0;              // significance multiplier on the AUC-difference sd
    double bound_ceiling = 0.5;  // stop once the subset's sort bound exceeds this
    std::size_t posterior_draws = 64;
    std::uint64_t seed = 0;
    std::size_t max_subset_size = 0;  // 0 = no limit beyond the candidates
};

struct CandidateEval {
    std::uint32_t feature = 0;
    double auc_joint = 0.0;     // EPC of subset + candidate
    double auc_baseline = 0.0;  // hull of the two separate curves
    double gain = 0.0;
};

struct ForwardStep {
    std::vector<std::uint32_t> subset_before;
    std::vector<CandidateEval> candidates;
    int chosen = -1;  // feature index, -1 if none accepted
    double gain = 0.0;
    double sigma = 0.0;
    double bound = 0.0;
    bool accepted = false;
};

struct SelectionTrace {
    std::vector<std::uint32_t> selected;
    std::vector<ForwardStep> steps;
    std::string stop_reason;
};

namespace detail {

// Operating points of a ranking's support classifiers under an explicit
// theta pair (used for posterior uncertainty of AUC).
inline double auc_under_theta(const Ranking& r, const std::vector<double>& t0,
                              const std::vector<double>& t1) {
    double area = 0.0, pf = 0.0, pd = 0.0;
    for (std::size_t m = 0; m < r.size(); ++m) {
        double npf = pf + t0[r.order[m]];
        double npd = pd + t1[r.order[m]];
        area += 0.5 * (pd + npd) * (npf - pf);
        pf = npf;
        pd = npd;
    }
    return area;
}

inline std::vector<OperatingPoint> points_under_theta(const Ranking& r,
                                                      const std::vector<double>& t0,
                                                      const std::vector<double>& t1) {
    std::vector<OperatingPoint> pts;
    pts.reserve(r.size() + 1);
    double pf = 0.0, pd = 0.0;
    pts.push_back({0.0, 0.0});
    for (std::size_t m = 0; m < r.size(); ++m) {
        pf += t0[r.order[m]];
        pd += t1[r.order[m]];
        pts.push_back({pf, pd});
    }
    return pts;
}

// Marginalize a theta vector over subset "from" onto the sub-subset "to"
// (every feature of "to" must appear in "from").
inline std::vector<double> marginalize_theta(const std::vector<double>& theta,
                                             const std::vector<std::uint32_t>& from,
                                             const std::vector<std::uint32_t>& to) {
    std::vector<std::size_t> pos;
    for (std::uint32_t f : to) {
        auto it = std::find(from.begin(), from.end(), f);
        if (it == from.end()) throw validation_error("marginalize_theta: feature not in source");
        pos.push_back(static_cast<std::size_t>(it - from.begin()));
    }
    std::size_t m = from.size();
    std::vector<double> out(std::size_t{1} << to.size(), 0.0);
    for (std::size_t j = 0; j < theta.size(); ++j) {
        std::size_t b = 0;
        for (std::size_t p : pos) b = (b << 1) | ((j >> (m - 1 - p)) & 1u);
        out[b] += theta[j];
    }
    return out;
}

}  // namespace detail

// Greedy forward growth: at each step the candidate whose joint EPC improves
// most over the hull of the separate curves is accepted, provided the gain
// clears z times the posterior sd of the AUC difference on the held-out
// split, and the grown subset's sort bound stays under the ceiling.
inline SelectionTrace forward_select(const SampleSet& data,
                                     const std::vector<std::uint32_t>& candidates,
                                     const ForwardSelectConfig& cfg = {}) {
    SelectionTrace trace;
    if (candidates.empty()) {
        trace.stop_reason = "no candidates";
        return trace;
    }
    if (data.class0.size() < 4 || data.class1.size() < 4) {
        throw validation_error("forward_select: too few samples to split");
    }
    // even indices design the classifiers, odd indices evaluate them
    auto design_hist = [&](const std::vector<std::uint32_t>& subset) {
        return project_counts(data, subset, 2, 0);
    };
    auto eval_hist = [&](const std::vector<std::uint32_t>& subset) {
        return project_counts(data, subset, 2, 1);
    };

    // per-feature curves are reused across steps
    std::vector<RocCurve> single(data.n_features);
    std::vector<bool> have_single(data.n_features, false);
    auto single_curve = [&](std::uint32_t f) -> const RocCurve& {
        if (!have_single[f]) {
            std::vector<std::uint32_t> s{f};
            single[f] = np_design(design_hist(s), eval_hist(s));
            have_single[f] = true;
        }
        return single[f];
    };

    std::vector<std::uint32_t> current;
    RocCurve current_curve;  // valid once current is non-empty
    std::vector<std::uint32_t> remaining = candidates;
    RatioStatCache bound_cache;
    std::uint64_t draw_salt = 0;

    while (!remaining.empty()) {
        if (cfg.max_subset_size > 0 && current.size() >= cfg.max_subset_size) {
            trace.stop_reason = "max subset size reached";
            break;
        }
        ForwardStep step;
        step.subset_before = current;
        std::vector<OperatingPoint> current_points =
            current.empty() ? std::vector<OperatingPoint>{{0.0, 0.0}, {1.0, 1.0}}
                            : curve_points(current_curve);

        int best_idx = -1;
        double best_gain = -1e300;
        std::vector<RocCurve> joint_curves(remaining.size());
        for (std::size_t c = 0; c < remaining.size(); ++c) {
            std::uint32_t f = remaining[c];
            std::vector<std::uint32_t> grown = current;
            grown.push_back(f);
            joint_curves[c] = np_design(design_hist(grown), eval_hist(grown));
            CandidateEval ce;
            ce.feature = f;
            ce.auc_joint = auc(joint_curves[c]);
            // the empty subset's curve is the chance diagonal; folding the
            // candidate's own curve into that baseline would make any first
            // feature unacceptable by construction
            ce.auc_baseline =
                current.empty()
                    ? 0.5
                    : auc(hull_of_union(current_points, curve_points(single_curve(f))));
            ce.gain = ce.auc_joint - ce.auc_baseline;
            step.candidates.push_back(ce);
            if (ce.gain > best_gain) {
                best_gain = ce.gain;
                best_idx = static_cast<int>(c);
            }
        }

        std::uint32_t f = remaining[static_cast<std::size_t>(best_idx)];
        std::vector<std::uint32_t> grown = current;
        grown.push_back(f);
        const RocCurve& joint = joint_curves[static_cast<std::size_t>(best_idx)];

        // posterior sd of the AUC difference, from joint-posterior draws on
        // the held-out counts
        HistogramPair he = eval_hist(grown);
        std::mt19937_64 rng = derive_rng(cfg.seed, 0x666f7277617264ULL, draw_salt++);
        std::vector<double> diffs;
        diffs.reserve(cfg.posterior_draws);
        for (std::size_t s = 0; s < cfg.posterior_draws; ++s) {
            JointPosteriorDraw d = sample_joint_posterior(he, rng);
            double a_joint = detail::auc_under_theta(joint.ranking, d.theta_h0, d.theta_h1);
            std::vector<OperatingPoint> base_pts;
            if (!current.empty()) {
                auto t0 = detail::marginalize_theta(d.theta_h0, grown, current);
                auto t1 = detail::marginalize_theta(d.theta_h1, grown, current);
                base_pts = detail::points_under_theta(current_curve.ranking, t0, t1);
            } else {
                base_pts = {{0.0, 0.0}, {1.0, 1.0}};
            }
            if (!current.empty()) {
                std::vector<std::uint32_t> fs{f};
                auto t0 = detail::marginalize_theta(d.theta_h0, grown, fs);
                auto t1 = detail::marginalize_theta(d.theta_h1, grown, fs);
                auto fpts = detail::points_under_theta(single_curve(f).ranking, t0, t1);
                base_pts.insert(base_pts.end(), fpts.begin(), fpts.end());
            }
            double a_base = auc(upper_hull(std::move(base_pts)));
            diffs.push_back(a_joint - a_base);
        }
        double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / diffs.size();
        double var = 0.0;
        for (double d : diffs) var += (d - mean) * (d - mean);
        var /= diffs.size() > 1 ? (diffs.size() - 1) : 1;
        step.sigma = std::sqrt(var);
        step.gain = best_gain;
        step.chosen = static_cast<int>(f);

        if (!(best_gain > cfg.z * step.sigma) || !(best_gain > 0.0)) {
            step.chosen = -1;
            step.accepted = false;
            trace.steps.push_back(std::move(step));
            trace.stop_reason = "no significant improvement";
            break;
        }

        step.bound = sort_error_bound_clipped(design_hist(grown), {}, &bound_cache);
        if (step.bound > cfg.bound_ceiling) {
            step.accepted = false;
            trace.steps.push_back(std::move(step));
            trace.stop_reason = "sort bound ceiling exceeded";
            break;
        }

        step.accepted = true;
        current = grown;
        current_curve = joint;
        remaining.erase(remaining.begin() + best_idx);
        trace.steps.push_back(std::move(step));
    }
    if (trace.stop_reason.empty()) {
        trace.stop_reason = remaining.empty() ? "candidates exhausted" : "stopped";
    }
    trace.selected = current;
    return trace;
}

}  // namespace finiteroc
