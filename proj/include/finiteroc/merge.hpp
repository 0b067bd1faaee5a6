#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "finiteroc/design.hpp"
#include "finiteroc/errors.hpp"
#include "finiteroc/model.hpp"
#include "finiteroc/posterior.hpp"

namespace finiteroc {

class W90Cache {
public:
    double get(std::uint64_t k, std::uint64_t n) {
        auto key = std::make_pair(k, n);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        double w = BetaPosterior(k, n).w90();
        cache_.emplace(key, w);
        return w;
    }

private:
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> cache_;
};

namespace detail {

inline double score_from_counts(std::uint64_t k0, std::uint64_t k1, std::uint64_t n0,
                                std::uint64_t n1, W90Cache& w90) {
    double f0 = static_cast<double>(k0) / static_cast<double>(n0);
    double f1 = static_cast<double>(k1) / static_cast<double>(n1);
    return std::abs(f1 - f0) / (w90.get(k1, n1) + w90.get(k0, n0));
}

}  // namespace detail

// Class-frequency gap over combined posterior uncertainty for one bin.
inline double bin_score(const HistogramPair& h, std::size_t j, W90Cache* cache = nullptr) {
    if (h.n0() == 0 || h.n1() == 0) throw validation_error("bin_score: zero sample size");
    if (j >= h.space().L) throw validation_error("bin_score: bin out of range");
    W90Cache local;
    W90Cache& c = cache ? *cache : local;
    return detail::score_from_counts(h.counts_h0()[j], h.counts_h1()[j], h.n0(), h.n1(), c);
}

// Histogram over a reduced bin set produced by confidence-driven merging.
// Class totals are conserved exactly; every original bin maps to exactly one
// merged bin.
struct MergedHistogram {
    FeatureSpace original_space;
    std::vector<std::uint64_t> counts_h0, counts_h1;  // per merged bin
    std::uint64_t n0 = 0, n1 = 0;
    std::vector<std::uint32_t> assignment;  // original bin -> merged bin
    std::vector<double> scores;             // final score per merged bin
    double tau = 0.0;

    std::size_t size() const { return counts_h0.size(); }
    std::size_t n_merges() const { return assignment.size() - counts_h0.size(); }
};

// Repeatedly merge the two globally lowest-scoring bins (score ties broken by
// lowest original bin index) until every remaining score reaches tau; never
// merges below two remaining bins.
inline MergedHistogram merge_until_confident(const HistogramPair& h, double tau,
                                             W90Cache* cache = nullptr) {
    if (!(tau > 0.0)) throw validation_error("merge_until_confident: tau > 0 required");
    if (h.n0() == 0 || h.n1() == 0) {
        throw validation_error("merge_until_confident: zero sample size");
    }
    W90Cache local;
    W90Cache& w90 = cache ? *cache : local;

    struct Group {
        std::uint32_t rep;  // lowest original bin index in the group
        std::uint64_t k0, k1;
        double score;
        bool alive = true;
    };
    std::size_t L = h.space().L;
    std::vector<Group> groups(L);
    std::vector<std::uint32_t> owner(L);  // original bin -> group slot
    for (std::size_t j = 0; j < L; ++j) {
        groups[j] = {static_cast<std::uint32_t>(j), h.counts_h0()[j], h.counts_h1()[j],
                     detail::score_from_counts(h.counts_h0()[j], h.counts_h1()[j], h.n0(), h.n1(),
                                               w90),
                     true};
        owner[j] = static_cast<std::uint32_t>(j);
    }

    std::size_t alive = L;
    while (alive > 2) {
        // two lowest scores, ties by lowest representative index
        std::size_t best = L, second = L;
        auto before = [&](std::size_t a, std::size_t b) {
            if (b == L) return true;
            if (groups[a].score != groups[b].score) return groups[a].score < groups[b].score;
            return groups[a].rep < groups[b].rep;
        };
        for (std::size_t g = 0; g < L; ++g) {
            if (!groups[g].alive) continue;
            if (before(g, best)) {
                second = best;
                best = g;
            } else if (before(g, second)) {
                second = g;
            }
        }
        if (groups[best].score >= tau) break;
        std::size_t keep = groups[best].rep < groups[second].rep ? best : second;
        std::size_t drop = keep == best ? second : best;
        groups[keep].k0 += groups[drop].k0;
        groups[keep].k1 += groups[drop].k1;
        groups[keep].score =
            detail::score_from_counts(groups[keep].k0, groups[keep].k1, h.n0(), h.n1(), w90);
        groups[drop].alive = false;
        for (std::size_t j = 0; j < L; ++j) {
            if (owner[j] == drop) owner[j] = static_cast<std::uint32_t>(keep);
        }
        --alive;
    }
    MergedHistogram out;
    out.original_space = h.space();
    out.n0 = h.n0();
    out.n1 = h.n1();
    out.tau = tau;
    out.assignment.resize(L);
    std::vector<std::uint32_t> slot_to_merged(L, 0);
    std::uint32_t next = 0;
    for (std::size_t g = 0; g < L; ++g) {
        if (!groups[g].alive) continue;
        slot_to_merged[g] = next++;
        out.counts_h0.push_back(groups[g].k0);
        out.counts_h1.push_back(groups[g].k1);
        out.scores.push_back(groups[g].score);
    }
    for (std::size_t j = 0; j < L; ++j) out.assignment[j] = slot_to_merged[owner[j]];
    return out;
}

namespace detail {

inline RocCurve design_on_merged_impl(const MergedHistogram& m, EvalMass eval) {
    std::size_t M = m.size();
    EvalMass agg;
    if (eval.exact()) {
        agg.w0.assign(M, 0);
        agg.w1.assign(M, 0);
        agg.t0 = eval.t0;
        agg.t1 = eval.t1;
        for (std::size_t j = 0; j < m.assignment.size(); ++j) {
            agg.w0[m.assignment[j]] += eval.w0[j];
            agg.w1[m.assignment[j]] += eval.w1[j];
        }
        agg.m0.resize(M);
        agg.m1.resize(M);
        for (std::size_t b = 0; b < M; ++b) {
            agg.m0[b] = static_cast<double>(agg.w0[b]) / static_cast<double>(agg.t0);
            agg.m1[b] = static_cast<double>(agg.w1[b]) / static_cast<double>(agg.t1);
        }
    } else {
        agg.m0.assign(M, 0.0);
        agg.m1.assign(M, 0.0);
        for (std::size_t j = 0; j < m.assignment.size(); ++j) {
            agg.m0[m.assignment[j]] += eval.m0[j];
            agg.m1[m.assignment[j]] += eval.m1[j];
        }
    }
    RocCurve c;
    c.source = "estimated";
    c.ranking = rank_exact(m.counts_h1, m.counts_h0);
    c.points = trace_points(c.ranking, agg);
    return c;
}

}  // namespace detail

// NP design on the merged counts; the eval source lives on the original
// feature space and its mass is aggregated through the assignment map.
inline RocCurve design_on_merged(const MergedHistogram& m, const DistributionPair& eval_on) {
    if (eval_on.space() != m.original_space) throw validation_error("design_on_merged: space mismatch");
    return detail::design_on_merged_impl(m, detail::eval_mass(eval_on));
}

inline RocCurve design_on_merged(const MergedHistogram& m, const HistogramPair& eval_on) {
    if (eval_on.space() != m.original_space) throw validation_error("design_on_merged: space mismatch");
    return detail::design_on_merged_impl(m, detail::eval_mass(eval_on));
}

}  // namespace finiteroc
