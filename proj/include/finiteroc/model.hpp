#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "finiteroc/errors.hpp"

namespace finiteroc {

// Binary feature space with l features and L = 2^l histogram bins.
//
// Bit convention: feature x_0 is the MOST significant bit of the bin index,
// so for l = 2 the pattern (x_0, x_1) = (1, 0) maps to bin 2.
struct FeatureSpace {
    std::uint32_t l = 0;
    std::size_t L = 0;

    static constexpr std::uint32_t kDefaultCap = 24;

    FeatureSpace() = default;

    explicit FeatureSpace(std::uint32_t l_, std::uint32_t cap = kDefaultCap) : l(l_) {
        if (l_ < 1 || l_ > cap) {
            throw validation_error("feature count l=" + std::to_string(l_) +
                                   " outside [1, " + std::to_string(cap) + "]");
        }
        L = std::size_t{1} << l_;
    }

    friend bool operator==(const FeatureSpace& a, const FeatureSpace& b) { return a.l == b.l; }
    friend bool operator!=(const FeatureSpace& a, const FeatureSpace& b) { return a.l != b.l; }

    // Bin index of a bit pattern given as (x_0, ..., x_{l-1}).
    std::size_t bin_of(const std::vector<int>& bits) const {
        if (bits.size() != l) throw validation_error("bit pattern length != l");
        std::size_t j = 0;
        for (std::uint32_t i = 0; i < l; ++i) j = (j << 1) | (bits[i] ? 1u : 0u);
        return j;
    }
};

inline FeatureSpace make_feature_space(std::uint32_t l,
                                       std::uint32_t cap = FeatureSpace::kDefaultCap) {
    return FeatureSpace(l, cap);
}

// (P_f, P_d) pair.
struct OperatingPoint {
    double pf = 0.0;
    double pd = 0.0;

    friend bool operator==(const OperatingPoint& a, const OperatingPoint& b) {
        return a.pf == b.pf && a.pd == b.pd;
    }
};

// True class-conditional probability vectors over the L bins.
//
// When constructed from integer weights the exact representation is kept so
// that design and hull computations on small worked examples are free of
// rounding; probabilities are then weight/total with a single division.
class DistributionPair {
public:
    DistributionPair() = default;

    static DistributionPair from_probabilities(const FeatureSpace& space,
                                               std::vector<double> theta_h0,
                                               std::vector<double> theta_h1,
                                               bool renormalize = false) {
        DistributionPair d;
        d.space_ = space;
        check_probs(space, theta_h0, renormalize, "h0");
        check_probs(space, theta_h1, renormalize, "h1");
        d.theta_h0_ = std::move(theta_h0);
        d.theta_h1_ = std::move(theta_h1);
        return d;
    }

    static DistributionPair from_weights(const FeatureSpace& space,
                                         std::vector<std::uint64_t> w_h0,
                                         std::vector<std::uint64_t> w_h1) {
        DistributionPair d;
        d.space_ = space;
        if (w_h0.size() != space.L || w_h1.size() != space.L) {
            throw validation_error("weight vector length != L");
        }
        d.wtotal_h0_ = std::accumulate(w_h0.begin(), w_h0.end(), std::uint64_t{0});
        d.wtotal_h1_ = std::accumulate(w_h1.begin(), w_h1.end(), std::uint64_t{0});
        if (d.wtotal_h0_ == 0 || d.wtotal_h1_ == 0) {
            throw validation_error("weights must have positive total per class");
        }
        d.theta_h0_.resize(space.L);
        d.theta_h1_.resize(space.L);
        for (std::size_t j = 0; j < space.L; ++j) {
            d.theta_h0_[j] = static_cast<double>(w_h0[j]) / static_cast<double>(d.wtotal_h0_);
            d.theta_h1_[j] = static_cast<double>(w_h1[j]) / static_cast<double>(d.wtotal_h1_);
        }
        d.w_h0_ = std::move(w_h0);
        d.w_h1_ = std::move(w_h1);
        return d;
    }

    const FeatureSpace& space() const { return space_; }
    const std::vector<double>& theta_h0() const { return theta_h0_; }
    const std::vector<double>& theta_h1() const { return theta_h1_; }

    bool has_weights() const { return !w_h0_.empty(); }
    const std::vector<std::uint64_t>& weights_h0() const { return w_h0_; }
    const std::vector<std::uint64_t>& weights_h1() const { return w_h1_; }
    std::uint64_t weight_total_h0() const { return wtotal_h0_; }
    std::uint64_t weight_total_h1() const { return wtotal_h1_; }

private:
    static void check_probs(const FeatureSpace& space, std::vector<double>& p, bool renormalize,
                            const char* which) {
        if (p.size() != space.L) {
            throw validation_error(std::string("probability vector length != L for ") + which);
        }
        double sum = 0.0;
        for (double v : p) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw validation_error(std::string("probability outside [0,1] in ") + which);
            }
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            if (!renormalize) {
                throw validation_error(std::string("probabilities for ") + which +
                                       " do not sum to 1 within 1e-12");
            }
            if (sum <= 0.0) throw validation_error("cannot renormalize all-zero vector");
            for (double& v : p) v /= sum;
        }
    }

    FeatureSpace space_;
    std::vector<double> theta_h0_, theta_h1_;
    std::vector<std::uint64_t> w_h0_, w_h1_;
    std::uint64_t wtotal_h0_ = 0, wtotal_h1_ = 0;
};

// Observed per-class bin counts k_{j|Hi} with totals n_i.
class HistogramPair {
public:
    HistogramPair() = default;

    static HistogramPair from_counts(const FeatureSpace& space,
                                     std::vector<std::uint64_t> counts_h0,
                                     std::vector<std::uint64_t> counts_h1) {
        HistogramPair h;
        h.space_ = space;
        if (counts_h0.size() != space.L || counts_h1.size() != space.L) {
            throw validation_error("count vector length != L");
        }
        h.n0_ = std::accumulate(counts_h0.begin(), counts_h0.end(), std::uint64_t{0});
        h.n1_ = std::accumulate(counts_h1.begin(), counts_h1.end(), std::uint64_t{0});
        h.counts_h0_ = std::move(counts_h0);
        h.counts_h1_ = std::move(counts_h1);
        return h;
    }

    const FeatureSpace& space() const { return space_; }
    const std::vector<std::uint64_t>& counts_h0() const { return counts_h0_; }
    const std::vector<std::uint64_t>& counts_h1() const { return counts_h1_; }
    std::uint64_t n0() const { return n0_; }
    std::uint64_t n1() const { return n1_; }

    friend bool operator==(const HistogramPair& a, const HistogramPair& b) {
        return a.space_ == b.space_ && a.counts_h0_ == b.counts_h0_ && a.counts_h1_ == b.counts_h1_;
    }

private:
    FeatureSpace space_;
    std::vector<std::uint64_t> counts_h0_, counts_h1_;
    std::uint64_t n0_ = 0, n1_ = 0;
};

// A labeling of every bin as 0 or 1.
class Classifier {
public:
    Classifier() = default;

    Classifier(const FeatureSpace& space, std::vector<std::uint8_t> labels)
        : space_(space), labels_(std::move(labels)) {
        if (labels_.size() != space.L) throw validation_error("label vector length != L");
        for (auto& v : labels_) v = v ? 1 : 0;
    }

    // Labeling from the binary expansion of an integer: bit j is the label of
    // bin j. Only meaningful for L <= 64.
    static Classifier from_index(const FeatureSpace& space, std::uint64_t index) {
        if (space.L > 64) throw validation_error("classifier index form needs L <= 64");
        std::vector<std::uint8_t> labels(space.L);
        for (std::size_t j = 0; j < space.L; ++j) labels[j] = (index >> j) & 1u;
        return Classifier(space, std::move(labels));
    }

    const FeatureSpace& space() const { return space_; }
    const std::vector<std::uint8_t>& labels() const { return labels_; }
    std::uint8_t label(std::size_t j) const { return labels_[j]; }

    std::uint64_t index() const {
        if (labels_.size() > 64) throw validation_error("classifier index form needs L <= 64");
        std::uint64_t idx = 0;
        for (std::size_t j = 0; j < labels_.size(); ++j) {
            if (labels_[j]) idx |= std::uint64_t{1} << j;
        }
        return idx;
    }

    Classifier complement() const {
        std::vector<std::uint8_t> flipped(labels_.size());
        for (std::size_t j = 0; j < labels_.size(); ++j) flipped[j] = labels_[j] ? 0 : 1;
        return Classifier(space_, std::move(flipped));
    }

private:
    FeatureSpace space_;
    std::vector<std::uint8_t> labels_;
};

// P_f = sum of class-0 mass over the 1-labeled region, P_d likewise for class 1.
inline OperatingPoint operating_point(const DistributionPair& dist, const Classifier& g) {
    if (dist.space() != g.space()) throw validation_error("operating_point: space mismatch");
    if (dist.has_weights()) {
        std::uint64_t s0 = 0, s1 = 0;
        for (std::size_t j = 0; j < dist.space().L; ++j) {
            if (g.label(j)) {
                s0 += dist.weights_h0()[j];
                s1 += dist.weights_h1()[j];
            }
        }
        return {static_cast<double>(s0) / static_cast<double>(dist.weight_total_h0()),
                static_cast<double>(s1) / static_cast<double>(dist.weight_total_h1())};
    }
    double pf = 0.0, pd = 0.0;
    for (std::size_t j = 0; j < dist.space().L; ++j) {
        if (g.label(j)) {
            pf += dist.theta_h0()[j];
            pd += dist.theta_h1()[j];
        }
    }
    return {pf, pd};
}

inline OperatingPoint estimate_operating_point(const HistogramPair& counts, const Classifier& g) {
    if (counts.space() != g.space()) {
        throw validation_error("estimate_operating_point: space mismatch");
    }
    if (counts.n0() == 0 || counts.n1() == 0) {
        throw validation_error("estimate_operating_point: zero sample size");
    }
    std::uint64_t s0 = 0, s1 = 0;
    for (std::size_t j = 0; j < counts.space().L; ++j) {
        if (g.label(j)) {
            s0 += counts.counts_h0()[j];
            s1 += counts.counts_h1()[j];
        }
    }
    return {static_cast<double>(s0) / static_cast<double>(counts.n0()),
            static_cast<double>(s1) / static_cast<double>(counts.n1())};
}

}  // namespace finiteroc
