#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "finiteroc/errors.hpp"
#include "finiteroc/model.hpp"

namespace finiteroc {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic stream derivation: the generator for (seed, salt_a, salt_b)
// depends only on those values, so replication subsets can be re-run in
// isolation with identical results.
inline std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t salt_a = 0,
                                  std::uint64_t salt_b = 0) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ splitmix64(salt_a ^ 0x5bf0'3635'dcf6'6e2bULL));
    s = splitmix64(s ^ splitmix64(salt_b ^ 0xc2b2'ae3d'27d4'eb4fULL));
    return std::mt19937_64(s);
}

// One multinomial draw via sequential conditional binomials.
inline std::vector<std::uint64_t> multinomial_draw(std::mt19937_64& rng, std::uint64_t n,
                                                   const std::vector<double>& theta) {
    std::vector<std::uint64_t> counts(theta.size(), 0);
    std::uint64_t remaining = n;
    double rest = 1.0;
    for (std::size_t j = 0; j + 1 < theta.size() && remaining > 0; ++j) {
        double p = rest > 0.0 ? theta[j] / rest : 1.0;
        if (p > 1.0) p = 1.0;
        if (p < 0.0) p = 0.0;
        std::binomial_distribution<std::uint64_t> bin(remaining, p);
        std::uint64_t c = bin(rng);
        counts[j] = c;
        remaining -= c;
        rest -= theta[j];
    }
    if (!counts.empty()) counts.back() += remaining;
    return counts;
}

// Independent multinomial draws per class; deterministic for a fixed seed.
inline HistogramPair sample_counts(const DistributionPair& dist, std::uint64_t n0,
                                   std::uint64_t n1, std::uint64_t seed) {
    std::mt19937_64 rng = derive_rng(seed);
    auto c0 = multinomial_draw(rng, n0, dist.theta_h0());
    auto c1 = multinomial_draw(rng, n1, dist.theta_h1());
    return HistogramPair::from_counts(dist.space(), std::move(c0), std::move(c1));
}

// One Dirichlet(counts + 1) draw, i.e. the joint posterior of theta under the
// uniform simplex prior.
inline std::vector<double> dirichlet_draw(std::mt19937_64& rng,
                                          const std::vector<std::uint64_t>& counts) {
    std::vector<double> theta(counts.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        std::gamma_distribution<double> g(static_cast<double>(counts[j]) + 1.0, 1.0);
        theta[j] = g(rng);
        sum += theta[j];
    }
    for (double& v : theta) v /= sum;
    return theta;
}

struct JointPosteriorDraw {
    std::vector<double> theta_h0;
    std::vector<double> theta_h1;
};

inline JointPosteriorDraw sample_joint_posterior(const HistogramPair& counts, std::uint64_t seed) {
    std::mt19937_64 rng = derive_rng(seed, 0x6a09e667f3bcc908ULL);
    JointPosteriorDraw d;
    d.theta_h0 = dirichlet_draw(rng, counts.counts_h0());
    d.theta_h1 = dirichlet_draw(rng, counts.counts_h1());
    return d;
}

inline JointPosteriorDraw sample_joint_posterior(const HistogramPair& counts,
                                                 std::mt19937_64& rng) {
    JointPosteriorDraw d;
    d.theta_h0 = dirichlet_draw(rng, counts.counts_h0());
    d.theta_h1 = dirichlet_draw(rng, counts.counts_h1());
    return d;
}

}  // namespace finiteroc
