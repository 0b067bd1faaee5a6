#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "finiteroc/design.hpp"
#include "finiteroc/errors.hpp"
#include "finiteroc/merge.hpp"
#include "finiteroc/model.hpp"
#include "finiteroc/random.hpp"
#include "finiteroc/sort_bound.hpp"

namespace finiteroc {

// The two-feature worked example, kept in exact integer weights.
inline DistributionPair paper_example_distribution() {
    FeatureSpace sp(2);
    return DistributionPair::from_weights(sp, {15, 25, 40, 20}, {30, 35, 20, 15});
}

inline HistogramPair paper_example_counts() {
    FeatureSpace sp(2);
    return HistogramPair::from_counts(sp, {6, 13, 12, 9}, {18, 10, 5, 7});
}

// Append independent fair bits to both classes: the extended theta over 2^l
// bins is the base theta of the low-order bit pattern divided by 2^(l - l0).
// The white features are prepended (they become the most significant index
// bits), so ascending bin index cycles through the base bins.
inline DistributionPair extend_with_white_features(const DistributionPair& base, std::uint32_t l) {
    std::uint32_t l0 = base.space().l;
    if (l < l0) throw validation_error("extend_with_white_features: l below base feature count");
    if (l == l0) return base;
    FeatureSpace sp(l);
    std::uint32_t shift = l - l0;
    std::size_t mask = base.space().L - 1;
    if (base.has_weights()) {
        std::vector<std::uint64_t> w0(sp.L), w1(sp.L);
        for (std::size_t j = 0; j < sp.L; ++j) {
            w0[j] = base.weights_h0()[j & mask];
            w1[j] = base.weights_h1()[j & mask];
        }
        return DistributionPair::from_weights(sp, std::move(w0), std::move(w1));
    }
    double scale = std::ldexp(1.0, -static_cast<int>(shift));
    std::vector<double> t0(sp.L), t1(sp.L);
    for (std::size_t j = 0; j < sp.L; ++j) {
        t0[j] = base.theta_h0()[j & mask] * scale;
        t1[j] = base.theta_h1()[j & mask] * scale;
    }
    return DistributionPair::from_probabilities(sp, std::move(t0), std::move(t1), true);
}

struct MergeSettings {
    bool enabled = false;
    double tau = 1.0;
};

struct ExperimentConfig {
    DistributionPair base = paper_example_distribution();
    std::vector<std::uint32_t> l_values{2, 4, 6, 8, 10, 12};
    std::uint64_t n0 = 1024, n1 = 1024;
    std::uint64_t n_eval = 2048;  // per class
    std::uint32_t replications = 100;
    std::uint64_t seed = 0;
    MergeSettings merge;
    bool compute_sort_bound = true;
    std::string output_dir = "out";
};

struct ReplicationRecord {
    std::uint32_t l = 0;
    std::uint32_t rep = 0;
    std::uint64_t seed = 0;
    RocCurve nepc, epc, toc;
    double auc_nepc = 0.0, auc_epc = 0.0, auc_toc = 0.0;
    double sort_bound = 0.0;
    std::size_t merges = 0;
};

struct ExperimentCaches {
    RatioStatCache ratio_stats;
    W90Cache w90;
};

namespace detail {

inline ReplicationRecord make_record(const ExperimentConfig& cfg, std::uint32_t l,
                                     std::uint32_t rep, const DistributionPair& extended,
                                     const HistogramPair& design_counts,
                                     const HistogramPair& eval_counts, ExperimentCaches* caches) {
    ReplicationRecord rec;
    rec.l = l;
    rec.rep = rep;
    rec.seed = cfg.seed;
    ExperimentCaches local;
    ExperimentCaches& cc = caches ? *caches : local;
    if (cfg.merge.enabled) {
        MergedHistogram m = merge_until_confident(design_counts, cfg.merge.tau, &cc.w90);
        rec.merges = m.n_merges();
        rec.nepc = design_on_merged(m, design_counts);
        rec.nepc.source = "NEPC";
        rec.epc = design_on_merged(m, eval_counts);
        rec.epc.source = "EPC";
        rec.toc = design_on_merged(m, extended);
        rec.toc.source = "TOC";
        if (cfg.compute_sort_bound) {
            rec.sort_bound = sort_error_bound_clipped(m.counts_h1, m.counts_h0, m.n1, m.n0, {},
                                                      &cc.ratio_stats);
        }
    } else {
        rec.nepc = np_design(design_counts, design_counts);
        rec.epc = np_design(design_counts, eval_counts);
        // the slots are role-named even if the eval sample equals the design
        rec.epc.source = "EPC";
        rec.toc = np_design(design_counts, extended);
        if (cfg.compute_sort_bound) {
            rec.sort_bound = sort_error_bound_clipped(design_counts, {}, &cc.ratio_stats);
        }
    }
    rec.auc_nepc = auc(rec.nepc);
    rec.auc_epc = auc(rec.epc);
    rec.auc_toc = auc(rec.toc);
    return rec;
}

}  // namespace detail

// One NP design on sampled counts: NEPC on the design sample itself, EPC on
// an independent sample, TOC on the true distribution. Deterministic per
// (seed, l, rep).
inline ReplicationRecord run_replication(const ExperimentConfig& cfg, std::uint32_t l,
                                         std::uint32_t rep, ExperimentCaches* caches = nullptr) {
    DistributionPair ext = extend_with_white_features(cfg.base, l);
    std::mt19937_64 rng = derive_rng(cfg.seed, l, rep);
    HistogramPair design_counts = HistogramPair::from_counts(
        ext.space(), multinomial_draw(rng, cfg.n0, ext.theta_h0()),
        multinomial_draw(rng, cfg.n1, ext.theta_h1()));
    HistogramPair eval_counts = HistogramPair::from_counts(
        ext.space(), multinomial_draw(rng, cfg.n_eval, ext.theta_h0()),
        multinomial_draw(rng, cfg.n_eval, ext.theta_h1()));
    return detail::make_record(cfg, l, rep, ext, design_counts, eval_counts, caches);
}

struct AggregateRow {
    std::uint32_t l = 0;
    double mean_auc_nepc = 0.0, sd_auc_nepc = 0.0;
    double mean_auc_epc = 0.0, sd_auc_epc = 0.0;
    double mean_auc_toc = 0.0, sd_auc_toc = 0.0;
    double mean_sort_bound = 0.0;
    double mean_merges = 0.0;
};

struct GridRow {
    std::uint32_t l = 0;
    double pf = 0.0;
    double mean_pd_nepc = 0.0, sd_pd_nepc = 0.0;
    double mean_pd_epc = 0.0, sd_pd_epc = 0.0;
    double mean_pd_toc = 0.0, sd_pd_toc = 0.0;
};

struct ReplicationRow {  // slim form kept for the per-replication CSV
    std::uint32_t l = 0, rep = 0;
    double auc_nepc = 0.0, auc_epc = 0.0, auc_toc = 0.0;
    double sort_bound = 0.0;
    std::size_t merges = 0;
};

struct ExperimentResult {
    std::vector<AggregateRow> aggregate;
    std::vector<GridRow> grid;  // 101 pf points per l
    std::vector<ReplicationRow> replications;
};

namespace detail {

class MeanVar {
public:
    void add(double x) {
        ++n_;
        double d = x - mean_;
        mean_ += d / n_;
        m2_ += d * (x - mean_);
    }
    double mean() const { return mean_; }
    double sd() const { return n_ > 1 ? std::sqrt(m2_ / (n_ - 1)) : 0.0; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0, m2_ = 0.0;
};

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    constexpr std::size_t kGridPoints = 101;
    ExperimentResult result;
    ExperimentCaches caches;
    for (std::uint32_t l : cfg.l_values) {
        DistributionPair ext = extend_with_white_features(cfg.base, l);
        detail::MeanVar a_nepc, a_epc, a_toc, a_bound, a_merges;
        std::vector<detail::MeanVar> g_nepc(kGridPoints), g_epc(kGridPoints), g_toc(kGridPoints);
        for (std::uint32_t rep = 0; rep < cfg.replications; ++rep) {
            std::mt19937_64 rng = derive_rng(cfg.seed, l, rep);
            HistogramPair design_counts = HistogramPair::from_counts(
                ext.space(), multinomial_draw(rng, cfg.n0, ext.theta_h0()),
                multinomial_draw(rng, cfg.n1, ext.theta_h1()));
            HistogramPair eval_counts = HistogramPair::from_counts(
                ext.space(), multinomial_draw(rng, cfg.n_eval, ext.theta_h0()),
                multinomial_draw(rng, cfg.n_eval, ext.theta_h1()));
            ReplicationRecord rec =
                detail::make_record(cfg, l, rep, ext, design_counts, eval_counts, &caches);
            a_nepc.add(rec.auc_nepc);
            a_epc.add(rec.auc_epc);
            a_toc.add(rec.auc_toc);
            a_bound.add(rec.sort_bound);
            a_merges.add(static_cast<double>(rec.merges));
            auto pn = curve_points(rec.nepc);
            auto pe = curve_points(rec.epc);
            auto pt = curve_points(rec.toc);
            for (std::size_t g = 0; g < kGridPoints; ++g) {
                double pf = static_cast<double>(g) / (kGridPoints - 1);
                g_nepc[g].add(curve_value_at(pn, pf));
                g_epc[g].add(curve_value_at(pe, pf));
                g_toc[g].add(curve_value_at(pt, pf));
            }
            result.replications.push_back({l, rep, rec.auc_nepc, rec.auc_epc, rec.auc_toc,
                                           rec.sort_bound, rec.merges});
        }
        result.aggregate.push_back({l, a_nepc.mean(), a_nepc.sd(), a_epc.mean(), a_epc.sd(),
                                    a_toc.mean(), a_toc.sd(), a_bound.mean(), a_merges.mean()});
        for (std::size_t g = 0; g < kGridPoints; ++g) {
            double pf = static_cast<double>(g) / (kGridPoints - 1);
            result.grid.push_back({l, pf, g_nepc[g].mean(), g_nepc[g].sd(), g_epc[g].mean(),
                                   g_epc[g].sd(), g_toc[g].mean(), g_toc[g].sd()});
        }
    }
    return result;
}

// Runs the experiment and writes aggregate.csv, replications.csv, grid.csv
// and manifest.json into cfg.output_dir.
inline ExperimentResult run_experiment_to_files(const ExperimentConfig& cfg) {
    ExperimentResult result = run_experiment(cfg);
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw io_error("cannot create output directory " + cfg.output_dir);
    auto open = [&](const std::string& name) {
        std::ofstream f(fs::path(cfg.output_dir) / name, std::ios::binary);
        if (!f) throw io_error("cannot write " + (fs::path(cfg.output_dir) / name).string());
        return f;
    };
    {
        auto f = open("aggregate.csv");
        f << "l,mean_auc_nepc,sd_auc_nepc,mean_auc_epc,sd_auc_epc,mean_auc_toc,sd_auc_toc,"
             "mean_sort_bound,mean_merges\n";
        for (const auto& r : result.aggregate) {
            f << r.l << ',' << detail::fmt(r.mean_auc_nepc) << ',' << detail::fmt(r.sd_auc_nepc)
              << ',' << detail::fmt(r.mean_auc_epc) << ',' << detail::fmt(r.sd_auc_epc) << ','
              << detail::fmt(r.mean_auc_toc) << ',' << detail::fmt(r.sd_auc_toc) << ','
              << detail::fmt(r.mean_sort_bound) << ',' << detail::fmt(r.mean_merges) << '\n';
        }
    }
    {
        auto f = open("replications.csv");
        f << "l,rep,auc_nepc,auc_epc,auc_toc,sort_bound,merges\n";
        for (const auto& r : result.replications) {
            f << r.l << ',' << r.rep << ',' << detail::fmt(r.auc_nepc) << ','
              << detail::fmt(r.auc_epc) << ',' << detail::fmt(r.auc_toc) << ','
              << detail::fmt(r.sort_bound) << ',' << r.merges << '\n';
        }
    }
    {
        auto f = open("grid.csv");
        f << "l,pf,mean_pd_nepc,sd_pd_nepc,mean_pd_epc,sd_pd_epc,mean_pd_toc,sd_pd_toc\n";
        for (const auto& r : result.grid) {
            f << r.l << ',' << detail::fmt(r.pf) << ',' << detail::fmt(r.mean_pd_nepc) << ','
              << detail::fmt(r.sd_pd_nepc) << ',' << detail::fmt(r.mean_pd_epc) << ','
              << detail::fmt(r.sd_pd_epc) << ',' << detail::fmt(r.mean_pd_toc) << ','
              << detail::fmt(r.sd_pd_toc) << '\n';
        }
    }
    {
        nlohmann::json manifest;
        manifest["seed"] = cfg.seed;
        manifest["l_values"] = cfg.l_values;
        manifest["n0"] = cfg.n0;
        manifest["n1"] = cfg.n1;
        manifest["n_eval"] = cfg.n_eval;
        manifest["replications"] = cfg.replications;
        manifest["merge"] = {{"enabled", cfg.merge.enabled}, {"tau", cfg.merge.tau}};
        manifest["compute_sort_bound"] = cfg.compute_sort_bound;
        manifest["base"] = {{"l", cfg.base.space().l},
                            {"h0", cfg.base.theta_h0()},
                            {"h1", cfg.base.theta_h1()}};
        manifest["stream"] = "mt19937_64 seeded by splitmix64(seed, l, rep)";
        auto f = open("manifest.json");
        f << manifest.dump(2) << '\n';
    }
    return result;
}

}  // namespace finiteroc
