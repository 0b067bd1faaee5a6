#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "finiteroc/design.hpp"
#include "finiteroc/experiment.hpp"
#include "finiteroc/model.hpp"

using namespace finiteroc;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("white-feature extension basics") {
    auto base = paper_example_distribution();
    auto same = extend_with_white_features(base, 2);
    CHECK(same.space() == base.space());
    CHECK(same.weights_h0() == base.weights_h0());
    CHECK(same.weights_h1() == base.weights_h1());
    CHECK_THROWS_AS(extend_with_white_features(base, 1), validation_error);

    auto ext = extend_with_white_features(base, 4);
    CHECK(ext.space().L == 16);
    // the base pattern sits in the low-order bits; white bits are prepended
    for (std::size_t j = 0; j < 16; ++j) {
        CHECK(ext.weights_h0()[j] == base.weights_h0()[j & 3]);
        CHECK(ext.weights_h1()[j] == base.weights_h1()[j & 3]);
        CHECK(ext.theta_h0()[j] == Catch::Approx(base.theta_h0()[j & 3] / 4.0).epsilon(1e-14));
    }
}

TEST_CASE("white features leave the true curve's hull unchanged") {
    auto base = paper_example_distribution();
    auto base_roc = curve_points(np_design(base, base));
    for (std::uint32_t l : {3, 4, 5}) {
        auto ext = extend_with_white_features(base, l);
        auto hull = upper_hull(curve_points(np_design(ext, ext)));
        REQUIRE(hull.size() == base_roc.size());
        for (std::size_t i = 0; i < hull.size(); ++i) {
            CHECK(hull[i].pf == Catch::Approx(base_roc[i].pf).margin(1e-12));
            CHECK(hull[i].pd == Catch::Approx(base_roc[i].pd).margin(1e-12));
        }
    }
}

TEST_CASE("record built from the worked-example counts") {
    ExperimentConfig cfg;
    auto truth = paper_example_distribution();
    auto counts = paper_example_counts();
    auto rec = detail::make_record(cfg, 2, 0, truth, counts, counts, nullptr);
    CHECK(rec.nepc.source == "NEPC");
    CHECK(rec.epc.source == "EPC");
    CHECK(rec.toc.source == "TOC");
    // self-evaluated estimated curve
    CHECK(rec.nepc.points[2].pf == 0.375);
    CHECK(rec.nepc.points[2].pd == 0.625);
    // truth-evaluated estimated curve sits below the ROC
    CHECK(rec.toc.points[2].pf == 0.35);
    CHECK(rec.toc.points[2].pd == Catch::Approx(0.45).epsilon(1e-14));
    // evaluating on the design sample makes the EPC coincide with the NEPC
    for (std::size_t i = 0; i < rec.nepc.points.size(); ++i) {
        CHECK(rec.epc.points[i].pf == rec.nepc.points[i].pf);
        CHECK(rec.epc.points[i].pd == rec.nepc.points[i].pd);
    }
    CHECK(rec.sort_bound > 0.5);  // bins 1 and 3 are ambiguous at n = 40
    CHECK(rec.merges == 0);
}

TEST_CASE("replications are deterministic in (seed, l, rep)") {
    ExperimentConfig cfg;
    cfg.n0 = cfg.n1 = 128;
    cfg.n_eval = 128;
    cfg.compute_sort_bound = false;
    auto a = run_replication(cfg, 4, 3);
    auto b = run_replication(cfg, 4, 3);
    CHECK(a.auc_nepc == b.auc_nepc);
    CHECK(a.auc_epc == b.auc_epc);
    CHECK(a.auc_toc == b.auc_toc);
    auto c = run_replication(cfg, 4, 4);
    CHECK(a.auc_epc != c.auc_epc);
    cfg.seed = 9;
    auto d = run_replication(cfg, 4, 3);
    CHECK(a.auc_epc != d.auc_epc);
}

TEST_CASE("truth-evaluated curves never beat the true optimum") {
    ExperimentConfig cfg;
    cfg.n0 = cfg.n1 = 256;
    cfg.n_eval = 256;
    cfg.compute_sort_bound = false;
    for (std::uint32_t rep = 0; rep < 10; ++rep) {
        for (std::uint32_t l : {2, 4, 6}) {
            auto rec = run_replication(cfg, l, rep);
            CHECK(rec.auc_toc <= 0.64625 + 1e-12);
        }
    }
}

TEST_CASE("small-scale sweep shows the optimism/degradation trend") {
    ExperimentConfig cfg;
    cfg.l_values = {2, 4, 6};
    cfg.n0 = cfg.n1 = 256;
    cfg.n_eval = 512;
    cfg.replications = 20;
    cfg.seed = 1;
    auto res = run_experiment(cfg);
    REQUIRE(res.aggregate.size() == 3);
    CHECK(res.replications.size() == 60);
    CHECK(res.grid.size() == 303);

    for (std::size_t i = 1; i < 3; ++i) {
        CHECK(res.aggregate[i].mean_auc_nepc >= res.aggregate[i - 1].mean_auc_nepc - 1e-9);
        CHECK(res.aggregate[i].mean_auc_epc <= res.aggregate[i - 1].mean_auc_epc + 1e-9);
        CHECK(res.aggregate[i].mean_sort_bound >= res.aggregate[i - 1].mean_sort_bound - 1e-9);
    }
    for (const auto& row : res.aggregate) {
        CHECK(row.mean_auc_toc <= 0.64625 + 1e-9);
        CHECK(row.mean_merges == 0.0);
    }
    // grid endpoints
    for (const auto& g : res.grid) {
        if (g.pf == 1.0) {
            CHECK(g.mean_pd_nepc == 1.0);
            CHECK(g.mean_pd_epc == 1.0);
            CHECK(g.mean_pd_toc == 1.0);
        }
        CHECK(g.mean_pd_nepc >= 0.0);
        CHECK(g.mean_pd_nepc <= 1.0);
    }
}

TEST_CASE("base-space estimates converge to the true area") {
    ExperimentConfig cfg;
    cfg.l_values = {2};
    cfg.n0 = cfg.n1 = 8192;
    cfg.n_eval = 8192;
    cfg.replications = 20;
    cfg.seed = 5;
    cfg.compute_sort_bound = false;
    auto res = run_experiment(cfg);
    REQUIRE(res.aggregate.size() == 1);
    CHECK(res.aggregate[0].mean_auc_epc == Catch::Approx(0.64625).margin(0.01));
    CHECK(res.aggregate[0].mean_auc_toc == Catch::Approx(0.64625).margin(0.01));
    CHECK(res.aggregate[0].mean_auc_nepc == Catch::Approx(0.64625).margin(0.01));
    CHECK(res.aggregate[0].sd_auc_epc < 0.02);
}

TEST_CASE("merged runs record merge counts and stay well formed") {
    ExperimentConfig cfg;
    cfg.l_values = {4};
    cfg.n0 = cfg.n1 = 256;
    cfg.n_eval = 256;
    cfg.replications = 5;
    cfg.merge.enabled = true;
    cfg.merge.tau = 1.0;
    cfg.compute_sort_bound = true;
    auto res = run_experiment(cfg);
    bool merged_any = false;
    for (const auto& r : res.replications) {
        if (r.merges > 0) merged_any = true;
        CHECK(r.auc_nepc >= 0.0);
        CHECK(r.auc_nepc <= 1.0);
        CHECK(r.sort_bound >= 0.0);
        CHECK(r.sort_bound <= 1.0);
    }
    CHECK(merged_any);
}

TEST_CASE("csv outputs are byte-identical across reruns") {
    namespace fs = std::filesystem;
    ExperimentConfig cfg;
    cfg.l_values = {2, 3};
    cfg.n0 = cfg.n1 = 128;
    cfg.n_eval = 128;
    cfg.replications = 5;
    cfg.seed = 7;
    fs::path base = fs::temp_directory_path() / "finiteroc_exp_test";
    fs::remove_all(base);
    cfg.output_dir = (base / "a").string();
    run_experiment_to_files(cfg);
    cfg.output_dir = (base / "b").string();
    run_experiment_to_files(cfg);
    for (const char* name : {"aggregate.csv", "replications.csv", "grid.csv", "manifest.json"}) {
        CHECK(slurp(base / "a" / name) == slurp(base / "b" / name));
    }
    // sanity: headers in place
    CHECK(slurp(base / "a" / "aggregate.csv").substr(0, 2) == "l,");
    fs::remove_all(base);
}
