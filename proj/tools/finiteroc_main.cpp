// Command-line front end: NP design, AOS enumeration, posterior reports,
// sort-confidence bounds, adaptive merging, curve comparison, forward feature
// selection and the Monte Carlo simulation harness.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "finiteroc/finiteroc.hpp"

namespace {

using nlohmann::json;

finiteroc::SourceData load_source(const std::string& path, const std::string& format,
                                  const std::string& kind) {
    bool csv = format == "csv" || (format == "auto" && path.size() > 4 &&
                                   path.substr(path.size() - 4) == ".csv");
    if (csv) {
        std::ifstream f(path);
        if (!f) throw finiteroc::io_error("cannot read " + path);
        return finiteroc::source_from_csv(f, kind);
    }
    return finiteroc::source_from_json(finiteroc::load_json_file(path));
}

void emit(const std::string& output, const std::string& text) {
    if (output.empty() || output == "-") {
        std::cout << text;
    } else {
        finiteroc::write_text_file(output, text);
    }
}

finiteroc::DistributionPair as_distribution(const finiteroc::SourceData& s) {
    if (std::holds_alternative<finiteroc::DistributionPair>(s)) {
        return std::get<finiteroc::DistributionPair>(s);
    }
    // counts reinterpreted as exact frequency weights
    const auto& h = std::get<finiteroc::HistogramPair>(s);
    return finiteroc::DistributionPair::from_weights(h.space(), h.counts_h0(), h.counts_h1());
}

finiteroc::HistogramPair as_counts(const finiteroc::SourceData& s) {
    if (!std::holds_alternative<finiteroc::HistogramPair>(s)) {
        throw finiteroc::validation_error("this subcommand needs kind=counts input");
    }
    return std::get<finiteroc::HistogramPair>(s);
}

int run(int argc, char** argv) {
    CLI::App app{"Neyman-Pearson ROC design and finite-sample confidence toolkit"};
    app.require_subcommand(1);

    std::string input, eval_path, output, format = "auto", kind = "counts", config_path;
    double nu = 0.1, tau = 1.0;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub, bool needs_input) {
        if (needs_input) {
            sub->add_option("--input", input, "input file")->required();
        }
        sub->add_option("--output", output, "output file (default stdout)");
        sub->add_option("--format", format, "input format: json|csv|auto")
            ->check(CLI::IsMember({"json", "csv", "auto"}));
        sub->add_option("--kind", kind, "value kind for CSV input: counts|probabilities")
            ->check(CLI::IsMember({"counts", "probabilities"}));
    };

    auto* design = app.add_subcommand("design", "NP design: ranking plus ROC/NEPC/EPC/TOC points");
    add_common(design, true);
    design->add_option("--eval", eval_path, "evaluation source (default: the input itself)");

    auto* enumerate = app.add_subcommand("enumerate", "all 2^(2^l) operating points (l <= 4)");
    add_common(enumerate, true);

    auto* posterior = app.add_subcommand("posterior", "per-bin beta posterior report");
    add_common(posterior, true);
    posterior->add_option("--nu", nu, "Chebychev tail half-width");

    auto* sortconf = app.add_subcommand("sortconf", "sort-error bound report");
    add_common(sortconf, true);

    auto* merge = app.add_subcommand("merge", "confidence-driven bin merging");
    add_common(merge, true);
    merge->add_option("--tau", tau, "confidence threshold");

    std::string curve_a, curve_b;
    auto* compare = app.add_subcommand("compare", "uniform preferability of two ROC curve files");
    compare->add_option("curve1", curve_a, "first RocCurve JSON")->required();
    compare->add_option("curve2", curve_b, "second RocCurve JSON")->required();
    compare->add_option("--output", output, "output file (default stdout)");

    std::vector<std::uint32_t> candidates;
    double select_z = 2.0, select_ceiling = 0.5;
    auto* select = app.add_subcommand("select", "forward feature selection on a sample CSV");
    select->add_option("--input", input, "sample CSV: class,x_0,...,x_{l-1}")->required();
    select->add_option("--output", output, "output file (default stdout)");
    select->add_option("--candidates", candidates, "candidate feature indices (default: all)");
    select->add_option("--z", select_z, "significance multiplier");
    select->add_option("--ceiling", select_ceiling, "sort-bound ceiling");
    select->add_option("--seed", seed, "random seed");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo error-propagation experiment");
    simulate->add_option("--config", config_path, "experiment config JSON")->required();
    simulate->add_option("--output", output, "output directory (overrides config)");
    auto* seed_opt = simulate->add_option("--seed", seed, "seed (overrides config)");

    CLI11_PARSE(app, argc, argv);

    if (design->parsed()) {
        auto src = load_source(input, format, kind);
        auto ev = eval_path.empty() ? src : load_source(eval_path, format, kind);
        finiteroc::RocCurve curve = std::visit(
            [](const auto& s, const auto& e) { return finiteroc::np_design(s, e); }, src, ev);
        emit(output, finiteroc::roc_to_json(curve).dump(2) + "\n");
    } else if (enumerate->parsed()) {
        auto dist = as_distribution(load_source(input, format, kind));
        json rows = json::array();
        for (const auto& [idx, op] : finiteroc::enumerate_aos(dist)) {
            rows.push_back({{"index", idx}, {"pf", op.pf}, {"pd", op.pd}});
        }
        emit(output, json{{"aos", rows}}.dump(2) + "\n");
    } else if (posterior->parsed()) {
        auto h = as_counts(load_source(input, format, kind));
        json bins = json::array();
        for (std::size_t j = 0; j < h.space().L; ++j) {
            json entry{{"bin", j}};
            const struct {
                const char* name;
                std::uint64_t k, n;
            } cls[2] = {{"h0", h.counts_h0()[j], h.n0()}, {"h1", h.counts_h1()[j], h.n1()}};
            for (const auto& c : cls) {
                finiteroc::BetaPosterior p(c.k, c.n);
                entry[c.name] = {{"k", c.k},
                                 {"n", c.n},
                                 {"mean", p.mean()},
                                 {"mode", p.mode()},
                                 {"variance", p.variance()},
                                 {"w90", p.w90()},
                                 {"chebychev", finiteroc::chebychev_tail(c.k, c.n, nu)}};
            }
            bins.push_back(entry);
        }
        emit(output, json{{"nu", nu}, {"bins", bins}}.dump(2) + "\n");
    } else if (sortconf->parsed()) {
        auto h = as_counts(load_source(input, format, kind));
        finiteroc::SortBound sb = finiteroc::sort_error_bound(h);
        json thresholds = json::array();
        for (double g : sb.thresholds) {
            thresholds.push_back(std::isfinite(g) ? json(g) : json("inf"));
        }
        emit(output, json{{"bound", sb.bound}, {"per_bin", sb.per_bin},
                          {"thresholds", thresholds}}
                         .dump(2) +
                         "\n");
    } else if (merge->parsed()) {
        auto h = as_counts(load_source(input, format, kind));
        finiteroc::MergedHistogram m = finiteroc::merge_until_confident(h, tau);
        json out{{"assignment", m.assignment},
                 {"merged_counts",
                  {{"h0", m.counts_h0}, {"h1", m.counts_h1}, {"n0", m.n0}, {"n1", m.n1}}},
                 {"n_merges", m.n_merges()},
                 {"tau", m.tau},
                 {"scores", m.scores}};
        emit(output, out.dump(2) + "\n");
    } else if (compare->parsed()) {
        auto c1 = finiteroc::roc_from_json(finiteroc::load_json_file(curve_a));
        auto c2 = finiteroc::roc_from_json(finiteroc::load_json_file(curve_b));
        auto hull = finiteroc::hull_of_union(c1, c2);
        json hull_json = json::array();
        for (const auto& p : hull) hull_json.push_back({{"pf", p.pf}, {"pd", p.pd}});
        json out{{"preferable_1_over_2", finiteroc::uniformly_preferable(c1, c2)},
                 {"preferable_2_over_1", finiteroc::uniformly_preferable(c2, c1)},
                 {"hull", hull_json}};
        emit(output, out.dump(2) + "\n");
    } else if (select->parsed()) {
        std::ifstream f(input);
        if (!f) throw finiteroc::io_error("cannot read " + input);
        finiteroc::SampleSet data = finiteroc::samples_from_csv(f);
        if (candidates.empty()) {
            for (std::uint32_t i = 0; i < data.n_features; ++i) candidates.push_back(i);
        }
        finiteroc::ForwardSelectConfig cfg;
        cfg.z = select_z;
        cfg.bound_ceiling = select_ceiling;
        cfg.seed = seed;
        finiteroc::SelectionTrace trace = finiteroc::forward_select(data, candidates, cfg);
        json steps = json::array();
        for (const auto& s : trace.steps) {
            json cands = json::array();
            for (const auto& c : s.candidates) {
                cands.push_back({{"feature", c.feature},
                                 {"auc_joint", c.auc_joint},
                                 {"auc_baseline", c.auc_baseline},
                                 {"gain", c.gain}});
            }
            steps.push_back({{"subset_before", s.subset_before},
                             {"candidates", cands},
                             {"chosen", s.chosen},
                             {"gain", s.gain},
                             {"sigma", s.sigma},
                             {"bound", s.bound},
                             {"accepted", s.accepted}});
        }
        json out{{"selected", trace.selected},
                 {"steps", steps},
                 {"stop_reason", trace.stop_reason}};
        emit(output, out.dump(2) + "\n");
    } else if (simulate->parsed()) {
        json cj = finiteroc::load_json_file(config_path);
        finiteroc::ExperimentConfig cfg;
        if (cj.contains("base")) {
            auto src = finiteroc::source_from_json(cj.at("base"));
            cfg.base = as_distribution(src);
        }
        if (cj.contains("l_values")) cfg.l_values = cj.at("l_values").get<std::vector<std::uint32_t>>();
        cfg.n0 = cj.value("n0", cfg.n0);
        cfg.n1 = cj.value("n1", cfg.n1);
        cfg.n_eval = cj.value("n_eval", cfg.n_eval);
        cfg.replications = cj.value("replications", cfg.replications);
        cfg.seed = cj.value("seed", cfg.seed);
        if (cj.contains("merge")) {
            cfg.merge.enabled = cj.at("merge").value("enabled", false);
            cfg.merge.tau = cj.at("merge").value("tau", 1.0);
        }
        cfg.compute_sort_bound = cj.value("compute_sort_bound", cfg.compute_sort_bound);
        cfg.output_dir = cj.value("output_dir", cfg.output_dir);
        if (!output.empty()) cfg.output_dir = output;
        if (seed_opt->count() > 0) cfg.seed = seed;
        finiteroc::run_experiment_to_files(cfg);
        std::cout << "wrote aggregate.csv, replications.csv, grid.csv, manifest.json to "
                  << cfg.output_dir << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const finiteroc::validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const finiteroc::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const finiteroc::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
