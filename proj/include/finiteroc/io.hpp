#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "finiteroc/design.hpp"
#include "finiteroc/errors.hpp"
#include "finiteroc/model.hpp"
#include "finiteroc/subset.hpp"

namespace finiteroc {

using SourceData = std::variant<DistributionPair, HistogramPair>;

// {"l": int, "h0": [...], "h1": [...], "kind": "counts"|"probabilities",
//  "n0": int?, "n1": int?}
inline SourceData source_from_json(const nlohmann::json& j) {
    if (!j.contains("l") || !j.contains("h0") || !j.contains("h1") || !j.contains("kind")) {
        throw validation_error("source JSON needs fields l, h0, h1, kind");
    }
    FeatureSpace sp(j.at("l").get<std::uint32_t>());
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "counts") {
        auto c0 = j.at("h0").get<std::vector<std::uint64_t>>();
        auto c1 = j.at("h1").get<std::vector<std::uint64_t>>();
        HistogramPair h = HistogramPair::from_counts(sp, std::move(c0), std::move(c1));
        if (j.contains("n0") && j.at("n0").get<std::uint64_t>() != h.n0()) {
            throw validation_error("n0 does not match the h0 count total");
        }
        if (j.contains("n1") && j.at("n1").get<std::uint64_t>() != h.n1()) {
            throw validation_error("n1 does not match the h1 count total");
        }
        return h;
    }
    if (kind == "probabilities") {
        return DistributionPair::from_probabilities(sp, j.at("h0").get<std::vector<double>>(),
                                                    j.at("h1").get<std::vector<double>>());
    }
    throw validation_error("kind must be \"counts\" or \"probabilities\"");
}

inline nlohmann::json source_to_json(const HistogramPair& h) {
    return {{"l", h.space().l}, {"kind", "counts"},   {"h0", h.counts_h0()},
            {"h1", h.counts_h1()}, {"n0", h.n0()},      {"n1", h.n1()}};
}

inline nlohmann::json source_to_json(const DistributionPair& d) {
    return {{"l", d.space().l},
            {"kind", "probabilities"},
            {"h0", d.theta_h0()},
            {"h1", d.theta_h1()}};
}

// CSV alternative: header, then rows of (bin_index, h0_value, h1_value).
inline SourceData source_from_csv(std::istream& in, const std::string& kind) {
    std::string line;
    std::vector<double> h0, h1;
    std::vector<std::size_t> idx;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) {
            throw validation_error("CSV row needs bin_index,h0_value,h1_value");
        }
        if (first) {
            first = false;
            try {
                (void)std::stod(a);
            } catch (...) {
                continue;  // header
            }
        }
        try {
            idx.push_back(static_cast<std::size_t>(std::stoull(a)));
            h0.push_back(std::stod(b));
            h1.push_back(std::stod(c));
        } catch (...) {
            throw validation_error("CSV row not numeric: " + line);
        }
    }
    std::uint32_t l = 0;
    while ((std::size_t{1} << l) < idx.size()) ++l;
    FeatureSpace sp(l);
    if (sp.L != idx.size()) throw validation_error("CSV must list all 2^l bins");
    std::vector<double> v0(sp.L), v1(sp.L);
    std::vector<bool> seen(sp.L, false);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= sp.L || seen[idx[i]]) throw validation_error("bad or duplicate bin index");
        seen[idx[i]] = true;
        v0[idx[i]] = h0[i];
        v1[idx[i]] = h1[i];
    }
    if (kind == "counts") {
        std::vector<std::uint64_t> c0(sp.L), c1(sp.L);
        for (std::size_t j = 0; j < sp.L; ++j) {
            c0[j] = static_cast<std::uint64_t>(v0[j]);
            c1[j] = static_cast<std::uint64_t>(v1[j]);
        }
        return HistogramPair::from_counts(sp, std::move(c0), std::move(c1));
    }
    return DistributionPair::from_probabilities(sp, std::move(v0), std::move(v1));
}

inline nlohmann::json roc_to_json(const RocCurve& c) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points) {
        pts.push_back({{"m", p.m}, {"pf", p.pf}, {"pd", p.pd}});
    }
    return {{"source", c.source}, {"points", pts}, {"ranking", c.ranking.order}};
}

inline RocCurve roc_from_json(const nlohmann::json& j) {
    RocCurve c;
    c.source = j.value("source", "estimated");
    for (const auto& p : j.at("points")) {
        c.points.push_back({p.value("m", std::size_t{0}), p.at("pf").get<double>(),
                            p.at("pd").get<double>()});
    }
    if (j.contains("ranking")) {
        c.ranking.order = j.at("ranking").get<std::vector<std::uint32_t>>();
        c.ranking.alpha.resize(c.ranking.order.size());
        for (std::size_t r = 0; r < c.ranking.order.size(); ++r) {
            c.ranking.alpha[c.ranking.order[r]] = static_cast<std::uint32_t>(r);
        }
    }
    return c;
}

// Sample CSV for feature selection: each row is "class,x_0,x_1,...,x_{l-1}";
// a header row is skipped if present.
inline SampleSet samples_from_csv(std::istream& in) {
    SampleSet s;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() < 2) throw validation_error("sample row needs class plus feature bits");
        if (first) {
            first = false;
            try {
                (void)std::stoi(cells[0]);
            } catch (...) {
                continue;  // header
            }
        }
        std::uint32_t nf = static_cast<std::uint32_t>(cells.size() - 1);
        if (s.n_features == 0) {
            s.n_features = nf;
        } else if (s.n_features != nf) {
            throw validation_error("inconsistent feature count across sample rows");
        }
        int label;
        std::uint32_t pattern = 0;
        try {
            label = std::stoi(cells[0]);
            for (std::uint32_t f = 0; f < nf; ++f) {
                int bit = std::stoi(cells[f + 1]);
                if (bit != 0 && bit != 1) throw validation_error("feature bits must be 0/1");
                if (bit) pattern |= 1u << f;
            }
        } catch (const validation_error&) {
            throw;
        } catch (...) {
            throw validation_error("sample row not numeric: " + line);
        }
        if (label == 0) {
            s.class0.push_back(pattern);
        } else if (label == 1) {
            s.class1.push_back(pattern);
        } else {
            throw validation_error("class label must be 0 or 1");
        }
    }
    if (s.n_features == 0) throw validation_error("no samples in file");
    return s;
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot read " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw validation_error("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot write " + path);
    f << text;
}

}  // namespace finiteroc
