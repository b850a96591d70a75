#ifndef FSAUDIT_HARNESS_HPP_
#define FSAUDIT_HARNESS_HPP_
#pragma once

#include "fsaudit/classifiers.hpp"
#include "fsaudit/common.hpp"
#include "fsaudit/dataset.hpp"
#include "fsaudit/estimators.hpp"
#include "fsaudit/rankers.hpp"
#include "fsaudit/selectors.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fsaudit {

// ---------------------------------------------------------------------------
// Dataset manifests.  One dataset per line:  name,path,N,n[,label_column]
// Blank lines and lines starting with '#' are ignored; relative paths resolve
// against the manifest's directory.  N and n are checked after loading.
// ---------------------------------------------------------------------------

struct ManifestEntry {
    std::string name;
    std::string path;
    std::size_t instances{ 0 };
    std::size_t features{ 0 };
    LabelColumn label{};
};

[[nodiscard]] inline std::vector<ManifestEntry> read_manifest(std::istream &in, const std::filesystem::path &base_dir = {}) {
    std::vector<ManifestEntry> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = detail::trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        const auto cells = detail::split_csv_line(text);
        if (cells.size() < 4 || cells.size() > 5) {
            throw data_error("manifest line " + std::to_string(line_no) + ": expected name,path,N,n[,label_column]");
        }
        ManifestEntry e;
        e.name = std::string(detail::trim(cells[0]));
        std::filesystem::path p{ std::string(detail::trim(cells[1])) };
        if (p.is_relative() && !base_dir.empty()) {
            p = base_dir / p;
        }
        e.path = p.string();
        double n_inst = 0.0;
        double n_feat = 0.0;
        if (!detail::parse_real(detail::trim(cells[2]), n_inst) || !detail::parse_real(detail::trim(cells[3]), n_feat) || n_inst < 0 || n_feat < 0) {
            throw data_error("manifest line " + std::to_string(line_no) + ": N and n must be non-negative integers");
        }
        e.instances = static_cast<std::size_t>(n_inst);
        e.features = static_cast<std::size_t>(n_feat);
        if (cells.size() == 5) {
            e.label = LabelColumn::parse(detail::trim(cells[4]));
        }
        out.push_back(std::move(e));
    }
    return out;
}

[[nodiscard]] inline std::vector<ManifestEntry> load_manifest(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open manifest " + path);
    }
    return read_manifest(in, std::filesystem::path(path).parent_path());
}

/// Loads a manifest dataset and keeps its two most frequent classes.
[[nodiscard]] inline Dataset load_manifest_dataset(const ManifestEntry &e) {
    Dataset d = load_csv(e.path, e.label, e.name);
    if ((e.instances != 0 && d.size() != e.instances) || (e.features != 0 && d.dim() != e.features)) {
        throw data_error(e.name + ": manifest declares " + std::to_string(e.instances) + "x" + std::to_string(e.features) + " but file has " +
                         std::to_string(d.size()) + "x" + std::to_string(d.dim()));
    }
    return d.class_count() > 2 ? restrict_to_top2_classes(d) : d;
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

struct RunRecord {
    std::string dataset;
    std::size_t run{ 1 };  ///< 1-based
    ClassifierTag classifier{ ClassifierTag::LDC };
    std::optional<RankerTag> ranker;  ///< absent for ALL
    SchemeTag selector{ SchemeTag::ALL };
    FeatureSubset subset;
    std::optional<double> est_error;
    std::optional<double> true_error;
    std::size_t evaluations{ 0 };
    std::uint64_t seed{ 0 };
    std::optional<double> duration;
    std::optional<std::string> error;

    [[nodiscard]] bool failed() const noexcept { return error.has_value(); }
};

/// Unique identity of a grid cell.
[[nodiscard]] inline std::string record_key(std::string_view dataset, std::size_t run, ClassifierTag c, std::optional<RankerTag> r, SchemeTag s) {
    std::string key(dataset);
    key += '|';
    key += std::to_string(run);
    key += '|';
    key += to_string(c);
    key += '|';
    key += r ? to_string(*r) : std::string_view{ "-" };
    key += '|';
    key += to_string(s);
    return key;
}

[[nodiscard]] inline std::string record_key(const RunRecord &r) { return record_key(r.dataset, r.run, r.classifier, r.ranker, r.selector); }

[[nodiscard]] inline nlohmann::ordered_json to_json(const RunRecord &r) {
    nlohmann::ordered_json j;
    j["dataset"] = r.dataset;
    j["run"] = r.run;
    j["classifier"] = to_string(r.classifier);
    j["ranker"] = r.ranker ? nlohmann::ordered_json(to_string(*r.ranker)) : nlohmann::ordered_json(nullptr);
    j["selector"] = to_string(r.selector);
    j["subset"] = r.subset.indices();
    j["est_error"] = r.est_error ? nlohmann::ordered_json(*r.est_error) : nlohmann::ordered_json(nullptr);
    j["true_error"] = r.true_error ? nlohmann::ordered_json(*r.true_error) : nlohmann::ordered_json(nullptr);
    j["evaluations"] = r.evaluations;
    j["seed"] = r.seed;
    j["duration"] = r.duration ? nlohmann::ordered_json(*r.duration) : nlohmann::ordered_json(nullptr);
    if (r.error) {
        j["error"] = *r.error;
    }
    return j;
}

[[nodiscard]] inline RunRecord record_from_json(const nlohmann::json &j) {
    RunRecord r;
    r.dataset = j.at("dataset").get<std::string>();
    r.run = j.at("run").get<std::size_t>();
    r.classifier = parse_classifier_tag(j.at("classifier").get<std::string>());
    if (!j.at("ranker").is_null()) {
        r.ranker = parse_ranker_tag(j.at("ranker").get<std::string>());
    }
    r.selector = parse_scheme_tag(j.at("selector").get<std::string>());
    r.subset = FeatureSubset(j.at("subset").get<std::vector<std::size_t>>());
    if (!j.at("est_error").is_null()) {
        r.est_error = j.at("est_error").get<double>();
    }
    if (!j.at("true_error").is_null()) {
        r.true_error = j.at("true_error").get<double>();
    }
    r.evaluations = j.at("evaluations").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("duration") && !j.at("duration").is_null()) {
        r.duration = j.at("duration").get<double>();
    }
    if (j.contains("error")) {
        r.error = j.at("error").get<std::string>();
    }
    return r;
}

[[nodiscard]] inline std::string to_jsonl_line(const RunRecord &r) { return to_json(r).dump() + '\n'; }

/// Parses JSONL records; a malformed final line (an interrupted write) is ignored.
[[nodiscard]] inline std::vector<RunRecord> read_records(std::istream &in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!detail::trim(line).empty()) {
            lines.push_back(line);
        }
    }
    std::vector<RunRecord> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            out.push_back(record_from_json(nlohmann::json::parse(lines[i])));
        } catch (const std::exception &e) {
            if (i + 1 == lines.size()) {
                break;
            }
            throw data_error("results line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

[[nodiscard]] inline std::vector<RunRecord> load_records(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open results file " + path);
    }
    return read_records(in);
}

inline void write_records_csv(std::ostream &out, const std::vector<RunRecord> &records) {
    out << "dataset,run,classifier,ranker,selector,subset,est_error,true_error,evaluations,seed,duration,error\n";
    const auto num = [](const std::optional<double> &v) { return v ? detail::format_real(*v) : std::string{}; };
    for (const auto &r : records) {
        std::string subset;
        for (std::size_t i = 0; i < r.subset.size(); ++i) {
            subset += (i == 0 ? "" : ";") + std::to_string(r.subset[i]);
        }
        std::string err = r.error.value_or("");
        std::replace(err.begin(), err.end(), '"', '\'');
        out << r.dataset << ',' << r.run << ',' << to_string(r.classifier) << ',' << (r.ranker ? to_string(*r.ranker) : std::string_view{}) << ','
            << to_string(r.selector) << ',' << subset << ',' << num(r.est_error) << ',' << num(r.true_error) << ',' << r.evaluations << ',' << r.seed << ','
            << num(r.duration) << ',' << (err.empty() ? std::string{} : '"' + err + '"') << '\n';
    }
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

struct GridConfig {
    std::vector<ManifestEntry> datasets;
    std::size_t per_class{ 10 };
    std::size_t runs{ 10 };
    std::vector<ClassifierTag> classifiers{ all_classifier_tags.begin(), all_classifier_tags.end() };
    std::vector<RankerTag> rankers{ all_ranker_tags.begin(), all_ranker_tags.end() };
    std::vector<SchemeTag> selectors{ all_scheme_tags.begin(), all_scheme_tags.end() };
    std::uint64_t master_seed{ 0 };
    Hyperparams hyperparams{};
    RankerParams ranker_params{};
    std::size_t workers{ 1 };
    bool record_timing{ false };

    void validate() const {
        if (per_class < 2) {
            throw domain_error("per_class must be at least 2");
        }
        if (runs < 1) {
            throw domain_error("runs must be at least 1");
        }
        if (classifiers.empty() || selectors.empty()) {
            throw domain_error("grid needs at least one classifier and one selector");
        }
    }
};

/// |C| * |R| * |S \ {ALL}| * runs + |C| * runs, per dataset.
[[nodiscard]] inline std::size_t records_per_dataset(const GridConfig &cfg) {
    const bool has_all = std::find(cfg.selectors.begin(), cfg.selectors.end(), SchemeTag::ALL) != cfg.selectors.end();
    const std::size_t ranked = cfg.selectors.size() - (has_all ? 1 : 0);
    return cfg.classifiers.size() * (cfg.rankers.size() * ranked + (has_all ? 1 : 0)) * cfg.runs;
}

[[nodiscard]] inline std::size_t expected_record_count(const GridConfig &cfg) { return records_per_dataset(cfg) * cfg.datasets.size(); }

/// Seed used for every random decision of a (dataset, run) cell.
[[nodiscard]] inline std::uint64_t grid_cell_seed(const GridConfig &cfg, std::string_view dataset, std::size_t run) {
    return cell_seed(cfg.master_seed, dataset, run);
}

namespace detail {

struct GridUnit {
    std::size_t dataset{ 0 };
    std::size_t run{ 0 };
    std::size_t classifier{ 0 };
};

/// Probe, holdout and rankings of one (dataset, run), computed once.
struct UnitPrep {
    std::once_flag once;
    std::optional<SplitPair> split;
    std::vector<std::optional<RankedList>> rankings;
    std::vector<std::string> ranking_errors;
    std::string split_error;
};

inline void prepare_unit(UnitPrep &prep, const GridConfig &cfg, const Dataset &data, std::uint64_t seed, bool need_rankings) {
    try {
        prep.split = stratified_split(data, cfg.per_class, seed);
    } catch (const std::exception &e) {
        prep.split_error = e.what();
        return;
    }
    prep.rankings.resize(cfg.rankers.size());
    prep.ranking_errors.resize(cfg.rankers.size());
    if (!need_rankings) {
        return;
    }
    for (std::size_t r = 0; r < cfg.rankers.size(); ++r) {
        try {
            prep.rankings[r] = rank_features({ cfg.rankers[r], cfg.ranker_params }, prep.split->probe, seed);
        } catch (const std::exception &e) {
            prep.ranking_errors[r] = e.what();
        }
    }
}

inline std::vector<RunRecord> run_unit(const GridConfig &cfg, const Dataset &data, std::size_t run, ClassifierTag tag, UnitPrep &prep,
                                       const std::function<void()> &ensure_prep, const std::set<std::string> &done) {
    const std::uint64_t seed = grid_cell_seed(cfg, data.name(), run);
    const ClassifierKind kind{ tag, cfg.hyperparams };
    std::vector<RunRecord> out;
    CriterionCache cache;
    const auto cell = [&](std::optional<std::size_t> ranker_slot, SchemeTag scheme) {
        const std::optional<RankerTag> rtag = ranker_slot ? std::optional<RankerTag>(cfg.rankers[*ranker_slot]) : std::nullopt;
        if (done.contains(record_key(data.name(), run, tag, rtag, scheme))) {
            return;
        }
        ensure_prep();
        RunRecord rec;
        rec.dataset = data.name();
        rec.run = run;
        rec.classifier = tag;
        rec.ranker = rtag;
        rec.selector = scheme;
        rec.seed = seed;
        const auto start = std::chrono::steady_clock::now();
        try {
            if (!prep.split) {
                throw data_error(prep.split_error);
            }
            RankedList none;
            const RankedList *ranked = &none;
            if (ranker_slot) {
                if (!prep.rankings[*ranker_slot]) {
                    throw data_error(prep.ranking_errors[*ranker_slot]);
                }
                ranked = &*prep.rankings[*ranker_slot];
            }
            const auto &probe = prep.split->probe;
            const auto sel = select(SelectionScheme::of(scheme), *ranked, kind, probe, seed, &cache);
            rec.subset = sel.subset;
            rec.est_error = sel.criterion.value;
            rec.evaluations = sel.evaluations;
            rec.true_error = holdout_true_error(kind, probe, sel.subset, prep.split->holdout, seed).value;
        } catch (const std::exception &e) {
            rec.error = e.what();
        }
        if (cfg.record_timing) {
            rec.duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        out.push_back(std::move(rec));
    };
    for (const SchemeTag s : cfg.selectors) {
        if (s == SchemeTag::ALL) {
            cell(std::nullopt, s);
        }
    }
    for (std::size_t r = 0; r < cfg.rankers.size(); ++r) {
        for (const SchemeTag s : cfg.selectors) {
            if (s != SchemeTag::ALL) {
                cell(r, s);
            }
        }
    }
    return out;
}

}  // namespace detail

/// Receives records in canonical order: dataset, run, classifier, then the
/// ALL cell followed by rankers and selectors in configuration order.
using RecordSink = std::function<void(const RunRecord &)>;

/// Runs the grid over already-loaded datasets.  Cells whose key is in `done`
/// are skipped.  Output order and content do not depend on `cfg.workers`.
inline std::size_t run_grid(const GridConfig &cfg, const std::vector<Dataset> &datasets, const RecordSink &sink, const std::set<std::string> &done = {}) {
    cfg.validate();
    const bool need_rankings =
        !cfg.rankers.empty() && std::any_of(cfg.selectors.begin(), cfg.selectors.end(), [](SchemeTag s) { return s != SchemeTag::ALL; });
    std::vector<detail::GridUnit> units;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t run = 1; run <= cfg.runs; ++run) {
            for (std::size_t c = 0; c < cfg.classifiers.size(); ++c) {
                units.push_back({ d, run, c });
            }
        }
    }
    std::vector<std::unique_ptr<detail::UnitPrep>> preps;
    for (std::size_t i = 0; i < datasets.size() * cfg.runs; ++i) {
        preps.push_back(std::make_unique<detail::UnitPrep>());
    }
    const auto compute = [&](std::size_t i) {
        const auto &u = units[i];
        const Dataset &data = datasets[u.dataset];
        auto &prep = *preps[u.dataset * cfg.runs + (u.run - 1)];
        const std::uint64_t seed = grid_cell_seed(cfg, data.name(), u.run);
        const auto ensure = [&] { std::call_once(prep.once, [&] { detail::prepare_unit(prep, cfg, data, seed, need_rankings); }); };
        return detail::run_unit(cfg, data, u.run, cfg.classifiers[u.classifier], prep, ensure, done);
    };

    std::size_t written = 0;
    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, units.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < units.size(); ++i) {
            for (const auto &r : compute(i)) {
                sink(r);
                ++written;
            }
        }
        return written;
    }

    // Workers fill slots; this thread commits them in unit order.
    std::vector<std::optional<std::vector<RunRecord>>> results(units.size());
    std::mutex mutex;
    std::condition_variable ready;
    std::atomic<std::size_t> next{ 0 };
    const auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= units.size()) {
                return;
            }
            auto recs = compute(i);
            {
                const std::lock_guard lock(mutex);
                results[i] = std::move(recs);
            }
            ready.notify_all();
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (std::size_t i = 0; i < units.size(); ++i) {
        std::vector<RunRecord> recs;
        {
            std::unique_lock lock(mutex);
            ready.wait(lock, [&] { return results[i].has_value(); });
            recs = std::move(*results[i]);
            results[i].reset();
        }
        for (const auto &r : recs) {
            sink(r);
            ++written;
        }
    }
    for (auto &t : pool) {
        t.join();
    }
    return written;
}

/// Runs the grid described by the manifest entries and writes JSONL to
/// `out_path`.  With `resume`, an existing file is kept (a torn last line is
/// cut off) and only missing cells are computed and appended.
inline std::size_t run_grid_to_file(const GridConfig &cfg, const std::string &out_path, bool resume) {
    std::vector<Dataset> datasets;
    for (const auto &e : cfg.datasets) {
        datasets.push_back(load_manifest_dataset(e));
    }
    std::set<std::string> done;
    if (resume && std::filesystem::exists(out_path)) {
        std::string content;
        {
            std::ifstream in(out_path, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            content = ss.str();
        }
        std::string kept;
        std::size_t pos = 0;
        while (pos < content.size()) {
            const auto nl = content.find('\n', pos);
            if (nl == std::string::npos) {
                break;
            }
            const std::string line = content.substr(pos, nl - pos);
            try {
                const auto rec = record_from_json(nlohmann::json::parse(line));
                done.insert(record_key(rec));
                kept += line + '\n';
            } catch (const std::exception &) {
                break;
            }
            pos = nl + 1;
        }
        std::ofstream rewrite(out_path, std::ios::binary | std::ios::trunc);
        rewrite << kept;
    }
    std::ofstream out(out_path, std::ios::binary | (resume ? std::ios::app : std::ios::trunc));
    if (!out) {
        throw data_error("cannot write results file " + out_path);
    }
    return run_grid(cfg, datasets, [&](const RunRecord &r) {
        out << to_jsonl_line(r);
        out.flush();
    }, done);
}

// ---------------------------------------------------------------------------
// Sonar case study: all 1023 non-empty subsets of the SU top 10, scored by
// LDC with four estimators.
// ---------------------------------------------------------------------------

struct CaseStudyRow {
    std::size_t mask{ 0 };
    std::vector<std::size_t> positions;  ///< 1-based positions in the top-10 list
    FeatureSubset subset;
    double resub{ 0.0 };
    double loo{ 0.0 };
    double sloo{ 0.0 };
    double truth{ 0.0 };
};

struct CaseStudyBest {
    std::string estimator;  ///< RESUB, LOO, SLOO or TRUE
    std::size_t row{ 0 };   ///< index into rows
    std::optional<double> predicted;
    double truth{ 0.0 };
};

struct CaseStudyBundle {
    std::uint64_t probe_seed{ 0 };
    FeatureSubset top10;
    std::vector<std::string> top10_names;
    std::vector<CaseStudyRow> rows;
    std::vector<CaseStudyBest> best;
    double all_features_truth{ 0.0 };
};

[[nodiscard]] inline double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw domain_error("pearson needs two equally long samples of size >= 2");
    }
    const auto n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) {
        return 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

[[nodiscard]] inline CaseStudyBundle sonar_case_study(std::uint64_t probe_seed, const Dataset &sonar, std::size_t per_class = 10) {
    const auto split = stratified_split(sonar, per_class, probe_seed);
    const auto &probe = split.probe;
    const auto ranked = rank_features({ RankerTag::SU, {} }, probe, probe_seed);
    CaseStudyBundle b;
    b.probe_seed = probe_seed;
    b.top10 = top_k(ranked, 10);
    for (const std::size_t f : b.top10) {
        b.top10_names.push_back(sonar.feature_names()[f]);
    }
    const ClassifierKind ldc{ ClassifierTag::LDC, {} };
    const auto rows = all_rows(probe.size());
    for (std::size_t mask = 1; mask < 1024; ++mask) {
        CaseStudyRow row;
        row.mask = mask;
        std::vector<std::size_t> idx;
        for (std::size_t bit = 0; bit < 10; ++bit) {
            if (((mask >> bit) & 1U) != 0U) {
                row.positions.push_back(bit + 1);
                idx.push_back(b.top10[bit]);
            }
        }
        row.subset = FeatureSubset(std::move(idx));
        row.resub = resubstitution_error(ldc, probe, row.subset, probe_seed).value;
        const auto loo = loo_errors(ldc, probe, rows, row.subset, probe_seed);
        row.loo = loo.counting.value;
        row.sloo = loo.smoothed.value;
        row.truth = holdout_true_error(ldc, probe, row.subset, split.holdout, probe_seed).value;
        b.rows.push_back(std::move(row));
    }
    b.all_features_truth = b.rows.back().truth;
    const auto pick = [&](const std::string &name, auto value) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < b.rows.size(); ++i) {
            const double v = value(b.rows[i]);
            const double bv = value(b.rows[best]);
            if (v < bv || (v == bv && b.rows[i].subset.size() < b.rows[best].subset.size())) {
                best = i;
            }
        }
        CaseStudyBest out{ name, best, std::nullopt, b.rows[best].truth };
        if (name != "TRUE") {
            out.predicted = value(b.rows[best]);
        }
        b.best.push_back(out);
    };
    pick("RESUB", [](const CaseStudyRow &r) { return r.resub; });
    pick("LOO", [](const CaseStudyRow &r) { return r.loo; });
    pick("SLOO", [](const CaseStudyRow &r) { return r.sloo; });
    pick("TRUE", [](const CaseStudyRow &r) { return r.truth; });
    return b;
}

}  // namespace fsaudit

#endif  // FSAUDIT_HARNESS_HPP_
