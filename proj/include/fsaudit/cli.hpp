#ifndef FSAUDIT_CLI_HPP_
#define FSAUDIT_CLI_HPP_
#pragma once

#include "fsaudit/classifiers.hpp"
#include "fsaudit/common.hpp"
#include "fsaudit/dataset.hpp"
#include "fsaudit/estimators.hpp"
#include "fsaudit/harness.hpp"
#include "fsaudit/rankers.hpp"
#include "fsaudit/report.hpp"
#include "fsaudit/samplesize.hpp"
#include "fsaudit/selectors.hpp"
#include "fsaudit/stats.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace fsaudit::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_data = 2;

/// Raised for bad flag values detected after parsing.
class usage_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Hyperparameter overrides read from a key=value file.
struct Overrides {
    Hyperparams hyper{};
    RankerParams ranker{};
    std::map<std::string, std::string> raw;
};

inline const std::vector<std::string> &config_keys() {
    static const std::vector<std::string> keys{ "ldc.lambda", "nb.var_floor", "dt.min_split", "rf.trees",      "svm.c",        "svm.tol",
                                                "svm.max_iter", "svmg.gamma", "su.bins",      "relieff.k", "rank_rf.trees", "rfe.halving_floor" };
    return keys;
}

inline Overrides parse_config(std::istream &in) {
    Overrides o;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        const auto text = detail::trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw usage_error("config line " + std::to_string(no) + ": expected key=value");
        }
        const std::string key(detail::trim(text.substr(0, eq)));
        const std::string val(detail::trim(text.substr(eq + 1)));
        const auto &keys = config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw usage_error("config line " + std::to_string(no) + ": unknown key '" + key + "'");
        }
        double v = 0.0;
        if (!detail::parse_real(val, v)) {
            throw usage_error("config line " + std::to_string(no) + ": '" + val + "' is not a number");
        }
        const auto count = [&] {
            if (v < 0.0 || v != std::floor(v)) {
                throw usage_error("config key " + key + " needs a non-negative integer");
            }
            return static_cast<std::size_t>(v);
        };
        if ((key == "ldc.lambda" || key == "svm.c" || key == "svm.tol") && !(v > 0.0)) {
            throw usage_error("config key " + key + " needs a positive value");
        }
        if (key == "ldc.lambda") {
            o.hyper.ldc_lambda = v;
        } else if (key == "nb.var_floor") {
            o.hyper.nb_var_floor = v;
        } else if (key == "dt.min_split") {
            o.hyper.dt_min_split = count();
        } else if (key == "rf.trees") {
            o.hyper.rf_trees = count();
        } else if (key == "svm.c") {
            o.hyper.svm_c = v;
            o.ranker.svm_c = v;
        } else if (key == "svm.tol") {
            o.hyper.svm_tol = v;
            o.ranker.svm_tol = v;
        } else if (key == "svm.max_iter") {
            o.hyper.svm_max_iter = count();
            o.ranker.svm_max_iter = count();
        } else if (key == "svmg.gamma") {
            o.hyper.svmg_gamma = v;
        } else if (key == "su.bins") {
            o.ranker.su_bins = count();
        } else if (key == "relieff.k") {
            o.ranker.relieff_k = count();
        } else if (key == "rank_rf.trees") {
            o.ranker.rf_trees = count();
        } else if (key == "rfe.halving_floor") {
            o.ranker.rfe_halving_floor = count();
        }
        o.raw[key] = val;
    }
    return o;
}

inline nlohmann::ordered_json hyper_json(const Hyperparams &h, const RankerParams &r) {
    nlohmann::ordered_json j;
    j["ldc.lambda"] = h.ldc_lambda;
    j["nb.var_floor"] = h.nb_var_floor;
    j["dt.min_split"] = h.dt_min_split;
    j["rf.trees"] = h.rf_trees;
    j["svm.c"] = h.svm_c;
    j["svm.tol"] = h.svm_tol;
    j["svm.max_iter"] = h.svm_max_iter;
    j["svmg.gamma"] = h.svmg_gamma;
    j["su.bins"] = r.su_bins;
    j["relieff.k"] = r.relieff_k;
    j["rank_rf.trees"] = r.rf_trees;
    j["rfe.halving_floor"] = r.rfe_halving_floor;
    return j;
}

inline FeatureSubset parse_subset(const std::string &text, std::size_t n) {
    std::vector<std::size_t> idx;
    if (detail::trim(text).empty()) {
        return {};
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        if (!detail::parse_real(detail::trim(item), v) || v < 0.0 || v != std::floor(v)) {
            throw usage_error("subset entry '" + item + "' is not a feature index");
        }
        const auto f = static_cast<std::size_t>(v);
        if (f >= n) {
            throw usage_error("feature index " + std::to_string(f) + " out of range (dataset has " + std::to_string(n) + " features)");
        }
        idx.push_back(f);
    }
    return FeatureSubset(std::move(idx));
}

inline std::string join(const FeatureSubset &s, char sep = ',') {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i != 0) {
            out += sep;
        }
        out += std::to_string(s[i]);
    }
    return out;
}

template <typename Tag, typename Parse>
std::vector<Tag> parse_list(const std::vector<std::string> &names, Parse parse) {
    std::vector<Tag> out;
    for (const auto &n : names) {
        std::stringstream ss(n);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!detail::trim(item).empty()) {
                out.push_back(parse(detail::trim(item)));
            }
        }
    }
    return out;
}

/// Short hex digest used in report file names.
inline std::string short_hash(std::string_view text) {
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(mix64(fnv1a64(text))));
    return std::string(buf.data()).substr(0, 8);
}

inline std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw data_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs the command line `args` (program name excluded).  Regular output goes
/// to `out`; diagnostics and the resolved configuration go to `err`.
inline int run(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
    CLI::App app{ "Feature-selection audit toolkit for wide datasets", "fsaudit" };
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value hyperparameter file")->check(CLI::ExistingFile);

    // samplesize
    auto *ss_cmd = app.add_subcommand("samplesize", "sample size needed to tell two features apart");
    double p1 = 0.0;
    double p2 = 0.0;
    double alpha = 0.05;
    std::optional<double> d_agree;
    bool smoothed = false;
    double var1 = 0.0;
    double var2 = 0.0;
    double cov = 0.0;
    bool one_tailed = false;
    bool curve = false;
    double gap = 0.05;
    double from = 0.55;
    double to = 0.95;
    double step = 0.01;
    std::vector<double> alphas{ 0.05, 0.01 };
    std::string svg_path;
    bool ss_json = false;
    ss_cmd->add_option("--p1", p1, "accuracy of the first feature");
    ss_cmd->add_option("--p2", p2, "accuracy of the second feature");
    ss_cmd->add_option("--d", d_agree, "probability both are correct (default p1*p2)");
    ss_cmd->add_option("--alpha", alpha, "significance level")->capture_default_str();
    ss_cmd->add_flag("--smoothed", smoothed, "normal approximation for smoothed scores");
    ss_cmd->add_option("--var1", var1, "variance of the first score");
    ss_cmd->add_option("--var2", var2, "variance of the second score");
    ss_cmd->add_option("--cov", cov, "covariance of the scores");
    ss_cmd->add_flag("--one-tailed", one_tailed, "one-tailed test for --smoothed");
    ss_cmd->add_flag("--curve", curve, "tabulate N over a p1 grid with p2 = p1 - gap");
    ss_cmd->add_option("--gap", gap, "p1 - p2 for --curve")->capture_default_str();
    ss_cmd->add_option("--from", from, "first p1 for --curve")->capture_default_str();
    ss_cmd->add_option("--to", to, "last p1 for --curve")->capture_default_str();
    ss_cmd->add_option("--step", step, "p1 step for --curve")->capture_default_str();
    ss_cmd->add_option("--alphas", alphas, "alpha levels for --curve")->capture_default_str();
    ss_cmd->add_option("--svg", svg_path, "also draw the curve to this SVG file");
    ss_cmd->add_flag("--json", ss_json, "machine-readable output");

    // shared dataset options
    std::string data_path;
    std::string label_col = "last";
    std::uint64_t seed = 0;
    std::string classifier_name = "LDC";
    std::string ranker_name = "SU";
    std::string scheme_name = "TOP10";
    std::optional<std::size_t> per_class;

    auto *rank_cmd = app.add_subcommand("rank", "rank all features of a dataset");
    std::optional<std::size_t> top;
    bool rank_json = false;
    rank_cmd->add_option("--data", data_path, "CSV file")->required();
    rank_cmd->add_option("--label-col", label_col, "label column: last, 0-based index or header name")->capture_default_str();
    rank_cmd->add_option("--ranker", ranker_name, "SU, RF_IMP, RELIEFF, SVM_W or SVM_RFE")->capture_default_str();
    rank_cmd->add_option("--seed", seed, "seed")->capture_default_str();
    rank_cmd->add_option("--per-class", per_class, "rank a stratified probe of this many instances per class");
    rank_cmd->add_option("--top", top, "print only the first k features");
    rank_cmd->add_flag("--json", rank_json, "machine-readable output");

    auto *sel_cmd = app.add_subcommand("select", "rank, then choose a subset with a selection scheme");
    bool sel_json = false;
    sel_cmd->add_option("--data", data_path, "CSV file")->required();
    sel_cmd->add_option("--label-col", label_col, "label column")->capture_default_str();
    sel_cmd->add_option("--classifier", classifier_name, "1NN, DT, LDC, NB, RF, SVMG or SVML")->capture_default_str();
    sel_cmd->add_option("--ranker", ranker_name, "ranker")->capture_default_str();
    sel_cmd->add_option("--scheme", scheme_name, "ALL, TOP3, TOP10, TOP20, BEST3, EX10 or RND20")->capture_default_str();
    sel_cmd->add_option("--seed", seed, "seed")->capture_default_str();
    sel_cmd->add_option("--per-class", per_class, "select on a stratified probe of this many instances per class");
    sel_cmd->add_flag("--json", sel_json, "machine-readable output");

    auto *est_cmd = app.add_subcommand("estimate", "error estimate of a classifier on a feature subset");
    std::string subset_text;
    std::string estimator_name = "SLOO";
    std::string holdout_path;
    bool est_json = false;
    est_cmd->add_option("--data", data_path, "CSV file (the probe unless --per-class is given)")->required();
    est_cmd->add_option("--label-col", label_col, "label column")->capture_default_str();
    est_cmd->add_option("--classifier", classifier_name, "classifier")->capture_default_str();
    est_cmd->add_option("--subset", subset_text, "comma-separated 0-based feature indices (default: all)");
    est_cmd->add_option("--estimator", estimator_name, "RESUB, LOO, SLOO, RLOO or HOLDOUT")->capture_default_str();
    est_cmd->add_option("--ranker", ranker_name, "ranker for RLOO")->capture_default_str();
    est_cmd->add_option("--scheme", scheme_name, "selection scheme for RLOO")->capture_default_str();
    est_cmd->add_option("--holdout", holdout_path, "CSV with holdout instances for HOLDOUT");
    est_cmd->add_option("--per-class", per_class, "split the data into a probe of this many per class and a holdout");
    est_cmd->add_option("--seed", seed, "seed")->capture_default_str();
    est_cmd->add_flag("--json", est_json, "machine-readable output");

    auto *bench_cmd = app.add_subcommand("bench", "run the classifier x ranker x selector grid");
    std::string manifest_path;
    std::string out_path;
    std::string csv_path;
    std::optional<std::size_t> workers;
    std::vector<std::string> classifiers;
    std::vector<std::string> rankers;
    std::vector<std::string> selectors;
    std::size_t runs = 10;
    std::size_t bench_per_class = 10;
    bool resume = false;
    bool record_timing = false;
    bool bench_json = false;
    bench_cmd->add_option("--manifest", manifest_path, "dataset manifest")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--out", out_path, "results JSONL")->required();
    bench_cmd->add_option("--csv", csv_path, "also export the results as CSV");
    bench_cmd->add_option("--workers", workers, "worker threads (default: FSAUDIT_WORKERS or 1)");
    bench_cmd->add_option("--seed", seed, "master seed")->capture_default_str();
    bench_cmd->add_option("--classifiers", classifiers, "classifier tags (default: all)")->delimiter(',');
    bench_cmd->add_option("--rankers", rankers, "ranker tags (default: all)")->delimiter(',');
    bench_cmd->add_option("--selectors", selectors, "selector tags (default: all)")->delimiter(',');
    bench_cmd->add_option("--runs", runs, "sampling runs per dataset")->capture_default_str();
    bench_cmd->add_option("--per-class", bench_per_class, "probe instances per class")->capture_default_str();
    bench_cmd->add_flag("--resume", resume, "keep completed cells of an existing results file");
    bench_cmd->add_flag("--record-timing", record_timing, "store wall-clock seconds per cell (output is then not reproducible)");
    bench_cmd->add_flag("--json", bench_json, "machine-readable summary");

    auto *case_cmd = app.add_subcommand("case-study", "estimator case study on all subsets of a top-10 list");
    auto *sonar_cmd = case_cmd->add_subcommand("sonar", "sonar data, SU top 10, LDC");
    case_cmd->require_subcommand(1);
    std::string out_dir;
    bool case_json = false;
    sonar_cmd->add_option("--data", data_path, "sonar CSV")->required();
    sonar_cmd->add_option("--label-col", label_col, "label column")->capture_default_str();
    sonar_cmd->add_option("--seed", seed, "probe seed")->capture_default_str();
    sonar_cmd->add_option("--out", out_dir, "output directory")->required();
    sonar_cmd->add_flag("--json", case_json, "machine-readable summary");

    auto *an_cmd = app.add_subcommand("analyze", "rank tables and Friedman tests from grid results");
    std::string in_path;
    std::string metric_name = "true";
    double an_alpha = 0.05;
    bool an_json = false;
    an_cmd->add_option("--in", in_path, "results JSONL")->required()->check(CLI::ExistingFile);
    an_cmd->add_option("--out", out_dir, "output directory")->required();
    an_cmd->add_option("--metric", metric_name, "rank by holdout error (true) or estimated error (est)")->capture_default_str();
    an_cmd->add_option("--alpha", an_alpha, "significance level for the best-group procedure")->capture_default_str();
    an_cmd->add_flag("--json", an_json, "machine-readable summary");

    auto *rep_cmd = app.add_subcommand("report", "rank table and glyph plots from grid results");
    bool rep_json = false;
    rep_cmd->add_option("--in", in_path, "results JSONL")->required()->check(CLI::ExistingFile);
    rep_cmd->add_option("--out", out_dir, "output directory")->required();
    rep_cmd->add_option("--metric", metric_name, "true or est")->capture_default_str();
    rep_cmd->add_option("--alpha", an_alpha, "significance level for boxes")->capture_default_str();
    rep_cmd->add_flag("--json", rep_json, "machine-readable summary");

    auto *demo_cmd = app.add_subcommand("demo", "built-in demonstrations");
    demo_cmd->require_subcommand(1);
    auto *fig3_cmd = demo_cmd->add_subcommand("fig3", "two-feature data where LDC and 1NN disagree");
    std::string mode = "ldc-wins";
    bool demo_json = false;
    fig3_cmd->add_option("--mode", mode, "ldc-wins or nn-wins")->check(CLI::IsMember({ "ldc-wins", "nn-wins" }))->capture_default_str();
    fig3_cmd->add_option("--seed", seed, "layout seed")->capture_default_str();
    fig3_cmd->add_option("--out", out_path, "also write the data as CSV");
    fig3_cmd->add_flag("--json", demo_json, "machine-readable output");
    auto *synth_cmd = demo_cmd->add_subcommand("synth", "write a synthetic two-Gaussian wide dataset");
    GaussianProblem problem;
    std::string synth_name = "synthetic";
    synth_cmd->add_option("--out", out_path, "CSV path")->required();
    synth_cmd->add_option("--per-class", problem.per_class, "instances per class")->capture_default_str();
    synth_cmd->add_option("--features", problem.features, "number of features")->capture_default_str();
    synth_cmd->add_option("--informative", problem.informative, "features carrying the class shift")->capture_default_str();
    synth_cmd->add_option("--shift", problem.shift, "mean shift of informative features")->capture_default_str();
    synth_cmd->add_option("--seed", seed, "seed")->capture_default_str();
    synth_cmd->add_option("--name", synth_name, "dataset name")->capture_default_str();
    synth_cmd->add_flag("--json", demo_json, "machine-readable output");

    if (args.empty()) {
        err << app.help();
        return exit_usage;
    }
    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        err << "fsaudit: " << e.what() << '\n';
        return exit_usage;
    }

    // Help requested on a subcommand is reported through the same exception
    // path above; from here on the command line is well-formed.
    const auto log_config = [&](const std::string &command, nlohmann::ordered_json extra, const Overrides &ov) {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["seed"] = seed;
        for (auto it = extra.begin(); it != extra.end(); ++it) {
            j[it.key()] = it.value();
        }
        j["hyperparameters"] = hyper_json(ov.hyper, ov.ranker);
        err << "fsaudit: config " << j.dump() << '\n';
    };

    try {
        Overrides ov;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            ov = parse_config(in);
        }
        const LabelColumn label = LabelColumn::parse(label_col);

        if (*ss_cmd) {
            nlohmann::ordered_json j;
            if (curve) {
                log_config("samplesize", { { "curve", true }, { "gap", gap }, { "from", from }, { "to", to }, { "step", step }, { "alphas", alphas } }, ov);
                const auto grid = linear_grid(from, to, step);
                const auto pts = sample_size_curve(grid, gap, alphas, d_agree);
                if (!svg_path.empty()) {
                    write_file(svg_path, [&](std::ostream &o) { emit_samplesize_svg(pts, o); });
                }
                if (ss_json) {
                    for (const auto &p : pts) {
                        j.push_back({ { "p1", p.p1 }, { "alpha", p.alpha }, { "n", p.n } });
                    }
                    out << j.dump() << '\n';
                } else {
                    out << "p1,alpha,n\n";
                    for (const auto &p : pts) {
                        out << detail::fixed(p.p1, 4) << ',' << detail::fixed(p.alpha, 4) << ',' << detail::fixed(p.n, 1) << '\n';
                    }
                }
                return exit_ok;
            }
            if (smoothed) {
                log_config("samplesize", { { "smoothed", true }, { "p1", p1 }, { "p2", p2 }, { "var1", var1 }, { "var2", var2 }, { "cov", cov }, { "alpha", alpha }, { "two_tailed", !one_tailed } }, ov);
                const auto res = smoothed_sample_size({ p1, p2, var1, var2, cov, alpha, !one_tailed });
                if (ss_json) {
                    out << nlohmann::ordered_json{ { "n", res.n }, { "degenerate", res.degenerate } }.dump() << '\n';
                } else {
                    out << detail::fixed(res.n, 1) << (res.degenerate ? " (degenerate: no variance in the score difference)" : "") << '\n';
                }
                return exit_ok;
            }
            const McNemarPlan plan{ p1, p2, d_agree.value_or(p1 * p2), alpha };
            log_config("samplesize", { { "p1", p1 }, { "p2", p2 }, { "d", plan.d_agree }, { "alpha", alpha } }, ov);
            const double n = mcnemar_sample_size(plan);
            if (ss_json) {
                out << nlohmann::ordered_json{ { "n", n }, { "n_ceil", std::ceil(n) } }.dump() << '\n';
            } else {
                out << detail::fixed(n, 1) << '\n';
            }
            return exit_ok;
        }

        const auto load_probe = [&](Dataset &full) -> std::pair<Dataset, std::optional<Dataset>> {
            full = load_csv(data_path, label);
            if (full.class_count() > 2) {
                full = restrict_to_top2_classes(full);
            }
            if (per_class) {
                auto split = stratified_split(full, *per_class, seed);
                return { std::move(split.probe), std::move(split.holdout) };
            }
            return { full, std::nullopt };
        };

        if (*rank_cmd) {
            log_config("rank", { { "data", data_path }, { "ranker", ranker_name }, { "per_class", per_class ? nlohmann::ordered_json(*per_class) : nlohmann::ordered_json(nullptr) } }, ov);
            const RankerKind kind{ parse_ranker_tag(ranker_name), ov.ranker };
            Dataset full;
            const auto [probe, holdout] = load_probe(full);
            const auto ranked = rank_features(kind, probe, seed);
            const std::size_t limit = top ? std::min(*top, ranked.size()) : ranked.size();
            if (rank_json) {
                nlohmann::ordered_json j = nlohmann::ordered_json::array();
                for (std::size_t i = 0; i < limit; ++i) {
                    j.push_back({ { "rank", i + 1 }, { "feature_index", ranked.order[i] }, { "feature_name", probe.feature_names()[ranked.order[i]] }, { "score", ranked.scores[i] } });
                }
                out << j.dump() << '\n';
            } else {
                out << "rank,feature_index,feature_name,score\n";
                for (std::size_t i = 0; i < limit; ++i) {
                    out << i + 1 << ',' << ranked.order[i] << ',' << probe.feature_names()[ranked.order[i]] << ',' << detail::format_real(ranked.scores[i]) << '\n';
                }
            }
            return exit_ok;
        }

        if (*sel_cmd) {
            log_config("select", { { "data", data_path }, { "classifier", classifier_name }, { "ranker", ranker_name }, { "scheme", scheme_name } }, ov);
            const ClassifierKind ck{ parse_classifier_tag(classifier_name), ov.hyper };
            const RankerKind rk{ parse_ranker_tag(ranker_name), ov.ranker };
            const auto scheme = SelectionScheme::of(parse_scheme_tag(scheme_name));
            Dataset full;
            const auto [probe, holdout] = load_probe(full);
            RankedList ranked;
            if (scheme.search != SelectionScheme::Search::all) {
                ranked = rank_features(rk, probe, seed);
            }
            const auto res = select(scheme, ranked, ck, probe, seed);
            std::optional<double> truth;
            if (holdout) {
                truth = holdout_true_error(ck, probe, res.subset, *holdout, seed).value;
            }
            if (sel_json) {
                nlohmann::ordered_json j{ { "subset", res.subset.indices() }, { "criterion", res.criterion.value }, { "evaluations", res.evaluations }, { "candidates_tied", res.candidates_tied } };
                j["true_error"] = truth ? nlohmann::ordered_json(*truth) : nlohmann::ordered_json(nullptr);
                out << j.dump() << '\n';
            } else {
                out << "subset: " << join(res.subset) << '\n';
                out << "criterion (smoothed LOO): " << detail::format_real(res.criterion.value) << '\n';
                out << "evaluations: " << res.evaluations << '\n';
                out << "tied candidates: " << res.candidates_tied << '\n';
                if (truth) {
                    out << "holdout error: " << detail::format_real(*truth) << '\n';
                }
            }
            return exit_ok;
        }

        if (*est_cmd) {
            log_config("estimate", { { "data", data_path }, { "classifier", classifier_name }, { "estimator", estimator_name }, { "subset", subset_text } }, ov);
            const ClassifierKind ck{ parse_classifier_tag(classifier_name), ov.hyper };
            const EstimateKind ek = parse_estimate_kind(estimator_name);
            Dataset full;
            auto [probe, holdout] = load_probe(full);
            const FeatureSubset subset = subset_text.empty() ? FeatureSubset::all(probe.dim()) : parse_subset(subset_text, probe.dim());
            ErrorEstimate est;
            std::optional<FeatureSubset> chosen;
            switch (ek) {
                case EstimateKind::RESUB: est = resubstitution_error(ck, probe, subset, seed); break;
                case EstimateKind::LOO: est = loo_error(ck, probe, subset, seed, false); break;
                case EstimateKind::SLOO: est = loo_error(ck, probe, subset, seed, true); break;
                case EstimateKind::RLOO: {
                    const auto r = proper_rloo_error(ck, { parse_ranker_tag(ranker_name), ov.ranker }, SelectionScheme::of(parse_scheme_tag(scheme_name)), probe, seed);
                    est = r.estimate;
                    chosen = r.subset;
                    break;
                }
                case EstimateKind::HOLDOUT: {
                    if (!holdout_path.empty()) {
                        Dataset h = load_csv(holdout_path, label);
                        if (h.class_count() > 2) {
                            h = restrict_to_top2_classes(h);
                        }
                        holdout = std::move(h);
                    }
                    if (!holdout) {
                        throw usage_error("HOLDOUT needs --holdout or --per-class");
                    }
                    est = holdout_true_error(ck, probe, subset, *holdout, seed);
                    break;
                }
            }
            if (est_json) {
                nlohmann::ordered_json j{ { "estimator", to_string(est.kind) }, { "value", est.value }, { "n_evaluations", est.n_evaluations } };
                if (ek == EstimateKind::RLOO) {
                    j["criterion_evaluations"] = est.criterion_evaluations;
                    j["subset"] = chosen->indices();
                }
                out << j.dump() << '\n';
            } else {
                out << to_string(est.kind) << '=' << detail::format_real(est.value) << '\n';
                out << "trainings: " << est.n_evaluations << '\n';
                if (chosen) {
                    out << "subset selected on the whole probe: " << join(*chosen) << '\n';
                }
            }
            return exit_ok;
        }

        if (*bench_cmd) {
            GridConfig cfg;
            cfg.datasets = load_manifest(manifest_path);
            cfg.per_class = bench_per_class;
            cfg.runs = runs;
            if (!classifiers.empty()) {
                cfg.classifiers = parse_list<ClassifierTag>(classifiers, parse_classifier_tag);
            }
            if (!rankers.empty()) {
                cfg.rankers = parse_list<RankerTag>(rankers, parse_ranker_tag);
            }
            if (!selectors.empty()) {
                cfg.selectors = parse_list<SchemeTag>(selectors, parse_scheme_tag);
            }
            cfg.master_seed = seed;
            cfg.hyperparams = ov.hyper;
            cfg.ranker_params = ov.ranker;
            cfg.record_timing = record_timing;
            cfg.workers = 1;
            if (workers) {
                cfg.workers = *workers;
            } else if (const char *env = std::getenv("FSAUDIT_WORKERS")) {
                double w = 0.0;
                if (!detail::parse_real(env, w) || w < 1.0) {
                    throw usage_error("FSAUDIT_WORKERS must be a positive integer");
                }
                cfg.workers = static_cast<std::size_t>(w);
            }
            nlohmann::ordered_json extra;
            extra["manifest"] = manifest_path;
            extra["out"] = out_path;
            extra["runs"] = cfg.runs;
            extra["per_class"] = cfg.per_class;
            extra["workers"] = cfg.workers;
            extra["classifiers"] = nlohmann::ordered_json::array();
            for (const auto c : cfg.classifiers) {
                extra["classifiers"].push_back(to_string(c));
            }
            extra["rankers"] = nlohmann::ordered_json::array();
            for (const auto r : cfg.rankers) {
                extra["rankers"].push_back(to_string(r));
            }
            extra["selectors"] = nlohmann::ordered_json::array();
            for (const auto s : cfg.selectors) {
                extra["selectors"].push_back(to_string(s));
            }
            extra["resume"] = resume;
            log_config("bench", extra, ov);
            const std::size_t written = run_grid_to_file(cfg, out_path, resume);
            const auto records = load_records(out_path);
            const auto failures = std::count_if(records.begin(), records.end(), [](const RunRecord &r) { return r.failed(); });
            if (!csv_path.empty()) {
                write_file(csv_path, [&](std::ostream &o) { write_records_csv(o, records); });
            }
            if (bench_json) {
                out << nlohmann::ordered_json{ { "written", written }, { "records", records.size() }, { "expected", expected_record_count(cfg) }, { "failed", failures } }.dump()
                    << '\n';
            } else {
                out << "records written: " << written << "\nrecords in file: " << records.size() << " of " << expected_record_count(cfg) << "\nfailed cells: " << failures
                    << '\n';
            }
            return exit_ok;
        }

        if (*sonar_cmd) {
            log_config("case-study sonar", { { "data", data_path }, { "out", out_dir } }, ov);
            Dataset sonar = load_csv(data_path, label, "sonar");
            if (sonar.class_count() > 2) {
                sonar = restrict_to_top2_classes(sonar);
            }
            const auto bundle = sonar_case_study(seed, sonar);
            std::filesystem::create_directories(out_dir);
            const std::filesystem::path dir(out_dir);
            write_file((dir / "subsets.csv").string(), [&](std::ostream &o) {
                o << "mask,positions,features,resub,loo,sloo,true\n";
                for (const auto &r : bundle.rows) {
                    std::string pos;
                    for (std::size_t i = 0; i < r.positions.size(); ++i) {
                        pos += (i == 0 ? "" : ";") + std::to_string(r.positions[i]);
                    }
                    o << r.mask << ',' << pos << ',' << join(r.subset, ';') << ',' << detail::fixed(r.resub, 4) << ',' << detail::fixed(r.loo, 4) << ','
                      << detail::fixed(r.sloo, 4) << ',' << detail::fixed(r.truth, 4) << '\n';
                }
            });
            write_file((dir / "best.csv").string(), [&](std::ostream &o) {
                o << "estimator,positions,predicted,true\n";
                for (const auto &b : bundle.best) {
                    const auto &r = bundle.rows[b.row];
                    std::string pos;
                    for (std::size_t i = 0; i < r.positions.size(); ++i) {
                        pos += (i == 0 ? "" : ";") + std::to_string(r.positions[i]);
                    }
                    o << b.estimator << ',' << pos << ',' << (b.predicted ? detail::fixed(*b.predicted, 4) : std::string("")) << ',' << detail::fixed(b.truth, 4) << '\n';
                }
                o << "ALL,1;2;3;4;5;6;7;8;9;10,," << detail::fixed(bundle.all_features_truth, 4) << '\n';
            });
            write_file((dir / "scatter.svg").string(), [&](std::ostream &o) { emit_scatter_svg(case_study_panels(bundle), o); });
            std::vector<double> sloo;
            std::vector<double> truth;
            for (const auto &r : bundle.rows) {
                sloo.push_back(r.sloo);
                truth.push_back(r.truth);
            }
            const double corr = pearson(sloo, truth);
            if (case_json) {
                nlohmann::ordered_json j;
                j["rows"] = bundle.rows.size();
                j["top10"] = bundle.top10.indices();
                j["top10_names"] = bundle.top10_names;
                j["sloo_true_correlation"] = corr;
                for (const auto &b : bundle.best) {
                    j["best"].push_back({ { "estimator", b.estimator },
                                          { "positions", bundle.rows[b.row].positions },
                                          { "predicted", b.predicted ? nlohmann::ordered_json(*b.predicted) : nlohmann::ordered_json(nullptr) },
                                          { "true", b.truth } });
                }
                out << j.dump() << '\n';
            } else {
                out << "top 10 by SU:";
                for (const auto &n : bundle.top10_names) {
                    out << ' ' << n;
                }
                out << "\nestimator  subset (positions)  predicted  true\n";
                for (const auto &b : bundle.best) {
                    const auto &r = bundle.rows[b.row];
                    std::string pos;
                    for (std::size_t i = 0; i < r.positions.size(); ++i) {
                        pos += (i == 0 ? "" : ",") + std::to_string(r.positions[i]);
                    }
                    out << b.estimator << "  [" << pos << "]  " << (b.predicted ? detail::fixed(*b.predicted, 4) : std::string("-")) << "  " << detail::fixed(b.truth, 4) << '\n';
                }
                out << "ALL  [1..10]  -  " << detail::fixed(bundle.all_features_truth, 4) << '\n';
                out << "corr(SLOO, true) over " << bundle.rows.size() << " subsets: " << detail::fixed(corr, 4) << '\n';
            }
            return exit_ok;
        }

        const auto parse_metric = [&] {
            if (metric_name == "true") {
                return Metric::true_error;
            }
            if (metric_name == "est") {
                return Metric::est_error;
            }
            throw usage_error("--metric must be 'true' or 'est'");
        };

        if (*an_cmd) {
            log_config("analyze", { { "in", in_path }, { "out", out_dir }, { "metric", metric_name }, { "alpha", an_alpha } }, ov);
            const Metric metric = parse_metric();
            const auto records = load_records(in_path);
            std::filesystem::create_directories(out_dir);
            const std::filesystem::path dir(out_dir);
            const auto table = selector_rank_table(records, an_alpha, metric);
            const auto combos = combination_ranking(records, metric);
            write_file((dir / "selector_ranks.csv").string(), [&](std::ostream &o) {
                o << "classifier,ranker";
                for (const auto s : table.selectors) {
                    o << ',' << to_string(s);
                }
                o << ",best_group,friedman_statistic,friedman_p,blocks\n";
                for (const auto &c : table.cells) {
                    o << to_string(c.classifier) << ',' << to_string(c.ranker);
                    for (std::size_t i = 0; i < table.selectors.size(); ++i) {
                        o << ',' << (c.avg_ranks.empty() ? std::string() : detail::fixed(c.avg_ranks[i], 4));
                    }
                    o << ',';
                    for (std::size_t i = 0; i < c.best.size(); ++i) {
                        o << (i == 0 ? "" : ";") << to_string(table.selectors[c.best[i]]);
                    }
                    o << ',' << detail::fixed(c.friedman.statistic, 4) << ',' << detail::fixed(c.friedman.p_value, 6) << ',' << c.blocks << '\n';
                }
            });
            write_file((dir / "combinations.csv").string(), [&](std::ostream &o) {
                o << "position,classifier,ranker,selector,avg_rank\n";
                for (std::size_t i = 0; i < combos.rows.size(); ++i) {
                    const auto &c = combos.rows[i].combination;
                    o << i + 1 << ',' << to_string(c.classifier) << ',' << (c.ranker ? to_string(*c.ranker) : std::string_view{}) << ',' << to_string(c.selector) << ','
                      << detail::fixed(combos.rows[i].avg_rank, 4) << '\n';
                }
            });
            nlohmann::ordered_json tests = nlohmann::ordered_json::array();
            for (const auto &c : table.cells) {
                nlohmann::ordered_json best = nlohmann::ordered_json::array();
                for (const auto b : c.best) {
                    best.push_back(to_string(table.selectors[b]));
                }
                tests.push_back({ { "classifier", to_string(c.classifier) },
                                  { "ranker", to_string(c.ranker) },
                                  { "statistic", c.friedman.statistic },
                                  { "dof", c.friedman.dof },
                                  { "p_value", c.friedman.p_value },
                                  { "blocks", c.blocks },
                                  { "best_group", best } });
            }
            write_file((dir / "friedman.json").string(), [&](std::ostream &o) { o << tests.dump(2) << '\n'; });

            // Tendency check: ALL among the two best selectors for LDC and SVML.
            std::vector<std::string> warnings = table.warnings;
            warnings.insert(warnings.end(), combos.warnings.begin(), combos.warnings.end());
            for (const ClassifierTag ct : { ClassifierTag::LDC, ClassifierTag::SVML }) {
                const auto all_pos = std::find(table.selectors.begin(), table.selectors.end(), SchemeTag::ALL);
                if (all_pos == table.selectors.end()) {
                    continue;
                }
                const auto ai = static_cast<std::size_t>(all_pos - table.selectors.begin());
                std::vector<double> sums(table.selectors.size(), 0.0);
                std::size_t n = 0;
                for (const auto &c : table.cells) {
                    if (c.classifier == ct && !c.avg_ranks.empty()) {
                        for (std::size_t i = 0; i < sums.size(); ++i) {
                            sums[i] += c.avg_ranks[i];
                        }
                        ++n;
                    }
                }
                if (n == 0) {
                    continue;
                }
                const auto order = order_by_rank(sums);
                if (order[0] != ai && (order.size() < 2 || order[1] != ai)) {
                    warnings.push_back("tendency: ALL is not among the two best selectors for " + std::string(to_string(ct)));
                }
            }
            for (const auto &w : warnings) {
                err << "fsaudit: warning: " << w << '\n';
            }
            if (an_json) {
                out << nlohmann::ordered_json{ { "cells", table.cells.size() }, { "combinations", combos.rows.size() }, { "blocks_used", combos.blocks_used }, { "warnings", warnings } }
                           .dump()
                    << '\n';
            } else {
                out << "selector rank cells: " << table.cells.size() << "\ncombinations ranked: " << combos.rows.size() << " over " << combos.blocks_used << " blocks\n";
                const std::size_t show = std::min<std::size_t>(10, combos.rows.size());
                for (std::size_t i = 0; i < show; ++i) {
                    out << "  " << i + 1 << ". " << combos.rows[i].combination.label() << "  " << detail::fixed(combos.rows[i].avg_rank, 3) << '\n';
                }
            }
            return exit_ok;
        }

        if (*rep_cmd) {
            log_config("report", { { "in", in_path }, { "out", out_dir }, { "metric", metric_name }, { "alpha", an_alpha } }, ov);
            const Metric metric = parse_metric();
            const std::string content = read_text(in_path);
            std::istringstream in(content);
            const auto records = read_records(in);
            const std::string hash = short_hash(content + "|" + metric_name + "|" + detail::fixed(an_alpha, 6));
            std::filesystem::create_directories(out_dir);
            const std::filesystem::path dir(out_dir);
            const auto table = selector_rank_table(records, an_alpha, metric);
            std::vector<std::string> written;
            std::vector<std::string> warnings;
            {
                const auto html_path = (dir / ("rank_table_" + hash + ".html")).string();
                const auto csv_out = (dir / ("rank_table_" + hash + ".csv")).string();
                std::ostringstream html;
                std::ostringstream csv;
                warnings = emit_rank_table(table, html, csv);
                write_file(html_path, [&](std::ostream &o) { o << html.str(); });
                write_file(csv_out, [&](std::ostream &o) { o << csv.str(); });
                written.push_back(html_path);
                written.push_back(csv_out);
            }
            const std::array<std::pair<Factor, const char *>, 3> factors{ { { Factor::classifier, "classifiers" }, { Factor::ranker, "rankers" }, { Factor::selector, "selectors" } } };
            for (const auto &[factor, name] : factors) {
                const auto fr = factor_ranks(records, factor, metric);
                if (fr.datasets.size() < 3) {
                    warnings.push_back(std::string("glyph plot of ") + name + " skipped: needs at least 3 datasets, have " + std::to_string(fr.datasets.size()));
                    continue;
                }
                GlyphSpec spec;
                spec.title = std::string("Average ranks of ") + name;
                spec.spokes = fr.datasets;
                for (std::size_t l = 0; l < fr.levels.size(); ++l) {
                    spec.series.push_back({ fr.levels[l], fr.ranks[l] });
                }
                const auto path = (dir / ("glyph_" + std::string(name) + "_" + hash + ".svg")).string();
                write_file(path, [&](std::ostream &o) { emit_glyph_svg(spec, o); });
                written.push_back(path);
            }
            for (const auto &w : warnings) {
                err << "fsaudit: warning: " << w << '\n';
            }
            if (rep_json) {
                out << nlohmann::ordered_json{ { "files", written }, { "warnings", warnings } }.dump() << '\n';
            } else {
                for (const auto &w : written) {
                    out << w << '\n';
                }
            }
            return exit_ok;
        }

        if (*fig3_cmd) {
            log_config("demo fig3", { { "mode", mode } }, ov);
            const auto data = generate_classifier_dependent_pair(mode == "ldc-wins" ? PairMode::ldc_wins : PairMode::nn_wins, seed);
            if (!out_path.empty()) {
                save_csv(out_path, data);
            }
            const ClassifierKind ldc{ ClassifierTag::LDC, ov.hyper };
            const ClassifierKind nn{ ClassifierTag::NN1, ov.hyper };
            const double l_ldc = loo_error(ldc, data, FeatureSubset::all(2), seed, false).value;
            const double l_nn = loo_error(nn, data, FeatureSubset::all(2), seed, false).value;
            std::array<std::array<double, 2>, 2> single{};
            for (std::size_t f = 0; f < 2; ++f) {
                single[f][0] = loo_error(ldc, data, FeatureSubset{ f }, seed, false).value;
                single[f][1] = loo_error(nn, data, FeatureSubset{ f }, seed, false).value;
            }
            if (demo_json) {
                out << nlohmann::ordered_json{ { "mode", mode },
                                               { "loo_ldc", l_ldc },
                                               { "loo_1nn", l_nn },
                                               { "x1", { { "loo_ldc", single[0][0] }, { "loo_1nn", single[0][1] } } },
                                               { "x2", { { "loo_ldc", single[1][0] }, { "loo_1nn", single[1][1] } } } }
                           .dump()
                    << '\n';
            } else {
                out << "LOO(LDC)=" << detail::format_real(l_ldc) << '\n' << "LOO(1NN)=" << detail::format_real(l_nn) << '\n';
                for (std::size_t f = 0; f < 2; ++f) {
                    out << "x" << f + 1 << " alone: LOO(LDC)=" << detail::fixed(single[f][0], 3) << " LOO(1NN)=" << detail::fixed(single[f][1], 3) << '\n';
                }
            }
            return exit_ok;
        }

        if (*synth_cmd) {
            log_config("demo synth", { { "out", out_path }, { "per_class", problem.per_class }, { "features", problem.features }, { "informative", problem.informative }, { "shift", problem.shift } }, ov);
            const auto data = generate_gaussian_problem(problem, seed, synth_name);
            save_csv(out_path, data);
            if (demo_json) {
                out << nlohmann::ordered_json{ { "path", out_path }, { "instances", data.size() }, { "features", data.dim() } }.dump() << '\n';
            } else {
                out << "wrote " << data.size() << " x " << data.dim() << " to " << out_path << '\n';
            }
            return exit_ok;
        }
    } catch (const usage_error &e) {
        err << "fsaudit: " << e.what() << '\n';
        return exit_usage;
    } catch (const data_error &e) {
        err << "fsaudit: " << e.what() << '\n';
        return exit_data;
    } catch (const domain_error &e) {
        err << "fsaudit: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception &e) {
        err << "fsaudit: " << e.what() << '\n';
        return exit_data;
    }
    err << app.help();
    return exit_usage;
}

}  // namespace fsaudit::cli

#endif  // FSAUDIT_CLI_HPP_
