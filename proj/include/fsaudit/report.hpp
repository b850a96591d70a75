#ifndef FSAUDIT_REPORT_HPP_
#define FSAUDIT_REPORT_HPP_
#pragma once

#include "fsaudit/common.hpp"
#include "fsaudit/samplesize.hpp"
#include "fsaudit/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace fsaudit {

namespace detail {

/// Fixed-precision decimal so emitted bytes do not depend on stream state.
inline std::string fixed(double v, int digits = 2) {
    if (v == 0.0) {
        v = 0.0;  // no "-0.00"
    }
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*f", digits, v);
    std::string s(buf.data());
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') {
        s.erase(0, 1);
    }
    return s;
}

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string hex_color(double r, double g, double b) {
    const auto byte = [](double x) { return static_cast<int>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); };
    std::array<char, 8> buf{};
    std::snprintf(buf.data(), buf.size(), "#%02x%02x%02x", byte(r), byte(g), byte(b));
    return buf.data();
}

inline constexpr std::array<const char *, 10> palette{ "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                       "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf" };

}  // namespace detail

/// Red (t = 0) through white (t = 0.5) to blue (t = 1).
[[nodiscard]] inline std::string rank_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    if (t < 0.5) {
        return detail::hex_color(1.0, 2.0 * t, 2.0 * t);
    }
    return detail::hex_color(2.0 * (1.0 - t), 2.0 * (1.0 - t), 1.0);
}

// ---------------------------------------------------------------------------
// Rank table
// ---------------------------------------------------------------------------

/// HTML table with one row per (classifier, ranker) and one column per
/// selector.  Shading is linear in rank between the minimum and maximum of the
/// classifier's block of rows; best-group members get a box.  Returns warnings
/// for cells without data.
inline std::vector<std::string> emit_rank_table(const SelectorTable &table, std::ostream &html, std::ostream &csv) {
    std::vector<std::string> warnings = table.warnings;
    html << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Average selector ranks</title>\n</head>\n<body>\n";
    html << "<table style=\"border-collapse:collapse;font-family:sans-serif;font-size:12px\">\n<tr><th style=\"padding:3px 6px\">Classifier</th>"
            "<th style=\"padding:3px 6px\">Ranker</th>";
    csv << "classifier,ranker";
    for (const SchemeTag s : table.selectors) {
        html << "<th style=\"padding:3px 6px\">" << to_string(s) << "</th>";
        csv << ',' << to_string(s);
    }
    html << "</tr>\n";
    csv << ",best_group\n";

    std::map<ClassifierTag, std::pair<double, double>> range;
    for (const auto &cell : table.cells) {
        for (const double r : cell.avg_ranks) {
            auto [it, fresh] = range.try_emplace(cell.classifier, r, r);
            if (!fresh) {
                it->second.first = std::min(it->second.first, r);
                it->second.second = std::max(it->second.second, r);
            }
        }
    }
    for (const auto &cell : table.cells) {
        html << "<tr><td style=\"padding:3px 6px\">" << to_string(cell.classifier) << "</td><td style=\"padding:3px 6px\">" << to_string(cell.ranker) << "</td>";
        csv << to_string(cell.classifier) << ',' << to_string(cell.ranker);
        if (cell.avg_ranks.empty()) {
            warnings.push_back(std::string(to_string(cell.classifier)) + "/" + std::string(to_string(cell.ranker)) + ": no complete blocks, row left blank");
        }
        for (std::size_t s = 0; s < table.selectors.size(); ++s) {
            if (cell.avg_ranks.empty()) {
                html << "<td style=\"padding:3px 6px\"></td>";
                csv << ',';
                continue;
            }
            const double r = cell.avg_ranks[s];
            const auto [lo, hi] = range.at(cell.classifier);
            const double t = hi > lo ? (r - lo) / (hi - lo) : 0.5;
            const bool boxed = std::find(cell.best.begin(), cell.best.end(), s) != cell.best.end();
            html << "<td style=\"padding:3px 6px;text-align:right;background:" << rank_color(t) << ';'
                 << (boxed ? "border:2px solid #000" : "border:2px solid transparent") << "\">" << detail::fixed(r) << "</td>";
            csv << ',' << detail::fixed(r, 4);
        }
        html << "</tr>\n";
        csv << ',';
        for (std::size_t i = 0; i < cell.best.size(); ++i) {
            csv << (i == 0 ? "" : ";") << to_string(table.selectors[cell.best[i]]);
        }
        csv << '\n';
    }
    html << "</table>\n</body>\n</html>\n";
    return warnings;
}

// ---------------------------------------------------------------------------
// Glyph (radar) plot
// ---------------------------------------------------------------------------

struct GlyphSeries {
    std::string name;
    std::vector<double> values;
};

struct GlyphSpec {
    std::string title;
    std::vector<std::string> spokes;
    std::vector<GlyphSeries> series;
    std::optional<double> max_value;  ///< value drawn at the outer ring; defaults to the data maximum
};

/// Area of the closed polygon with the given spoke radii.
[[nodiscard]] inline double glyph_area(std::span<const double> radii) {
    const std::size_t n = radii.size();
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        a += radii[i] * radii[(i + 1) % n];
    }
    return 0.5 * std::sin(2.0 * std::numbers::pi / static_cast<double>(n)) * a;
}

inline void emit_glyph_svg(const GlyphSpec &spec, std::ostream &out) {
    const std::size_t n = spec.spokes.size();
    if (n < 3) {
        throw domain_error("a glyph plot needs at least 3 spokes");
    }
    double vmax = 0.0;
    for (const auto &s : spec.series) {
        if (s.values.size() != n) {
            throw domain_error("series '" + s.name + "' has " + std::to_string(s.values.size()) + " values for " + std::to_string(n) + " spokes");
        }
        for (const double v : s.values) {
            if (!std::isfinite(v)) {
                throw domain_error("series '" + s.name + "' has a non-finite value");
            }
            vmax = std::max(vmax, v);
        }
    }
    if (spec.max_value) {
        vmax = *spec.max_value;
    }
    if (!(vmax > 0.0)) {
        vmax = 1.0;
    }
    constexpr double cx = 260.0;
    constexpr double cy = 260.0;
    constexpr double radius = 200.0;
    const auto angle = [n](std::size_t i) { return -std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n); };
    const auto px = [&](std::size_t i, double r) { return cx + r * std::cos(angle(i)); };
    const auto py = [&](std::size_t i, double r) { return cy + r * std::sin(angle(i)); };

    std::vector<std::size_t> legend(spec.series.size());
    std::iota(legend.begin(), legend.end(), std::size_t{ 0 });
    std::vector<double> areas;
    for (const auto &s : spec.series) {
        areas.push_back(glyph_area(s.values));
    }
    std::stable_sort(legend.begin(), legend.end(), [&](std::size_t a, std::size_t b) { return areas[a] > areas[b]; });

    const double height = std::max(540.0, 60.0 + 20.0 * static_cast<double>(spec.series.size()));
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"760\" height=\"" << detail::fixed(height, 0) << "\" viewBox=\"0 0 760 "
        << detail::fixed(height, 0) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << detail::xml_escape(spec.title) << "</text>\n";
    out << "<g id=\"axes\" stroke=\"#cccccc\" fill=\"none\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << "<line x1=\"" << detail::fixed(cx) << "\" y1=\"" << detail::fixed(cy) << "\" x2=\"" << detail::fixed(px(i, radius)) << "\" y2=\""
            << detail::fixed(py(i, radius)) << "\"/>\n";
    }
    out << "</g>\n<g id=\"spoke-labels\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << "<text x=\"" << detail::fixed(px(i, radius + 18.0)) << "\" y=\"" << detail::fixed(py(i, radius + 18.0) + 3.0) << "\">"
            << detail::xml_escape(spec.spokes[i]) << "</text>\n";
    }
    out << "</g>\n<g id=\"series\" fill=\"none\" stroke-width=\"1.5\">\n";
    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto &s = spec.series[k];
        out << "<polygon data-series=\"" << detail::xml_escape(s.name) << "\" stroke=\"" << detail::palette[k % detail::palette.size()] << "\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            const double r = radius * s.values[i] / vmax;
            out << (i == 0 ? "" : " ") << detail::fixed(px(i, r)) << ',' << detail::fixed(py(i, r));
        }
        out << "\"/>\n";
    }
    out << "</g>\n<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (std::size_t pos = 0; pos < legend.size(); ++pos) {
        const std::size_t k = legend[pos];
        const double y = 50.0 + 20.0 * static_cast<double>(pos);
        out << "<line x1=\"560\" y1=\"" << detail::fixed(y) << "\" x2=\"585\" y2=\"" << detail::fixed(y) << "\" stroke=\""
            << detail::palette[k % detail::palette.size()] << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"592\" y=\"" << detail::fixed(y + 4.0) << "\">" << detail::xml_escape(spec.series[k].name) << "</text>\n";
    }
    out << "</g>\n</svg>\n";
}

// ---------------------------------------------------------------------------
// Scatter panels (estimate against holdout truth)
// ---------------------------------------------------------------------------

struct ScatterPanel {
    std::string title;
    std::vector<std::pair<double, double>> points;  ///< (estimate, truth)
    std::string annotation;
    std::optional<std::pair<double, double>> highlight;
};

inline void emit_scatter_svg(const std::vector<ScatterPanel> &panels, std::ostream &out) {
    if (panels.empty()) {
        throw domain_error("scatter plot needs at least one panel");
    }
    constexpr double size = 300.0;
    constexpr double margin = 50.0;
    const double width = static_cast<double>(panels.size()) * (size + margin) + margin;
    const double height = size + 2.0 * margin + 20.0;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << detail::fixed(width, 0) << "\" height=\"" << detail::fixed(height, 0)
        << "\" viewBox=\"0 0 " << detail::fixed(width, 0) << ' ' << detail::fixed(height, 0) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto &panel = panels[p];
        const double x0 = margin + static_cast<double>(p) * (size + margin);
        const double y0 = margin;
        const auto sx = [&](double v) { return x0 + std::clamp(v, 0.0, 1.0) * size; };
        const auto sy = [&](double v) { return y0 + size - std::clamp(v, 0.0, 1.0) * size; };
        out << "<g class=\"panel\" data-title=\"" << detail::xml_escape(panel.title) << "\" data-points=\"" << panel.points.size() << "\">\n";
        out << "<rect x=\"" << detail::fixed(x0) << "\" y=\"" << detail::fixed(y0) << "\" width=\"" << detail::fixed(size) << "\" height=\"" << detail::fixed(size)
            << "\" fill=\"none\" stroke=\"#000000\"/>\n";
        out << "<line class=\"diagonal\" x1=\"" << detail::fixed(sx(0.0)) << "\" y1=\"" << detail::fixed(sy(0.0)) << "\" x2=\"" << detail::fixed(sx(1.0))
            << "\" y2=\"" << detail::fixed(sy(1.0)) << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
        out << "<text x=\"" << detail::fixed(x0 + size / 2.0) << "\" y=\"" << detail::fixed(y0 - 10.0)
            << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << detail::xml_escape(panel.title) << "</text>\n";
        out << "<text x=\"" << detail::fixed(x0 + size / 2.0) << "\" y=\"" << detail::fixed(y0 + size + 30.0)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">estimate</text>\n";
        out << "<text x=\"" << detail::fixed(x0 - 30.0) << "\" y=\"" << detail::fixed(y0 + size / 2.0)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 " << detail::fixed(x0 - 30.0) << ' '
            << detail::fixed(y0 + size / 2.0) << ")\">holdout error</text>\n";
        for (const auto &[e, t] : panel.points) {
            out << "<circle class=\"point\" cx=\"" << detail::fixed(sx(e)) << "\" cy=\"" << detail::fixed(sy(t)) << "\" r=\"1.5\" fill=\"#1f77b4\" fill-opacity=\"0.5\"/>\n";
        }
        if (panel.highlight) {
            out << "<circle class=\"best\" cx=\"" << detail::fixed(sx(panel.highlight->first)) << "\" cy=\"" << detail::fixed(sy(panel.highlight->second))
                << "\" r=\"5\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
        }
        out << "<text class=\"annotation\" x=\"" << detail::fixed(x0 + 6.0) << "\" y=\"" << detail::fixed(y0 + 16.0)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::xml_escape(panel.annotation) << "</text>\n";
        out << "</g>\n";
    }
    out << "</svg>\n";
}

/// The three estimate-versus-truth panels of a case-study bundle.
[[nodiscard]] inline std::vector<ScatterPanel> case_study_panels(const CaseStudyBundle &b) {
    std::vector<ScatterPanel> panels;
    const std::array<std::string, 3> names{ "RESUB", "LOO", "SLOO" };
    for (const auto &name : names) {
        ScatterPanel p;
        p.title = name;
        for (const auto &row : b.rows) {
            const double e = name == "RESUB" ? row.resub : (name == "LOO" ? row.loo : row.sloo);
            p.points.emplace_back(e, row.truth);
        }
        for (const auto &best : b.best) {
            if (best.estimator == name) {
                const auto &row = b.rows[best.row];
                std::string pos;
                for (std::size_t i = 0; i < row.positions.size(); ++i) {
                    pos += (i == 0 ? "" : ",") + std::to_string(row.positions[i]);
                }
                p.annotation = "best [" + pos + "] " + detail::fixed(best.predicted.value_or(0.0), 4) + " / " + detail::fixed(best.truth, 4);
                p.highlight = std::make_pair(best.predicted.value_or(0.0), best.truth);
            }
        }
        panels.push_back(std::move(p));
    }
    return panels;
}

// ---------------------------------------------------------------------------
// Sample-size curves
// ---------------------------------------------------------------------------

/// Line plot of required N against p1, one line per alpha.
inline void emit_samplesize_svg(const std::vector<CurvePoint> &curve, std::ostream &out) {
    if (curve.empty()) {
        throw domain_error("sample-size plot needs at least one point");
    }
    std::vector<double> alphas;
    double xmin = curve.front().p1;
    double xmax = xmin;
    double ymax = 0.0;
    for (const auto &pt : curve) {
        if (std::find(alphas.begin(), alphas.end(), pt.alpha) == alphas.end()) {
            alphas.push_back(pt.alpha);
        }
        xmin = std::min(xmin, pt.p1);
        xmax = std::max(xmax, pt.p1);
        ymax = std::max(ymax, pt.n);
    }
    if (!(xmax > xmin)) {
        xmax = xmin + 1.0;
    }
    if (!(ymax > 0.0)) {
        ymax = 1.0;
    }
    constexpr double x0 = 60.0;
    constexpr double y0 = 30.0;
    constexpr double w = 480.0;
    constexpr double h = 320.0;
    const auto sx = [&](double v) { return x0 + (v - xmin) / (xmax - xmin) * w; };
    const auto sy = [&](double v) { return y0 + h - v / ymax * h; };
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out << "<rect x=\"" << detail::fixed(x0) << "\" y=\"" << detail::fixed(y0) << "\" width=\"" << detail::fixed(w) << "\" height=\"" << detail::fixed(h)
        << "\" fill=\"none\" stroke=\"#000000\"/>\n";
    out << "<text x=\"" << detail::fixed(x0 + w / 2.0) << "\" y=\"385\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">p1</text>\n";
    out << "<text x=\"" << detail::fixed(x0 - 8.0) << "\" y=\"" << detail::fixed(y0 + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << detail::fixed(ymax, 0) << "</text>\n";
    out << "<text x=\"" << detail::fixed(x0 - 8.0) << "\" y=\"" << detail::fixed(y0 + h)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">0</text>\n";
    out << "<text x=\"" << detail::fixed(x0) << "\" y=\"" << detail::fixed(y0 + h + 15.0) << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
        << detail::fixed(xmin) << "</text>\n";
    out << "<text x=\"" << detail::fixed(x0 + w) << "\" y=\"" << detail::fixed(y0 + h + 15.0)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << detail::fixed(xmax) << "</text>\n";
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        out << "<polyline data-alpha=\"" << detail::fixed(alphas[a], 3) << "\" fill=\"none\" stroke=\"" << detail::palette[a % detail::palette.size()]
            << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const auto &pt : curve) {
            if (pt.alpha == alphas[a]) {
                out << (first ? "" : " ") << detail::fixed(sx(pt.p1)) << ',' << detail::fixed(sy(pt.n));
                first = false;
            }
        }
        out << "\"/>\n";
        out << "<text x=\"560\" y=\"" << detail::fixed(50.0 + 18.0 * static_cast<double>(a)) << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
            << detail::palette[a % detail::palette.size()] << "\">alpha " << detail::fixed(alphas[a], 3) << "</text>\n";
    }
    out << "</svg>\n";
}

/// Writes `emit` output to `path`, throwing on I/O failure.
template <typename Emit>
void write_file(const std::string &path, Emit &&emit) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw data_error("cannot write " + path);
    }
    emit(out);
    if (!out) {
        throw data_error("error while writing " + path);
    }
}

}  // namespace fsaudit

#endif  // FSAUDIT_REPORT_HPP_
