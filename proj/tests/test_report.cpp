#include "fsaudit/report.hpp"
#include "report_fixtures.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <regex>

using namespace fsaudit;
using namespace fsaudit::fixture;
namespace fs = std::filesystem;

namespace {

fs::path snapshot_dir() { return fs::path(__FILE__).parent_path() / "snapshots"; }

// Compares against a stored snapshot.  FSAUDIT_UPDATE_SNAPSHOTS=1 rewrites it.
void expect_snapshot(const std::string &name, const std::string &actual) {
    const auto path = snapshot_dir() / name;
    if (std::getenv("FSAUDIT_UPDATE_SNAPSHOTS") != nullptr) {
        fs::create_directories(snapshot_dir());
        std::ofstream(path, std::ios::binary) << actual;
    }
    ASSERT_TRUE(fs::exists(path)) << "missing snapshot " << path;
    EXPECT_EQ(test::slurp(path), actual) << "snapshot " << name << " differs";
}

// Tag-balance check; enough for the markup these emitters write.  HTML void
// elements are allowed without a closing tag.
bool well_formed(const std::string &xml) {
    std::vector<std::string> stack;
    std::size_t pos = 0;
    while ((pos = xml.find('<', pos)) != std::string::npos) {
        const auto end = xml.find('>', pos);
        if (end == std::string::npos) {
            return false;
        }
        const std::string tag = xml.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        if (tag.empty() || tag.front() == '?' || tag.front() == '!') {
            continue;
        }
        if (tag.back() == '/') {
            continue;
        }
        const auto name_end = tag.find_first_of(" \t\n");
        if (tag.front() == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) {
                return false;
            }
            stack.pop_back();
        } else if (const auto name = tag.substr(0, name_end); name != "meta" && name != "br") {
            stack.push_back(name);
        }
    }
    return stack.empty();
}

bool has_external_reference(const std::string &text) {
    std::string stripped = text;
    const std::string ns = "xmlns=\"http://www.w3.org/2000/svg\"";
    if (const auto p = stripped.find(ns); p != std::string::npos) {
        stripped.erase(p, ns.size());
    }
    for (const char *needle : { "href", "http:", "https:", "url(", "@import", "<script" }) {
        if (stripped.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

std::size_t count(const std::string &text, const std::string &needle) {
    std::size_t n = 0;
    for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + needle.size())) {
        ++n;
    }
    return n;
}

SelectorTable one_cell_table(std::vector<SchemeTag> selectors, std::vector<double> ranks, std::vector<std::size_t> best) {
    SelectorTable t;
    t.selectors = selectors;
    SelectorCell c;
    c.selectors = std::move(selectors);
    c.avg_ranks = std::move(ranks);
    c.best = std::move(best);
    c.blocks = 3;
    t.cells.push_back(c);
    return t;
}

std::string render_table(const SelectorTable &t, std::string *csv_out = nullptr) {
    std::ostringstream html;
    std::ostringstream csv;
    (void)emit_rank_table(t, html, csv);
    if (csv_out != nullptr) {
        *csv_out = csv.str();
    }
    return html.str();
}

std::vector<std::pair<double, double>> polygon_points(const std::string &svg, std::size_t which) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i <= which; ++i) {
        pos = svg.find("<polygon", pos + 1);
    }
    const auto start = svg.find("points=\"", pos) + 8;
    const auto end = svg.find('"', start);
    std::istringstream in(svg.substr(start, end - start));
    std::vector<std::pair<double, double>> out;
    std::string pair;
    while (in >> pair) {
        const auto comma = pair.find(',');
        out.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
    }
    return out;
}

}  // namespace

TEST(Colors, Endpoints) {
    EXPECT_EQ(rank_color(0.0), "#ff0000");
    EXPECT_EQ(rank_color(0.5), "#ffffff");
    EXPECT_EQ(rank_color(1.0), "#0000ff");
    EXPECT_EQ(rank_color(-3.0), "#ff0000");
}

TEST(RankTable, TwoSelectorsHitBothExtremes) {
    const auto html = render_table(one_cell_table({ SchemeTag::ALL, SchemeTag::TOP3 }, { 1.0, 2.0 }, { 0 }));
    const auto red = html.find("background:#ff0000;border:2px solid #000");
    const auto blue = html.find("background:#0000ff;border:2px solid transparent");
    ASSERT_NE(red, std::string::npos);
    ASSERT_NE(blue, std::string::npos);
    EXPECT_LT(red, blue);
}

TEST(RankTable, IdenticalRanksUniformAndBoxed) {
    const auto html = render_table(one_cell_table({ SchemeTag::ALL, SchemeTag::TOP3, SchemeTag::EX10 }, { 2.0, 2.0, 2.0 }, { 0, 1, 2 }));
    EXPECT_EQ(count(html, "background:#ffffff;border:2px solid #000"), 3U);
    EXPECT_EQ(count(html, "background:"), 3U);
}

TEST(RankTable, FullGridLayout) {
    std::string csv;
    const auto html = render_table(full_table(), &csv);
    EXPECT_EQ(count(html, "<tr>"), 36U);
    EXPECT_EQ(count(html, "<th"), 9U);
    EXPECT_EQ(count(html, "<td style=\"padding:3px 6px;text-align:right"), 35U * 7U);
    EXPECT_EQ(count(csv, "\n"), 36U);
    EXPECT_TRUE(well_formed(html));
    EXPECT_FALSE(has_external_reference(html));
    expect_snapshot("rank_table.html", html);
    expect_snapshot("rank_table.csv", csv);
}

TEST(RankTable, MissingCellLeftBlankWithWarning) {
    auto t = one_cell_table({ SchemeTag::ALL, SchemeTag::TOP3 }, {}, {});
    std::ostringstream html;
    std::ostringstream csv;
    const auto warnings = emit_rank_table(t, html, csv);
    ASSERT_EQ(warnings.size(), 1U);
    EXPECT_EQ(count(html.str(), "background:"), 0U);
}

TEST(Glyph, StructureAndSnapshot) {
    std::ostringstream out;
    emit_glyph_svg(glyph(20, 7), out);
    const auto svg = out.str();
    EXPECT_EQ(count(svg, "<polygon"), 7U);
    const auto labels = svg.substr(svg.find("<g id=\"spoke-labels\""), svg.find("<g id=\"series\"") - svg.find("<g id=\"spoke-labels\""));
    EXPECT_EQ(count(labels, "<text"), 20U);
    EXPECT_TRUE(well_formed(svg));
    EXPECT_FALSE(has_external_reference(svg));
    EXPECT_NE(svg.find("ranks &lt;test&gt;"), std::string::npos);
    expect_snapshot("glyph.svg", svg);
}

TEST(Glyph, ConstantSeriesIsRegular) {
    GlyphSpec g = glyph(6, 1);
    g.series[0].values.assign(6, 3.0);
    std::ostringstream out;
    emit_glyph_svg(g, out);
    for (const auto &[x, y] : polygon_points(out.str(), 0)) {
        EXPECT_NEAR(std::hypot(x - 260.0, y - 260.0), 200.0, 0.01);
    }
}

TEST(Glyph, DoublingScalesRadially) {
    GlyphSpec g = glyph(8, 2);
    g.max_value = 20.0;
    g.series[1].values = g.series[0].values;
    for (double &v : g.series[1].values) {
        v *= 2.0;
    }
    std::ostringstream out;
    emit_glyph_svg(g, out);
    const auto a = polygon_points(out.str(), 0);
    const auto b = polygon_points(out.str(), 1);
    ASSERT_EQ(a.size(), 8U);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(b[i].first - 260.0, 2.0 * (a[i].first - 260.0), 0.02);
        EXPECT_NEAR(b[i].second - 260.0, 2.0 * (a[i].second - 260.0), 0.02);
    }
}

TEST(Glyph, LegendOrderedByArea) {
    GlyphSpec g = glyph(5, 3);
    g.series[0].values.assign(5, 1.0);
    g.series[1].values.assign(5, 3.0);
    g.series[2].values.assign(5, 2.0);
    std::ostringstream out;
    emit_glyph_svg(g, out);
    const auto legend = out.str().substr(out.str().find("<g id=\"legend\""));
    EXPECT_LT(legend.find(">m2<"), legend.find(">m3<"));
    EXPECT_LT(legend.find(">m3<"), legend.find(">m1<"));
    const std::vector<double> unit(4, 1.0);
    EXPECT_NEAR(glyph_area(unit), 2.0, 1e-12);
}

TEST(Glyph, RejectsBadSpecs) {
    std::ostringstream out;
    EXPECT_THROW(emit_glyph_svg(glyph(2, 1), out), domain_error);
    auto g = glyph(4, 1);
    g.series[0].values.pop_back();
    EXPECT_THROW(emit_glyph_svg(g, out), domain_error);
}

TEST(Scatter, ThreePanelsOfAllSubsets) {
    std::vector<ScatterPanel> panels;
    for (const char *name : { "RESUB", "LOO", "SLOO" }) {
        ScatterPanel p{ name, {}, "best [1]", std::make_pair(0.1, 0.2) };
        for (std::size_t i = 0; i < 1023; ++i) {
            p.points.emplace_back(static_cast<double>(i % 21) / 20.0, static_cast<double>(i % 17) / 16.0);
        }
        panels.push_back(p);
    }
    std::ostringstream out;
    emit_scatter_svg(panels, out);
    const auto svg = out.str();
    EXPECT_EQ(count(svg, "class=\"panel\""), 3U);
    EXPECT_EQ(count(svg, "data-points=\"1023\""), 3U);
    EXPECT_EQ(count(svg, "class=\"point\""), 3U * 1023U);
    EXPECT_EQ(count(svg, "class=\"diagonal\""), 3U);
    EXPECT_TRUE(well_formed(svg));
    EXPECT_FALSE(has_external_reference(svg));
}

TEST(Scatter, CalibratedPointsOnDiagonal) {
    std::ostringstream out;
    emit_scatter_svg({ calibrated_panel() }, out);
    const std::regex point(R"re(class="point" cx="([0-9.]+)" cy="([0-9.]+)")re");
    const auto svg = out.str();
    std::size_t seen = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), point); it != std::sregex_iterator(); ++it) {
        const double cx = std::stod((*it)[1]);
        const double cy = std::stod((*it)[2]);
        // panel spans x in [50, 350] and y in [50, 350] with y flipped
        EXPECT_NEAR(cx - 50.0, 350.0 - cy, 1e-9);
        ++seen;
    }
    EXPECT_EQ(seen, 11U);
    expect_snapshot("scatter.svg", svg);
}

TEST(Scatter, CaseStudyPanelsPassBestThrough) {
    CaseStudyBundle b;
    for (std::size_t m = 1; m <= 3; ++m) {
        CaseStudyRow r;
        r.mask = m;
        r.positions = { m };
        r.resub = 0.1 * static_cast<double>(m);
        r.loo = 0.2;
        r.sloo = 0.3;
        r.truth = 0.4;
        b.rows.push_back(r);
    }
    b.best = { { "RESUB", 0, 0.1, 0.4 }, { "LOO", 1, 0.2, 0.4 }, { "SLOO", 2, 0.3, 0.4 }, { "TRUE", 0, std::nullopt, 0.4 } };
    const auto panels = case_study_panels(b);
    ASSERT_EQ(panels.size(), 3U);
    EXPECT_EQ(panels[0].annotation, "best [1] 0.1000 / 0.4000");
    EXPECT_EQ(panels[2].annotation, "best [3] 0.3000 / 0.4000");
    EXPECT_EQ(panels[1].points.size(), 3U);
}

TEST(SampleSize, CurveSnapshot) {
    std::ostringstream out;
    emit_samplesize_svg(snapshot_curve(), out);
    const auto svg = out.str();
    EXPECT_EQ(count(svg, "<polyline"), 2U);
    EXPECT_TRUE(well_formed(svg));
    EXPECT_FALSE(has_external_reference(svg));
    expect_snapshot("samplesize.svg", svg);
}

TEST(Determinism, RepeatedEmissionIsByteIdentical) {
    const auto t = full_table();
    EXPECT_EQ(render_table(t), render_table(t));
    std::ostringstream a;
    std::ostringstream b;
    emit_glyph_svg(glyph(9, 4), a);
    emit_glyph_svg(glyph(9, 4), b);
    EXPECT_EQ(a.str(), b.str());
}
