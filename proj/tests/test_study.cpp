#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "fvgrad/study/study.hpp"
#include "support/gen.hpp"

using namespace fvgrad;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;
}

GridFamilySpec family(GridFamily f, std::optional<std::uint64_t> seed = std::nullopt) {
    GridFamilySpec s;
    s.family = f;
    s.params.seed = seed;
    return s;
}

StudyConfig small(GridFamily f, std::vector<std::string> schemes, int lo, int hi, AnalyticField field = tanh_product()) {
    StudyConfig c;
    c.families = {family(f, f == GridFamily::Perturbed ? std::optional<std::uint64_t>(5) : std::nullopt)};
    for (int l = lo; l <= hi; ++l) c.levels.push_back(l);
    for (const auto& s : schemes) c.schemes.push_back(parse_scheme(s));
    c.fields = {field};
    return c;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

TEST(ErrorNorms, ExactGradientGivesZero) {
    const Mesh m = gen_perturbed(2, {}, 0.25, 1);
    const AnalyticField f = linear_field(0.0, 1.5, 0.5);
    const Evaluation e = evaluate(m, f, parse_scheme("LS(1)"));
    EXPECT_LE(e.norms.mean, 1e-13);
    EXPECT_LE(e.norms.max, 1e-13);
    EXPECT_EQ(e.norms.n_singular, 0);
}

TEST(ErrorNorms, SingleCellPythagorean) {
    const Mesh m = gen_cartesian(0, {0, 1, 0, 1}, 1);
    GradientResult<double> r;
    r.grad = {Vec2<double>(2.3, -2.6)};
    r.cond = {1.0};
    r.flags = {CellStatus::Ok};
    const ErrorNorms n = error_norms<double>(r, linear_field(0.0, 2.0, -3.0), m, m.geometry());
    EXPECT_DOUBLE_EQ(n.mean, 0.5);
    EXPECT_DOUBLE_EQ(n.max, 0.5);
}

TEST(ErrorNorms, SkipsUnusableCellsAndWeightsByArea) {
    const Mesh m = gen_locally_refined(0);
    const AnalyticField f = linear_field(0.0, 1.0, 1.0);
    GradientResult<double> r;
    const auto& geo = m.geometry();
    double area_sum = 0.0, weighted = 0.0;
    prop::Gen g(9);
    for (Index c = 0; c < m.n_cells(); ++c) {
        const double e = g.uniform(0.0, 1.0);
        r.grad.emplace_back(1.0 + e, 1.0);
        r.cond.push_back(1.0);
        r.flags.push_back(c == 3 ? CellStatus::Singular : CellStatus::Ok);
        if (c == 3) continue;
        area_sum += geo.cell_area[c];
        weighted += geo.cell_area[c] * e;
    }
    const ErrorNorms plain = error_norms<double>(r, f, m, geo);
    const ErrorNorms area = error_norms<double>(r, f, m, geo, true);
    EXPECT_EQ(plain.n_singular, 1);
    EXPECT_NEAR(area.mean, weighted / area_sum, 1e-15);
    EXPECT_NE(area.mean, plain.mean);
}

TEST(ErrorNorms, IndependentRecomputationFromCellOutput) {
    const Mesh m = gen_smooth_mapped(3);
    const Evaluation e = evaluate(m, tanh_product(), parse_scheme("LS(1)"));
    double sum = 0.0, mx = 0.0;
    for (std::size_t c = 0; c < e.grad.size(); ++c) {
        const Vec2<double> exact = exact_gradient<double>(tanh_product(), e.centroid[c]);
        const double err = std::hypot(e.grad[c].x() - exact.x(), e.grad[c].y() - exact.y());
        EXPECT_DOUBLE_EQ(err, e.err[c]);
        sum += err;
        mx = std::max(mx, err);
    }
    EXPECT_NEAR(e.norms.mean, sum / static_cast<double>(e.grad.size()), 1e-15 * e.norms.mean);
    EXPECT_EQ(e.norms.max, mx);
}

TEST(ObservedOrder, Values) {
    EXPECT_DOUBLE_EQ(observed_order(2.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(observed_order(1.0, 0.25), 2.0);
    EXPECT_DOUBLE_EQ(observed_order(0.3, 0.3), 0.0);
    EXPECT_EQ(code_of([] { observed_order(0.0, 1.0); }), ErrorCode::NonPositiveError);
    EXPECT_EQ(code_of([] { observed_order(1.0, -1.0); }), ErrorCode::NonPositiveError);
    EXPECT_EQ(code_of([] { observed_order(1.0, NAN); }), ErrorCode::NonPositiveError);
}

TEST(ObservedOrderProperty, PowerLawRecovered) {
    prop::Gen g(31);
    for (int k = 0; k < 200; ++k) {
        const double p = g.uniform(-1.0, 4.0), c = std::exp(g.uniform(-20.0, 5.0));
        EXPECT_NEAR(observed_order(c, c * std::pow(2.0, -p)), p, 1e-12);
    }
}

TEST(RunStudy, TaylorGaussSecondOrderOnSmoothMapping) {
    const StudyReport r = run_study(small(GridFamily::SmoothMapped, {"TG(2)"}, 2, 6));
    ASSERT_EQ(r.rows.size(), 5u);
    EXPECT_TRUE(std::isnan(r.rows[0].order_mean));
    EXPECT_NEAR(r.find("TG(2)", 6)->order_mean, 2.0, 0.15);
    for (const auto& row : r.rows) EXPECT_EQ(row.status, "ok");
}

TEST(RunStudy, FirstOrderOnPerturbedGrid) {
    const StudyReport r = run_study(small(GridFamily::Perturbed, {"LS(1)", "GG"}, 3, 6));
    EXPECT_NEAR(r.find("LS(1)", 6)->order_mean, 1.0, 0.2);
    EXPECT_LT(r.find("GG", 6)->order_mean, 0.3);  // GG stalls on skewed cells
    EXPECT_EQ(r.find("LS(1)", 6)->seed, std::optional<std::uint64_t>(5));
}

TEST(RunStudy, UnweightedLeastSquaresFailsOnThinAnnulus) {
    const StudyReport r = run_study(small(GridFamily::HARC, {"LS(-1)", "LS(1)"}, 3, 3, radial_tanh()));
    EXPECT_GT(r.find("LS(-1)", 3)->mean_err / r.find("LS(1)", 3)->mean_err, 10.0);
    EXPECT_DOUBLE_EQ(r.rows[0].gamma, 16.0);
}

TEST(RunStudy, DeterministicAcrossThreadCounts) {
    StudyConfig c = small(GridFamily::Perturbed, {"GG", "LSA(1)", "iTG(2)"}, 0, 4);
    c.threads = 1;
    std::ostringstream a, b;
    write_csv(a, run_study(c));
    c.threads = 7;
    write_csv(b, run_study(c));
    EXPECT_EQ(a.str(), b.str());
}

TEST(RunStudy, FailuresAreRecordedPerRow) {
    StudyConfig c = small(GridFamily::Perturbed, {"LS(1)"}, 1, 1);
    c.families[0].params.beta = 0.9;  // out of range
    const StudyReport r = run_study(c);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].status, "meshgen.InvalidParameter");
    EXPECT_TRUE(std::isnan(r.rows[0].mean_err));
}

TEST(RunStudy, BreakdownFlagNeedsBothPrecisions) {
    StudyConfig c = small(GridFamily::HARC, {"LSA(2)"}, 5, 8, radial_tanh());
    c.precisions = {PrecisionMode::Double, PrecisionMode::Extended};
    const StudyReport r = run_study(c);
    ASSERT_EQ(r.rows.size(), 8u);
    for (const auto& row : r.rows) {
        if (row.precision == PrecisionMode::Extended) EXPECT_FALSE(row.breakdown);
        if (row.breakdown) {
            const StudyRow* ext = r.find(row.scheme, row.level, PrecisionMode::Extended);
            EXPECT_LT(row.order_mean, 1.3);
            EXPECT_GE(ext->order_mean, 1.7);
        }
    }
    c.precisions = {PrecisionMode::Double};
    for (const auto& row : run_study(c).rows) EXPECT_FALSE(row.breakdown);
}

TEST(RunStudy, FindKeys) {
    StudyConfig c = small(GridFamily::Cartesian, {"GG", "TG(1)"}, 1, 2);
    c.fields.push_back(linear_field(0, 1, 1));
    const StudyReport r = run_study(c);
    EXPECT_EQ(r.rows.size(), 8u);
    EXPECT_EQ(r.find("TG(1)", 2, PrecisionMode::Double, "linear")->field, "linear");
    EXPECT_EQ(r.find("TG(1)", 2, PrecisionMode::Extended), nullptr);
    EXPECT_EQ(r.find("TG(1)", 2, PrecisionMode::Double, {}, GridFamily::HARC), nullptr);
    EXPECT_EQ(r.find("LS(1)", 2), nullptr);
}

TEST(Presets, Contents) {
    const auto names = preset_names();
    EXPECT_EQ(names.size(), 8u);
    const StudyConfig f6 = preset("fig6");
    EXPECT_EQ(f6.schemes.size(), 15u);
    ASSERT_EQ(f6.families.size(), 1u);
    EXPECT_EQ(f6.families[0].family, GridFamily::HARC);
    EXPECT_EQ(f6.fields[0].kind, FieldKind::RadialTanh);
    EXPECT_EQ(f6.levels, (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
    EXPECT_EQ(f6.precisions.size(), 2u);
    EXPECT_EQ(preset("fig3").families[0].family, GridFamily::SmoothMapped);
    EXPECT_EQ(preset("fig8").fields[0].kind, FieldKind::CircumferentialTanh);
    EXPECT_EQ(preset("fig7").families.size(), 2u);
    EXPECT_EQ(preset("fig5", 4).families[0].params.seed, std::optional<std::uint64_t>(4));
    EXPECT_EQ(code_of([] { preset("fig5"); }), ErrorCode::UsageError);
    EXPECT_EQ(code_of([] { preset("fig9"); }), ErrorCode::UsageError);
}

TEST(Output, CsvShape) {
    StudyConfig c = small(GridFamily::Perturbed, {"GG", "TG(1)"}, 1, 3);
    std::ostringstream os;
    write_csv(os, run_study(c));
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    const auto header = split(line);
    ASSERT_EQ(header.size(), 17u);
    EXPECT_EQ(header[0], "family");
    EXPECT_EQ(header.back(), "status");
    int rows = 0;
    while (std::getline(in, line)) {
        const auto cols = split(line);
        ASSERT_EQ(cols.size(), header.size()) << line;
        EXPECT_EQ(cols[0], "perturbed");
        EXPECT_EQ(cols[1], "5");
        // 17 significant digits round-trip the value.
        const double mean = std::stod(cols[9]);
        EXPECT_GT(mean, 0.0);
        ++rows;
    }
    EXPECT_EQ(rows, 6);
}

TEST(Output, GnuplotBlocks) {
    std::ostringstream os;
    write_gnuplot(os, run_study(small(GridFamily::Cartesian, {"GG", "TG(1)"}, 0, 2)));
    const std::string s = os.str();
    std::set<std::string> headers;
    std::istringstream in(s);
    std::string line;
    int data = 0;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) headers.insert(line);
        else if (!line.empty()) ++data;
    }
    EXPECT_EQ(headers.size(), 4u);
    EXPECT_EQ(data, 12);
    EXPECT_NE(s.find("scheme=TG(1) precision=double norm=max"), std::string::npos);
}

TEST(StudyProperty, RowsCoverEveryCombinationInOrder) {
    prop::Gen g(44);
    for (int trial = 0; trial < 4; ++trial) {
        StudyConfig c;
        c.families = {family(GridFamily::Cartesian), family(GridFamily::SmoothMapped)};
        const int lo = g.integer(0, 1), hi = lo + g.integer(0, 2);
        for (int l = lo; l <= hi; ++l) c.levels.push_back(l);
        const auto cat = scheme_catalog();
        for (int k = 0; k < 3; ++k) c.schemes.push_back(cat[g.integer(0, 14)]);
        c.fields = {tanh_product()};
        const StudyReport r = run_study(c);
        ASSERT_EQ(r.rows.size(), 2u * c.levels.size() * 3u);
        std::size_t k = 0;
        for (const auto& fam : c.families) {
            for (const auto& s : c.schemes) {
                for (int l : c.levels) {
                    EXPECT_EQ(r.rows[k].family, fam.family);
                    EXPECT_EQ(r.rows[k].scheme, scheme_name(s));
                    EXPECT_EQ(r.rows[k].level, l);
                    EXPECT_EQ(r.rows[k].n_cells, Index(16) << (2 * l));
                    ++k;
                }
            }
        }
    }
}
