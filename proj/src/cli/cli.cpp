#include "fvgrad/cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "fvgrad/mesh/mesh_io.hpp"

namespace fvgrad::cli {

namespace {

[[noreturn]] void usage(const std::string& what) { throw Error(ErrorCode::UsageError, what); }
[[noreturn]] void conflict(const std::string& what) { throw Error(ErrorCode::ConfigConflict, what); }

double parse_number(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) usage("invalid number '" + text + "' for " + key);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    return out;
}

/// Keys accepted by --param for a family.
std::vector<std::string> param_keys(GridFamily f) {
    switch (f) {
        case GridFamily::Cartesian: return {"xmin", "xmax", "ymin", "ymax", "n0"};
        case GridFamily::SmoothMapped: return {"xmin", "xmax", "ymin", "ymax", "n0", "amplitude"};
        case GridFamily::LocallyRefined: return {"xmin", "xmax", "ymin", "ymax", "n0", "patches"};
        case GridFamily::Perturbed: return {"xmin", "xmax", "ymin", "ymax", "n0", "beta"};
        case GridFamily::HARC: return {"R", "A", "dtheta0"};
        case GridFamily::HARCO: return {"R", "A", "dtheta0", "angle"};
    }
    return {};
}

void apply_param(GridFamilySpec& spec, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) usage("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    const auto keys = param_keys(spec.family);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        usage("unknown --param key '" + key + "' for family " + std::string(to_string(spec.family)));
    }
    GridParams& p = spec.params;
    if (key == "patches") {
        p.patches.clear();
        for (const auto& rect : split(value, '/')) {
            const auto parts = split(rect, ':');
            if (parts.size() != 4) usage("patch '" + rect + "' must be xmin:xmax:ymin:ymax");
            p.patches.push_back({parse_number(key, parts[0]), parse_number(key, parts[1]), parse_number(key, parts[2]),
                                 parse_number(key, parts[3])});
        }
        return;
    }
    const double v = parse_number(key, value);
    if (key == "xmin") p.domain.xmin = v;
    if (key == "xmax") p.domain.xmax = v;
    if (key == "ymin") p.domain.ymin = v;
    if (key == "ymax") p.domain.ymax = v;
    if (key == "amplitude") p.amplitude = v;
    if (key == "beta") p.beta = v;
    if (key == "R") p.radius = v;
    if (key == "A") p.aspect = v;
    if (key == "dtheta0") p.dtheta0 = v;
    if (key == "angle") p.oblique_deg = v;
    if (key == "n0") {
        if (v != static_cast<int>(v) || v < 1) usage("n0 must be a positive integer");
        p.n0 = static_cast<int>(v);
    }
}

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> out;
    auto to_int = [&](const std::string& s) {
        const double v = parse_number("--levels", s);
        if (v != static_cast<int>(v) || v < 0) usage("levels must be non-negative integers");
        return static_cast<int>(v);
    };
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = to_int(text.substr(0, dots));
        const int hi = to_int(text.substr(dots + 2));
        if (hi < lo) usage("empty level range '" + text + "'");
        for (int l = lo; l <= hi; ++l) out.push_back(l);
    } else {
        for (const auto& s : split(text, ',')) out.push_back(to_int(s));
    }
    if (out.empty()) usage("no levels given");
    return out;
}

std::vector<PrecisionMode> parse_precisions(const std::string& text) {
    std::vector<PrecisionMode> out;
    for (const auto& s : split(text, ',')) out.push_back(parse_precision(s));
    if (out.empty()) usage("no precision given");
    return out;
}

struct FieldFlags {
    std::map<std::string, std::optional<double>> values;

    void add(CLI::App* app) {
        for (const char* k : {"fmin", "fmax", "rmin", "rmax", "thetamin", "thetamax", "a", "b", "c", "cxx", "cxy", "cyy"}) {
            values[k];
        }
        app->add_option("--fmin", values["fmin"], "radial/circumferential: f at the lower end (default 1)");
        app->add_option("--fmax", values["fmax"], "radial/circumferential: f at the upper end (default 3)");
        app->add_option("--rmin", values["rmin"], "radial-tanh: lower radius (default 1)");
        app->add_option("--rmax", values["rmax"], "radial-tanh: upper radius (default 1.0005)");
        app->add_option("--thetamin", values["thetamin"],
                        "circumferential-tanh: lower angle (default: the mesh's angular extent)");
        app->add_option("--thetamax", values["thetamax"],
                        "circumferential-tanh: upper angle (default: the mesh's angular extent)");
        app->add_option("--a", values["a"], "linear/quadratic: constant term (default 1)");
        app->add_option("--b", values["b"], "linear/quadratic: x coefficient (default 2)");
        app->add_option("--c", values["c"], "linear/quadratic: y coefficient (default -3)");
        app->add_option("--cxx", values["cxx"], "quadratic: x^2 coefficient (default 0)");
        app->add_option("--cxy", values["cxy"], "quadratic: xy coefficient (default 0)");
        app->add_option("--cyy", values["cyy"], "quadratic: y^2 coefficient (default 0)");
    }

    bool any() const {
        for (const auto& [k, v] : values) {
            if (v) return true;
        }
        return false;
    }

    /// Builds the field; theta bounds given explicitly are not re-bound to the mesh.
    AnalyticField build(const std::string& name, bool& explicit_theta) const {
        AnalyticField f;
        f.kind = parse_field_kind(name);
        explicit_theta = false;
        for (const auto& [k, v] : values) {
            if (!v) continue;
            set_field_param(f, k, *v);
            if (k == "thetamin" || k == "thetamax") explicit_theta = true;
        }
        return f;
    }
};

struct Parsed {
    std::string family = "cartesian";
    int level = 0;
    std::vector<std::string> params;
    std::vector<std::uint64_t> seeds;
    std::string field = "tanh-product";
    std::string scheme;
    std::optional<double> q;
    std::string nf_policy;
    std::string boundary = "use";
    std::string precision = "double";
    std::string mesh_path;
    std::vector<std::string> families;
    std::string levels;
    std::string schemes = "all";
    bool area_weighted = false;
    double nominal_order = 2.0;
    FieldFlags field_flags;
};

struct AppBundle {
    CLI::App app{"Finite-volume gradient reconstruction: grids, schemes and convergence studies.", "fvgrad"};
    CLI::App* mesh = nullptr;
    CLI::App* grad = nullptr;
    CLI::App* study = nullptr;
    RunConfig config;
    Parsed p;
    bool explicit_theta = false;
};

void build_app(AppBundle& b) {
    auto& app = b.app;
    auto& p = b.p;
    auto& c = b.config;
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Print help for every subcommand");

    b.mesh = app.add_subcommand("mesh", "Generate a grid and write it in the fvgrad-mesh v1 format");
    b.mesh->add_option("--family", p.family,
                       "cartesian | smooth-mapped | locally-refined | perturbed | harc | harco")
        ->required();
    b.mesh->add_option("--level", p.level, "refinement level l >= 0")->capture_default_str();
    b.mesh->add_option("--param", p.params,
                       "family parameter key=value (repeatable): xmin xmax ymin ymax n0 amplitude beta patches R A "
                       "dtheta0 angle");
    b.mesh->add_option("--seed", p.seeds, "perturbation seed (required for the perturbed family)")->expected(1);
    b.mesh->add_option("--out", c.out, "output mesh file, - for standard output")->capture_default_str();
    b.mesh->add_flag("--metrics", c.metrics, "print mean/max quality metrics as CSV on standard output");

    b.grad = app.add_subcommand("grad", "Compute per-cell gradients of an analytic field on a mesh file");
    b.grad->add_option("--mesh", p.mesh_path, "input mesh file")->required();
    b.grad->add_option("--field", p.field,
                       "tanh-product | radial-tanh | circumferential-tanh | linear | quadratic")
        ->capture_default_str();
    b.grad->add_option("--scheme", p.scheme,
                       "catalog name such as TG(2) or GG+LS(1), or a family GG | LS | LSA | TG | iTG with --q")
        ->required();
    b.grad->add_option("--q", p.q, "weight exponent for LS, LSA, TG and iTG (default 1)");
    b.grad->add_option("--nf-policy", p.nf_policy,
                       "neighbour-centroid | projected | midpoint (default: the family's own)");
    b.grad->add_option("--boundary", p.boundary, "use | exclude boundary faces")->capture_default_str();
    b.grad->add_option("--precision", p.precision, "double | extended")->capture_default_str();
    b.grad->add_option("--out", c.out, "output CSV, - for standard output")->capture_default_str();
    p.field_flags.add(b.grad);

    b.study = app.add_subcommand("study", "Run a convergence study and write long-form CSV");
    b.study->add_option("--preset", c.preset, "fig3 | fig4 | fig5 | fig6 | fig7 | fig8 | fig10 | fig11");
    b.study->add_option("--family", p.families, "grid family (repeatable)");
    b.study->add_option("--levels", p.levels, "levels as a..b or a comma list (preset default: its own)");
    b.study->add_option("--field", p.field, "field name")->capture_default_str();
    b.study->add_option("--schemes", p.schemes, "comma-separated scheme names or all")->capture_default_str();
    b.study->add_option("--precision", p.precision, "comma list of double, extended")->capture_default_str();
    b.study->add_option("--param", p.params, "family parameter key=value (repeatable)");
    b.study->add_option("--seed", p.seeds, "perturbation seed (repeatable; one perturbed grid per seed)");
    b.study->add_flag("--area-weighted", p.area_weighted, "area-weighted mean error");
    b.study->add_option("--nominal-order", p.nominal_order, "expected order of the mean error for breakdown flags")
        ->capture_default_str();
    b.study->add_option("--out", c.out, "output CSV, - for standard output")->capture_default_str();
    b.study->add_option("--gnuplot", c.gnuplot_path, "also write per-curve gnuplot data blocks to this file");
    p.field_flags.add(b.study);
}

std::string single_line(std::string s) {
    for (char& ch : s) {
        if (ch == '\n' || ch == '\r') ch = ' ';
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

GridFamilySpec grid_spec(const std::string& family, const std::vector<std::string>& params) {
    GridFamilySpec g;
    g.family = parse_grid_family(family);
    for (const auto& kv : params) apply_param(g, kv);
    return g;
}

void finish_mesh(AppBundle& b) {
    auto& p = b.p;
    auto& c = b.config;
    c.subcommand = Subcommand::Mesh;
    if (p.level < 0) usage("--level must be >= 0");
    c.grid = grid_spec(p.family, p.params);
    c.grid.level = p.level;
    if (c.grid.family == GridFamily::Perturbed) {
        if (p.seeds.empty()) usage("--seed is required for the perturbed family");
        c.grid.params.seed = p.seeds.front();
    } else if (!p.seeds.empty()) {
        conflict("--seed only applies to the perturbed family");
    }
}

void finish_grad(AppBundle& b) {
    auto& p = b.p;
    auto& c = b.config;
    c.subcommand = Subcommand::Grad;
    c.mesh_path = p.mesh_path;
    c.field = p.field_flags.build(p.field, b.explicit_theta);
    c.bind_theta = !b.explicit_theta;

    const bool full_name = p.scheme.find('(') != std::string::npos || p.scheme.find('+') != std::string::npos;
    if (full_name) {
        if (p.q) conflict("--q conflicts with the exponent in scheme name '" + p.scheme + "'");
        c.scheme = parse_scheme(p.scheme);
    } else if (p.scheme == "GG") {
        if (p.q) conflict("--q does not apply to GG");
        c.scheme = make_scheme(SchemeFamily::GG);
    } else {
        const std::map<std::string, SchemeFamily> families{
            {"LS", SchemeFamily::LS}, {"LSA", SchemeFamily::LSA}, {"TG", SchemeFamily::TG}, {"iTG", SchemeFamily::iTG}};
        const auto it = families.find(p.scheme);
        if (it == families.end()) usage("unknown scheme '" + p.scheme + "'");
        c.scheme = make_scheme(it->second, p.q.value_or(1.0));
    }
    const bool gg_family = c.scheme.family == SchemeFamily::GG || c.scheme.family == SchemeFamily::GGCorrected;
    if (!p.nf_policy.empty()) {
        if (gg_family) conflict("--nf-policy does not apply to Green-Gauss schemes");
        if (p.nf_policy == "neighbour-centroid") {
            c.scheme.nf_policy = NfPolicy::NeighbourCentroid;
        } else if (p.nf_policy == "projected") {
            c.scheme.nf_policy = NfPolicy::ProjectedFaceCentroid;
        } else if (p.nf_policy == "midpoint") {
            c.scheme.nf_policy = NfPolicy::Midpoint;
        } else {
            usage("unknown --nf-policy '" + p.nf_policy + "'");
        }
    }
    if (p.boundary == "use") {
        c.scheme.boundary = BoundaryPolicy::UseBoundaryValue;
    } else if (p.boundary == "exclude") {
        if (c.scheme.family == SchemeFamily::GG) conflict("--boundary exclude does not apply to plain GG");
        c.scheme.boundary = BoundaryPolicy::ExcludeBoundaryFaces;
    } else {
        usage("unknown --boundary '" + p.boundary + "'");
    }
    c.scheme.precision = parse_precision(p.precision);
    validate(c.scheme);
}

void finish_study(AppBundle& b) {
    auto& p = b.p;
    auto& c = b.config;
    auto* s = b.study;
    c.subcommand = Subcommand::Study;
    const std::optional<std::uint64_t> first_seed =
        p.seeds.empty() ? std::nullopt : std::optional<std::uint64_t>(p.seeds.front());
    if (!c.preset.empty()) {
        for (const char* flag : {"--family", "--field", "--schemes", "--precision", "--param"}) {
            if (s->count(flag) > 0) conflict(std::string(flag) + " conflicts with --preset " + c.preset);
        }
        if (p.field_flags.any()) conflict("field parameters conflict with --preset " + c.preset);
        if (p.seeds.size() > 1) conflict("presets take a single --seed");
        c.study = preset(c.preset, first_seed);
        if (c.preset != "fig5" && first_seed) conflict("--seed only applies to the perturbed family");
    } else {
        if (p.families.empty()) usage("--family or --preset is required");
        if (p.levels.empty()) usage("--levels is required without --preset");
        bool any_perturbed = false;
        for (const auto& name : p.families) {
            GridFamilySpec g = grid_spec(name, p.params);
            if (g.family == GridFamily::Perturbed) {
                any_perturbed = true;
                if (p.seeds.empty()) usage("--seed is required for the perturbed family");
                for (std::uint64_t seed : p.seeds) {
                    g.params.seed = seed;
                    c.study.families.push_back(g);
                }
            } else {
                c.study.families.push_back(g);
            }
        }
        if (!any_perturbed && !p.seeds.empty()) conflict("--seed only applies to the perturbed family");
        c.study.fields = {p.field_flags.build(p.field, b.explicit_theta)};
        if (b.explicit_theta) conflict("study grids set the circumferential extents; drop --thetamin/--thetamax");
        if (p.schemes == "all") {
            c.study.schemes = scheme_catalog();
        } else {
            for (const auto& name : split(p.schemes, ',')) c.study.schemes.push_back(parse_scheme(name));
        }
        c.study.precisions = parse_precisions(p.precision);
    }
    if (!p.levels.empty()) c.study.levels = parse_levels(p.levels);
    c.study.area_weighted = p.area_weighted;
    c.study.nominal_order = p.nominal_order;
}

RunConfig parse_impl(int argc, const char* const* argv) {
    AppBundle b;
    build_app(b);
    try {
        b.app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        RunConfig help;
        help.subcommand = Subcommand::Help;
        const CLI::App* target = &b.app;
        for (CLI::App* sub : {b.mesh, b.grad, b.study}) {
            if (sub->parsed()) target = sub;
        }
        help.help_text = target->help();
        return help;
    } catch (const CLI::CallForAllHelp&) {
        RunConfig help;
        help.subcommand = Subcommand::Help;
        help.help_text = b.app.help("", CLI::AppFormatMode::All);
        return help;
    } catch (const CLI::ParseError& e) {
        usage(single_line(e.what()));
    }
    if (b.mesh->parsed()) finish_mesh(b);
    if (b.grad->parsed()) finish_grad(b);
    if (b.study->parsed()) finish_study(b);
    return b.config;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string metrics_csv(const QualityMetrics& q) {
    std::ostringstream os;
    os << "metric,mean,max\n";
    os << "skewness," << fmt(q.skewness_summary.mean) << ',' << fmt(q.skewness_summary.max) << '\n';
    os << "unevenness," << fmt(q.unevenness_summary.mean) << ',' << fmt(q.unevenness_summary.max) << '\n';
    os << "nonorthogonality," << fmt(q.nonorthogonality_summary.mean) << ',' << fmt(q.nonorthogonality_summary.max)
       << '\n';
    os << "aspect_ratio," << fmt(q.aspect_ratio_summary.mean) << ',' << fmt(q.aspect_ratio_summary.max) << '\n';
    return os.str();
}

int run_mesh(const RunConfig& c, std::ostream& out) {
    const Mesh mesh = generate(c.grid);
    std::ostringstream os;
    write_mesh(os, mesh);
    write_output(c.out, os.str(), out);
    if (c.metrics) out << metrics_csv(quality(mesh));
    return 0;
}

int run_grad(const RunConfig& c, std::ostream& out) {
    const Mesh mesh = read_mesh_file(c.mesh_path);
    const AnalyticField field = c.bind_theta ? bind_to_mesh(c.field, mesh) : c.field;
    const Evaluation ev = evaluate(mesh, field, c.scheme);
    std::ostringstream os;
    os << "cell_id,px,py,gx,gy,exact_gx,exact_gy,err_norm,cond,flag\n";
    for (std::size_t k = 0; k < ev.grad.size(); ++k) {
        os << k << ',' << fmt(ev.centroid[k].x()) << ',' << fmt(ev.centroid[k].y()) << ',' << fmt(ev.grad[k].x())
           << ',' << fmt(ev.grad[k].y()) << ',' << fmt(ev.exact[k].x()) << ',' << fmt(ev.exact[k].y()) << ','
           << fmt(ev.err[k]) << ',' << fmt(ev.cond[k]) << ',' << to_string(ev.flags[k]) << '\n';
    }
    write_output(c.out, os.str(), out);
    return 0;
}

int run_study_cmd(const RunConfig& c, std::ostream& out) {
    const StudyReport report = run_study(c.study);
    std::ostringstream os;
    write_csv(os, report);
    if (!c.gnuplot_path.empty()) {
        std::ostringstream gp;
        write_gnuplot(gp, report);
        write_output(c.gnuplot_path, gp.str(), out);
    }
    write_output(c.out, os.str(), out);
    return 0;
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) { return parse_impl(argc, argv); }

RunConfig parse_args(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"fvgrad"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return parse_impl(static_cast<int>(argv.size()), argv.data());
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path == "-") {
        out << content;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
        f << content;
        f.flush();
        if (!f) {
            f.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot move output into place at '" + path + "'");
    }
}

int run(const RunConfig& config, std::ostream& out) {
    switch (config.subcommand) {
        case Subcommand::Help: out << config.help_text; return 0;
        case Subcommand::Mesh: return run_mesh(config, out);
        case Subcommand::Grad: return run_grad(config, out);
        case Subcommand::Study: return run_study_cmd(config, out);
    }
    return 1;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        return run(parse_args(argc, argv), out);
    } catch (const Error& e) {
        err << "error: " << code_name(e.code()) << ": " << single_line(e.what()) << '\n';
        const bool usage_like = e.code() == ErrorCode::UsageError || e.code() == ErrorCode::ConfigConflict;
        return usage_like ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << single_line(e.what()) << '\n';
        return 1;
    }
}

}  // namespace fvgrad::cli
