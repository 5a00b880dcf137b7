#include "fvgrad/study/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <thread>

namespace fvgrad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T>
std::vector<T> cell_errors(const GradientResult<T>& result, const AnalyticField& field, const Geometry<T>& geom,
                           std::vector<Vec2<T>>* exact_out = nullptr) {
    std::vector<T> err(result.grad.size());
    if (exact_out) exact_out->resize(result.grad.size());
    for (std::size_t c = 0; c < err.size(); ++c) {
        const Vec2<T> ex = exact_gradient(field, geom.cell_centroid[c]);
        if (exact_out) (*exact_out)[c] = ex;
        const Vec2<T> d(result.grad[c].x() - ex.x(), result.grad[c].y() - ex.y());
        err[c] = usable(result.flags[c]) ? norm(d) : T(kNaN);
    }
    return err;
}

template <class T>
ErrorNorms norms_from(const std::vector<T>& err, const std::vector<CellStatus>& flags, const Geometry<T>& geom,
                      bool area_weighted) {
    ErrorNorms n;
    double sum = 0.0;
    double weight = 0.0;
    for (std::size_t c = 0; c < err.size(); ++c) {
        if (!usable(flags[c])) {
            ++n.n_singular;
            continue;
        }
        const double e = to_double(err[c]);
        const double w = area_weighted ? to_double(geom.cell_area[c]) : 1.0;
        sum += w * e;
        weight += w;
        n.max = std::max(n.max, e);
    }
    n.mean = weight > 0.0 ? sum / weight : kNaN;
    if (weight == 0.0) n.max = kNaN;
    return n;
}

double max_usable_cond(const std::vector<double>& cond, const std::vector<CellStatus>& flags) {
    double m = 0.0;
    for (std::size_t c = 0; c < cond.size(); ++c) {
        if (usable(flags[c])) m = std::max(m, cond[c]);
    }
    return m;
}

template <class T>
Evaluation evaluate_t(const Mesh& mesh, const Geometry<T>& geom, const AnalyticField& field, const SchemeSpec& spec,
                      bool area_weighted) {
    const CellField<T> cf = sample<T>(field, mesh, geom);
    const GradientResult<T> r = compute<T>(mesh, geom, cf, spec);
    std::vector<Vec2<T>> exact;
    const std::vector<T> err = cell_errors(r, field, geom, &exact);
    Evaluation ev;
    const auto n = r.grad.size();
    ev.centroid.resize(n);
    ev.grad.resize(n);
    ev.exact.resize(n);
    ev.err.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        ev.centroid[c] = demote(geom.cell_centroid[c]);
        ev.grad[c] = demote(r.grad[c]);
        ev.exact[c] = demote(exact[c]);
        ev.err[c] = to_double(err[c]);
    }
    ev.cond = r.cond;
    ev.flags = r.flags;
    ev.norms = norms_from(err, r.flags, geom, area_weighted);
    ev.max_cond = max_usable_cond(r.cond, r.flags);
    return ev;
}

struct Cell {
    ErrorNorms norms;
    double max_cond = kNaN;
    std::string status = "ok";
    double h = kNaN;
    Index n_cells = 0;
};

template <class T>
Cell measure(const Mesh& mesh, const Geometry<T>& geom, const CellField<T>& cf, const AnalyticField& field,
             const SchemeSpec& spec, bool area_weighted) {
    SchemeSpec s = spec;
    s.precision = ScalarTraits<T>::mode;
    const GradientResult<T> r = compute<T>(mesh, geom, cf, s);
    Cell out;
    out.norms = norms_from(cell_errors(r, field, geom), r.flags, geom, area_weighted);
    out.max_cond = max_usable_cond(r.cond, r.flags);
    return out;
}

std::string failure_code(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(code_name(err->code()));
    return "internal";
}

std::string fmt(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<int> level_range(int lo, int hi) {
    std::vector<int> out;
    for (int l = lo; l <= hi; ++l) out.push_back(l);
    return out;
}

}  // namespace

template <class T>
ErrorNorms error_norms(const GradientResult<T>& result, const AnalyticField& field, const Mesh& mesh,
                       const Geometry<T>& geom, bool area_weighted) {
    (void)mesh;
    return norms_from(cell_errors(result, field, geom), result.flags, geom, area_weighted);
}

template ErrorNorms error_norms<double>(const GradientResult<double>&, const AnalyticField&, const Mesh&,
                                        const Geometry<double>&, bool);
template ErrorNorms error_norms<DoubleDouble>(const GradientResult<DoubleDouble>&, const AnalyticField&, const Mesh&,
                                              const Geometry<DoubleDouble>&, bool);

double observed_order(double coarse_error, double fine_error) {
    if (!(coarse_error > 0.0) || !(fine_error > 0.0)) {
        throw Error(ErrorCode::NonPositiveError, "observed order needs two positive errors");
    }
    return std::log2(coarse_error / fine_error);
}

Evaluation evaluate(const Mesh& mesh, const AnalyticField& field, const SchemeSpec& spec, bool area_weighted) {
    if (spec.precision == PrecisionMode::Extended) {
        const Geometry<DoubleDouble> geom = build_geometry<DoubleDouble>(mesh);
        return evaluate_t(mesh, geom, field, spec, area_weighted);
    }
    return evaluate_t(mesh, mesh.geometry(), field, spec, area_weighted);
}

int worker_threads_from_env() {
    int n = 0;
    if (const char* env = std::getenv("FVGRAD_THREADS")) n = std::atoi(env);
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(n, 1);
}

const StudyRow* StudyReport::find(std::string_view scheme, int level, PrecisionMode precision,
                                  std::string_view field, std::optional<GridFamily> family,
                                  std::optional<std::uint64_t> seed) const {
    for (const auto& r : rows) {
        if (r.scheme != scheme || r.level != level || r.precision != precision) continue;
        if (!field.empty() && r.field != field) continue;
        if (family && r.family != *family) continue;
        if (seed && r.seed != seed) continue;
        return &r;
    }
    return nullptr;
}

StudyReport run_study(const StudyConfig& config) {
    const std::size_t nfam = config.families.size();
    const std::size_t nlev = config.levels.size();
    const std::size_t nfield = config.fields.size();
    const std::size_t nsch = config.schemes.size();
    const std::size_t nprec = config.precisions.size();
    const std::size_t per_task = nfield * nsch * nprec;

    // results[(task * nfield + field) * nsch * nprec + scheme * nprec + prec]
    std::vector<Cell> results(nfam * nlev * per_task);
    auto slot = [&](std::size_t task, std::size_t fi, std::size_t si, std::size_t pi) -> Cell& {
        return results[task * per_task + (fi * nsch + si) * nprec + pi];
    };

    auto run_task = [&](std::size_t task) {
        const std::size_t fam = task / nlev;
        GridFamilySpec gs = config.families[fam];
        gs.level = config.levels[task % nlev];
        auto fail_all = [&](const std::string& code) {
            for (std::size_t k = 0; k < per_task; ++k) results[task * per_task + k].status = code;
        };
        Mesh mesh;
        try {
            mesh = generate(gs);
        } catch (const std::exception& e) {
            fail_all(failure_code(e));
            return;
        }
        const double h = spacing(gs, mesh);
        for (std::size_t k = 0; k < per_task; ++k) {
            results[task * per_task + k].h = h;
            results[task * per_task + k].n_cells = mesh.n_cells();
        }
        for (std::size_t pi = 0; pi < nprec; ++pi) {
            auto run_precision = [&](const auto& geom) {
                using T = typename std::decay_t<decltype(geom.cell_area)>::value_type;
                for (std::size_t fi = 0; fi < nfield; ++fi) {
                    const AnalyticField field = bind_to_mesh(config.fields[fi], mesh);
                    const CellField<T> cf = sample<T>(field, mesh, geom);
                    for (std::size_t si = 0; si < nsch; ++si) {
                        Cell& out = slot(task, fi, si, pi);
                        try {
                            Cell c = measure<T>(mesh, geom, cf, field, config.schemes[si], config.area_weighted);
                            out.norms = c.norms;
                            out.max_cond = c.max_cond;
                        } catch (const std::exception& e) {
                            out.status = failure_code(e);
                        }
                    }
                }
            };
            try {
                if (config.precisions[pi] == PrecisionMode::Extended) {
                    run_precision(build_geometry<DoubleDouble>(mesh));
                } else {
                    run_precision(mesh.geometry());
                }
            } catch (const std::exception& e) {
                for (std::size_t fi = 0; fi < nfield; ++fi) {
                    for (std::size_t si = 0; si < nsch; ++si) slot(task, fi, si, pi).status = failure_code(e);
                }
            }
        }
    };

    const std::size_t ntasks = nfam * nlev;
    int threads = config.threads > 0 ? config.threads : worker_threads_from_env();
    threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(ntasks, 1)));
    // Largest meshes first keeps the tail short.
    std::vector<std::size_t> order(ntasks);
    for (std::size_t t = 0; t < ntasks; ++t) order[t] = t;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return config.levels[a % nlev] > config.levels[b % nlev]; });
    if (threads <= 1) {
        for (std::size_t t : order) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < ntasks; k = next++) run_task(order[k]);
            });
        }
        for (auto& t : pool) t.join();
    }

    StudyReport report;
    report.rows.reserve(results.size());
    for (std::size_t fam = 0; fam < nfam; ++fam) {
        const GridFamilySpec& gs0 = config.families[fam];
        for (std::size_t fi = 0; fi < nfield; ++fi) {
            for (std::size_t si = 0; si < nsch; ++si) {
                for (std::size_t pi = 0; pi < nprec; ++pi) {
                    for (std::size_t li = 0; li < nlev; ++li) {
                        const Cell& c = slot(fam * nlev + li, fi, si, pi);
                        StudyRow row;
                        row.family = gs0.family;
                        row.seed = gs0.family == GridFamily::Perturbed ? gs0.params.seed : std::nullopt;
                        row.level = config.levels[li];
                        GridFamilySpec gs = gs0;
                        gs.level = row.level;
                        row.h = c.h;
                        row.n_cells = c.n_cells;
                        row.gamma = gamma_ratio(gs);
                        row.field = std::string(to_string(config.fields[fi].kind));
                        row.scheme = scheme_name(config.schemes[si]);
                        row.precision = config.precisions[pi];
                        row.status = c.status;
                        const bool ok = c.status == "ok";
                        row.mean_err = ok ? c.norms.mean : kNaN;
                        row.max_err = ok ? c.norms.max : kNaN;
                        row.max_cond = ok ? c.max_cond : kNaN;
                        row.n_singular = ok ? c.norms.n_singular : 0;
                        row.order_mean = kNaN;
                        row.order_max = kNaN;
                        if (li > 0 && config.levels[li - 1] == row.level - 1) {
                            const StudyRow& prev = report.rows.back();
                            if (prev.mean_err > 0.0 && row.mean_err > 0.0) {
                                row.order_mean = observed_order(prev.mean_err, row.mean_err);
                            }
                            if (prev.max_err > 0.0 && row.max_err > 0.0) {
                                row.order_max = observed_order(prev.max_err, row.max_err);
                            }
                        }
                        report.rows.push_back(std::move(row));
                    }
                }
            }
        }
    }

    // Breakdown: binary64 order drops while the extended run keeps its order.
    const auto dbl = std::find(config.precisions.begin(), config.precisions.end(), PrecisionMode::Double);
    const auto ext = std::find(config.precisions.begin(), config.precisions.end(), PrecisionMode::Extended);
    if (dbl != config.precisions.end() && ext != config.precisions.end()) {
        const auto di = static_cast<std::size_t>(dbl - config.precisions.begin());
        const auto ei = static_cast<std::size_t>(ext - config.precisions.begin());
        // Rows of one (family, field, scheme) are laid out precision-major, level-minor.
        for (std::size_t base = 0; base < report.rows.size(); base += nprec * nlev) {
            for (std::size_t li = 0; li < nlev; ++li) {
                StudyRow& d = report.rows[base + di * nlev + li];
                const StudyRow& e = report.rows[base + ei * nlev + li];
                d.breakdown = d.order_mean < config.nominal_order - 0.7 && e.order_mean >= config.nominal_order - 0.3;
            }
        }
    }
    return report;
}

std::vector<std::string> preset_names() { return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig10", "fig11"}; }

StudyConfig preset(std::string_view name, std::optional<std::uint64_t> seed) {
    StudyConfig c;
    c.schemes = scheme_catalog();
    auto family = [](GridFamily f) {
        GridFamilySpec s;
        s.family = f;
        return s;
    };
    const std::vector<PrecisionMode> both{PrecisionMode::Double, PrecisionMode::Extended};
    if (name == "fig3" || name == "fig4" || name == "fig5") {
        const GridFamily f = name == "fig3"   ? GridFamily::SmoothMapped
                             : name == "fig4" ? GridFamily::LocallyRefined
                                              : GridFamily::Perturbed;
        GridFamilySpec s = family(f);
        if (f == GridFamily::Perturbed) {
            if (!seed) throw Error(ErrorCode::UsageError, "preset fig5 uses the perturbed family and needs --seed");
            s.params.seed = seed;
        }
        c.families = {s};
        c.fields = {tanh_product()};
        c.levels = level_range(0, 7);
        return c;
    }
    c.precisions = both;
    c.levels = level_range(0, 9);
    if (name == "fig6") {
        c.families = {family(GridFamily::HARC)};
        c.fields = {radial_tanh()};
    } else if (name == "fig7") {
        c.families = {family(GridFamily::HARC), family(GridFamily::HARCO)};
        c.fields = {radial_tanh()};
    } else if (name == "fig8") {
        c.families = {family(GridFamily::HARC)};
        c.fields = {circumferential_tanh()};
    } else if (name == "fig10") {
        c.families = {family(GridFamily::HARCO)};
        c.fields = {radial_tanh()};
    } else if (name == "fig11") {
        c.families = {family(GridFamily::HARCO)};
        c.fields = {circumferential_tanh()};
    } else {
        throw Error(ErrorCode::UsageError, "unknown preset '" + std::string(name) + "'");
    }
    return c;
}

void write_csv(std::ostream& os, const StudyReport& report) {
    os << "family,seed,level,h,n_cells,gamma,field,scheme,precision,mean_err,max_err,order_mean,order_max,max_cond,"
          "n_singular,breakdown,status\n";
    for (const auto& r : report.rows) {
        os << to_string(r.family) << ',' << (r.seed ? std::to_string(*r.seed) : "") << ',' << r.level << ','
           << fmt(r.h) << ',' << r.n_cells << ',' << fmt(r.gamma) << ',' << r.field << ',' << r.scheme << ','
           << to_string(r.precision) << ',' << fmt(r.mean_err) << ',' << fmt(r.max_err) << ',' << fmt(r.order_mean)
           << ',' << fmt(r.order_max) << ',' << fmt(r.max_cond) << ',' << r.n_singular << ','
           << (r.breakdown ? 1 : 0) << ',' << r.status << '\n';
    }
}

void write_gnuplot(std::ostream& os, const StudyReport& report) {
    std::size_t begin = 0;
    while (begin < report.rows.size()) {
        const StudyRow& first = report.rows[begin];
        std::size_t end = begin;
        while (end < report.rows.size() && report.rows[end].family == first.family &&
               report.rows[end].seed == first.seed && report.rows[end].field == first.field &&
               report.rows[end].scheme == first.scheme && report.rows[end].precision == first.precision) {
            ++end;
        }
        for (const char* normname : {"mean", "max"}) {
            os << "# family=" << to_string(first.family) << " field=" << first.field << " scheme=" << first.scheme
               << " precision=" << to_string(first.precision) << " norm=" << normname << '\n';
            for (std::size_t k = begin; k < end; ++k) {
                const StudyRow& r = report.rows[k];
                const double e = normname[1] == 'e' ? r.mean_err : r.max_err;
                if (std::isnan(e)) continue;
                os << r.level << ' ' << fmt(e) << '\n';
            }
            os << "\n\n";
        }
        begin = end;
    }
}

}  // namespace fvgrad
