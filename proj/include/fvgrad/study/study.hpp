#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fvgrad/fields/fields.hpp"
#include "fvgrad/gradients/gradients.hpp"
#include "fvgrad/meshgen/meshgen.hpp"

namespace fvgrad {

struct ErrorNorms {
    double mean = 0.0;
    double max = 0.0;
    Index n_singular = 0;
};

/// Euclidean error norms at the cell centroids of `geom`. Cells whose
/// status is not usable are skipped and counted in n_singular. The mean is
/// unweighted unless `area_weighted` is set.
template <class T>
ErrorNorms error_norms(const GradientResult<T>& result, const AnalyticField& field, const Mesh& mesh,
                       const Geometry<T>& geom, bool area_weighted = false);

/// p = log2(coarse / fine); throws NonPositiveError unless both are > 0.
double observed_order(double coarse_error, double fine_error);

/// Per-cell binary64 view of one scheme evaluation.
struct Evaluation {
    std::vector<Vec2<double>> centroid;
    std::vector<Vec2<double>> grad;
    std::vector<Vec2<double>> exact;
    std::vector<double> err;
    std::vector<double> cond;
    std::vector<CellStatus> flags;
    ErrorNorms norms;
    double max_cond = 0.0;
};

/// Samples `field`, runs `spec` in spec.precision and measures the errors.
Evaluation evaluate(const Mesh& mesh, const AnalyticField& field, const SchemeSpec& spec,
                    bool area_weighted = false);

struct StudyConfig {
    std::vector<GridFamilySpec> families;
    std::vector<int> levels;
    std::vector<SchemeSpec> schemes;
    std::vector<AnalyticField> fields;
    std::vector<PrecisionMode> precisions{PrecisionMode::Double};
    bool area_weighted = false;
    /// Expected order of the mean error, used by the breakdown flag.
    double nominal_order = 2.0;
    /// Worker threads; 0 reads FVGRAD_THREADS (0 or unset = hardware concurrency).
    int threads = 0;
};

struct StudyRow {
    GridFamily family = GridFamily::Cartesian;
    std::optional<std::uint64_t> seed;
    int level = 0;
    double h = 0.0;
    Index n_cells = 0;
    double gamma = 0.0;  ///< A d_theta / 2 on annuli, NaN otherwise
    std::string field;
    std::string scheme;
    PrecisionMode precision = PrecisionMode::Double;
    double mean_err = 0.0;
    double max_err = 0.0;
    double order_mean = 0.0;  ///< NaN unless the previous level is in the report
    double order_max = 0.0;
    double max_cond = 0.0;
    Index n_singular = 0;
    /// Double run lost accuracy while the extended run at this level did not.
    bool breakdown = false;
    /// "ok" or the module-prefixed error code of a failed combination.
    std::string status = "ok";
};

struct StudyReport {
    std::vector<StudyRow> rows;

    /// Row for the given key, or nullptr.
    const StudyRow* find(std::string_view scheme, int level, PrecisionMode precision = PrecisionMode::Double,
                         std::string_view field = {}, std::optional<GridFamily> family = std::nullopt,
                         std::optional<std::uint64_t> seed = std::nullopt) const;
};

/**
 * Runs every (family, level, field, scheme, precision) combination.
 * Meshes are generated once per (family, level) and the work is spread over
 * worker threads; rows come out ordered by family, field, scheme, precision
 * and level regardless of scheduling. Failures are recorded per row.
 */
StudyReport run_study(const StudyConfig& config);

/// Thread count from FVGRAD_THREADS (0 or unset = hardware concurrency).
int worker_threads_from_env();

/// Named presets: fig3, fig4, fig5, fig6, fig7, fig8, fig10, fig11.
StudyConfig preset(std::string_view name, std::optional<std::uint64_t> seed = std::nullopt);
std::vector<std::string> preset_names();

/// Long-form CSV with a header row; floats are written with 17 significant digits.
void write_csv(std::ostream& os, const StudyReport& report);

/// Gnuplot data: one indexed block (level, error) per curve and norm.
void write_gnuplot(std::ostream& os, const StudyReport& report);

}  // namespace fvgrad
