#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fvgrad/study/study.hpp"

namespace fvgrad::cli {

enum class Subcommand { Mesh, Grad, Study, Help };

struct RunConfig {
    Subcommand subcommand = Subcommand::Help;
    /// Filled for Subcommand::Help.
    std::string help_text;

    // mesh
    GridFamilySpec grid;
    bool metrics = false;

    // grad
    std::string mesh_path;
    AnalyticField field;
    SchemeSpec scheme;
    /// Circumferential theta extents follow the mesh unless given explicitly.
    bool bind_theta = true;

    // study
    StudyConfig study;
    std::string preset;
    std::string gnuplot_path;

    /// Output path; "-" is standard output.
    std::string out = "-";
};

/// Validated configuration. Throws Error with UsageError for unknown flags or
/// values and ConfigConflict for contradictory settings.
RunConfig parse_args(int argc, const char* const* argv);
RunConfig parse_args(const std::vector<std::string>& args);

/// Executes a parsed configuration; returns the process exit status.
int run(const RunConfig& config, std::ostream& out);

/// parse_args + run with errors reported as one line on `err`:
///   error: <module>.<Code>: <message>
/// Usage errors and conflicts exit with 2, other failures with 1.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes `content` to `path` through a temporary file and a rename, so a
/// failed write leaves no partial output. "-" writes to `out`.
void write_output(const std::string& path, const std::string& content, std::ostream& out);

}  // namespace fvgrad::cli
