#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liepnm/pipeline.hpp"

namespace liepnm::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kRuntime = 3 };

/// Solve settings plus output options, read from `key = value` lines.
struct RunConfig {
    pipeline::SolveConfig solve;
    std::string F_text;  // first-order only
    std::filesystem::path out_dir = ".";
    bool plot = false;
};

/// Throws ConfigError (with line numbers) or ParseError for F.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    /// Index of a named column, or -1.
    std::ptrdiff_t find(std::string_view name) const;
};

void write_csv(std::ostream& out, const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);
/// Throws ConfigError on ragged rows or unparsable numbers.
Table read_csv(std::istream& in);
Table read_csv(const std::filesystem::path& path);

struct Curve {
    std::vector<double> x;
    std::vector<double> y;
};

struct Plot {
    std::vector<Curve> samples;        // black
    std::vector<Curve> envelope;       // blue
    std::optional<Curve> reference;    // red
    std::string x_label = "x";
    std::string y_label = "y";
};

std::string render_svg(const Plot& plot, int width = 640, int height = 480);

int cmd_solve(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_verify_symmetry(std::string_view family, std::string_view F_text, std::ostream& out, std::ostream& err);

struct SampleTmgOptions {
    std::size_t dims = 1;
    std::filesystem::path constraints;
    std::size_t count = 1000;
    std::uint64_t seed = 0;
    std::size_t burn_in = 1000;
    double travel_time = 1.5707963267948966;
    std::filesystem::path output = "samples.csv";
};
/// Constraint file rows are `f_1,...,f_dims,g` meaning f.z + g >= 0.
int cmd_sample_tmg(const SampleTmgOptions& options, std::ostream& out, std::ostream& err);

int cmd_export_plot(const std::filesystem::path& ensemble_csv, const std::filesystem::path& svg_path,
                    const std::optional<std::filesystem::path>& config_path, std::ostream& out, std::ostream& err);

}  // namespace liepnm::cli
