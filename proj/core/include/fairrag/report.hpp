#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fairrag/experiment.hpp"

namespace fairrag {

struct ReportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ReportRow {
    std::string ranker;
    std::string metric;
    double mean = 0.0;
};

/// One row per (ranker, metric) with the aggregate mean, rankers in
/// lexicographic order, metrics in the fixed order disparity, share, parity,
/// utility.
std::vector<ReportRow> report_rows(const Aggregates& aggregates);

/// Grouped-bar chart (one group per ranker, one bar per metric); values are
/// annotated to 4 decimals. Self-contained SVG, no external assets.
std::string render_report_svg(const std::vector<ReportRow>& rows);

std::string render_report_csv(const std::vector<ReportRow>& rows);

/// Dispatches on the output extension: .svg or .csv; anything else throws
/// ReportError. Written atomically.
void write_report(const std::filesystem::path& out_path, const Aggregates& aggregates);

}  // namespace fairrag
