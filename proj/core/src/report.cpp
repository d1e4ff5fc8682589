#include "fairrag/report.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fairrag {
namespace {

constexpr std::array<const char*, 4> kMetricOrder = {"exposure_disparity", "exposure_share",
                                                     "generation_parity", "utility"};
constexpr std::array<const char*, 4> kBarColors = {"#c0504d", "#4f81bd", "#9bbb59", "#8064a2"};

std::string fmt4(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << v;
    return out.str();
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ReportError("cannot write: " + path.string());
        }
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

std::vector<ReportRow> report_rows(const Aggregates& aggregates) {
    if (aggregates.empty()) {
        throw ReportError("no aggregates to report");
    }
    std::vector<ReportRow> rows;
    for (const auto& [ranker, metrics] : aggregates) {
        for (const char* metric : kMetricOrder) {
            const auto it = metrics.find(metric);
            if (it == metrics.end()) {
                throw ReportError("ranker \"" + ranker + "\" lacks metric \"" + metric + "\"");
            }
            rows.push_back({ranker, metric, it->second.stats.mean});
        }
    }
    return rows;
}

std::string render_report_csv(const std::vector<ReportRow>& rows) {
    std::string out = "ranker,metric,mean\n";
    for (const auto& row : rows) {
        out += row.ranker + "," + row.metric + "," + fmt4(row.mean) + "\n";
    }
    return out;
}

std::string render_report_svg(const std::vector<ReportRow>& rows) {
    const std::size_t groups = rows.size() / kMetricOrder.size();
    const int bar_w = 34;
    const int bar_gap = 6;
    const int group_gap = 40;
    const int group_w =
        static_cast<int>(kMetricOrder.size()) * (bar_w + bar_gap) + group_gap;
    const int margin_left = 60;
    const int margin_top = 40;
    const int plot_h = 320;
    const int width = margin_left + static_cast<int>(groups) * group_w + 40;
    const int height = margin_top + plot_h + 140;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<text x=\"" << margin_left << "\" y=\"20\" font-size=\"15\">Mean retrieval and "
           "generation metrics by ranker</text>\n";

    // y axis with gridlines at 0, 0.25, 0.5, 0.75, 1
    for (int i = 0; i <= 4; ++i) {
        const double v = i * 0.25;
        const int y = margin_top + plot_h - static_cast<int>(v * plot_h);
        svg << "<line x1=\"" << margin_left << "\" y1=\"" << y << "\" x2=\"" << width - 20
            << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n"
            << "<text x=\"" << margin_left - 35 << "\" y=\"" << y + 4 << "\">" << std::fixed
            << std::setprecision(2) << v << "</text>\n";
    }

    for (std::size_t g = 0; g < groups; ++g) {
        const int group_x = margin_left + static_cast<int>(g) * group_w;
        const auto& ranker = rows[g * kMetricOrder.size()].ranker;
        for (std::size_t m = 0; m < kMetricOrder.size(); ++m) {
            const auto& row = rows[g * kMetricOrder.size() + m];
            const double clamped = std::min(std::max(row.mean, 0.0), 1.0);
            const int h = static_cast<int>(clamped * plot_h);
            const int x = group_x + static_cast<int>(m) * (bar_w + bar_gap);
            const int y = margin_top + plot_h - h;
            svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w
                << "\" height=\"" << h << "\" fill=\"" << kBarColors[m] << "\">"
                << "<title>" << row.ranker << " " << row.metric << " = " << fmt4(row.mean)
                << "</title></rect>\n"
                << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << y - 4
                << "\" text-anchor=\"middle\" font-size=\"9\">" << fmt4(row.mean)
                << "</text>\n";
        }
        svg << "<text x=\"" << group_x + group_w / 2 - group_gap / 2 << "\" y=\""
            << margin_top + plot_h + 20 << "\" text-anchor=\"middle\">" << ranker
            << "</text>\n";
    }

    // legend
    const int legend_y = margin_top + plot_h + 50;
    for (std::size_t m = 0; m < kMetricOrder.size(); ++m) {
        const int y = legend_y + static_cast<int>(m) * 18;
        svg << "<rect x=\"" << margin_left << "\" y=\"" << y
            << "\" width=\"12\" height=\"12\" fill=\"" << kBarColors[m] << "\"/>\n"
            << "<text x=\"" << margin_left + 18 << "\" y=\"" << y + 10 << "\">"
            << kMetricOrder[m] << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_report(const std::filesystem::path& out_path, const Aggregates& aggregates) {
    const auto rows = report_rows(aggregates);
    const auto ext = out_path.extension().string();
    if (ext == ".svg") {
        atomic_write(out_path, render_report_svg(rows));
    } else if (ext == ".csv") {
        atomic_write(out_path, render_report_csv(rows));
    } else {
        throw ReportError("unsupported report extension \"" + ext + "\" (use .svg or .csv)");
    }
}

}  // namespace fairrag
