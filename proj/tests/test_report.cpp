#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fairrag/report.hpp"
#include "test_util.hpp"

using namespace fairrag;
using namespace fairrag::testutil;

namespace {

Aggregates two_ranker_aggregates() {
    const auto row = [](double mean) {
        SummaryStats s;
        s.n = 80;
        s.mean = mean;
        s.std_dev = 0.05;
        return MetricSummary{s, 0};
    };
    Aggregates agg;
    agg["representative"]["exposure_disparity"] = row(0.0430);
    agg["representative"]["exposure_share"] = row(0.5229);
    agg["representative"]["generation_parity"] = row(0.6302);
    agg["representative"]["utility"] = row(0.6100);
    agg["standard"]["exposure_disparity"] = row(0.4188);
    agg["standard"]["exposure_share"] = row(0.1250);
    agg["standard"]["generation_parity"] = row(0.1344);
    agg["standard"]["utility"] = row(0.8650);
    return agg;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("rows come out ranker-major in the fixed metric order") {
    const auto rows = report_rows(two_ranker_aggregates());
    REQUIRE(rows.size() == 8);
    CHECK(rows[0].ranker == "representative");
    CHECK(rows[0].metric == "exposure_disparity");
    CHECK(rows[0].mean == doctest::Approx(0.0430));
    CHECK(rows[1].metric == "exposure_share");
    CHECK(rows[2].metric == "generation_parity");
    CHECK(rows[3].metric == "utility");
    CHECK(rows[4].ranker == "standard");
    CHECK(rows[7].mean == doctest::Approx(0.8650));

    CHECK_THROWS_AS(report_rows(Aggregates{}), ReportError);

    auto incomplete = two_ranker_aggregates();
    incomplete["standard"].erase("utility");
    CHECK_THROWS_AS(report_rows(incomplete), ReportError);
}

TEST_CASE("CSV rendering uses 4-decimal means") {
    const auto csv = render_report_csv(report_rows(two_ranker_aggregates()));
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "ranker,metric,mean");
    std::getline(in, line);
    CHECK(line == "representative,exposure_disparity,0.0430");
    int rows = 1;
    while (std::getline(in, line)) {
        ++rows;
    }
    CHECK(rows == 8);
}

TEST_CASE("SVG is self-contained with one labeled bar per row") {
    const auto svg = render_report_svg(report_rows(two_ranker_aggregates()));
    CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);  // no external assets

    std::size_t bars = 0;
    for (auto at = svg.find("<rect"); at != std::string::npos; at = svg.find("<rect", at + 1)) {
        ++bars;
    }
    CHECK(bars == 8 + 4);  // data bars plus legend swatches
    CHECK(svg.find("0.0430") != std::string::npos);
    CHECK(svg.find("0.8650") != std::string::npos);
    CHECK(svg.find(">representative<") != std::string::npos);
    CHECK(svg.find(">standard<") != std::string::npos);
    CHECK(svg.find(">utility<") != std::string::npos);
}

TEST_CASE("write_report dispatches on extension and writes atomically") {
    TempDir dir;
    const auto agg = two_ranker_aggregates();

    const auto svg_path = dir.path() / "report.svg";
    write_report(svg_path, agg);
    std::ifstream svg_in(svg_path);
    std::string first_line;
    std::getline(svg_in, first_line);
    CHECK(first_line.rfind("<svg", 0) == 0);
    CHECK_FALSE(std::filesystem::exists(svg_path.string() + ".tmp"));

    const auto csv_path = dir.path() / "report.csv";
    write_report(csv_path, agg);
    std::ifstream csv_in(csv_path);
    std::getline(csv_in, first_line);
    CHECK(first_line == "ranker,metric,mean");

    CHECK_THROWS_AS(write_report(dir.path() / "report.pdf", agg), ReportError);
    CHECK_FALSE(std::filesystem::exists(dir.path() / "report.pdf"));
}

}  // TEST_SUITE
