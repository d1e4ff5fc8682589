#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "test_util.hpp"

using namespace fairrag::testutil;

namespace {

// The binary path is injected by the build; every invocation goes through a
// real subprocess so exit codes and stdout match what a user sees.
const std::string kCli = FAIRRAG_CLI_PATH;

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const TempDir& dir, const std::string& args) {
    const auto out_file = dir.path() / "cli_output.txt";
    const std::string command =
        kCli + " " + args + " > " + out_file.string() + " 2>&1";
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    result.output = buffer.str();
    return result;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string experiment_config(const std::filesystem::path& corpus_path,
                              const std::string& ranker) {
    return "corpus_path = " + corpus_path.string() + "\n" +
           "scorer = synthetic\n"
           "synthetic_seed = 21\n"
           "ranker = " + ranker + "\n" +
           "k = 5\n"
           "pool_size_n = 12\n"
           "trials_per_ranker = 80\n"
           "base_seed = 7\n"
           "sim_num_citations = 3\n";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("ingest reports corpus composition") {
    TempDir dir;
    const auto csv = dir.write_file("corpus.csv", balanced_corpus_csv());
    const auto result = run_cli(dir, "ingest --corpus " + csv.string() + " --out " +
                                         (dir.path() / "canonical.csv").string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("16 documents, 8 protected, 8 non-protected") !=
          std::string::npos);
    CHECK(result.output.find("2 topics") != std::string::npos);
    CHECK(std::filesystem::exists(dir.path() / "canonical.csv"));
}

TEST_CASE("ingest rejects a malformed corpus with a usage exit") {
    TempDir dir;
    const auto csv = dir.write_file("bad.csv",
                                    "category,category_number,doc_id,gender,entity_name,text\n"
                                    "t,1,D1,female,A\n");
    const auto result = run_cli(dir, "ingest --corpus " + csv.string() + " --out " +
                                         (dir.path() / "out.csv").string());
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("text") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir.path() / "out.csv"));
}

TEST_CASE("ingest applies the truncation flag") {
    std::string text;
    for (int i = 0; i < 30; ++i) {
        text += "word" + std::to_string(i) + " ";
    }
    TempDir dir;
    const auto csv = dir.write_file(
        "corpus.csv", "category,category_number,doc_id,gender,entity_name,text\nt,1,D1,female,A,\"" +
                          text + "\"\n");
    const auto out = dir.path() / "canonical.csv";
    const auto result =
        run_cli(dir, "ingest --corpus " + csv.string() + " --truncate 10 --out " + out.string());
    CHECK(result.exit_code == 0);
    const auto written = slurp(out);
    CHECK(written.find("word9") != std::string::npos);
    CHECK(written.find("word10") == std::string::npos);
}

TEST_CASE("run writes a reproducible run directory") {
    TempDir dir;
    const auto csv = dir.write_file("corpus.csv", balanced_corpus_csv());
    const auto config = dir.write_file("exp.conf", experiment_config(csv, "stochastic"));

    const auto run_a = dir.path() / "run_a";
    const auto run_b = dir.path() / "run_b";
    auto result =
        run_cli(dir, "run --config " + config.string() + " --out " + run_a.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("stochastic: n=80") != std::string::npos);
    REQUIRE(std::filesystem::exists(run_a / "trials.jsonl"));
    REQUIRE(std::filesystem::exists(run_a / "aggregate.csv"));

    result = run_cli(dir, "run --config " + config.string() + " --out " + run_b.string());
    CHECK(result.exit_code == 0);
    CHECK(slurp(run_a / "trials.jsonl") == slurp(run_b / "trials.jsonl"));
    CHECK(slurp(run_a / "aggregate.csv") == slurp(run_b / "aggregate.csv"));
}

TEST_CASE("run honors ranker and seed overrides") {
    TempDir dir;
    const auto csv = dir.write_file("corpus.csv", balanced_corpus_csv());
    const auto config = dir.write_file("exp.conf", experiment_config(csv, "stochastic"));

    const auto run_forced = dir.path() / "run_forced";
    auto result = run_cli(dir, "run --config " + config.string() +
                                   " --ranker forced --out " + run_forced.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("forced: n=80") != std::string::npos);

    const auto run_seeded = dir.path() / "run_seeded";
    result = run_cli(dir, "run --config " + config.string() + " --seed 999 --out " +
                              run_seeded.string());
    CHECK(result.exit_code == 0);
    CHECK(slurp(run_seeded / "trials.jsonl").find("\"seed\":999") != std::string::npos);
}

TEST_CASE("run rejects an invalid config with a usage exit") {
    TempDir dir;
    const auto csv = dir.write_file("corpus.csv", balanced_corpus_csv());
    auto config_text = experiment_config(csv, "standard");
    config_text += "pool_size_n = 3\n";  // now k > pool_size_n
    const auto config = dir.write_file("exp.conf", config_text);
    const auto result = run_cli(dir, "run --config " + config.string() + " --out " +
                                         (dir.path() / "run").string());
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("pool_size_n") != std::string::npos);
}

TEST_CASE("analyze compares runs and writes the t-test table") {
    TempDir dir;
    const auto csv = dir.write_file("corpus.csv", balanced_corpus_csv());
    const auto config = dir.write_file("exp.conf", experiment_config(csv, "standard"));

    const auto run_std = dir.path() / "run_std";
    const auto run_rep = dir.path() / "run_rep";
    REQUIRE(run_cli(dir, "run --config " + config.string() + " --out " + run_std.string())
                .exit_code == 0);
    REQUIRE(run_cli(dir, "run --config " + config.string() +
                             " --ranker representative --out " + run_rep.string())
                .exit_code == 0);

    const auto ttests = dir.path() / "ttests.csv";
    const auto result = run_cli(dir, "analyze --runs " + run_std.string() + " " +
                                         run_rep.string() +
                                         " --metric exposure_share --out " + ttests.string());
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("representative vs standard") != std::string::npos);
    CHECK(result.output.find("critical_t=2.6073") != std::string::npos);  // df=158, alpha=.01

    const auto table = slurp(ttests);
    CHECK(table.rfind("metric,ranker_a,ranker_b,t,df,critical_t,significant", 0) == 0);
    CHECK(table.find("exposure_share,representative,standard,") != std::string::npos);
    CHECK(table.find(",158,") != std::string::npos);
}

TEST_CASE("analyze needs at least two run directories") {
    TempDir dir;
    const auto result =
        run_cli(dir, "analyze --runs some_dir --metric utility --out t.csv");
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("at least 2") != std::string::npos);
}

TEST_CASE("analyze fails usefully when a run directory is empty") {
    TempDir dir;
    std::filesystem::create_directories(dir.path() / "empty_a");
    std::filesystem::create_directories(dir.path() / "empty_b");
    const auto result = run_cli(dir, "analyze --runs " + (dir.path() / "empty_a").string() +
                                         " " + (dir.path() / "empty_b").string() +
                                         " --metric utility --out t.csv");
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("trials.jsonl") != std::string::npos);
}

TEST_CASE("report renders SVG and CSV from run directories") {
    TempDir dir;
    const auto csv = dir.write_file("corpus.csv", balanced_corpus_csv());
    const auto config = dir.write_file("exp.conf", experiment_config(csv, "standard"));

    const auto run_std = dir.path() / "run_std";
    const auto run_forced = dir.path() / "run_forced";
    REQUIRE(run_cli(dir, "run --config " + config.string() + " --out " + run_std.string())
                .exit_code == 0);
    REQUIRE(run_cli(dir, "run --config " + config.string() + " --ranker forced --out " +
                             run_forced.string())
                .exit_code == 0);
    const std::string runs = run_std.string() + " " + run_forced.string();

    const auto svg_path = dir.path() / "report.svg";
    CHECK(run_cli(dir, "report --runs " + runs + " --out " + svg_path.string()).exit_code == 0);
    CHECK(slurp(svg_path).rfind("<svg", 0) == 0);

    const auto csv_path = dir.path() / "report.csv";
    CHECK(run_cli(dir, "report --runs " + runs + " --out " + csv_path.string()).exit_code == 0);
    const auto table = slurp(csv_path);
    CHECK(table.rfind("ranker,metric,mean", 0) == 0);
    int rows = -1;  // don't count the header
    for (std::size_t at = 0; at < table.size(); ++at) {
        rows += table[at] == '\n' ? 1 : 0;
    }
    CHECK(rows == 8);  // 2 rankers x 4 metrics

    const auto bad = run_cli(dir, "report --runs " + runs + " --out " +
                                      (dir.path() / "report.pdf").string());
    CHECK(bad.exit_code == 2);
}

TEST_CASE("usage errors exit with code 2") {
    TempDir dir;
    CHECK(run_cli(dir, "ingest --no-such-flag").exit_code == 2);
    CHECK(run_cli(dir, "frobnicate").exit_code == 2);
    CHECK(run_cli(dir, "run --out somewhere").exit_code == 2);  // missing --config
}

TEST_CASE("--version prints the tool version") {
    TempDir dir;
    const auto result = run_cli(dir, "--version");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("fairrag 0.1.0") != std::string::npos);
}

}  // TEST_SUITE
