#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fcikit/citest.hpp"
#include "fcikit/fci.hpp"
#include "fcikit/graph.hpp"
#include "fcikit/pipeline.hpp"
#include "fcikit/sem.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

CmdResult run_cli(const fs::path& dir, const std::string& args) {
    const fs::path errfile = dir / "stderr.txt";
    const std::string cmd =
        std::string(FCIKIT_BIN) + " " + args + " 2>" + errfile.string();
    const int rc = std::system(cmd.c_str());
    CmdResult res;
    res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.err = slurp(errfile);
    return res;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("fcikit_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// 12-respondent survey spanning all eight groups; one row (Q17 = 6) drops
void write_survey(const fs::path& path) {
    const auto rules = fcikit::default_encoding_rules();
    const auto& literacy = rules.variables.back().questions;
    std::ostringstream out;
    out << "Q42,Q39,Q40,Q43,Q44,Q51,Q52,Q1_10,Q1_3,Q17,Q34_1,Q34_2,Q34_3,Q7_1,Q8_1,Q9_1,Q10_1";
    for (const auto& q : literacy) out << "," << q;
    out << "\n";
    const char* incomes[] = {"Less than 2.5 million yen",
                             "At least 2.5 million but less than 5 million yen",
                             "At least 5 million but less than 7.5 million yen",
                             "At least 15 million yen"};
    const char* assets[] = {"Don't have any financial assets",
                            "At least 2.5 million but less than 5 million yen",
                            "At least 20 million yen"};
    int combo = 0;
    for (int i = 0; i < 12; ++i) {
        const int male = (combo >> 2) & 1, fe = (combo >> 1) & 1, feh = combo & 1;
        combo = (combo + 1) % 8;
        const int q17 = (i == 5) ? 6 : 1 + (i % 5);  // row 5 gets the missing sentinel
        out << male << "," << fe << "," << feh << "," << 1 + (i % 13) << ","
            << (i % 2 ? "University" : "High school") << "," << incomes[i % 4] << ","
            << assets[i % 3] << "," << 1 + (i % 5) << "," << 1 + ((i + 2) % 5)
            << "," << q17 << "," << (i % 2) << "," << ((i >> 1) % 2) << "," << 0 << ","
            << (i % 2) << "," << (i < 6 ? 1 : 0) << "," << ((i + 1) % 2) << ","
            << (i % 4 == 0 ? 1 : 0);
        for (std::size_t q = 0; q < literacy.size(); ++q)
            out << "," << ((i + static_cast<int>(q)) % 3 == 0 ? "1" : "2");
        out << "\n";
    }
    std::ofstream file(path, std::ios::binary);
    file << out.str();
}

void write_key(const fs::path& path) {
    const auto rules = fcikit::default_encoding_rules();
    json j = json::object();
    for (const auto& q : rules.variables.back().questions) j[q] = "1";
    std::ofstream file(path, std::ios::binary);
    file << j.dump(2) << "\n";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("encode partitions the fixture into group files that sum to kept rows") {
    const fs::path dir = fresh_dir("encode");
    write_survey(dir / "survey.csv");
    write_key(dir / "key.json");
    const auto res = run_cli(dir, "encode --input " + (dir / "survey.csv").string() +
                                      " --key " + (dir / "key.json").string() +
                                      " --output " + (dir / "out").string());
    CHECK(res.exit_code == 0);

    const json report = json::parse(slurp(dir / "out" / "encode_report.json"));
    CHECK(report.at("total_rows") == 12);
    CHECK(report.at("rows_dropped") == 1);
    const int kept = report.at("rows_kept");
    int total = 0;
    for (int g = 1; g <= 8; ++g) {
        const int size = report.at("group_sizes").at(std::to_string(g));
        total += size;
        if (size > 0) {
            const auto data = fcikit::Dataset::from_csv_file(
                (dir / "out" / ("group" + std::to_string(g) + ".csv")).string());
            CHECK(data.rows() == size);
            CHECK(data.index_of("Male") == -1);  // dummies dropped inside groups
        }
    }
    CHECK(total == kept);

    // rows with the (1,1,1) dummy combination land in the group-1 file
    const auto raw = fcikit::RawTable::from_csv_file((dir / "survey.csv").string());
    int expect_g1 = 0;
    for (const auto& row : raw.rows)
        if (row[0] == "1" && row[1] == "1" && row[2] == "1" && row[9] != "6") ++expect_g1;
    CHECK(report.at("group_sizes").at("1") == expect_g1);
}

TEST_CASE("encode rejects an undecodable answer code and names the question") {
    const fs::path dir = fresh_dir("encode_bad");
    write_key(dir / "key.json");
    // one-row survey whose Q43 carries an unmapped age code
    const auto rules = fcikit::default_encoding_rules();
    std::ostringstream out;
    out << "Q42,Q39,Q40,Q43,Q44,Q51,Q52,Q1_10,Q1_3,Q17,Q34_1,Q34_2,Q34_3,Q7_1,Q8_1,Q9_1,Q10_1";
    for (const auto& q : rules.variables.back().questions) out << "," << q;
    out << "\n1,1,1,99,University,At least 15 million yen,Less than 2.5 million yen,1,1,1,1,0,0,1,1,1,1";
    for (std::size_t q = 0; q < rules.variables.back().questions.size(); ++q) out << ",1";
    out << "\n";
    {
        std::ofstream file(dir / "bad.csv", std::ios::binary);
        file << out.str();
    }
    const auto res = run_cli(dir, "encode --input " + (dir / "bad.csv").string() +
                                      " --key " + (dir / "key.json").string() +
                                      " --output " + (dir / "out").string());
    CHECK(res.exit_code != 0);
    CHECK(res.err.find("Q43") != std::string::npos);
    CHECK(res.err.find("99") != std::string::npos);
}

TEST_CASE("oracle discover equals the library-level run") {
    const fs::path dir = fresh_dir("oracle");
    const auto model = fcikit::random_sem(5, 1, 2.0, 31);
    {
        std::ofstream file(dir / "model.json", std::ios::binary);
        file << fcikit::sem_to_json(model);
    }
    const auto res =
        run_cli(dir, "discover --input " + (dir / "model.json").string() +
                         " --oracle --format json --output " + (dir / "pag.json").string());
    REQUIRE(res.exit_code == 0);

    fcikit::OracleTester oracle(model.dag);
    const auto run = fcikit::fci(oracle, model.observed_names(), {}, {});
    CHECK(fcikit::pag_from_json(slurp(dir / "pag.json")) == run.pag);
}

TEST_CASE("an empty model yields a zero-edge dot file and alpha is echoed") {
    const fs::path dir = fresh_dir("nullmodel");
    const auto model = fcikit::random_sem(4, 0, 0.0, 9);
    {
        std::ofstream file(dir / "model.json", std::ios::binary);
        file << fcikit::sem_to_json(model);
    }
    auto res = run_cli(dir, "simulate --nodes 4 --latent 0 --degree 0 --samples 10000 "
                            "--seed 9 --output " + (dir / "sim").string());
    REQUIRE(res.exit_code == 0);
    res = run_cli(dir, "discover --input " + (dir / "sim.data.csv").string() +
                           " --output " + (dir / "pag.dot").string());
    REQUIRE(res.exit_code == 0);
    const std::string dot = slurp(dir / "pag.dot");
    CHECK(dot.find("->") == std::string::npos);

    const json report = json::parse(slurp(dir / "pag.dot.report.json"));
    CHECK(report.at("options").at("alpha") == 0.05);  // default echoed
}

TEST_CASE("bootstrap defaults to 100 replicates and writes deterministic output") {
    const fs::path dir = fresh_dir("boot");
    auto res = run_cli(dir, "simulate --nodes 3 --latent 0 --degree 1.5 --samples 150 "
                            "--seed 4 --output " + (dir / "sim").string());
    REQUIRE(res.exit_code == 0);
    res = run_cli(dir, "bootstrap --input " + (dir / "sim.data.csv").string() +
                           " --seed 2 --output " + (dir / "edges.csv").string());
    REQUIRE(res.exit_code == 0);
    const json report = json::parse(slurp(dir / "edges.csv.report.json"));
    CHECK(report.at("replicates") == 100);
    CHECK(report.at("min_prob") == 0.2);
    const std::string first = slurp(dir / "edges.csv");

    res = run_cli(dir, "bootstrap --input " + (dir / "sim.data.csv").string() +
                           " --seed 2 --output " + (dir / "edges2.csv").string());
    REQUIRE(res.exit_code == 0);
    CHECK(slurp(dir / "edges2.csv") == first);  // byte-identical rerun
}

TEST_CASE("config file fills unset flags and explicit flags win") {
    const fs::path dir = fresh_dir("config");
    auto res = run_cli(dir, "simulate --nodes 3 --latent 0 --degree 1.5 --samples 200 "
                            "--seed 6 --output " + (dir / "sim").string());
    REQUIRE(res.exit_code == 0);
    {
        std::ofstream cfg(dir / "cfg.json", std::ios::binary);
        cfg << R"({"bootstrap": 7, "alpha": 0.01})" << "\n";
    }
    res = run_cli(dir, "bootstrap --input " + (dir / "sim.data.csv").string() +
                           " --config " + (dir / "cfg.json").string() +
                           " --bootstrap 5 --output " + (dir / "edges.csv").string());
    REQUIRE(res.exit_code == 0);
    const json report = json::parse(slurp(dir / "edges.csv.report.json"));
    CHECK(report.at("replicates") == 5);   // flag overrides config
    CHECK(report.at("alpha") == 0.01);     // config overrides default
}

TEST_CASE("thread-count env var leaves bootstrap output byte-identical") {
    const fs::path dir = fresh_dir("threads");
    auto res = run_cli(dir, "simulate --nodes 3 --latent 0 --degree 1.5 --samples 150 "
                            "--seed 8 --output " + (dir / "sim").string());
    REQUIRE(res.exit_code == 0);
    std::string outputs[2];
    int slot = 0;
    for (const char* threads : {"1", "4"}) {
        const fs::path out = dir / (std::string("edges_t") + threads + ".csv");
        const std::string cmd = std::string("FCIKIT_THREADS=") + threads + " " +
                                FCIKIT_BIN + " bootstrap --input " +
                                (dir / "sim.data.csv").string() + " --bootstrap 30 --seed 3 " +
                                "--output " + out.string() + " 2>/dev/null";
        REQUIRE(std::system(cmd.c_str()) == 0);
        outputs[slot++] = slurp(out);
    }
    CHECK(outputs[0] == outputs[1]);
}

TEST_CASE("standardize modes: none preserves raw values, per-group centers groups") {
    const fs::path dir = fresh_dir("stdmodes");
    write_survey(dir / "survey.csv");
    write_key(dir / "key.json");
    auto res = run_cli(dir, "encode --input " + (dir / "survey.csv").string() +
                                " --key " + (dir / "key.json").string() +
                                " --standardize none --output " + (dir / "raw").string());
    REQUIRE(res.exit_code == 0);
    const auto raw = fcikit::Dataset::from_csv_file((dir / "raw" / "encoded.csv").string());
    bool saw_age_like = false;
    const int age = raw.index_of("Age");
    for (int r = 0; r < raw.rows(); ++r)
        if (raw.at(r, age) >= 18.0) saw_age_like = true;
    CHECK(saw_age_like);  // untransformed bracket representatives survive

    // per-group mode needs groups large enough to standardize; use the shipped demo
    const std::string demo = std::string(FCIKIT_DATA_DIR) + "/example_survey.csv";
    const std::string demo_key = std::string(FCIKIT_DATA_DIR) + "/example_answer_key.json";
    res = run_cli(dir, "encode --input " + demo + " --key " + demo_key +
                           " --standardize per-group --output " + (dir / "pg").string());
    REQUIRE(res.exit_code == 0);
    const auto g1 =
        fcikit::Dataset::from_csv_file((dir / "pg" / "group1.csv").string());
    const int g1_age = g1.index_of("Age");
    double mean = 0.0;
    for (int r = 0; r < g1.rows(); ++r) mean += g1.at(r, g1_age);
    mean /= g1.rows();
    CHECK(std::abs(mean) < 1e-9);  // centered within the group
}

TEST_CASE("simulate is deterministic and rejects zero samples") {
    const fs::path dir = fresh_dir("sim");
    auto res = run_cli(dir, "simulate --nodes 4 --latent 1 --samples 500 --seed 7 "
                            "--output " + (dir / "a").string());
    REQUIRE(res.exit_code == 0);
    res = run_cli(dir, "simulate --nodes 4 --latent 1 --samples 500 --seed 7 "
                       "--output " + (dir / "b").string());
    REQUIRE(res.exit_code == 0);
    CHECK(slurp(dir / "a.model.json") == slurp(dir / "b.model.json"));
    CHECK(slurp(dir / "a.data.csv") == slurp(dir / "b.data.csv"));

    res = run_cli(dir, "simulate --nodes 4 --samples 0 --output " + (dir / "z").string());
    CHECK(res.exit_code != 0);
    CHECK(res.err.find("samples") != std::string::npos);
}

TEST_CASE("simulated data flows through discover end to end") {
    const fs::path dir = fresh_dir("flow");
    auto res = run_cli(dir, "simulate --nodes 4 --latent 1 --degree 2 --samples 2000 "
                            "--seed 13 --output " + (dir / "sim").string());
    REQUIRE(res.exit_code == 0);
    res = run_cli(dir, "discover --input " + (dir / "sim.data.csv").string() +
                           " --alpha 0.01 --output " + (dir / "pag.dot").string());
    REQUIRE(res.exit_code == 0);
    CHECK(slurp(dir / "pag.dot").find("digraph") != std::string::npos);
}

TEST_CASE("summary emits one row per populated group") {
    const fs::path dir = fresh_dir("summary");
    write_survey(dir / "survey.csv");
    write_key(dir / "key.json");
    auto res = run_cli(dir, "encode --input " + (dir / "survey.csv").string() +
                                " --key " + (dir / "key.json").string() +
                                " --output " + (dir / "out").string());
    REQUIRE(res.exit_code == 0);
    res = run_cli(dir, "summary --input " + (dir / "out" / "encoded.csv").string() +
                           " --output " + (dir / "summary.csv").string());
    REQUIRE(res.exit_code == 0);
    const std::string table = slurp(dir / "summary.csv");
    CHECK(table.find("group,male,fin_edu,fin_edu_home,column,n,") == 0);
    CHECK(table.find("Fin_Literacy") != std::string::npos);
}

}  // TEST_SUITE
