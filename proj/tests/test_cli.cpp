#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "helpers.hpp"

using testutil::TempDir;
using testutil::read_text;
using testutil::write_text;

namespace {

// QUENCHMAP_CLI_PATH is injected by the build: the full path of the binary.
int run_cli(const std::string& args, const std::string& capture_file) {
    const std::string cmd =
        std::string(QUENCHMAP_CLI_PATH) + " " + args + " > " + capture_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// 40-row CSV with a deterministic sign-of-x0 label and one correlated column.
void write_demo_csv(const std::string& path) {
    std::string csv = "label,x0,x1,x2\n";
    for (int i = 0; i < 40; ++i) {
        const double jitter = 0.01 * static_cast<double>(i % 7);
        const double x0 = (i % 2 == 0 ? 1.0 : -1.0) + jitter;
        const double x1 = 0.8 * x0 + 0.05 * static_cast<double>(i % 5);
        const double x2 = static_cast<double>((i * 13) % 11) / 11.0;
        csv += (i % 2 == 0 ? "b," : "a,") + std::to_string(x0) + "," + std::to_string(x1) + "," +
               std::to_string(x2) + "\n";
    }
    write_text(path, csv);
}

void write_demo_config(const std::string& path, const std::string& dataset) {
    write_text(path, "dataset = " + dataset +
                         "\n"
                         "tau_list = 0.3\n"
                         "dt_ns = 0.1\n"
                         "n_splits = 2\n"
                         "n_repeats = 1\n"
                         "models = svm\n"
                         "svm_c = 1\n"
                         "mi_threshold = 0\n"
                         "corr_threshold = 0.3\n");
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("bad invocations exit 1 with usage text") {
    TempDir tmp;
    CHECK(run_cli("", tmp.file("out.txt")) == 1);
    CHECK(read_text(tmp.file("out.txt")).find("Usage") != std::string::npos);
    CHECK(run_cli("frobnicate", tmp.file("out.txt")) == 1);
    CHECK(run_cli("oracle --n 99", tmp.file("out.txt")) == 1);
    CHECK(run_cli("map", tmp.file("out.txt")) == 1); // --config is required
}

TEST_CASE("help exits 0") {
    TempDir tmp;
    CHECK(run_cli("--help", tmp.file("out.txt")) == 0);
    const std::string text = read_text(tmp.file("out.txt"));
    CHECK(text.find("sweep") != std::string::npos);
    CHECK(text.find("oracle") != std::string::npos);
}

TEST_CASE("the oracle subcommand cross-checks and exits 0") {
    TempDir tmp;
    CHECK(run_cli("oracle --n 3 --seed 7", tmp.file("out.txt")) == 0);
    const std::string text = read_text(tmp.file("out.txt"));
    CHECK(text.find("[PASS]") != std::string::npos);
    CHECK(text.find("[FAIL]") == std::string::npos);
}

TEST_CASE("preprocess, encode and map write their artifacts") {
    TempDir tmp;
    write_demo_csv(tmp.file("demo.csv"));
    write_demo_config(tmp.file("demo.cfg"), tmp.file("demo.csv"));
    const std::string cfg = " --config " + tmp.file("demo.cfg");

    CHECK(run_cli("preprocess" + cfg + " --out " + tmp.file("pre"), tmp.file("out.txt")) == 0);
    CHECK(std::filesystem::exists(tmp.file("pre") + "/preprocessed.csv"));
    CHECK(std::filesystem::exists(tmp.file("pre") + "/preprocess_report.txt"));

    CHECK(run_cli("encode" + cfg + " --out " + tmp.file("enc"), tmp.file("out.txt")) == 0);
    CHECK(std::filesystem::exists(tmp.file("enc") + "/couplings.txt"));

    CHECK(run_cli("map" + cfg + " --tau-ns 2 --out " + tmp.file("map"), tmp.file("out.txt")) == 0);
    CHECK(std::filesystem::exists(tmp.file("map") + "/mapped.csv"));
    CHECK(std::filesystem::exists(tmp.file("map") + "/mapped.csv.provenance"));
}

TEST_CASE("sweep runs end to end and reproduces itself byte for byte") {
    TempDir tmp;
    write_demo_csv(tmp.file("demo.csv"));
    write_demo_config(tmp.file("demo.cfg"), tmp.file("demo.csv"));
    const std::string cfg = " --config " + tmp.file("demo.cfg");

    CHECK(run_cli("sweep" + cfg + " --out " + tmp.file("a"), tmp.file("out_a.txt")) == 0);
    CHECK(std::filesystem::exists(tmp.file("a") + "/folds.csv"));
    CHECK(std::filesystem::exists(tmp.file("a") + "/summary.csv"));
    CHECK(read_text(tmp.file("out_a.txt")).find("bal_acc") != std::string::npos);

    CHECK(run_cli("sweep" + cfg + " --out " + tmp.file("b"), tmp.file("out_b.txt")) == 0);
    CHECK(read_text(tmp.file("a") + "/folds.csv") == read_text(tmp.file("b") + "/folds.csv"));
    CHECK(read_text(tmp.file("a") + "/summary.csv") == read_text(tmp.file("b") + "/summary.csv"));
}

TEST_CASE("runtime failures exit 2, config mistakes exit 1") {
    TempDir tmp;
    write_demo_config(tmp.file("missing.cfg"), tmp.file("not_there.csv"));
    CHECK(run_cli("evaluate --config " + tmp.file("missing.cfg"), tmp.file("out.txt")) == 2);

    write_text(tmp.file("broken.cfg"), "dataset = x.csv\nunknown_knob = 3\n");
    CHECK(run_cli("evaluate --config " + tmp.file("broken.cfg"), tmp.file("out.txt")) == 1);

    write_demo_csv(tmp.file("demo.csv"));
    write_demo_config(tmp.file("demo.cfg"), tmp.file("demo.csv"));
    CHECK(run_cli("map --config " + tmp.file("demo.cfg") + " --tau-ns -4",
                  tmp.file("out.txt")) == 1);
}

} // TEST_SUITE
