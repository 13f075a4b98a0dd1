#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qfalab/calibration.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kTool = QFA_CLI_PATH;
const fs::path kScratch = "cli_scratch";

int run(const std::string& args) {
    const int rc = std::system((kTool + " " + args).c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct ScratchDir {
    ScratchDir() {
        fs::remove_all(kScratch);
        fs::create_directories(kScratch);
    }
};

}  // namespace

TEST_CASE("build writes spec files and rejects bad parameters") {
    ScratchDir scratch;
    REQUIRE(run("build --p 5 --k 1,3 --out cli_scratch/spec4.json") == 0);
    const auto spec = nlohmann::json::parse(slurp(kScratch / "spec4.json"));
    REQUIRE(spec.at("dim").get<int>() == 4);
    REQUIRE(fs::exists(kScratch / "spec4.json.manifest.json"));

    REQUIRE(run("build --p 11 --k 1,2,3,4 --photonic --bs 70:30 --out cli_scratch/spec8.json") == 0);
    const auto spec8 = nlohmann::json::parse(slurp(kScratch / "spec8.json"));
    REQUIRE(spec8.at("dim").get<int>() == 8);
    REQUIRE(spec8.at("photonic").at("R").get<double>() == Catch::Approx(0.7));

    REQUIRE(run("build --p 4 --k 1 --out cli_scratch/bad.json 2>/dev/null") == 2);
    REQUIRE(run("build --p 5 --out cli_scratch/bad.json 2>/dev/null") == 2);  // missing --k
}

TEST_CASE("sweep emits the theory curve") {
    ScratchDir scratch;
    REQUIRE(run("sweep --l 1 --phi-deg 18 --n-max 5 --out cli_scratch/sweep.csv") == 0);
    std::ifstream in(kScratch / "sweep.csv");
    std::string line, last;
    std::getline(in, line);
    REQUIRE(line == "n,P_n");
    int rows = 0;
    while (std::getline(in, line)) {
        last = line;
        ++rows;
    }
    REQUIRE(rows == 6);
    REQUIRE(std::stod(last.substr(last.find(',') + 1)) == Catch::Approx(1.0).margin(1e-12));

    // n_max 0: the single row P = 1
    REQUIRE(run("sweep --l 1,3,5 --phi-deg 18 --n-max 0 --out cli_scratch/sweep0.csv") == 0);
    std::ifstream in0(kScratch / "sweep0.csv");
    std::getline(in0, line);
    std::getline(in0, line);
    REQUIRE(std::stod(line.substr(line.find(',') + 1)) == Catch::Approx(1.0).margin(1e-12));

    // a spec file with a photonic section also drives the sweep
    REQUIRE(run("build --p 5 --k 1,3 --photonic --out cli_scratch/ph.json") == 0);
    REQUIRE(run("sweep --spec cli_scratch/ph.json --n-max 5 --out cli_scratch/sweep_spec.csv") == 0);
    std::ifstream ins(kScratch / "sweep_spec.csv");
    std::getline(ins, line);
    std::getline(ins, line);  // n = 0
    REQUIRE(std::stod(line.substr(line.find(',') + 1)) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("simulate then analyze reproduces the plateau-and-peak shape") {
    ScratchDir scratch;
    std::ofstream cfg(kScratch / "run.cfg");
    cfg << "[qfa]\nells = 1,3\nphi_deg = 18\n\n"
        << "[loop]\nbs = 70:30\n\n"
        << "[run]\nn_max = 5\nbudget = 50000\nrepeats = 4\nseed = 11\nr2_hz = 1e4\n";
    cfg.close();

    REQUIRE(run("simulate --config cli_scratch/run.cfg --out cli_scratch/run > /dev/null") == 0);
    REQUIRE(fs::exists(kScratch / "run" / "qfa_rep003.csv"));
    REQUIRE(fs::exists(kScratch / "run" / "gauss_rep000.json"));
    REQUIRE(fs::exists(kScratch / "run" / "manifest.json"));

    REQUIRE(run("analyze --dir cli_scratch/run --out cli_scratch/results.csv > /dev/null") == 0);
    std::ifstream in(kScratch / "results.csv");
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "n,P_n,sigma_n");
    double p5 = -1.0;
    while (std::getline(in, line)) {
        if (line.rfind("5,", 0) == 0) {
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            p5 = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        }
    }
    REQUIRE(std::abs(p5 - 1.0) < 0.25);  // crude: the peak is there

    // idempotent: identical seed gives identical histogram bytes
    REQUIRE(run("simulate --config cli_scratch/run.cfg --out cli_scratch/run2 > /dev/null") == 0);
    REQUIRE(slurp(kScratch / "run" / "qfa_rep000.csv") == slurp(kScratch / "run2" / "qfa_rep000.csv"));
}

TEST_CASE("simulate rejects malformed configs with line context") {
    ScratchDir scratch;
    std::ofstream cfg(kScratch / "bad.cfg");
    cfg << "[qfa]\nells = 1,3\nphi_deg = 18\nwat = 1\n";
    cfg.close();
    REQUIRE(run("simulate --config cli_scratch/bad.cfg --out cli_scratch/bad 2>/dev/null") == 2);

    // analysis on empty histograms is a numerical failure, not a usage error
    std::ofstream cfg2(kScratch / "empty.cfg");
    cfg2 << "[qfa]\nells = 1\nphi_deg = 18\n[run]\nbudget = 0\nn_max = 2\n";
    cfg2.close();
    REQUIRE(run("simulate --config cli_scratch/empty.cfg --out cli_scratch/empty > /dev/null") == 0);
    REQUIRE(run("analyze --dir cli_scratch/empty --out cli_scratch/empty.csv 2>/dev/null") == 3);
}

TEST_CASE("tomography command inverts Table-style counts") {
    ScratchDir scratch;
    std::ofstream in(kScratch / "tableI.json");
    in << R"({"states":[{"label":"p+_l1","counts":)"
       << R"({"z+":2.00,"z-":2.28,"x+":2.15,"x-":0.09,"y+":1.39,"y-":0.87}}]})";
    in.close();
    REQUIRE(run("tomography --input cli_scratch/tableI.json --out cli_scratch/bloch.json") == 0);
    const auto report = nlohmann::json::parse(slurp(kScratch / "bloch.json"));
    REQUIRE(report.at("states").at(0).at("bloch").at(0).get<double>() ==
            Catch::Approx(0.9196428571).margin(1e-6));
    REQUIRE(run("tomography --input cli_scratch/missing.json --out cli_scratch/x.json 2>/dev/null") == 2);
}

TEST_CASE("calibrate command recovers an injected offset") {
    ScratchDir scratch;
    std::ofstream csv(kScratch / "scan.csv");
    csv << "angle_deg,power\n";
    for (int i = 0; i <= 340; ++i) {
        const double angle = 0.1 * i;
        csv << angle << ',' << qfalab::calibration_model(angle, 10, 0.25, 2.0, 0.3) << '\n';
    }
    csv.close();
    REQUIRE(run("calibrate --input cli_scratch/scan.csv --l 10 --out cli_scratch/fit.json > /dev/null") == 0);
    const auto fit = nlohmann::json::parse(slurp(kScratch / "fit.json"));
    REQUIRE(fit.at("offset_deg").get<double>() == Catch::Approx(0.25).margin(0.02));
}

TEST_CASE("search command emits JSON records plus a CSV summary") {
    ScratchDir scratch;
    REQUIRE(run("search --p 11 --d 4 --no-dedup --out cli_scratch/ksets.json > /dev/null") == 0);
    const auto records = nlohmann::json::parse(slurp(kScratch / "ksets.json"));
    REQUIRE(records.is_array());
    REQUIRE(records.size() == 4);
    REQUIRE(records.at(3).at("worst_prob").get<double>() < 1.0 / 3.0);
    REQUIRE(fs::exists(kScratch / "ksets.csv"));
    const std::string csv = slurp(kScratch / "ksets.csv");
    REQUIRE(csv.rfind("p,d,K,worst_n,worst_prob", 0) == 0);

    REQUIRE(run("search --p 9 --d 2 --out cli_scratch/x.json 2>/dev/null") == 2);
    REQUIRE(run("search --p 1009 --d 4 --out cli_scratch/y.json 2>/dev/null") == 3);
}
