// qfa: build MOD_p quantum finite automata, sweep their theory curves,
// simulate the single-photon loop experiment, and run the analysis tools.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qfalab/automata.hpp"
#include "qfalab/calibration.hpp"
#include "qfalab/expsim.hpp"
#include "qfalab/expsim_io.hpp"
#include "qfalab/kset_search.hpp"
#include "qfalab/photonic.hpp"
#include "qfalab/qfa_io.hpp"
#include "qfalab/version.hpp"

#include "config.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace qfalab;
using qfatool::ConfigFile;
using qfatool::RunManifest;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

std::pair<double, double> parse_bs(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("beamsplitter must be given as R:T, e.g. 70:30");
    char* end = nullptr;
    const double r = std::strtod(text.c_str(), &end);
    const double t = std::strtod(text.c_str() + colon + 1, nullptr);
    if (!(r > 0.0) || !(t > 0.0)) throw ConfigError("beamsplitter parts must be positive");
    return {r / (r + t), t / (r + t)};
}

// ---------------------------------------------------------------- build ----

struct BuildArgs {
    int p = 0;
    std::vector<int> k;
    bool photonic = false;
    double phi_deg = -1.0;  // < 0: derive from the parity rule
    std::string bs = "50:50";
    double eta_loop = 1.0;
    double delta_t_ns = 2.262;
    std::string out;
};

void cmd_build(const BuildArgs& args, const std::string& digest) {
    Timer timer;
    QfaSpec spec;
    std::optional<PhotonicSection> photonic;
    if (args.photonic) {
        const double phi = args.phi_deg >= 0.0 ? args.phi_deg * kDeg : dove_angle_for_p(args.p, args.k);
        spec = photonic_qfa_build(PetalBasis{args.k}, phi);
        const auto [r, t] = parse_bs(args.bs);
        PhotonicSection section;
        section.ells = args.k;
        section.phi_rad = phi;
        section.reflectance = r;
        section.transmittance = t;
        section.eta_loop = args.eta_loop;
        section.delta_t_s = args.delta_t_ns * 1e-9;
        photonic = section;
    } else {
        spec = qfa2d_build(args.p, args.k);
    }
    save_qfa(args.out, spec, photonic);
    RunManifest m{"build", digest, 0, {args.out}, timer.ms()};
    m.write(args.out + ".manifest.json");
    std::cout << "wrote " << spec.dim << "-state spec to " << args.out << "\n";
}

// ---------------------------------------------------------------- sweep ----

struct SweepArgs {
    std::string spec_path;
    std::vector<int> ells;
    int p = 0;
    double phi_deg = -1.0;
    int n_max = 10;
    std::string out;
};

void cmd_sweep(const SweepArgs& args, const std::string& digest) {
    Timer timer;
    std::ofstream out(args.out);
    if (!out) throw IoError("cannot open for writing: " + args.out);
    out << "n,P_n\n";
    out.precision(17);

    if (!args.spec_path.empty()) {
        const nlohmann::json doc = load_json(args.spec_path);
        const QfaSpec spec = qfa_from_json(doc);
        const auto photonic = photonic_from_json(doc);
        for (int n = 0; n <= args.n_max; ++n) {
            const double p = photonic
                                 ? accept_prob_closed_form(photonic->ells, photonic->phi_rad, std::uint64_t(n))
                                 : qfa_run(spec, std::uint64_t(n)).accept_prob;
            out << n << ',' << p << '\n';
        }
    } else {
        if (args.ells.empty()) throw ConfigError("sweep needs --spec or --l");
        double phi;
        if (args.phi_deg >= 0.0)
            phi = args.phi_deg * kDeg;
        else if (args.p >= 2)
            phi = dove_angle_for_p(args.p, args.ells);
        else
            throw ConfigError("sweep needs --phi-deg or --p to fix the Dove angle");
        for (int n = 0; n <= args.n_max; ++n)
            out << n << ',' << accept_prob_closed_form(args.ells, phi, std::uint64_t(n)) << '\n';
    }
    RunManifest m{"sweep", digest, 0, {args.out}, timer.ms()};
    m.write(args.out + ".manifest.json");
}

// ------------------------------------------------------------- simulate ----

ExperimentConfig config_from_ini(ConfigFile& ini) {
    ExperimentConfig cfg;
    cfg.mode.gaussian_reference = false;
    cfg.mode.ells = ini.get_int_list("qfa.ells", {});
    if (cfg.mode.ells.empty()) throw ConfigError("config needs qfa.ells");
    if (ini.has("qfa.phi_deg"))
        cfg.mode.phi = ini.require_double("qfa.phi_deg") * kDeg;
    else if (ini.has("qfa.phi_rad"))
        cfg.mode.phi = ini.require_double("qfa.phi_rad");
    else if (ini.has("qfa.p"))
        cfg.mode.phi = dove_angle_for_p(int(ini.get_int("qfa.p", 0)), cfg.mode.ells);
    else
        throw ConfigError("config needs qfa.phi_deg, qfa.phi_rad, or qfa.p");

    const auto [r, t] = parse_bs(ini.get_string("loop.bs", "50:50"));
    cfg.loop.reflectance = r;
    cfg.loop.transmittance = t;
    cfg.loop.eta_loop = ini.get_double("loop.eta_loop", 1.0);
    cfg.loop.delta_t_s = ini.get_double("loop.delta_t_ns", 2.262) * 1e-9;
    cfg.loop.dove.phi = cfg.mode.phi;

    cfg.n_max = int(ini.get_int("run.n_max", 10));
    cfg.budget = std::uint64_t(ini.get_int("run.budget", 1'000'000));
    cfg.seed = std::uint64_t(ini.get_int("run.seed", 0));
    cfg.r1_hz = ini.get_double("run.r1_hz", 1e6);
    cfg.r2_hz = ini.get_double("run.r2_hz", 0.0);
    cfg.encoding_efficiency = ini.get_double("run.encoding_efficiency", 1.0);
    cfg.depolarization = ini.get_double("run.depolarization", 0.0);

    cfg.bin_width_s = ini.get_double("histogram.bin_width_ps", 13.0) * 1e-12;
    cfg.window_bins = int(ini.get_int("histogram.window_bins", 77));
    cfg.peak_spacing_bins = int(ini.get_int("histogram.peak_spacing_bins", 174));
    cfg.pre_record_s = ini.get_double("histogram.pre_record_ns", 10.0) * 1e-9;
    cfg.accidental_avg_s = ini.get_double("histogram.accidental_avg_ns", 4.0) * 1e-9;
    cfg.jitter_sigma_bins = ini.get_double("histogram.jitter_sigma_bins", 5.0);
    return cfg;
}

struct SimulateArgs {
    std::string config_path;
    std::string out_dir;
    long long seed_override = -1;
    long long repeats_override = -1;
    long long budget_override = -1;
    long long n_max_override = -1;
};

void cmd_simulate(const SimulateArgs& args) {
    Timer timer;
    ConfigFile ini = ConfigFile::parse_file(args.config_path);
    ExperimentConfig qfa_cfg = config_from_ini(ini);
    const int repeats = int(args.repeats_override >= 1 ? args.repeats_override : ini.get_int("run.repeats", 1));
    ini.reject_unknown();
    if (args.seed_override >= 0) qfa_cfg.seed = std::uint64_t(args.seed_override);
    if (args.budget_override >= 0) qfa_cfg.budget = std::uint64_t(args.budget_override);
    if (args.n_max_override >= 1) qfa_cfg.n_max = int(args.n_max_override);

    ExperimentConfig gauss_cfg = qfa_cfg;
    gauss_cfg.mode.gaussian_reference = true;
    gauss_cfg.seed = qfa_cfg.seed + 0x9e3779b97f4a7c15ull;

    fs::create_directories(args.out_dir);
    RunManifest manifest{"simulate", qfatool::config_digest(ini.text()), qfa_cfg.seed, {}, 0.0};

    for (const ExperimentConfig& cfg : {qfa_cfg, gauss_cfg}) {
        const auto hists = simulate_repeats(cfg, repeats);
        for (int i = 0; i < repeats; ++i) {
            char stem[64];
            std::snprintf(stem, sizeof stem, "%s_rep%03d", cfg.mode.label().c_str(), i);
            const std::string csv = (fs::path(args.out_dir) / (std::string(stem) + ".csv")).string();
            const std::string sidecar = (fs::path(args.out_dir) / (std::string(stem) + ".json")).string();
            save_histogram_csv(hists[std::size_t(i)], csv, sidecar);
            manifest.outputs.push_back(csv);
        }
    }
    manifest.wall_ms = timer.ms();
    manifest.write((fs::path(args.out_dir) / "manifest.json").string());
    std::cout << "simulated " << repeats << " repeats per mode into " << args.out_dir << "\n";
}

// -------------------------------------------------------------- analyze ----

struct AnalyzeArgs {
    std::string dir;
    int n_max = -1;
    std::string out;
};

std::vector<TimeHistogram> load_mode_histograms(const std::string& dir, const std::string& label) {
    std::vector<fs::path> csvs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind(label + "_rep", 0) == 0 && entry.path().extension() == ".csv")
            csvs.push_back(entry.path());
    }
    std::sort(csvs.begin(), csvs.end());
    if (csvs.empty()) throw IoError("no " + label + "_rep*.csv histograms in " + dir);
    std::vector<TimeHistogram> hists;
    for (const fs::path& csv : csvs) {
        fs::path sidecar = csv;
        sidecar.replace_extension(".json");
        hists.push_back(load_histogram_csv(csv.string(), sidecar.string()));
    }
    return hists;
}

void cmd_analyze(const AnalyzeArgs& args, const std::string& digest) {
    Timer timer;
    const auto qfa_hists = load_mode_histograms(args.dir, "qfa");
    const auto gauss_hists = load_mode_histograms(args.dir, "gauss");
    const int n_max = args.n_max >= 1 ? args.n_max : qfa_hists.front().cfg.n_max;
    const LoopProbabilities probs = accept_probabilities(qfa_hists, gauss_hists, n_max);
    save_results_csv(probs, args.out);
    RunManifest m{"analyze", digest, qfa_hists.front().cfg.seed, {args.out}, timer.ms()};
    m.write(args.out + ".manifest.json");
    for (const LoopPoint& pt : probs.points)
        std::cout << "n=" << pt.n << "  P=" << pt.p << "  sigma=" << pt.sigma << "\n";
}

// ----------------------------------------------------- tomography ----------

void cmd_tomography(const std::string& input, const std::string& out, const std::string& digest) {
    Timer timer;
    const auto records = tomography_records_from_json(load_json(input));
    nlohmann::json report = tomography_report_json(records);
    // overlap with the accepting petal state p+ (the +x pole)
    for (auto& state : report.at("states")) {
        const BlochVector r{state.at("bloch").at(0).get<double>(), state.at("bloch").at(1).get<double>(),
                            state.at("bloch").at(2).get<double>()};
        state["accept_prob_x"] = accept_prob_from_bloch(r, BlochVector{1.0, 0.0, 0.0});
    }
    std::ofstream o(out);
    if (!o) throw IoError("cannot open for writing: " + out);
    o << report.dump(2) << '\n';
    RunManifest m{"tomography", digest, 0, {out}, timer.ms()};
    m.write(out + ".manifest.json");
}

// ------------------------------------------------------ calibrate ----------

void cmd_calibrate(const std::string& input, int ell, const std::string& out, const std::string& digest) {
    Timer timer;
    std::ifstream in(input);
    if (!in) throw IoError("cannot open: " + input);
    std::vector<CalibrationSample> samples;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        char* end = nullptr;
        const double angle = std::strtod(line.c_str(), &end);
        if (end == line.c_str()) {
            if (line_no == 1) continue;  // header row
            throw ConfigError(input + ":" + std::to_string(line_no) + ": bad sample row");
        }
        if (*end != ',') throw ConfigError(input + ":" + std::to_string(line_no) + ": expected angle,power");
        const double power = std::strtod(end + 1, nullptr);
        samples.push_back({angle, power});
    }
    const CalibrationFit fit = calibration_fit(samples, ell);
    nlohmann::json j{{"offset_deg", fit.offset_deg}, {"amplitude", fit.amplitude}, {"baseline", fit.baseline}};
    std::ofstream o(out);
    if (!o) throw IoError("cannot open for writing: " + out);
    o << j.dump(2) << '\n';
    RunManifest m{"calibrate", digest, 0, {out}, timer.ms()};
    m.write(out + ".manifest.json");
    std::cout << "offset " << fit.offset_deg << " deg\n";
}

// --------------------------------------------------------- search ----------

struct SearchArgs {
    int p = 0;
    int d = 1;
    double epsilon = -1.0;
    long long trials = -1;
    std::uint64_t seed = 1;
    bool no_dedup = false;
    std::string out;
};

nlohmann::json kset_to_json(const KSetResult& r) {
    nlohmann::json j{{"p", r.p}, {"d", r.d()}, {"K", r.K}, {"worst_n", r.worst_n}, {"worst_prob", r.worst_prob}};
    if (r.epsilon_target) j["epsilon_target"] = *r.epsilon_target;
    return j;
}

void cmd_search(const SearchArgs& args, const std::string& digest) {
    Timer timer;
    std::vector<KSetResult> records;
    if (args.epsilon > 0.0) {
        const LogBoundResult bound = verify_log_bound(args.p, args.epsilon);
        if (!bound.success)
            throw NormalizationError("no K within the log-bound budget reached epsilon; implementation suspect");
        for (int d = 1; d <= bound.d_used; ++d) {
            KSetResult r = exhaustive_best_kset(args.p, d, !args.no_dedup);
            r.epsilon_target = args.epsilon;
            records.push_back(std::move(r));
        }
        std::cout << "epsilon " << args.epsilon << " reached with d=" << bound.d_used
                  << " (bound " << bound.d_bound << ")\n";
    } else {
        if (args.trials < 1)
            for (int d = 1; d <= args.d; ++d)
                if (!exhaustive_within_budget(args.p, d, !args.no_dedup))
                    throw BudgetExceededError("d=" + std::to_string(d) +
                                              " exceeds the exhaustive budget; use --trials");
        for (int d = 1; d <= args.d; ++d) {
            records.push_back(args.trials >= 1
                                  ? randomized_best_kset(args.p, d, std::uint64_t(args.trials), args.seed)
                                  : exhaustive_best_kset(args.p, d, !args.no_dedup));
        }
    }

    nlohmann::json arr = nlohmann::json::array();
    for (const KSetResult& r : records) arr.push_back(kset_to_json(r));
    std::ofstream o(args.out);
    if (!o) throw IoError("cannot open for writing: " + args.out);
    o << arr.dump(2) << '\n';

    fs::path csv_path(args.out);
    csv_path.replace_extension(".csv");
    std::ofstream csv(csv_path);
    csv << "p,d,K,worst_n,worst_prob\n";
    csv.precision(17);
    for (const KSetResult& r : records) {
        csv << r.p << ',' << r.d() << ",\"";
        for (std::size_t i = 0; i < r.K.size(); ++i) csv << (i ? " " : "") << r.K[i];
        csv << "\"," << r.worst_n << ',' << r.worst_prob << '\n';
    }

    RunManifest m{"search", digest, args.seed, {args.out, csv_path.string()}, timer.ms()};
    m.write(args.out + ".manifest.json");
    for (const KSetResult& r : records)
        std::cout << "d=" << r.d() << "  worst_n=" << r.worst_n << "  worst_prob=" << r.worst_prob << "\n";
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const NormalizationError*>(&e) || dynamic_cast<const InversionError*>(&e) ||
        dynamic_cast<const FitError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const RangeError*>(&e) || dynamic_cast<const BudgetExceededError*>(&e) ||
        dynamic_cast<const ResolutionError*>(&e) || dynamic_cast<const AmplitudeExceedsInputError*>(&e))
        return 3;
    if (dynamic_cast<const Error*>(&e)) return 2;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MOD_p quantum finite automata: construction, search, and loop-experiment simulation"};
    app.set_version_flag("--version", qfalab::kVersion);
    app.require_subcommand(1);
    const std::string digest = qfatool::config_digest(join_args(argc, argv));

    BuildArgs build;
    CLI::App* build_cmd = app.add_subcommand("build", "write a QFA spec file");
    build_cmd->add_option("--p", build.p, "prime modulus")->required();
    build_cmd->add_option("--k", build.k, "rotation multipliers / OAM values")->required()->delimiter(',');
    build_cmd->add_flag("--photonic", build.photonic, "petal-basis realization with a photonic section");
    build_cmd->add_option("--phi-deg", build.phi_deg, "Dove angle in degrees (default: parity rule)");
    build_cmd->add_option("--bs", build.bs, "beamsplitter ratio R:T");
    build_cmd->add_option("--eta-loop", build.eta_loop, "per-round-trip transmission");
    build_cmd->add_option("--delta-t-ns", build.delta_t_ns, "loop delay in ns");
    build_cmd->add_option("--out", build.out, "output spec path")->required();

    SweepArgs sweep;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "theory curve P_n as CSV");
    sweep_cmd->add_option("--spec", sweep.spec_path, "spec JSON file");
    sweep_cmd->add_option("--l", sweep.ells, "OAM values")->delimiter(',');
    sweep_cmd->add_option("--p", sweep.p, "prime (fixes the angle by the parity rule)");
    sweep_cmd->add_option("--phi-deg", sweep.phi_deg, "Dove angle in degrees");
    sweep_cmd->add_option("--n-max", sweep.n_max, "last loop");
    sweep_cmd->add_option("--out", sweep.out, "output CSV path")->required();

    SimulateArgs sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo loop experiment");
    sim_cmd->add_option("--config", sim.config_path, "experiment config file")->required();
    sim_cmd->add_option("--seed", sim.seed_override, "override run.seed");
    sim_cmd->add_option("--repeats", sim.repeats_override, "override run.repeats");
    sim_cmd->add_option("--budget", sim.budget_override, "override run.budget");
    sim_cmd->add_option("--n-max", sim.n_max_override, "override run.n_max");
    sim_cmd->add_option("--out", sim.out_dir, "output directory")->required();

    AnalyzeArgs analyze;
    CLI::App* analyze_cmd = app.add_subcommand("analyze", "histograms -> (n, P_n, sigma) CSV");
    analyze_cmd->add_option("--dir", analyze.dir, "directory written by simulate")->required();
    analyze_cmd->add_option("--n-max", analyze.n_max, "last loop to report");
    analyze_cmd->add_option("--out", analyze.out, "output CSV path")->required();

    std::string tomo_in, tomo_out;
    CLI::App* tomo_cmd = app.add_subcommand("tomography", "six-projection counts -> Bloch vectors");
    tomo_cmd->add_option("--input", tomo_in, "JSON of projection counts")->required();
    tomo_cmd->add_option("--out", tomo_out, "output JSON path")->required();

    std::string cal_in, cal_out;
    int cal_ell = 0;
    CLI::App* cal_cmd = app.add_subcommand("calibrate", "fit the Dove angle offset");
    cal_cmd->add_option("--input", cal_in, "CSV of angle_deg,power samples")->required();
    cal_cmd->add_option("--l", cal_ell, "petal OAM value")->required();
    cal_cmd->add_option("--out", cal_out, "output JSON path")->required();

    SearchArgs search;
    CLI::App* search_cmd = app.add_subcommand("search", "optimize the rotation set K");
    search_cmd->add_option("--p", search.p, "prime modulus")->required();
    search_cmd->add_option("--d", search.d, "largest set size to report");
    search_cmd->add_option("--epsilon", search.epsilon, "verify the log-size bound at this error");
    search_cmd->add_option("--trials", search.trials, "randomized search instead of exhaustive");
    search_cmd->add_option("--seed", search.seed, "randomized search seed");
    search_cmd->add_flag("--no-dedup", search.no_dedup, "keep both k and p-k candidates");
    search_cmd->add_option("--out", search.out, "output JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (build_cmd->parsed()) cmd_build(build, digest);
        if (sweep_cmd->parsed()) cmd_sweep(sweep, digest);
        if (sim_cmd->parsed()) cmd_simulate(sim);
        if (analyze_cmd->parsed()) cmd_analyze(analyze, digest);
        if (tomo_cmd->parsed()) cmd_tomography(tomo_in, tomo_out, digest);
        if (cal_cmd->parsed()) cmd_calibrate(cal_in, cal_ell, cal_out, digest);
        if (search_cmd->parsed()) cmd_search(search, digest);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
