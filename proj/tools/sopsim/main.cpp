// Command-line front end: spectrum generation and validation, spectral
// scans, schedule-driven simulation with an optional brute-force
// cross-check, and the packaged scenario runs with scaling sweeps.
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sopsim/dynamics.hpp"
#include "sopsim/effective.hpp"
#include "sopsim/errors.hpp"
#include "sopsim/io.hpp"
#include "sopsim/scenarios.hpp"
#include "sopsim/schedule.hpp"
#include "sopsim/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

int exit_code_for(sopsim::errc c) {
    switch (c) {
        case sopsim::errc::empty_spectrum:
        case sopsim::errc::non_monotone_values:
        case sopsim::errc::multiplicity_sum_mismatch:
        case sopsim::errc::marked_count_out_of_range:
        case sopsim::errc::dimension_too_large:
        case sopsim::errc::non_positive_gap:
        case sopsim::errc::bad_argument:
            return 2;
        case sopsim::errc::promise_violation:
            return 3;
        default:
            return 1;
    }
}

// Values shared by every subcommand. Defaults may come from the
// environment, then a JSON config file, then explicit flags, in that order.
struct run_params {
    std::uint64_t seed = 0;
    std::string out = ".";
    double tol = 1e-10;
    int fixed_steps = 0;
    int sample_count = 257;
    double epsilon = 1.0;
    int grid = 512;
};

void apply_config_file(run_params& rp, const std::string& path) {
    ordered_json j;
    try {
        j = ordered_json::parse(sopsim::read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        sopsim::fail(sopsim::errc::bad_argument,
                     std::string("config file is not valid JSON: ") + e.what());
    }
    try {
        if (j.contains("seed")) rp.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) rp.out = j["out"].get<std::string>();
        if (j.contains("tol")) rp.tol = j["tol"].get<double>();
        if (j.contains("fixed_steps")) rp.fixed_steps = j["fixed_steps"].get<int>();
        if (j.contains("sample_count")) rp.sample_count = j["sample_count"].get<int>();
        if (j.contains("epsilon")) rp.epsilon = j["epsilon"].get<double>();
        if (j.contains("grid")) rp.grid = j["grid"].get<int>();
    } catch (const nlohmann::json::exception& e) {
        sopsim::fail(sopsim::errc::bad_argument,
                     std::string("config file field has the wrong type: ") + e.what());
    }
}

sopsim::integrator_options integrator_from(const run_params& rp) {
    sopsim::integrator_options opt;
    if (!(rp.tol > 0.0) || rp.tol > 0.1)
        sopsim::fail(sopsim::errc::bad_argument, "tolerance must lie in (0, 0.1]");
    opt.rel_tol = rp.tol;
    opt.abs_tol = rp.tol * 1e-2;
    opt.fixed_steps = rp.fixed_steps;
    opt.sample_count = rp.sample_count;
    return opt;
}

// Spectrum selection shared by scan and simulate: either a named family or
// a JSON file.
struct spectrum_source {
    std::string family = "dj";
    int n = 4;
    std::string kind = "balanced";
    std::uint64_t marked = 1;
    double offset = 0.0;
    std::string file;
};

void add_spectrum_options(CLI::App* cmd, spectrum_source& src) {
    cmd->add_option("--family", src.family, "spectrum family: dj, rem, or grover")
        ->check(CLI::IsMember({"dj", "rem", "grover"}));
    cmd->add_option("--n", src.n, "number of bits");
    cmd->add_option("--kind", src.kind, "dj table kind: balanced, constant0, constant1")
        ->check(CLI::IsMember({"balanced", "constant0", "constant1"}));
    cmd->add_option("--marked", src.marked, "marked-class size for grover");
    cmd->add_option("--offset", src.offset, "constant shift added to every diagonal entry");
    cmd->add_option("--file", src.file, "load the spectrum from a JSON file instead");
}

sopsim::dj_kind dj_kind_from(const std::string& kind) {
    if (kind == "constant0") return sopsim::dj_kind::constant0;
    if (kind == "constant1") return sopsim::dj_kind::constant1;
    return sopsim::dj_kind::balanced;
}

sopsim::spectrum_spec resolve_spectrum(const spectrum_source& src) {
    sopsim::spectrum_spec spec;
    if (!src.file.empty()) {
        spec = sopsim::spectrum_from_json(sopsim::read_text_file(src.file));
    } else if (src.family == "dj") {
        spec = sopsim::dj_spectrum(src.n, dj_kind_from(src.kind));
    } else if (src.family == "rem") {
        spec = sopsim::rem_spectrum(src.n);
    } else {
        spec = sopsim::grover_spectrum(src.n, src.marked);
    }
    if (src.offset != 0.0) spec.offset = src.offset;
    return spec;
}

ordered_json spectrum_config_echo(const spectrum_source& src) {
    ordered_json j;
    if (!src.file.empty()) {
        j["file"] = src.file;
    } else {
        j["family"] = src.family;
        j["n"] = src.n;
        if (src.family == "dj") j["kind"] = src.kind;
        if (src.family == "grover") j["marked"] = src.marked;
    }
    if (src.offset != 0.0) j["offset"] = src.offset;
    return j;
}

fs::path ensure_out_dir(const run_params& rp) {
    fs::path dir(rp.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        sopsim::fail(sopsim::errc::io_failure,
                     "cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

ordered_json base_config_echo(const std::string& command, const run_params& rp) {
    ordered_json j;
    j["command"] = command;
    j["seed"] = rp.seed;
    j["tol"] = rp.tol;
    j["fixed_steps"] = rp.fixed_steps;
    j["sample_count"] = rp.sample_count;
    return j;
}

void finish_run(const fs::path& dir, const ordered_json& config,
                const std::vector<fs::path>& files) {
    sopsim::write_manifest(dir, config.dump(), files);
}

double json_number(double v) {
    // NaN is not representable in JSON; the reports carry null instead.
    return v;
}

void put_number(ordered_json& j, const char* key, double v) {
    if (std::isnan(v))
        j[key] = nullptr;
    else
        j[key] = json_number(v);
}

// Secular-route gap and coupling evaluators for schedule synthesis.
sopsim::schedule tracking_schedule(const sopsim::validated_spectrum& vs, double epsilon,
                                   int grid) {
    auto clamp_s = [](double s) { return std::clamp(s, 1e-9, 1.0 - 1e-9); };
    auto gap_fn = [&vs, clamp_s](double s) {
        const auto lo = sopsim::secular_lowest(vs, clamp_s(s), 2);
        return lo[1] - lo[0];
    };
    auto v01_fn = [&vs, clamp_s](double s) {
        const double sc = clamp_s(s);
        const auto lo = sopsim::secular_lowest(vs, sc, 2);
        const auto u = sopsim::secular_vector(vs, sc, lo[0]);
        const auto w = sopsim::secular_vector(vs, sc, lo[1]);
        return sopsim::matrix_element(vs, u, w);
    };
    return sopsim::local_adiabatic(gap_fn, v01_fn, epsilon, grid);
}

// ---------------------------------------------------------------------------
// spectrum subcommands
// ---------------------------------------------------------------------------

int cmd_spectrum_validate(const std::string& file) {
    const auto spec = sopsim::spectrum_from_json(sopsim::read_text_file(file));
    const auto vs = sopsim::validate_spectrum(spec);
    double eta_sum = 0.0;
    for (double e : vs.eta()) eta_sum += e;
    std::cout << "valid spectrum: n=" << vs.n() << " classes=" << vs.size()
              << " driver_scale=" << vs.driver_scale() << " offset=" << vs.offset()
              << " eta_sum=" << sopsim::format_double(eta_sum) << "\n";
    return 0;
}

int cmd_spectrum_generate(const run_params& rp, const spectrum_source& src) {
    const auto spec = resolve_spectrum(src);
    sopsim::validate_spectrum(spec);
    const fs::path dir = ensure_out_dir(rp);
    const fs::path file = dir / "spectrum.json";
    sopsim::write_text_file(file, sopsim::spectrum_to_json(spec));
    ordered_json config = base_config_echo("spectrum generate", rp);
    config["spectrum"] = spectrum_config_echo(src);
    finish_run(dir, config, {file});
    std::cout << "wrote " << file.string() << " (" << spec.values.size() << " classes)\n";
    return 0;
}

int cmd_spectrum_scramble(const run_params& rp, const spectrum_source& src) {
    const auto vs = sopsim::validate_spectrum(resolve_spectrum(src));
    const auto diag = sopsim::scramble(vs, rp.seed);
    const fs::path dir = ensure_out_dir(rp);
    const fs::path file = dir / "diagonal.csv";
    std::string text = "index,class,entry\n";
    for (std::size_t i = 0; i < diag.entries.size(); ++i) {
        text += std::to_string(i);
        text += ',';
        text += std::to_string(diag.class_of[i]);
        text += ',';
        text += sopsim::format_double(diag.entries[i]);
        text += '\n';
    }
    sopsim::write_text_file(file, text);
    ordered_json config = base_config_echo("spectrum scramble", rp);
    config["spectrum"] = spectrum_config_echo(src);
    finish_run(dir, config, {file});
    std::cout << "wrote " << file.string() << " (" << diag.entries.size() << " entries)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

int cmd_scan(const run_params& rp, const spectrum_source& src, int grid, double s_lo,
             double s_hi) {
    if (grid < 2) sopsim::fail(sopsim::errc::bad_argument, "scan grid must be at least 2");
    if (!(s_lo >= 0.0 && s_hi <= 1.0 && s_lo < s_hi))
        sopsim::fail(sopsim::errc::bad_argument, "scan range must satisfy 0 <= lo < hi <= 1");
    const auto vs = sopsim::validate_spectrum(resolve_spectrum(src));
    if (vs.size() < 2)
        sopsim::fail(sopsim::errc::bad_argument,
                     "gap undefined for a single-class spectrum");
    std::vector<sopsim::spectral_data> rows;
    rows.reserve(grid + 1);
    double min_gap = std::numeric_limits<double>::infinity();
    double at_s = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double s = s_lo + (s_hi - s_lo) * i / grid;
        rows.push_back(sopsim::spectral_at(vs, s));
        if (rows.back().gap < min_gap) {
            min_gap = rows.back().gap;
            at_s = s;
        }
    }
    const fs::path dir = ensure_out_dir(rp);
    const fs::path file = dir / "scan.csv";
    sopsim::write_spectral_scan_csv(file, rows);
    ordered_json config = base_config_echo("scan", rp);
    config["spectrum"] = spectrum_config_echo(src);
    config["grid"] = grid;
    config["s_lo"] = s_lo;
    config["s_hi"] = s_hi;
    finish_run(dir, config, {file});
    std::cout << "wrote " << file.string() << "; smallest sampled gap "
              << sopsim::format_double(min_gap) << " at s=" << sopsim::format_double(at_s)
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct schedule_request {
    std::string kind = "profile_driven";
    double total_time = 0.0;
    double s_fixed = 0.5;
    std::string schedule_file;
};

sopsim::schedule resolve_schedule(const sopsim::validated_spectrum& vs,
                                  const schedule_request& req, const run_params& rp) {
    if (req.kind == "constant_rate") {
        if (!(req.total_time > 0.0))
            sopsim::fail(sopsim::errc::bad_argument, "constant_rate needs --T > 0");
        return sopsim::constant_rate(req.total_time);
    }
    if (req.kind == "constant_s") {
        if (!(req.total_time > 0.0))
            sopsim::fail(sopsim::errc::bad_argument, "constant_s needs --T > 0");
        if (!(req.s_fixed >= 0.0 && req.s_fixed <= 1.0))
            sopsim::fail(sopsim::errc::bad_argument, "--s must lie in [0, 1]");
        return sopsim::constant_s(req.s_fixed, req.total_time);
    }
    if (req.kind == "local_adiabatic") {
        if (!(rp.epsilon > 0.0))
            sopsim::fail(sopsim::errc::bad_argument, "local_adiabatic needs --epsilon > 0");
        return tracking_schedule(vs, rp.epsilon, rp.grid);
    }
    if (req.kind == "profile_driven") return sopsim::path_from_profile(sopsim::dj_reference_profile()).path;
    if (req.kind == "custom") {
        if (req.schedule_file.empty())
            sopsim::fail(sopsim::errc::bad_argument, "custom schedule needs --schedule-file");
        return sopsim::schedule_from_csv(req.schedule_file);
    }
    sopsim::fail(sopsim::errc::bad_argument, "unknown schedule kind " + req.kind);
}

int cmd_simulate(const run_params& rp, const spectrum_source& src,
                 const schedule_request& req, bool cross_check) {
    const auto vs = sopsim::validate_spectrum(resolve_spectrum(src));
    const auto sched = resolve_schedule(vs, req, rp);
    const auto opt = integrator_from(rp);
    const auto traj = sopsim::integrate_reduced(vs, sched, opt);

    const fs::path dir = ensure_out_dir(rp);
    const fs::path traj_file = dir / "trajectory.csv";
    const fs::path sched_file = dir / "schedule.csv";
    sopsim::write_trajectory_csv(traj_file, traj);
    sopsim::write_schedule_csv(sched_file, sched);

    ordered_json config = base_config_echo("simulate", rp);
    config["spectrum"] = spectrum_config_echo(src);
    config["schedule"] = req.kind;
    if (req.kind == "constant_rate" || req.kind == "constant_s")
        config["T"] = req.total_time;
    if (req.kind == "constant_s") config["s"] = req.s_fixed;
    if (req.kind == "local_adiabatic") {
        config["epsilon"] = rp.epsilon;
        config["grid"] = rp.grid;
    }
    if (req.kind == "custom") config["schedule_file"] = req.schedule_file;
    config["cross_check"] = cross_check;
    finish_run(dir, config, {traj_file, sched_file});

    const double p_final = sopsim::ground_probability(traj);
    std::cout << "T=" << sopsim::format_double(sched.total_time())
              << " final_p0=" << sopsim::format_double(p_final)
              << " norm_drift=" << sopsim::format_double(traj.max_norm_drift) << "\n";

    if (cross_check) {
        const auto diag = sopsim::scramble(vs, rp.seed);
        const auto full = sopsim::integrate_full(diag, vs.driver_scale(), sched, opt);
        const auto agg = sopsim::aggregate_full_to_reduced(full, diag);
        const auto& last = traj.samples.back();
        double max_dev = 0.0;
        for (std::size_t j = 0; j < vs.size(); ++j)
            max_dev = std::max(max_dev, std::abs(std::abs(agg.state.amplitudes[j]) -
                                                 std::abs(last.amplitudes[j])));
        std::cout << "cross_check max_modulus_dev=" << sopsim::format_double(max_dev)
                  << " class_spread=" << sopsim::format_double(agg.max_spread)
                  << " full_norm_drift=" << sopsim::format_double(full.max_norm_drift)
                  << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// scenario
// ---------------------------------------------------------------------------

std::vector<double> dj_table(int n, const std::string& kind, std::uint64_t seed) {
    if (n < 1 || n > 24)
        sopsim::fail(sopsim::errc::bad_argument, "table size needs 1 <= n <= 24");
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> table(dim, 0.0);
    if (kind == "constant0") return table;
    if (kind == "constant1") {
        std::fill(table.begin(), table.end(), 1.0);
        return table;
    }
    std::mt19937_64 gen(seed);
    std::string choice = kind;
    if (kind == "random") {
        const auto pick = gen() % 4;
        choice = pick == 0 ? "constant0" : pick == 1 ? "constant1" : "balanced";
        if (choice != "balanced") return dj_table(n, choice, seed + 1);
    }
    // balanced: half ones, placement shuffled by the seed
    std::fill(table.begin(), table.begin() + dim / 2, 1.0);
    std::shuffle(table.begin(), table.end(), gen);
    return table;
}

std::vector<double> table_from_file(const std::string& path) {
    const std::string text = sopsim::read_text_file(path);
    std::vector<double> table;
    std::string tok;
    for (char c : text + "\n") {
        if (c == '\n' || c == ',' || c == ' ' || c == '\r') {
            if (!tok.empty()) {
                table.push_back(std::stod(tok));
                tok.clear();
            }
        } else {
            tok += c;
        }
    }
    return table;
}

int cmd_scenario_dj(const run_params& rp, int n, const std::string& kind,
                    const std::string& table_file, bool sampled_readout) {
    const std::vector<double> table =
        table_file.empty() ? dj_table(n, kind, rp.seed) : table_from_file(table_file);
    const auto verdict = sopsim::run_deutsch_josza(table, rp.seed, sampled_readout);

    const fs::path dir = ensure_out_dir(rp);
    ordered_json report;
    report["scenario"] = "dj";
    report["params"] = {{"n", n}, {"kind", kind}};
    if (!table_file.empty()) report["params"]["table_file"] = table_file;
    report["seed"] = rp.seed;
    report["run1_energy"] = verdict.run1_energy;
    report["run2_energy"] = verdict.run2_energy;
    report["verdict"] = sopsim::dj_outcome_name(verdict.outcome);
    const fs::path report_file = dir / "report.json";
    sopsim::write_text_file(report_file, report.dump(2) + "\n");

    ordered_json config = base_config_echo("scenario dj", rp);
    config["n"] = n;
    config["kind"] = kind;
    config["sampled_readout"] = sampled_readout;
    finish_run(dir, config, {report_file});
    std::cout << "verdict=" << sopsim::dj_outcome_name(verdict.outcome)
              << " energies=(" << sopsim::format_double(verdict.run1_energy) << ", "
              << sopsim::format_double(verdict.run2_energy) << ")\n";
    return 0;
}

struct sweep_range {
    int lo = 0, hi = 0, step = 0;
};

sweep_range parse_sweep(const std::string& text) {
    sweep_range r;
    if (std::sscanf(text.c_str(), "%d:%d:%d", &r.lo, &r.hi, &r.step) != 3 || r.step <= 0 ||
        r.hi < r.lo)
        sopsim::fail(sopsim::errc::bad_argument,
                     "sweep must look like lo:hi:step with step > 0, got " + text);
    return r;
}

int cmd_scenario_rem(const run_params& rp, int n, bool with_dynamics,
                     const std::string& sweep) {
    const fs::path dir = ensure_out_dir(rp);
    ordered_json config = base_config_echo("scenario rem", rp);
    config["epsilon"] = rp.epsilon;
    config["grid"] = rp.grid;

    if (!sweep.empty()) {
        const sweep_range r = parse_sweep(sweep);
        const auto results = sopsim::rem_sweep(r.lo, r.hi, r.step, rp.epsilon, rp.grid,
                                               with_dynamics);
        std::vector<sopsim::scaling_point> pts;
        std::string csv = "n,T,epsilonT,min_gap,s_star,max_v01\n";
        ordered_json points = ordered_json::array();
        for (const auto& res : results) {
            pts.push_back({static_cast<double>(res.n), res.epsilon_t});
            csv += std::to_string(res.n) + ',' + sopsim::format_double(res.total_time) +
                   ',' + sopsim::format_double(res.epsilon_t) + ',' +
                   sopsim::format_double(res.min_gap) + ',' +
                   sopsim::format_double(res.s_star) + ',' +
                   sopsim::format_double(res.max_v01) + '\n';
            ordered_json p;
            p["n"] = res.n;
            p["T"] = res.total_time;
            p["epsilonT"] = res.epsilon_t;
            points.push_back(p);
        }
        const auto fit = sopsim::fit_scaling(pts, sopsim::scaling_model::log2_t_vs_n);
        ordered_json report;
        report["scenario"] = "rem_sweep";
        report["params"] = {{"sweep", sweep}, {"epsilon", rp.epsilon}, {"grid", rp.grid}};
        report["seed"] = rp.seed;
        report["points"] = points;
        report["slope"] = fit.slope;
        report["intercept"] = fit.intercept;
        report["residual_rms"] = fit.residual_rms;
        const fs::path report_file = dir / "report.json";
        const fs::path points_file = dir / "points.csv";
        sopsim::write_text_file(report_file, report.dump(2) + "\n");
        sopsim::write_text_file(points_file, csv);
        config["sweep"] = sweep;
        config["dynamics"] = with_dynamics;
        finish_run(dir, config, {report_file, points_file});
        std::cout << "sweep slope=" << sopsim::format_double(fit.slope)
                  << " intercept=" << sopsim::format_double(fit.intercept) << "\n";
        return 0;
    }

    const auto res = sopsim::run_rem(n, rp.epsilon, rp.grid, with_dynamics);
    ordered_json report;
    report["scenario"] = "rem";
    report["params"] = {{"n", n}, {"epsilon", rp.epsilon}, {"grid", rp.grid}};
    report["seed"] = rp.seed;
    report["T"] = res.total_time;
    report["epsilonT"] = res.epsilon_t;
    put_number(report, "ground_probability", res.ground_probability);
    report["min_gap"] = res.min_gap;
    report["s_star"] = res.s_star;
    report["max_v01"] = res.max_v01;
    const fs::path report_file = dir / "report.json";
    sopsim::write_text_file(report_file, report.dump(2) + "\n");
    config["n"] = n;
    config["dynamics"] = with_dynamics;
    finish_run(dir, config, {report_file});
    std::cout << "T=" << sopsim::format_double(res.total_time)
              << " epsilonT=" << sopsim::format_double(res.epsilon_t)
              << " min_gap=" << sopsim::format_double(res.min_gap)
              << " s_star=" << sopsim::format_double(res.s_star);
    if (with_dynamics)
        std::cout << " p0=" << sopsim::format_double(res.ground_probability);
    std::cout << "\n";
    return 0;
}

sopsim::grover_schedule_kind grover_kind_from(const std::string& name) {
    if (name == "linear") return sopsim::grover_schedule_kind::bound_rate;
    if (name == "local") return sopsim::grover_schedule_kind::locally_adiabatic;
    sopsim::fail(sopsim::errc::bad_argument,
                 "grover schedule must be local or linear, got " + name);
}

int cmd_scenario_grover(const run_params& rp, int n, std::uint64_t marked,
                        const std::string& sched_name, bool with_dynamics,
                        const std::string& sweep) {
    const auto kind = grover_kind_from(sched_name);
    const fs::path dir = ensure_out_dir(rp);
    ordered_json config = base_config_echo("scenario grover", rp);
    config["epsilon"] = rp.epsilon;
    config["grid"] = rp.grid;
    config["schedule"] = sched_name;

    if (!sweep.empty()) {
        const sweep_range r = parse_sweep(sweep);
        const auto results = sopsim::grover_sweep(r.lo, r.hi, r.step, rp.epsilon, kind,
                                                  rp.grid);
        std::vector<sopsim::scaling_point> pts;
        std::string csv = "n,T,epsilonT,min_gap,s_star\n";
        ordered_json points = ordered_json::array();
        for (const auto& res : results) {
            pts.push_back({static_cast<double>(res.n), res.total_time});
            csv += std::to_string(res.n) + ',' + sopsim::format_double(res.total_time) +
                   ',' + sopsim::format_double(res.epsilon_t) + ',' +
                   sopsim::format_double(res.min_gap) + ',' +
                   sopsim::format_double(res.s_star) + '\n';
            ordered_json p;
            p["n"] = res.n;
            p["T"] = res.total_time;
            p["epsilonT"] = res.epsilon_t;
            points.push_back(p);
        }
        const auto fit = sopsim::fit_scaling(pts, sopsim::scaling_model::logt_vs_logn);
        ordered_json report;
        report["scenario"] = "grover_sweep";
        report["params"] = {{"sweep", sweep},
                            {"epsilon", rp.epsilon},
                            {"schedule", sched_name}};
        report["seed"] = rp.seed;
        report["points"] = points;
        report["slope"] = fit.slope;
        report["intercept"] = fit.intercept;
        report["residual_rms"] = fit.residual_rms;
        const fs::path report_file = dir / "report.json";
        const fs::path points_file = dir / "points.csv";
        sopsim::write_text_file(report_file, report.dump(2) + "\n");
        sopsim::write_text_file(points_file, csv);
        config["sweep"] = sweep;
        finish_run(dir, config, {report_file, points_file});
        std::cout << "sweep slope=" << sopsim::format_double(fit.slope)
                  << " (exponent of 2^n)\n";
        return 0;
    }

    const auto res = sopsim::run_grover(n, marked, rp.epsilon, kind, with_dynamics, rp.grid);
    ordered_json report;
    report["scenario"] = "grover";
    report["params"] = {{"n", n},
                        {"marked", marked},
                        {"epsilon", rp.epsilon},
                        {"schedule", sched_name}};
    report["seed"] = rp.seed;
    report["T"] = res.total_time;
    report["epsilonT"] = res.epsilon_t;
    put_number(report, "ground_probability", res.ground_probability);
    report["min_gap"] = res.min_gap;
    report["s_star"] = res.s_star;
    report["max_v01"] = res.max_v01;
    const fs::path report_file = dir / "report.json";
    sopsim::write_text_file(report_file, report.dump(2) + "\n");
    config["n"] = n;
    config["marked"] = marked;
    config["dynamics"] = with_dynamics;
    finish_run(dir, config, {report_file});
    std::cout << "T=" << sopsim::format_double(res.total_time)
              << " epsilonT=" << sopsim::format_double(res.epsilon_t)
              << " min_gap=" << sopsim::format_double(res.min_gap);
    if (with_dynamics)
        std::cout << " p0=" << sopsim::format_double(res.ground_probability);
    std::cout << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reduced-dynamics simulator for scrambled-output annealing problems"};
    app.set_version_flag("--version", sopsim::version_string);
    app.fallthrough();
    app.require_subcommand(1);

    run_params rp;
    if (const char* env_out = std::getenv("SOPSIM_OUT"); env_out && *env_out) rp.out = env_out;

    // The config file is applied before flag parsing so that explicit flags
    // always win: defaults < config file < flags.
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    }
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }
    try {
        if (!config_path.empty()) apply_config_file(rp, config_path);
    } catch (const sopsim::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    }

    std::string config_flag;
    app.add_option("--config", config_flag, "JSON file with defaults for the options below");
    app.add_option("--seed", rp.seed, "random seed for scrambles and sampled readout");
    app.add_option("--out", rp.out, "output directory (default: SOPSIM_OUT or .)");
    app.add_option("--tol", rp.tol, "integrator relative tolerance");
    app.add_option("--fixed-steps", rp.fixed_steps,
                   "use the bit-reproducible fixed-step integrator with this many steps");
    app.add_option("--sample-count", rp.sample_count, "trajectory samples per run");
    app.add_option("--epsilon", rp.epsilon, "schedule rate parameter");
    app.add_option("--grid", rp.grid, "schedule synthesis / scan grid resolution");

    int exit_code = 0;
    auto run = [&exit_code](auto&& fn) {
        return [&exit_code, fn]() {
            try {
                exit_code = fn();
            } catch (const sopsim::error& e) {
                std::cerr << "error: " << e.what() << "\n";
                exit_code = exit_code_for(e.code());
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                exit_code = 1;
            }
        };
    };

    // spectrum
    auto* spectrum_cmd = app.add_subcommand("spectrum", "create, check, or scramble spectra");
    spectrum_cmd->require_subcommand(1);

    auto* validate_cmd = spectrum_cmd->add_subcommand("validate", "check a spectrum JSON file");
    static std::string validate_file;
    validate_cmd->add_option("file", validate_file, "spectrum JSON file")->required();
    validate_cmd->callback(run([&]() { return cmd_spectrum_validate(validate_file); }));

    auto* generate_cmd = spectrum_cmd->add_subcommand("generate", "emit a family spectrum");
    static spectrum_source gen_src;
    generate_cmd->require_subcommand(0, 1);
    for (const char* fam : {"dj", "rem", "grover"}) {
        auto* fam_cmd = generate_cmd->add_subcommand(fam, std::string("the ") + fam + " family");
        fam_cmd->add_option("--n", gen_src.n, "number of bits");
        fam_cmd->add_option("--kind", gen_src.kind, "dj table kind")
            ->check(CLI::IsMember({"balanced", "constant0", "constant1"}));
        fam_cmd->add_option("--marked", gen_src.marked, "marked-class size");
        fam_cmd->add_option("--offset", gen_src.offset, "diagonal shift");
        fam_cmd->callback([fam]() { gen_src.family = fam; });
    }
    generate_cmd->callback(run([&]() { return cmd_spectrum_generate(rp, gen_src); }));

    auto* scramble_cmd =
        spectrum_cmd->add_subcommand("scramble", "emit a seeded scrambled diagonal");
    static spectrum_source scr_src;
    scr_src.family = "rem";
    add_spectrum_options(scramble_cmd, scr_src);
    scramble_cmd->callback(run([&]() { return cmd_spectrum_scramble(rp, scr_src); }));

    // scan
    auto* scan_cmd = app.add_subcommand("scan", "sweep s and emit the low spectrum + gap");
    static spectrum_source scan_src;
    scan_src.family = "rem";
    scan_src.n = 20;
    add_spectrum_options(scan_cmd, scan_src);
    static double scan_lo = 0.0, scan_hi = 1.0;
    scan_cmd->add_option("--s-lo", scan_lo, "scan start");
    scan_cmd->add_option("--s-hi", scan_hi, "scan end");
    scan_cmd->callback(run([&]() { return cmd_scan(rp, scan_src, rp.grid, scan_lo, scan_hi); }));

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "integrate the reduced dynamics");
    static spectrum_source sim_src;
    add_spectrum_options(sim_cmd, sim_src);
    static schedule_request sim_req;
    sim_cmd->add_option("--schedule", sim_req.kind, "schedule kind")
        ->check(CLI::IsMember({"constant_rate", "constant_s", "local_adiabatic",
                               "profile_driven", "custom"}));
    sim_cmd->add_option("--T", sim_req.total_time, "total time for constant_rate/constant_s");
    sim_cmd->add_option("--s", sim_req.s_fixed, "fixed s for constant_s");
    sim_cmd->add_option("--schedule-file", sim_req.schedule_file, "t,s CSV for custom");
    static bool cross_check = false;
    sim_cmd->add_flag("--cross-check", cross_check,
                      "also run the brute-force full evolution on a seeded scramble");
    sim_cmd->callback(run([&]() { return cmd_simulate(rp, sim_src, sim_req, cross_check); }));

    // scenario
    auto* scen_cmd = app.add_subcommand("scenario", "packaged end-to-end runs");
    scen_cmd->require_subcommand(1);

    auto* dj_cmd = scen_cmd->add_subcommand("dj", "two-run function-class discrimination");
    static int dj_n = 8;
    static std::string dj_kind_name = "balanced";
    static std::string dj_table_file;
    static bool dj_sampled = false;
    dj_cmd->add_option("--n", dj_n, "number of bits");
    dj_cmd->add_option("--kind", dj_kind_name, "balanced, constant0, constant1, or random")
        ->check(CLI::IsMember({"balanced", "constant0", "constant1", "random"}));
    dj_cmd->add_option("--table", dj_table_file, "load a 0/1 table from a file instead");
    dj_cmd->add_flag("--sampled-readout", dj_sampled, "always draw one projective sample");
    dj_cmd->callback(
        run([&]() { return cmd_scenario_dj(rp, dj_n, dj_kind_name, dj_table_file, dj_sampled); }));

    auto* rem_cmd = scen_cmd->add_subcommand("rem", "ladder-spectrum schedule + dynamics");
    static int rem_n = 16;
    static bool rem_dynamics = true;
    static std::string rem_sweep_arg;
    rem_cmd->add_option("--n", rem_n, "number of bits");
    rem_cmd->add_flag("!--no-dynamics", rem_dynamics, "skip the time evolution");
    rem_cmd->add_option("--sweep", rem_sweep_arg, "lo:hi:step sweep over n (schedule only)");
    rem_cmd->callback(run([&]() {
        const bool dyn = rem_sweep_arg.empty() ? rem_dynamics : false;
        return cmd_scenario_rem(rp, rem_n, dyn, rem_sweep_arg);
    }));

    auto* grover_cmd = scen_cmd->add_subcommand("grover", "marked-class search runs");
    static int grover_n = 12;
    static std::uint64_t grover_marked = 1;
    static std::string grover_sched = "local";
    static bool grover_dynamics = true;
    static std::string grover_sweep_arg;
    grover_cmd->add_option("--n", grover_n, "number of bits");
    grover_cmd->add_option("--marked", grover_marked, "marked-class size");
    grover_cmd->add_option("--schedule", grover_sched, "local (gap-tracking) or linear (bound-rate)")
        ->check(CLI::IsMember({"local", "linear"}));
    grover_cmd->add_flag("!--no-dynamics", grover_dynamics, "skip the time evolution");
    grover_cmd->add_option("--sweep", grover_sweep_arg, "lo:hi:step sweep over n (schedule only)");
    grover_cmd->callback(run([&]() {
        return cmd_scenario_grover(rp, grover_n, grover_marked, grover_sched,
                                   grover_sweep_arg.empty() ? grover_dynamics : false,
                                   grover_sweep_arg);
    }));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
