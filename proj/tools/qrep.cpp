// qrep: command-line front end for verification, phase analysis and
// repeater simulation. Exit codes: 0 success, 1 check failure, 2 usage or
// configuration error.

#include "qrep/config.hpp"
#include "qrep/phase_noise.hpp"
#include "qrep/repeater_sim.hpp"
#include "qrep/report_io.hpp"
#include "qrep/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace qrep;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::string format = "json";
};

struct Writer {
    fs::path dir;
    std::vector<std::string> written;

    template <class F>
    void file(const std::string& name, F&& body) {
        fs::create_directories(dir);
        const fs::path p = dir / name;
        std::ofstream out(p);
        if (!out) throw config::ConfigError("cannot write " + p.string());
        body(out);
        written.push_back(p.string());
    }
};

void write_manifest(Writer& w, io::RunManifest m) {
    m.finished_utc = io::utc_now();
    m.outputs = w.written;
    m.outputs.push_back((w.dir / "manifest.json").string());
    w.file("manifest.json", [&](std::ostream& o) { o << m.to_json().dump(2) << '\n'; });
}

io::RunManifest start_manifest(const std::string& command, const config::Tree& tree, std::uint64_t seed) {
    io::RunManifest m;
    m.command = command;
    m.config = tree;
    m.tool_version = QREP_VERSION;
    m.seed = seed;
    m.started_utc = io::utc_now();
    return m;
}

void write_report(Writer& w, const Globals& g, const sim::SimReport& r, const std::string& suffix) {
    if (g.format == "csv")
        w.file("report" + suffix + ".csv", [&](std::ostream& o) { io::write_report_csv(o, r); });
    else
        w.file("report" + suffix + ".json", [&](std::ostream& o) { io::write_report_json(o, r); });
    w.file("per_level" + suffix + ".csv", [&](std::ostream& o) { io::write_per_level_csv(o, r); });
    w.file("stages" + suffix + ".csv", [&](std::ostream& o) { io::write_stages_csv(o, r); });
}

void print_summary(const sim::SimReport& r) {
    std::cout.precision(6);
    std::cout << "total time      " << r.total_time.mean << " s (+/- " << r.total_time.stderr_mean
              << ", analytic " << r.analytic_total_time << ", closed form " << r.closed_form_total_time << ")\n"
              << "success prob p2 " << r.success_probability << "\n"
              << "final fidelity  " << r.final_fidelity << "\n";
    if (r.small_chi_violated) std::cout << "warning: level * chi exceeds 0.1\n";
}

sim::RepeaterConfig load_repeater(const std::string& path, const Globals& g, config::Tree& tree) {
    tree = config::load(path);
    auto c = config::repeater_config(tree);
    if (g.seed) c.seed = *g.seed;
    tree = config::to_tree(c);
    return c;
}

int cmd_verify(const Globals& g, const std::string& grid, double tolerance, bool corrupt) {
    verify::Options opts;
    if (!grid.empty()) opts.grid = verify::GridSpec::parse(grid);
    if (!(tolerance >= 0.0)) throw config::ConfigError("--tolerance must be non-negative");
    opts.tolerance = tolerance;
    opts.corrupt_formula = corrupt;
    const auto report = verify::run(opts);

    Writer w{g.out_dir, {}};
    if (g.format == "csv") {
        w.file("verify.csv", [&](std::ostream& o) { verify::write_csv(o, report); });
    } else {
        w.file("verify.json", [&](std::ostream& o) {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& c : report.rows)
                rows.push_back({{"block", c.block}, {"cell", c.cell}, {"quantity", c.quantity},
                                {"formula", c.formula}, {"oracle", c.oracle}, {"deviation", c.deviation()}});
            o << nlohmann::json{{"passed", report.passed}, {"max_deviation", report.max_deviation},
                                {"tolerance", opts.tolerance}, {"rows", rows}}
                     .dump(2)
              << '\n';
        });
    }
    std::cout << "verify: " << report.rows.size() << " comparisons, max deviation " << report.max_deviation
              << (report.passed ? ", pass\n" : ", FAIL\n");
    if (!report.passed) {
        const auto& f = *report.first_failure;
        std::cerr.precision(17);
        std::cerr << "first failure: block=" << f.block << " cell=" << f.cell << " quantity=" << f.quantity
                  << " formula=" << f.formula << " oracle=" << f.oracle << " deviation=" << f.deviation() << '\n';
        return 1;
    }
    return 0;
}

int cmd_simulate(const Globals& g, const std::string& path) {
    config::Tree tree;
    const auto c = load_repeater(path, g, tree);
    auto manifest = start_manifest("simulate", tree, c.seed);
    const auto r = sim::monte_carlo_run(c);
    Writer w{g.out_dir, {}};
    write_report(w, g, r, "");
    write_manifest(w, manifest);
    print_summary(r);
    return 0;
}

int cmd_analyze_phase(const Globals& g, const std::string& path) {
    config::Tree tree = config::load(path);
    auto c = config::phase_config(tree);
    if (g.seed) {
        c.seed = *g.seed;
        tree["run"]["seed"] = std::to_string(c.seed);
    }
    auto manifest = start_manifest("analyze-phase", tree, c.seed);

    std::vector<io::BudgetRow> budgets;
    for (double phi : c.delta_phi) budgets.push_back({c.channel.wavelength_um, phase::jitter_budget(c.channel, phi)});
    std::vector<io::DurationRow> durations{
        {c.channel, c.chi, c.channel.classical_time(), phase::generation_duration(c.channel, c.chi)}};
    std::vector<io::FidelityRow> fidelities;
    for (std::size_t i = 0; i < c.sigmas.size(); ++i) {
        const std::vector<double> sig(c.segments, c.sigmas[i]);
        fidelities.push_back({c.sigmas[i], c.segments, phase::accumulated_phase_fidelity(sig, c.samples, c.seed + i)});
    }
    const double ratio = phase::two_photon_robustness_ratio(c.channel.wavelength_um, c.coherence_length_m);

    Writer w{g.out_dir, {}};
    if (g.format == "csv") {
        w.file("budget.csv", [&](std::ostream& o) { io::write_budget_csv(o, budgets); });
        w.file("duration.csv", [&](std::ostream& o) { io::write_duration_csv(o, durations); });
        w.file("fidelity.csv", [&](std::ostream& o) { io::write_fidelity_csv(o, fidelities); });
    } else {
        w.file("phase.json", [&](std::ostream& o) {
            nlohmann::json j;
            for (const auto& b : budgets)
                j["budget"].push_back({{"delta_phi_rad", b.budget.delta_phi_max}, {"wavelength_um", b.wavelength_um},
                                       {"delta_x_m", b.budget.delta_x_max}, {"delta_t_s", b.budget.delta_t_max}});
            for (const auto& d : durations)
                j["duration"].push_back({{"L0_km", d.channel.length_km}, {"loss_db_per_km", d.channel.loss_db_per_km},
                                         {"chi", d.chi}, {"T_cc_s", d.classical_time}, {"t0_s", d.duration}});
            for (const auto& f : fidelities)
                j["fidelity"].push_back({{"sigma_rad", f.sigma}, {"segments", f.segments},
                                         {"samples", f.estimate.samples}, {"mean_fidelity", f.estimate.mean},
                                         {"std_fidelity", f.estimate.std}});
            j["robustness_ratio"] = ratio;
            o << j.dump(2) << '\n';
        });
    }
    write_manifest(w, manifest);

    std::cout.precision(6);
    std::cout << "t0 = " << durations[0].duration << " s (T_cc = " << durations[0].classical_time << " s)\n";
    for (const auto& b : budgets)
        std::cout << "dphi = " << b.budget.delta_phi_max << " rad: dx = " << b.budget.delta_x_max
                  << " m, dt = " << b.budget.delta_t_max << " s\n";
    std::cout << "two-photon robustness ratio = " << ratio << '\n';
    return 0;
}

int cmd_sweep(const Globals& g, const std::string& path, const std::string& axis, const std::vector<double>& values) {
    config::Tree tree;
    const auto c = load_repeater(path, g, tree);
    const auto& axes = sim::sweep_axes();
    if (std::find(axes.begin(), axes.end(), axis) == axes.end()) {
        std::string list;
        for (const auto& a : axes) list += (list.empty() ? "" : ", ") + a;
        std::cerr << "error: unknown axis '" << axis << "' (expected one of: " << list << ")\n";
        return 2;
    }
    tree["sweep"]["axis"] = axis;
    {
        std::ostringstream v;
        v.precision(17);
        for (std::size_t i = 0; i < values.size(); ++i) v << (i ? ", " : "") << values[i];
        tree["sweep"]["values"] = v.str();
    }
    auto manifest = start_manifest("sweep", tree, c.seed);
    const auto reports = sim::sweep(c, axis, values);

    Writer w{g.out_dir, {}};
    for (std::size_t i = 0; i < reports.size(); ++i) write_report(w, g, reports[i], "_" + std::to_string(i));
    w.file("sweep.csv", [&](std::ostream& o) { io::write_sweep_csv(o, axis, values, reports); });
    if ((axis == "total_length_km" || axis == "L0_km") && reports.size() >= 2) {
        std::vector<double> x, ysim, yana;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            x.push_back(axis == "total_length_km" ? values[i] / c.L0_km : c.total_length_km / values[i]);
            ysim.push_back(reports[i].total_time.mean);
            yana.push_back(reports[i].analytic_total_time);
        }
        const double eta = c.eta_r * c.eta_r * c.eta1 * c.eta1;
        w.file("slope.csv", [&](std::ostream& o) {
            o.precision(17);
            o << "quantity,exponent\n"
              << "simulated_mean_time," << sim::loglog_slope(x, ysim) << '\n'
              << "analytic_time," << sim::loglog_slope(x, yana) << '\n'
              << "predicted," << 2.0 + std::log2(1.0 / eta) << '\n';
        });
        std::cout << "fitted exponent (analytic) " << sim::loglog_slope(x, yana) << ", predicted "
                  << 2.0 + std::log2(1.0 / eta) << '\n';
    }
    write_manifest(w, manifest);
    for (std::size_t i = 0; i < reports.size(); ++i)
        std::cout << axis << " = " << values[i] << ": mean time " << reports[i].total_time.mean << " s, p2 "
                  << reports[i].success_probability << ", F " << reports[i].final_fidelity << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Atomic-ensemble quantum repeater toolkit"};
    app.set_version_flag("--version", std::string(QREP_VERSION));
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Override the configured seed");
    app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
    app.add_option("--format", g.format, "Report encoding")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    auto* verify = app.add_subcommand("verify", "Closed-form coefficients against the optical oracle");
    std::string grid;
    double tolerance = 1e-10;
    bool corrupt = false;
    verify->add_option("--grid", grid, "Comma-separated efficiency values for the swap grid");
    verify->add_option("--tolerance", tolerance, "Maximum allowed |formula - oracle|")->capture_default_str();
    verify->add_flag("--corrupt-formula", corrupt)->group("");

    auto* simulate = app.add_subcommand("simulate", "Run the repeater simulation for a config");
    std::string sim_path;
    simulate->add_option("config", sim_path, "Config file (text, JSON, or a run manifest)")->required()->check(CLI::ExistingFile);

    auto* phase = app.add_subcommand("analyze-phase", "Phase budgets, durations and fidelity curves");
    std::string phase_path;
    phase->add_option("config", phase_path, "Config file")->required()->check(CLI::ExistingFile);

    auto* sweep = app.add_subcommand("sweep", "Repeat the simulation along one config axis");
    std::string sweep_path, axis;
    std::vector<double> values;
    sweep->add_option("config", sweep_path, "Config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--axis", axis, "Config field to vary")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*verify) return cmd_verify(g, grid, tolerance, corrupt);
        if (*simulate) return cmd_simulate(g, sim_path);
        if (*phase) return cmd_analyze_phase(g, phase_path);
        if (*sweep) return cmd_sweep(g, sweep_path, axis, values);
    } catch (const config::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
