#include "qrep/report_io.hpp"

#include <openssl/sha.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <ostream>

namespace qrep::io {
namespace {

const char* kind_name(sim::StageKind k) { return k == sim::StageKind::swap ? "swap" : "purify"; }

class Precision {
public:
    explicit Precision(std::ostream& out) : out_(out), old_(out.precision(17)) {}
    ~Precision() { out_.precision(old_); }

private:
    std::ostream& out_;
    std::streamsize old_;
};

}  // namespace

nlohmann::json to_json(const sim::SimReport& r) {
    using nlohmann::json;
    json j;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["total_time_s"] = {{"mean", r.total_time.mean}, {"std", r.total_time.std},
                         {"stderr", r.total_time.stderr_mean}, {"p05", r.total_time.p05},
                         {"p50", r.total_time.p50}, {"p95", r.total_time.p95},
                         {"min", r.total_time.min}, {"max", r.total_time.max}};
    j["analytic_total_time_s"] = r.analytic_total_time;
    j["closed_form_total_time_s"] = r.closed_form_total_time;
    j["success_probability"] = r.success_probability;
    j["final_fidelity"] = r.final_fidelity;
    j["final_state"] = {{"p2", r.final_state.p2}, {"p1", r.final_state.p1}, {"p0", r.final_state.p0},
                        {"p2_hi", r.final_state.p2_hi}, {"p3_hi", r.final_state.p3_hi}, {"F", r.final_state.F}};
    j["per_level"] = json::array();
    for (const auto& l : r.per_level)
        j["per_level"].push_back({{"level", l.level}, {"success", l.success}, {"analytic_time_s", l.analytic_time},
                                  {"simulated_mean_time_s", l.simulated_mean_time}});
    j["stages"] = json::array();
    for (const auto& s : r.stages)
        j["stages"].push_back({{"level", s.level}, {"kind", kind_name(s.kind)}, {"success", s.success},
                               {"comm_time_s", s.comm_time}, {"analytic_time_s", s.analytic_time},
                               {"simulated_mean_time_s", s.simulated_mean_time}, {"p2", s.p2}, {"p1", s.p1},
                               {"p0", s.p0}, {"F", s.F}});
    j["attempts_histogram"] = json::array();
    for (const auto& [attempts, count] : r.attempts_histogram) j["attempts_histogram"].push_back({attempts, count});
    j["mean_generation_attempts"] = r.mean_generation_attempts;
    j["small_chi_violated"] = r.small_chi_violated;
    return j;
}

void write_report_json(std::ostream& out, const sim::SimReport& report) { out << to_json(report).dump(2) << '\n'; }

void write_report_csv(std::ostream& out, const sim::SimReport& r) {
    Precision p(out);
    out << "key,value\n";
    out << "trials," << r.trials << '\n' << "seed," << r.seed << '\n';
    out << "total_time_mean_s," << r.total_time.mean << '\n';
    out << "total_time_std_s," << r.total_time.std << '\n';
    out << "total_time_stderr_s," << r.total_time.stderr_mean << '\n';
    out << "total_time_p05_s," << r.total_time.p05 << '\n';
    out << "total_time_p50_s," << r.total_time.p50 << '\n';
    out << "total_time_p95_s," << r.total_time.p95 << '\n';
    out << "analytic_total_time_s," << r.analytic_total_time << '\n';
    out << "closed_form_total_time_s," << r.closed_form_total_time << '\n';
    out << "success_probability," << r.success_probability << '\n';
    out << "final_fidelity," << r.final_fidelity << '\n';
    out << "mean_generation_attempts," << r.mean_generation_attempts << '\n';
    out << "small_chi_violated," << (r.small_chi_violated ? "true" : "false") << '\n';
}

void write_per_level_csv(std::ostream& out, const sim::SimReport& r) {
    Precision p(out);
    out << "level,success,analytic_time_s,simulated_mean_time_s\n";
    for (const auto& l : r.per_level)
        out << l.level << ',' << l.success << ',' << l.analytic_time << ',' << l.simulated_mean_time << '\n';
}

void write_stages_csv(std::ostream& out, const sim::SimReport& r) {
    Precision p(out);
    out << "index,level,kind,success,comm_time_s,analytic_time_s,simulated_mean_time_s,p2,p1,p0,F\n";
    for (std::size_t i = 0; i < r.stages.size(); ++i) {
        const auto& s = r.stages[i];
        out << i << ',' << s.level << ',' << kind_name(s.kind) << ',' << s.success << ',' << s.comm_time << ','
            << s.analytic_time << ',' << s.simulated_mean_time << ',' << s.p2 << ',' << s.p1 << ',' << s.p0 << ','
            << s.F << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const std::string& axis, const std::vector<double>& values,
                     const std::vector<sim::SimReport>& reports) {
    Precision p(out);
    out << "axis,value,seed,mean_time_s,std_time_s,stderr_time_s,analytic_time_s,closed_form_time_s,"
           "success_probability,final_fidelity\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        out << axis << ',' << values[i] << ',' << r.seed << ',' << r.total_time.mean << ',' << r.total_time.std << ','
            << r.total_time.stderr_mean << ',' << r.analytic_total_time << ',' << r.closed_form_total_time << ','
            << r.success_probability << ',' << r.final_fidelity << '\n';
    }
}

void write_budget_csv(std::ostream& out, const std::vector<BudgetRow>& rows) {
    Precision p(out);
    out << "delta_phi_rad,wavelength_um,delta_x_m,delta_t_s\n";
    for (const auto& r : rows)
        out << r.budget.delta_phi_max << ',' << r.wavelength_um << ',' << r.budget.delta_x_max << ','
            << r.budget.delta_t_max << '\n';
}

void write_duration_csv(std::ostream& out, const std::vector<DurationRow>& rows) {
    Precision p(out);
    out << "medium,L0_km,loss_db_per_km,chi,transmission,T_cc_s,t0_s\n";
    for (const auto& r : rows)
        out << (r.channel.medium == phase::Medium::fiber ? "fiber" : "free_space") << ',' << r.channel.length_km
            << ',' << r.channel.loss_db_per_km << ',' << r.chi << ',' << r.channel.transmission() << ','
            << r.classical_time << ',' << r.duration << '\n';
}

void write_fidelity_csv(std::ostream& out, const std::vector<FidelityRow>& rows) {
    Precision p(out);
    out << "sigma_rad,segments,samples,mean_fidelity,std_fidelity\n";
    for (const auto& r : rows)
        out << r.sigma << ',' << r.segments << ',' << r.estimate.samples << ',' << r.estimate.mean << ','
            << r.estimate.std << '\n';
}

std::string git_blob_hash(const std::string& content) {
    const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
    std::string hex;
    char buf[3];
    for (unsigned char c : digest) {
        std::snprintf(buf, sizeof buf, "%02x", c);
        hex += buf;
    }
    return hex;
}

std::string RunManifest::config_hash() const { return git_blob_hash(config::render(config)); }

nlohmann::json RunManifest::to_json() const {
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [section, keys] : config)
        for (const auto& [key, value] : keys) cfg[section][key] = value;
    return {{"command", command},     {"tool_version", tool_version}, {"seed", seed},
            {"started_utc", started_utc}, {"finished_utc", finished_utc}, {"outputs", outputs},
            {"config_hash", config_hash()}, {"config", cfg}};
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace qrep::io
