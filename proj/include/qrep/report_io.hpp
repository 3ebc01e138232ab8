#pragma once

// Serialization of simulation reports, sweep tables, phase tables and run
// manifests. CSV numbers are written with 17 significant digits; JSON
// numbers use the shortest text that reads back to the same double.

#include "qrep/config.hpp"
#include "qrep/repeater_sim.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qrep::io {

nlohmann::json to_json(const sim::SimReport& report);

void write_report_json(std::ostream& out, const sim::SimReport& report);
// key,value rows of the scalar fields
void write_report_csv(std::ostream& out, const sim::SimReport& report);
// level,success,analytic_time_s,simulated_mean_time_s
void write_per_level_csv(std::ostream& out, const sim::SimReport& report);
// index,level,kind,success,comm_time_s,analytic_time_s,simulated_mean_time_s,p2,p1,p0,F
void write_stages_csv(std::ostream& out, const sim::SimReport& report);

// axis,value,seed,mean_time_s,std_time_s,stderr_time_s,analytic_time_s,closed_form_time_s,success_probability,final_fidelity
void write_sweep_csv(std::ostream& out, const std::string& axis, const std::vector<double>& values,
                     const std::vector<sim::SimReport>& reports);

struct BudgetRow {
    double wavelength_um = 0.0;
    phase::PhaseBudget budget;
};
// delta_phi_rad,wavelength_um,delta_x_m,delta_t_s
void write_budget_csv(std::ostream& out, const std::vector<BudgetRow>& rows);

struct DurationRow {
    phase::ChannelSpec channel;
    double chi = 0.0;
    double classical_time = 0.0;
    double duration = 0.0;
};
// medium,L0_km,loss_db_per_km,chi,transmission,T_cc_s,t0_s
void write_duration_csv(std::ostream& out, const std::vector<DurationRow>& rows);

struct FidelityRow {
    double sigma = 0.0;
    int segments = 0;
    phase::FidelityEstimate estimate;
};
// sigma_rad,segments,samples,mean_fidelity,std_fidelity
void write_fidelity_csv(std::ostream& out, const std::vector<FidelityRow>& rows);

// "blob <size>\0<content>" hashed with SHA-1, as git names file contents.
std::string git_blob_hash(const std::string& content);

struct RunManifest {
    std::string command;
    config::Tree config;
    std::string tool_version;
    std::uint64_t seed = 0;
    std::string started_utc;
    std::string finished_utc;
    std::vector<std::string> outputs;

    std::string config_hash() const;  // over the canonical key=value rendering
    nlohmann::json to_json() const;
};

std::string utc_now();

}  // namespace qrep::io
