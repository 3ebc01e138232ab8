#pragma once

// Run configuration files.
//
// Text grammar, one entry per line:
//   # comment
//   [section]
//   key = value
// Keys outside any section are rejected. Lists are comma separated. The
// same tree may be given as a JSON object of section objects; a JSON file
// with a top-level "config" member (a run manifest) is read through it.
//
// Sections and keys:
//   [channel]      L0_km, total_length_km, loss_db_per_km, medium (fiber|free_space), wavelength_um
//   [source]       chi, chi_from_length, mode (remote_generation|local_generation_remote_swap),
//                  t_gen_local, local_success_prob, p_r
//   [efficiency]   eta_r, eta1, eta2
//   [pair]         F_initial
//   [purification] schedule = level:rounds, ...
//   [run]          seed, trials
//   [phase]        chi, delta_phi (list, rad), sigmas (list, rad), segments, samples, coherence_length_m

#include "qrep/phase_noise.hpp"
#include "qrep/repeater_sim.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrep::config {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// section -> key -> raw value
using Tree = std::map<std::string, std::map<std::string, std::string>>;

Tree parse_text(const std::string& text);
Tree parse_json(const std::string& text);
Tree load(const std::filesystem::path& path);

// Canonical key=value rendering, sections and keys sorted.
std::string render(const Tree& tree);

struct PhaseConfig {
    phase::ChannelSpec channel;
    double chi = 1e-4;
    std::vector<double> delta_phi{0.6283185307179586};  // 2 pi / 10
    std::vector<double> sigmas{0.0, 0.05, 0.1, 0.2, 0.4, 0.8};
    int segments = 8;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    double coherence_length_m = 3.0;
};

sim::RepeaterConfig repeater_config(const Tree& tree);
PhaseConfig phase_config(const Tree& tree);

// Inverse of repeater_config for manifests.
Tree to_tree(const sim::RepeaterConfig& config);

}  // namespace qrep::config
