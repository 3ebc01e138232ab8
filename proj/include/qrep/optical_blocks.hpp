#pragma once

// The four optical setups built on the Fock engine: entanglement generation
// (BSM-I), entanglement swapping (BSM-II), the event-ready entangler and the
// purification circuit. Each returns the heralded state of the remaining
// modes together with its sector decomposition.
//
// Detector labels: on the first output port D1 sees the first basis state
// and D2 the second; on the second port D3 sees the second and D4 the first.

#include "qrep/fock.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace qrep::blocks {

enum class Detector { D1, D2, D3, D4 };

struct DetectionPattern {
    Detector first;   // on the first output port (D1 or D2)
    Detector second;  // on the second output port (D3 or D4)

    static DetectionPattern parse(std::string_view text);  // "D1D4", "D1^D4", "D1&D4"
    std::string name() const;
    void validate() const;
    bool operator==(const DetectionPattern&) const = default;
};

// The four accepted coincidences in a fixed order: D1D4, D1D3, D2D3, D2D4.
const std::array<DetectionPattern, 4>& accepted_patterns();

enum class Pauli { I, X, Y, Z };

struct PauliFrame {
    Pauli qubit1 = Pauli::I;
    Pauli qubit2 = Pauli::I;
};

// A two-qubit register inside a Fock register: each qubit is a pair of modes
// (first basis state, second basis state).
struct QubitPair {
    std::array<std::string, 2> qubit1;
    std::array<std::string, 2> qubit2;
};

// Amplitudes c[i][j] on |q1_i q2_j>.
using BellTarget = std::array<std::array<fock::Amplitude, 2>, 2>;

BellTarget phi_plus();
BellTarget phi_minus();
BellTarget psi_plus();
BellTarget psi_minus();

struct SectorWeights {
    double bell = 0.0;      // one excitation on each qubit
    double one = 0.0;       // a single excitation anywhere
    double vacuum = 0.0;
    double spurious = 0.0;  // any other configuration with two or more excitations

    double total() const noexcept { return bell + one + vacuum + spurious; }
};

struct BlockResult {
    fock::MixedState conditional_state;  // normalized, pattern-raw
    fock::MixedState corrected_state;    // after the Pauli-frame correction
    double probability = 0.0;
    SectorWeights coefficients;          // unnormalized, sum to probability
    double bell_fidelity = 0.0;          // corrected Bell sector onto the canonical target
    PauliFrame correction;
};

fock::FockState apply_pauli(const fock::FockState& state, const std::array<std::string, 2>& qubit,
                            Pauli p);

// Sector weights (normalized to the mixture trace) and Bell-sector fidelity.
struct SectorAnalysis {
    SectorWeights weights;
    double bell_fidelity = 0.0;
};

SectorAnalysis analyze_sectors(const fock::MixedState& state, const QubitPair& qubits,
                               const BellTarget& target);

// ---- entanglement generation -------------------------------------------

struct GenerationOptions {
    double chi = 1e-6;
    std::array<double, 2> transmission{1.0, 1.0};  // per arm (site A, site B)
    std::array<double, 2> phase{0.0, 0.0};         // phase plates phi_A, phi_B
    fock::DetectorModel detector{};
    DetectionPattern pattern{Detector::D1, Detector::D4};
    int source_order = 2;
    // Keep only source terms with at most two excitations in total, i.e. the
    // leading order in chi that the heralded state is usually written at.
    bool leading_order = true;
};

struct GenerationResult {
    BlockResult block;
    // Squared operator coefficients, normalized to the heralded state, for
    // the Bell terms and the four double-excitation terms.
    double bell_operator_weight = 0.0;
    double spurious_operator_weight = 0.0;
    // Corrected heralded state in creation-operator form, coefficients of
    // uA uB, dA dB, uA^2, uB^2, dA^2, dB^2.
    std::array<fock::Amplitude, 6> operator_coefficients{};
};

// Memory modes "uA", "dA", "uB", "dB".
GenerationResult bsm1_generate(const GenerationOptions& options);

// ---- entanglement swapping ---------------------------------------------

enum class PbsOrdering {
    hv_then_diag,  // swapping order: HV PBS, then +/- analysis
    diag_then_hv,  // generation order applied to the swap input
};

struct SwapOptions {
    double eta_r = 1.0;
    fock::DetectorModel detector{};
    DetectionPattern pattern{Detector::D1, Detector::D4};
    PbsOrdering ordering = PbsOrdering::hv_then_diag;
};

// Memory modes "uA", "dA", "uC", "dC"; the inputs are two generated pairs
// A-B_L and B_R-C in their leading-order heralded form.
BlockResult bsm2_swap(const SwapOptions& options);

// ---- event-ready entangler ---------------------------------------------

struct EntanglerOptions {
    double p_r = 1.0;
    fock::DetectorModel detector{};
    DetectionPattern pattern{Detector::D1, Detector::D4};
};

// Output photon modes "aH", "aV", "bH", "bV".
BlockResult entangler_run(const EntanglerOptions& options);

// ---- purification ------------------------------------------------------

struct PurificationOptions {
    double p2 = 1.0;  // input sector weights of each pair
    double p1 = 0.0;
    double p0 = 0.0;
    double F = 1.0;
    double eta_r = 1.0;
    fock::DetectorModel detector{};
};

// Summed over the four heralding outcomes; remaining modes "a1H", "a1V",
// "a2H", "a2V".
BlockResult purification_run(const PurificationOptions& options);

// ---- coefficient tables ------------------------------------------------

struct CoefficientRow {
    double eta_r = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double p2 = 0.0;
    double p1 = 0.0;
    double p0 = 0.0;
    std::string source;  // "formula" or "oracle"
};

void write_coefficient_csv(std::ostream& out, const std::vector<CoefficientRow>& rows);

}  // namespace qrep::blocks
