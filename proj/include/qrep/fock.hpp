#pragma once

// Exact state-vector simulation over small truncated Fock spaces.
//
// A FockState is a sparse map from packed occupation vectors to complex
// amplitudes over an immutable mode Register. All operations are pure: they
// take states by const reference and return new states, so any number of
// circuits can be evaluated concurrently.
//
// Beam-splitter convention: a+ -> sqrt(T) a+ + i sqrt(1-T) b+,
//                           b+ -> i sqrt(1-T) a+ + sqrt(T) b+.

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qrep::fock {

using Amplitude = std::complex<double>;

inline constexpr double kPruneThreshold = 1e-14;
inline constexpr int kDefaultTruncation = 2;
inline constexpr std::size_t kMaxModes = 16;
inline constexpr int kMaxOccupation = 15;

enum class ModeKind { photonic, atomic };

// H/V are the lab frame. The remaining values label detector modes after a
// change into the diagonal or circular basis.
enum class Polarization { H, V, plus, minus, right, left, none };

struct ModeId {
    std::string label;
    ModeKind kind = ModeKind::photonic;
    Polarization polarization = Polarization::none;
};

ModeId photonic(std::string label, Polarization pol);
ModeId atomic(std::string label);

class Register {
public:
    explicit Register(std::vector<ModeId> modes);

    std::size_t size() const noexcept { return modes_.size(); }
    const ModeId& operator[](std::size_t i) const { return modes_[i]; }
    std::span<const ModeId> modes() const noexcept { return modes_; }

    bool contains(std::string_view label) const noexcept;
    // Throws std::invalid_argument for an unknown label.
    std::size_t index_of(std::string_view label) const;

private:
    std::vector<ModeId> modes_;
};

using RegisterPtr = std::shared_ptr<const Register>;

RegisterPtr make_register(std::vector<ModeId> modes);

// Occupations are packed four bits per mode.
using Occupation = std::uint64_t;

constexpr unsigned occupation_at(Occupation occ, std::size_t mode) noexcept {
    return static_cast<unsigned>((occ >> (4 * mode)) & 0xFu);
}

constexpr Occupation with_occupation(Occupation occ, std::size_t mode, unsigned n) noexcept {
    const Occupation mask = Occupation{0xF} << (4 * mode);
    return (occ & ~mask) | (Occupation{n} << (4 * mode));
}

class FockState {
public:
    using AmplitudeMap = std::map<Occupation, Amplitude>;

    FockState(RegisterPtr reg, int truncation);

    static FockState vacuum(RegisterPtr reg, int truncation = kDefaultTruncation);

    const Register& reg() const noexcept { return *reg_; }
    const RegisterPtr& register_ptr() const noexcept { return reg_; }
    int truncation() const noexcept { return truncation_; }
    const AmplitudeMap& amplitudes() const noexcept { return amps_; }
    bool empty() const noexcept { return amps_.empty(); }

    // Occupation built from (label, count) pairs; unlisted modes are empty.
    Occupation occupation(std::initializer_list<std::pair<std::string_view, unsigned>> counts) const;
    std::vector<unsigned> unpack(Occupation occ) const;

    Amplitude amplitude(Occupation occ) const;
    Amplitude amplitude(std::initializer_list<std::pair<std::string_view, unsigned>> counts) const {
        return amplitude(occupation(counts));
    }

    double norm2() const noexcept;
    unsigned total_photons(Occupation occ) const noexcept;

    // Accumulates an amplitude; occupations above the truncation are dropped.
    void accumulate(Occupation occ, Amplitude value);

    FockState scaled(Amplitude factor) const;
    FockState normalized() const;
    FockState pruned(double threshold = kPruneThreshold) const;
    FockState with_truncation(int truncation) const;

    // Same amplitudes over a register whose labels/polarizations are replaced.
    FockState relabeled(RegisterPtr reg) const;

private:
    RegisterPtr reg_;
    int truncation_;
    AmplitudeMap amps_;
};

// Incoherent mixture of unnormalized pure branches; trace() is the total
// probability carried by the mixture.
struct MixedState {
    std::vector<FockState> branches;

    double trace() const noexcept;
    MixedState scaled(double weight) const;
    void append(const MixedState& other);
};

// Creation polynomial: sum of coeff * prod (a_i^dag)^power_i.
struct Monomial {
    Amplitude coeff;
    std::vector<std::pair<std::string, unsigned>> powers;
};

FockState apply_creation(const FockState& state, std::span<const Monomial> polynomial);
FockState apply_creation(const FockState& state, std::initializer_list<Monomial> polynomial);

struct SourceParams {
    double chi = 0.0;
    int order = 2;
};

// |0> + sqrt(chi) S+ a+ |0> + (chi/2)(S+ a+)^2 |0>, cut at `params.order`,
// applied to an existing state (other modes untouched). Unnormalized.
FockState apply_tmss(const FockState& state, std::string_view stokes_mode,
                     std::string_view atomic_mode, const SourceParams& params);

FockState make_tmss(RegisterPtr reg, std::string_view stokes_mode, std::string_view atomic_mode,
                    const SourceParams& params, int truncation = kDefaultTruncation);

// U[out][in]: a_in^dag -> sum_out U[out][in] a_out^dag on the two listed modes.
using Matrix2 = std::array<std::array<Amplitude, 2>, 2>;

FockState apply_two_mode(const FockState& state, std::string_view mode_a, std::string_view mode_b,
                         const Matrix2& u);

FockState apply_beam_splitter(const FockState& state, std::string_view mode_a,
                              std::string_view mode_b, double transmissivity);

FockState apply_phase(const FockState& state, std::string_view mode, double phi);

// A spatial port carrying an H and a V mode.
struct Port {
    std::string h;
    std::string v;
};

enum class Basis { HV, DIAG, CIRC };

// <b|pol> for b in the basis (first row = transmitted state: H, +, R).
Matrix2 basis_change(Basis basis);

// Rewrites the port's (H,V) modes into basis coordinates: afterwards the h
// slot holds the first basis state and the v slot the second, relabeled to
// `relabel`.
FockState to_basis(const FockState& state, const Port& port, Basis basis, const Port& relabel);

// Polarizing beam splitter in `basis`: transmits the first basis state,
// reflects the second. out_a collects in_a's transmitted and in_b's reflected
// light; out_b the converse. Outputs are in the H/V frame.
FockState apply_pbs(const FockState& state, const Port& in_a, const Port& in_b,
                    const Port& out_a, const Port& out_b, Basis basis);

// Pure amplitude-damping channel. Branches are indexed by the number of
// photons lost; their probabilities sum to the input norm.
MixedState apply_loss(const FockState& state, std::string_view mode, double transmission);
MixedState apply_loss(const MixedState& state, std::string_view mode, double transmission);

// Moves the excitation of `from` into `to` (which must be empty) with
// amplitude sqrt(efficiency) per quantum; lost quanta form separate branches.
MixedState transfer(const MixedState& state, std::string_view from, std::string_view to,
                    double efficiency);

struct DetectorModel {
    double eta1 = 1.0;
    std::optional<double> eta2;  // defaults to 1 - (1 - eta1)^2
    bool number_resolving = false;

    double effective_eta2() const;
    // Click probability for n incident photons (non-resolving POVM).
    double click_probability(unsigned n) const;
    // Probability of registering exactly k of n photons (resolving POVM).
    double count_probability(unsigned k, unsigned n) const;
    void validate() const;
};

enum class Click { no_click, click };

struct DetectionOutcome {
    Click outcome;
    std::optional<unsigned> photons;  // set only for number-resolving detectors
    MixedState conditional;           // normalized, detected mode traced out
    double probability;
};

std::vector<DetectionOutcome> detect(const FockState& state, std::string_view mode,
                                     const DetectorModel& detector);

// Coincidence requirement: every group needs at least one click among its
// detectors (exactly one photon for resolving detectors). Detectors listed in
// the pattern's universe but not in any group are unconstrained for
// non-resolving detectors and must register zero for resolving ones.
struct ClickPattern {
    std::vector<std::vector<std::string>> groups;

    static ClickPattern all_of(std::initializer_list<std::string> detectors);
};

struct ConditionalResult {
    MixedState state;  // normalized, detector modes traced out; empty if probability == 0
    double probability = 0.0;
};

ConditionalResult condition_on_pattern(const MixedState& state,
                                       std::span<const std::string> detector_modes,
                                       const ClickPattern& pattern,
                                       const DetectorModel& detector);

// Register with the listed modes removed, preserving order.
RegisterPtr without_modes(const Register& reg, std::span<const std::size_t> removed);

}  // namespace qrep::fock
