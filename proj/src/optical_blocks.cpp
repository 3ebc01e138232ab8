#include "qrep/optical_blocks.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace qrep::blocks {

using fock::Amplitude;
using fock::Basis;
using fock::ClickPattern;
using fock::FockState;
using fock::MixedState;
using fock::Monomial;
using fock::Polarization;
using fock::Port;

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

// Pauli-frame corrections mapping each accepted pattern onto the canonical
// heralded state, indexed as accepted_patterns(). Derived from the ideal
// circuits; the block tests check them. The generation frames also map the
// double-excitation terms onto those of the D1D4 outcome.
constexpr std::array<PauliFrame, 4> kGenerationFrames{{
    {Pauli::I, Pauli::I},  // D1D4
    {Pauli::X, Pauli::I},  // D1D3
    {Pauli::X, Pauli::X},  // D2D3
    {Pauli::I, Pauli::X},  // D2D4
}};

constexpr std::array<PauliFrame, 4> kSwapFrames{{
    {Pauli::I, Pauli::I},
    {Pauli::I, Pauli::Z},
    {Pauli::I, Pauli::I},
    {Pauli::I, Pauli::Z},
}};

constexpr std::array<PauliFrame, 4> kEntanglerFrames{{
    {Pauli::I, Pauli::I},
    {Pauli::I, Pauli::I},
    {Pauli::I, Pauli::I},
    {Pauli::I, Pauli::I},
}};

// Purification outcomes (b1, b2) in the order ++, +-, -+, --.
constexpr std::array<PauliFrame, 4> kPurificationFrames{{
    {Pauli::I, Pauli::I},
    {Pauli::I, Pauli::Z},
    {Pauli::I, Pauli::Z},
    {Pauli::I, Pauli::I},
}};

std::size_t pattern_index(const DetectionPattern& p) {
    p.validate();
    const auto& all = accepted_patterns();
    for (std::size_t i = 0; i < all.size(); ++i)
        if (all[i] == p) return i;
    throw std::invalid_argument("pattern not accepted");
}

// Detector mode labels for the two output ports, each given as
// (first basis state, second basis state).
std::array<std::string, 2> detector_modes(const DetectionPattern& p, const Port& x, const Port& y) {
    auto label = [&](Detector d) -> std::string {
        switch (d) {
            case Detector::D1: return x.h;
            case Detector::D2: return x.v;
            case Detector::D3: return y.v;
            case Detector::D4: return y.h;
        }
        throw std::invalid_argument("unknown detector");
    };
    return {label(p.first), label(p.second)};
}

void check_unit(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

FockState keep_up_to(const FockState& s, std::span<const std::string> modes, unsigned max_total) {
    std::vector<std::size_t> ids;
    for (const auto& m : modes) ids.push_back(s.reg().index_of(m));
    FockState out(s.register_ptr(), s.truncation());
    for (const auto& [occ, amp] : s.amplitudes()) {
        unsigned n = 0;
        for (auto i : ids) n += fock::occupation_at(occ, i);
        if (n <= max_total) out.accumulate(occ, amp);
    }
    return out;
}

BlockResult finish(const fock::ConditionalResult& cond, double input_trace, const QubitPair& qubits,
                   const BellTarget& target, PauliFrame frame) {
    BlockResult r;
    r.correction = frame;
    r.probability = cond.probability * input_trace;
    r.conditional_state = cond.state;
    for (const auto& b : cond.state.branches)
        r.corrected_state.branches.push_back(
            apply_pauli(apply_pauli(b, qubits.qubit1, frame.qubit1), qubits.qubit2, frame.qubit2));
    if (r.probability > 0.0) {
        const SectorAnalysis a = analyze_sectors(r.corrected_state, qubits, target);
        r.coefficients = {a.weights.bell * r.probability, a.weights.one * r.probability,
                          a.weights.vacuum * r.probability, a.weights.spurious * r.probability};
        r.bell_fidelity = a.bell_fidelity;
    }
    return r;
}

// Leading-order generated pair in creation-operator form:
// 1/2 (u1 u2 + d1 d2) + 1/4 (u1^2 + u2^2 - d1^2 - d2^2).
std::vector<Monomial> generated_pair(const std::string& u1, const std::string& d1, const std::string& u2,
                                     const std::string& d2) {
    return {{0.5, {{u1, 1}, {u2, 1}}}, {0.5, {{d1, 1}, {d2, 1}}}, {0.25, {{u1, 2}}},
            {0.25, {{u2, 2}}},         {-0.25, {{d1, 2}}},        {-0.25, {{d2, 2}}}};
}

}  // namespace

DetectionPattern DetectionPattern::parse(std::string_view text) {
    std::vector<Detector> found;
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        if (text[i] != 'D' && text[i] != 'd') continue;
        const char c = text[i + 1];
        if (c < '1' || c > '4') throw std::invalid_argument("bad detector in pattern '" + std::string(text) + "'");
        found.push_back(static_cast<Detector>(c - '1'));
    }
    if (found.size() != 2) throw std::invalid_argument("pattern must name two detectors: '" + std::string(text) + "'");
    DetectionPattern p{found[0], found[1]};
    if (p.first == Detector::D3 || p.first == Detector::D4) std::swap(p.first, p.second);
    p.validate();
    return p;
}

std::string DetectionPattern::name() const {
    return "D" + std::to_string(static_cast<int>(first) + 1) + "D" + std::to_string(static_cast<int>(second) + 1);
}

void DetectionPattern::validate() const {
    const bool ok = (first == Detector::D1 || first == Detector::D2) &&
                    (second == Detector::D3 || second == Detector::D4);
    if (!ok) throw std::invalid_argument("invalid coincidence pattern " + name());
}

const std::array<DetectionPattern, 4>& accepted_patterns() {
    static const std::array<DetectionPattern, 4> all{{{Detector::D1, Detector::D4},
                                                      {Detector::D1, Detector::D3},
                                                      {Detector::D2, Detector::D3},
                                                      {Detector::D2, Detector::D4}}};
    return all;
}

BellTarget phi_plus() { return {{{kInvSqrt2, 0.0}, {0.0, kInvSqrt2}}}; }
BellTarget phi_minus() { return {{{kInvSqrt2, 0.0}, {0.0, -kInvSqrt2}}}; }
BellTarget psi_plus() { return {{{0.0, kInvSqrt2}, {kInvSqrt2, 0.0}}}; }
BellTarget psi_minus() { return {{{0.0, kInvSqrt2}, {-kInvSqrt2, 0.0}}}; }

FockState apply_pauli(const FockState& state, const std::array<std::string, 2>& qubit, Pauli p) {
    const Amplitude i{0.0, 1.0};
    switch (p) {
        case Pauli::I: return state;
        case Pauli::X: return fock::apply_two_mode(state, qubit[0], qubit[1], {{{0.0, 1.0}, {1.0, 0.0}}});
        case Pauli::Y: return fock::apply_two_mode(state, qubit[0], qubit[1], {{{0.0, -i}, {i, 0.0}}});
        case Pauli::Z: return fock::apply_two_mode(state, qubit[0], qubit[1], {{{1.0, 0.0}, {0.0, -1.0}}});
    }
    throw std::invalid_argument("unknown Pauli");
}

SectorAnalysis analyze_sectors(const MixedState& state, const QubitPair& qubits, const BellTarget& target) {
    SectorAnalysis out;
    const double trace = state.trace();
    if (trace <= 0.0) return out;
    double overlap2 = 0.0;
    for (const auto& b : state.branches) {
        const auto& reg = b.reg();
        const std::array<std::size_t, 2> q1{reg.index_of(qubits.qubit1[0]), reg.index_of(qubits.qubit1[1])};
        const std::array<std::size_t, 2> q2{reg.index_of(qubits.qubit2[0]), reg.index_of(qubits.qubit2[1])};
        Amplitude overlap{};
        for (const auto& [occ, amp] : b.amplitudes()) {
            const double w = std::norm(amp);
            const unsigned total = b.total_photons(occ);
            const unsigned n1 = fock::occupation_at(occ, q1[0]) + fock::occupation_at(occ, q1[1]);
            const unsigned n2 = fock::occupation_at(occ, q2[0]) + fock::occupation_at(occ, q2[1]);
            if (total == 0) {
                out.weights.vacuum += w;
            } else if (total == 1) {
                out.weights.one += w;
            } else if (total == 2 && n1 == 1 && n2 == 1) {
                out.weights.bell += w;
                const int i = fock::occupation_at(occ, q1[0]) == 1 ? 0 : 1;
                const int j = fock::occupation_at(occ, q2[0]) == 1 ? 0 : 1;
                overlap += std::conj(target[i][j]) * amp;
            } else {
                out.weights.spurious += w;
            }
        }
        overlap2 += std::norm(overlap);
    }
    if (out.weights.bell > 0.0) out.bell_fidelity = overlap2 / out.weights.bell;
    out.weights.bell /= trace;
    out.weights.one /= trace;
    out.weights.vacuum /= trace;
    out.weights.spurious /= trace;
    return out;
}

GenerationResult bsm1_generate(const GenerationOptions& o) {
    if (!(o.chi >= 0.0 && o.chi < 1.0)) throw std::invalid_argument("chi must lie in [0,1)");
    check_unit(o.transmission[0], "transmission");
    check_unit(o.transmission[1], "transmission");
    o.detector.validate();
    const std::size_t pattern = pattern_index(o.pattern);

    auto reg = fock::make_register({fock::photonic("AH", Polarization::H), fock::photonic("AV", Polarization::V),
                                    fock::photonic("BH", Polarization::H), fock::photonic("BV", Polarization::V),
                                    fock::atomic("uA"), fock::atomic("dA"), fock::atomic("uB"), fock::atomic("dB")});
    const int truncation = o.leading_order ? 2 : 4 * o.source_order;
    FockState s = FockState::vacuum(reg, std::min(truncation, fock::kMaxOccupation));
    const fock::SourceParams src{o.chi, o.source_order};
    s = fock::apply_tmss(s, "AH", "uA", src);
    s = fock::apply_tmss(s, "AV", "dA", src);
    s = fock::apply_tmss(s, "BH", "uB", src);
    s = fock::apply_tmss(s, "BV", "dB", src);
    const std::vector<std::string> memory{"uA", "dA", "uB", "dB"};
    if (o.leading_order) s = keep_up_to(s, memory, 2);

    s = fock::apply_phase(s, "AH", o.phase[0]);
    s = fock::apply_phase(s, "AV", o.phase[0]);
    s = fock::apply_phase(s, "BH", o.phase[1]);
    s = fock::apply_phase(s, "BV", o.phase[1]);

    MixedState m{{s}};
    m = fock::apply_loss(m, "AH", o.transmission[0]);
    m = fock::apply_loss(m, "AV", o.transmission[0]);
    m = fock::apply_loss(m, "BH", o.transmission[1]);
    m = fock::apply_loss(m, "BV", o.transmission[1]);

    const Port a{"AH", "AV"}, b{"BH", "BV"}, x{"XH", "XV"}, y{"YH", "YV"};
    for (auto& br : m.branches) br = fock::apply_pbs(br, a, b, x, y, Basis::DIAG);

    const std::vector<std::string> dets{x.h, x.v, y.h, y.v};
    const auto [d1, d2] = detector_modes(o.pattern, x, y);
    const double trace = m.trace();
    const auto cond = fock::condition_on_pattern(m, dets, ClickPattern::all_of({d1, d2}), o.detector);

    const QubitPair qubits{{"uA", "dA"}, {"uB", "dB"}};
    GenerationResult out;
    out.block = finish(cond, trace, qubits, phi_plus(), kGenerationFrames[pattern]);

    // operator-form view of the dominant corrected branch
    const FockState* dominant = nullptr;
    for (const auto& br : out.block.corrected_state.branches)
        if (!dominant || br.norm2() > dominant->norm2()) dominant = &br;
    if (dominant) {
        const FockState unit = dominant->normalized();
        const double r2 = std::numbers::sqrt2;
        out.operator_coefficients = {unit.amplitude({{"uA", 1}, {"uB", 1}}), unit.amplitude({{"dA", 1}, {"dB", 1}}),
                                     unit.amplitude({{"uA", 2}}) / r2,       unit.amplitude({{"uB", 2}}) / r2,
                                     unit.amplitude({{"dA", 2}}) / r2,       unit.amplitude({{"dB", 2}}) / r2};
        const auto& c = out.operator_coefficients;
        out.bell_operator_weight = std::norm(c[0]) + std::norm(c[1]);
        out.spurious_operator_weight = std::norm(c[2]) + std::norm(c[3]) + std::norm(c[4]) + std::norm(c[5]);
    }
    return out;
}

BlockResult bsm2_swap(const SwapOptions& o) {
    check_unit(o.eta_r, "eta_r");
    o.detector.validate();
    const std::size_t pattern = pattern_index(o.pattern);

    auto reg = fock::make_register(
        {fock::atomic("uA"), fock::atomic("dA"), fock::atomic("uBL"), fock::atomic("dBL"), fock::atomic("uBR"),
         fock::atomic("dBR"), fock::atomic("uC"), fock::atomic("dC"), fock::photonic("h1", Polarization::H),
         fock::photonic("v1", Polarization::V), fock::photonic("h2", Polarization::H),
         fock::photonic("v2", Polarization::V)});
    FockState s = FockState::vacuum(reg, 4);
    s = fock::apply_creation(s, generated_pair("uA", "dA", "uBL", "dBL"));
    s = fock::apply_creation(s, generated_pair("uBR", "dBR", "uC", "dC"));

    MixedState m{{s}};
    m = fock::transfer(m, "uBL", "h1", o.eta_r);
    m = fock::transfer(m, "dBL", "v1", o.eta_r);
    m = fock::transfer(m, "uBR", "h2", o.eta_r);
    m = fock::transfer(m, "dBR", "v2", o.eta_r);

    const Port p1{"h1", "v1"}, p2{"h2", "v2"}, x{"XH", "XV"}, y{"YH", "YV"};
    Port dx, dy;
    for (auto& br : m.branches) {
        if (o.ordering == PbsOrdering::hv_then_diag) {
            br = fock::apply_pbs(br, p1, p2, x, y, Basis::HV);
            br = fock::to_basis(br, x, Basis::DIAG, {"Xp", "Xm"});
            br = fock::to_basis(br, y, Basis::DIAG, {"Yp", "Ym"});
        } else {
            br = fock::apply_pbs(br, p1, p2, x, y, Basis::DIAG);
        }
    }
    if (o.ordering == PbsOrdering::hv_then_diag) {
        dx = {"Xp", "Xm"};
        dy = {"Yp", "Ym"};
    } else {
        dx = x;
        dy = y;
    }
    const std::vector<std::string> dets{dx.h, dx.v, dy.h, dy.v};
    const auto [d1, d2] = detector_modes(o.pattern, dx, dy);
    const double trace = m.trace();
    const auto cond = fock::condition_on_pattern(m, dets, ClickPattern::all_of({d1, d2}), o.detector);
    const QubitPair qubits{{"uA", "dA"}, {"uC", "dC"}};
    const PauliFrame frame = o.ordering == PbsOrdering::hv_then_diag ? kSwapFrames[pattern] : kGenerationFrames[pattern];
    return finish(cond, trace, qubits, phi_plus(), frame);
}

BlockResult entangler_run(const EntanglerOptions& o) {
    check_unit(o.p_r, "p_r");
    o.detector.validate();
    const std::size_t pattern = pattern_index(o.pattern);

    auto reg = fock::make_register(
        {fock::photonic("s1H", Polarization::H), fock::photonic("s1V", Polarization::V),
         fock::photonic("s1pH", Polarization::H), fock::photonic("s1pV", Polarization::V),
         fock::photonic("s2H", Polarization::H), fock::photonic("s2V", Polarization::V),
         fock::photonic("s2pH", Polarization::H), fock::photonic("s2pV", Polarization::V)});
    // |->_1 |V>_2 |+>_1' |H>_2'
    const std::array<std::vector<Monomial>, 4> photons{{
        {{kInvSqrt2, {{"s1H", 1}}}, {-kInvSqrt2, {{"s1V", 1}}}},
        {{1.0, {{"s2V", 1}}}},
        {{kInvSqrt2, {{"s1pH", 1}}}, {kInvSqrt2, {{"s1pV", 1}}}},
        {{1.0, {{"s2pH", 1}}}},
    }};

    const Port s1{"s1H", "s1V"}, s1p{"s1pH", "s1pV"}, s2{"s2H", "s2V"}, s2p{"s2pH", "s2pV"};
    const Port a{"aH", "aV"}, b{"bH", "bV"}, o2{"oH", "oV"}, q2{"qH", "qV"}, x{"XH", "XV"}, y{"YH", "YV"};
    MixedState m;
    for (unsigned mask = 0; mask < 16; ++mask) {
        double w = 1.0;
        FockState st = FockState::vacuum(reg, 2);
        for (unsigned k = 0; k < 4; ++k) {
            if (mask & (1u << k)) {
                w *= o.p_r;
                st = fock::apply_creation(st, photons[k]);
            } else {
                w *= 1.0 - o.p_r;
            }
        }
        if (w == 0.0) continue;
        st = fock::apply_pbs(st, s1, s1p, a, o2, Basis::HV);
        st = fock::apply_pbs(st, s2, s2p, b, q2, Basis::DIAG);
        st = fock::apply_pbs(st, o2, q2, x, y, Basis::CIRC);
        m.branches.push_back(st.scaled(std::sqrt(w)));
    }
    const std::vector<std::string> dets{x.h, x.v, y.h, y.v};
    const auto [d1, d2] = detector_modes(o.pattern, x, y);
    const double trace = m.trace();
    const auto cond = fock::condition_on_pattern(m, dets, ClickPattern::all_of({d1, d2}), o.detector);
    // D1D4 and D2D3 herald psi+, D1D3 and D2D4 herald phi-
    const bool psi = o.pattern == accepted_patterns()[0] || o.pattern == accepted_patterns()[2];
    return finish(cond, trace, {{"aH", "aV"}, {"bH", "bV"}}, psi ? psi_plus() : phi_minus(),
                  kEntanglerFrames[pattern]);
}

BlockResult purification_run(const PurificationOptions& o) {
    check_unit(o.F, "F");
    check_unit(o.eta_r, "eta_r");
    if (o.p2 < 0 || o.p1 < 0 || o.p0 < 0) throw std::invalid_argument("sector weights must be non-negative");
    o.detector.validate();

    auto reg = fock::make_register(
        {fock::photonic("I1H", Polarization::H), fock::photonic("I1V", Polarization::V),
         fock::photonic("J1H", Polarization::H), fock::photonic("J1V", Polarization::V),
         fock::photonic("I2H", Polarization::H), fock::photonic("I2V", Polarization::V),
         fock::photonic("J2H", Polarization::H), fock::photonic("J2V", Polarization::V)});

    // pure components of one pair: (weight, creation polynomial)
    auto components = [&](int k) {
        const std::string I = "I" + std::to_string(k), J = "J" + std::to_string(k);
        std::vector<std::pair<double, std::vector<Monomial>>> out;
        out.push_back({o.p2 * o.F, {{kInvSqrt2, {{I + "H", 1}, {J + "H", 1}}}, {kInvSqrt2, {{I + "V", 1}, {J + "V", 1}}}}});
        out.push_back({o.p2 * (1 - o.F), {{kInvSqrt2, {{I + "H", 1}, {J + "V", 1}}}, {kInvSqrt2, {{I + "V", 1}, {J + "H", 1}}}}});
        for (const auto& mode : {I + "H", I + "V", J + "H", J + "V"}) out.push_back({o.p1 / 4.0, {{1.0, {{mode, 1}}}}});
        out.push_back({o.p0, {{1.0, {}}}});
        return out;
    };

    MixedState m;
    for (const auto& [w1, poly1] : components(1)) {
        for (const auto& [w2, poly2] : components(2)) {
            const double w = w1 * w2;
            if (w == 0.0) continue;
            FockState st = fock::apply_creation(FockState::vacuum(reg, 2), poly1);
            st = fock::apply_creation(st, poly2);
            m.branches.push_back(st.scaled(std::sqrt(w)));
        }
    }
    for (const auto& mode : {"I1H", "I1V", "J1H", "J1V", "I2H", "I2V", "J2H", "J2V"})
        m = fock::apply_loss(m, mode, o.eta_r);

    const Port i1{"I1H", "I1V"}, i2{"I2H", "I2V"}, j1{"J1H", "J1V"}, j2{"J2H", "J2V"};
    const Port a1{"a1H", "a1V"}, a2{"a2H", "a2V"}, b1{"b1H", "b1V"}, b2{"b2H", "b2V"};
    for (auto& br : m.branches) {
        br = fock::apply_pbs(br, i1, i2, a1, b1, Basis::HV);
        br = fock::apply_pbs(br, j1, j2, a2, b2, Basis::HV);
        br = fock::to_basis(br, b1, Basis::DIAG, {"b1p", "b1m"});
        br = fock::to_basis(br, b2, Basis::DIAG, {"b2p", "b2m"});
    }
    const double trace = m.trace();
    const std::vector<std::string> dets{"b1p", "b1m", "b2p", "b2m"};
    const QubitPair qubits{{"a1H", "a1V"}, {"a2H", "a2V"}};

    BlockResult total;
    const std::array<std::array<std::string, 2>, 4> outcomes{
        {{"b1p", "b2p"}, {"b1p", "b2m"}, {"b1m", "b2p"}, {"b1m", "b2m"}}};
    double fid_weight = 0.0;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        const auto cond = fock::condition_on_pattern(
            m, dets, ClickPattern::all_of({outcomes[k][0], outcomes[k][1]}), o.detector);
        const BlockResult r = finish(cond, trace, qubits, phi_plus(), kPurificationFrames[k]);
        if (r.probability <= 0.0) continue;
        total.probability += r.probability;
        total.coefficients.bell += r.coefficients.bell;
        total.coefficients.one += r.coefficients.one;
        total.coefficients.vacuum += r.coefficients.vacuum;
        total.coefficients.spurious += r.coefficients.spurious;
        fid_weight += r.bell_fidelity * r.coefficients.bell;
        total.conditional_state.append(r.conditional_state.scaled(r.probability));
        total.corrected_state.append(r.corrected_state.scaled(r.probability));
    }
    if (total.probability > 0.0) {
        total.conditional_state = total.conditional_state.scaled(1.0 / total.probability);
        total.corrected_state = total.corrected_state.scaled(1.0 / total.probability);
    }
    if (total.coefficients.bell > 0.0) total.bell_fidelity = fid_weight / total.coefficients.bell;
    return total;
}

void write_coefficient_csv(std::ostream& out, const std::vector<CoefficientRow>& rows) {
    const auto old = out.precision(17);
    out << "eta_r,eta1,eta2,p2,p1,p0,source\n";
    for (const auto& r : rows)
        out << r.eta_r << ',' << r.eta1 << ',' << r.eta2 << ',' << r.p2 << ',' << r.p1 << ',' << r.p0 << ','
            << r.source << '\n';
    out.precision(old);
}

}  // namespace qrep::blocks
