#include "qrep/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

namespace qrep::fock {
namespace {

constexpr int kTableSize = 2 * kMaxOccupation + 2;

struct Tables {
    std::array<double, kTableSize> sqrt_factorial{};
    std::array<std::array<double, kTableSize>, kTableSize> binomial{};

    Tables() {
        double f = 1.0;
        for (int n = 0; n < kTableSize; ++n) {
            if (n > 0) f *= n;
            sqrt_factorial[n] = std::sqrt(f);
            binomial[n][0] = 1.0;
            for (int k = 1; k <= n; ++k)
                binomial[n][k] = binomial[n - 1][k - 1] + (k <= n - 1 ? binomial[n - 1][k] : 0.0);
        }
    }
};

template <typename T>
T ipow(T base, unsigned e) {
    T r{1.0};
    for (; e > 0; --e) r *= base;
    return r;
}

const Tables& tables() {
    static const Tables t;
    return t;
}

void check_unit_interval(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

const ModeId& photonic_mode(const Register& reg, std::string_view label) {
    const ModeId& m = reg[reg.index_of(label)];
    if (m.kind != ModeKind::photonic)
        throw std::invalid_argument("mode '" + std::string(label) + "' is not photonic");
    return m;
}

// Register with the named modes replaced by new identities.
RegisterPtr rename(const Register& reg, const std::vector<std::pair<std::size_t, ModeId>>& changes) {
    std::vector<ModeId> modes(reg.modes().begin(), reg.modes().end());
    for (const auto& [idx, id] : changes) modes[idx] = id;
    return make_register(std::move(modes));
}

// Groups amplitudes by the occupation of one mode; the mode is removed from
// the keys of the inner maps.
std::map<unsigned, FockState> split_on_mode(const FockState& state, std::size_t idx) {
    std::vector<std::size_t> removed{idx};
    RegisterPtr reduced = without_modes(state.reg(), removed);
    std::map<unsigned, FockState> out;
    const std::size_t n_modes = state.reg().size();
    for (const auto& [occ, amp] : state.amplitudes()) {
        const unsigned n = occupation_at(occ, idx);
        Occupation rest = 0;
        for (std::size_t m = 0, r = 0; m < n_modes; ++m) {
            if (m == idx) continue;
            rest = with_occupation(rest, r++, occupation_at(occ, m));
        }
        auto it = out.find(n);
        if (it == out.end()) it = out.emplace(n, FockState(reduced, state.truncation())).first;
        it->second.accumulate(rest, amp);
    }
    return out;
}

}  // namespace

ModeId photonic(std::string label, Polarization pol) {
    return ModeId{std::move(label), ModeKind::photonic, pol};
}

ModeId atomic(std::string label) {
    return ModeId{std::move(label), ModeKind::atomic, Polarization::none};
}

Register::Register(std::vector<ModeId> modes) : modes_(std::move(modes)) {
    if (modes_.size() > kMaxModes)
        throw std::invalid_argument("register holds at most 16 modes");
    std::unordered_set<std::string> seen;
    for (const auto& m : modes_) {
        if (m.label.empty()) throw std::invalid_argument("empty mode label");
        if (!seen.insert(m.label).second)
            throw std::invalid_argument("duplicate mode label '" + m.label + "'");
        if (m.kind == ModeKind::atomic && m.polarization != Polarization::none)
            throw std::invalid_argument("atomic mode '" + m.label + "' cannot carry polarization");
    }
}

bool Register::contains(std::string_view label) const noexcept {
    return std::any_of(modes_.begin(), modes_.end(),
                       [&](const ModeId& m) { return m.label == label; });
}

std::size_t Register::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i].label == label) return i;
    throw std::invalid_argument("unknown mode '" + std::string(label) + "'");
}

RegisterPtr make_register(std::vector<ModeId> modes) {
    return std::make_shared<const Register>(std::move(modes));
}

RegisterPtr without_modes(const Register& reg, std::span<const std::size_t> removed) {
    std::vector<ModeId> kept;
    for (std::size_t i = 0; i < reg.size(); ++i)
        if (std::find(removed.begin(), removed.end(), i) == removed.end()) kept.push_back(reg[i]);
    return make_register(std::move(kept));
}

FockState::FockState(RegisterPtr reg, int truncation) : reg_(std::move(reg)), truncation_(truncation) {
    if (!reg_) throw std::invalid_argument("null register");
    if (truncation_ < 1 || truncation_ > kMaxOccupation)
        throw std::invalid_argument("truncation must lie in [1,15]");
}

FockState FockState::vacuum(RegisterPtr reg, int truncation) {
    FockState s(std::move(reg), truncation);
    s.amps_[0] = 1.0;
    return s;
}

Occupation FockState::occupation(
    std::initializer_list<std::pair<std::string_view, unsigned>> counts) const {
    Occupation occ = 0;
    for (const auto& [label, n] : counts) {
        if (n > static_cast<unsigned>(kMaxOccupation))
            throw std::invalid_argument("occupation exceeds packing limit");
        occ = with_occupation(occ, reg_->index_of(label), n);
    }
    return occ;
}

std::vector<unsigned> FockState::unpack(Occupation occ) const {
    std::vector<unsigned> v(reg_->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = occupation_at(occ, i);
    return v;
}

Amplitude FockState::amplitude(Occupation occ) const {
    auto it = amps_.find(occ);
    return it == amps_.end() ? Amplitude{} : it->second;
}

double FockState::norm2() const noexcept {
    double s = 0.0;
    for (const auto& [occ, a] : amps_) s += std::norm(a);
    return s;
}

unsigned FockState::total_photons(Occupation occ) const noexcept {
    unsigned n = 0;
    for (std::size_t i = 0; i < reg_->size(); ++i) n += occupation_at(occ, i);
    return n;
}

void FockState::accumulate(Occupation occ, Amplitude value) {
    for (std::size_t i = 0; i < reg_->size(); ++i)
        if (occupation_at(occ, i) > static_cast<unsigned>(truncation_)) return;
    amps_[occ] += value;
}

FockState FockState::scaled(Amplitude factor) const {
    FockState out(reg_, truncation_);
    for (const auto& [occ, a] : amps_) out.amps_.emplace(occ, a * factor);
    return out;
}

FockState FockState::normalized() const {
    const double n = norm2();
    if (n <= 0.0) throw std::domain_error("cannot normalize a zero state");
    return scaled(1.0 / std::sqrt(n));
}

FockState FockState::pruned(double threshold) const {
    FockState out(reg_, truncation_);
    for (const auto& [occ, a] : amps_)
        if (std::abs(a) >= threshold) out.amps_.emplace(occ, a);
    return out;
}

FockState FockState::with_truncation(int truncation) const {
    FockState out(reg_, truncation);
    for (const auto& [occ, a] : amps_) out.accumulate(occ, a);
    return out;
}

FockState FockState::relabeled(RegisterPtr reg) const {
    if (!reg || reg->size() != reg_->size())
        throw std::invalid_argument("relabel needs a register of the same size");
    FockState out(std::move(reg), truncation_);
    out.amps_ = amps_;
    return out;
}

double MixedState::trace() const noexcept {
    double t = 0.0;
    for (const auto& b : branches) t += b.norm2();
    return t;
}

MixedState MixedState::scaled(double weight) const {
    MixedState out;
    const double f = std::sqrt(weight);
    for (const auto& b : branches) out.branches.push_back(b.scaled(f));
    return out;
}

void MixedState::append(const MixedState& other) {
    branches.insert(branches.end(), other.branches.begin(), other.branches.end());
}

FockState apply_creation(const FockState& state, std::span<const Monomial> polynomial) {
    const auto& t = tables();
    struct Resolved {
        Amplitude coeff;
        std::vector<std::pair<std::size_t, unsigned>> powers;
    };
    std::vector<Resolved> terms;
    for (const auto& m : polynomial) {
        Resolved r{m.coeff, {}};
        for (const auto& [label, p] : m.powers) r.powers.emplace_back(state.reg().index_of(label), p);
        terms.push_back(std::move(r));
    }
    FockState out(state.register_ptr(), state.truncation());
    for (const auto& [occ, amp] : state.amplitudes()) {
        for (const auto& term : terms) {
            Occupation next = occ;
            double factor = 1.0;
            bool fits = true;
            for (const auto& [idx, p] : term.powers) {
                const unsigned n = occupation_at(next, idx);
                if (n + p > static_cast<unsigned>(state.truncation())) {
                    fits = false;
                    break;
                }
                factor *= t.sqrt_factorial[n + p] / t.sqrt_factorial[n];
                next = with_occupation(next, idx, n + p);
            }
            if (fits) out.accumulate(next, amp * term.coeff * factor);
        }
    }
    return out.pruned();
}

FockState apply_creation(const FockState& state, std::initializer_list<Monomial> polynomial) {
    return apply_creation(state, std::span<const Monomial>(polynomial.begin(), polynomial.size()));
}

FockState apply_tmss(const FockState& state, std::string_view stokes_mode,
                     std::string_view atomic_mode, const SourceParams& params) {
    if (!(params.chi >= 0.0 && params.chi < 1.0)) throw std::invalid_argument("chi must lie in [0,1)");
    if (params.order < 1 || params.order > 2) throw std::invalid_argument("source order must be 1 or 2");
    if (state.truncation() < params.order)
        throw std::invalid_argument("truncation below source order");
    state.reg().index_of(stokes_mode);
    state.reg().index_of(atomic_mode);
    const std::string s(stokes_mode), a(atomic_mode);
    std::vector<Monomial> poly{{1.0, {}}, {std::sqrt(params.chi), {{s, 1}, {a, 1}}}};
    if (params.order >= 2) poly.push_back({params.chi / 2.0, {{s, 2}, {a, 2}}});
    return apply_creation(state, poly);
}

FockState make_tmss(RegisterPtr reg, std::string_view stokes_mode, std::string_view atomic_mode,
                    const SourceParams& params, int truncation) {
    return apply_tmss(FockState::vacuum(std::move(reg), truncation), stokes_mode, atomic_mode, params);
}

FockState apply_two_mode(const FockState& state, std::string_view mode_a, std::string_view mode_b,
                         const Matrix2& u) {
    const auto& t = tables();
    const std::size_t ia = state.reg().index_of(mode_a);
    const std::size_t ib = state.reg().index_of(mode_b);
    if (ia == ib) throw std::invalid_argument("two-mode operation needs distinct modes");

    FockState out(state.register_ptr(), state.truncation());
    for (const auto& [occ, amp] : state.amplitudes()) {
        const unsigned na = occupation_at(occ, ia);
        const unsigned nb = occupation_at(occ, ib);
        const Amplitude base = amp / (t.sqrt_factorial[na] * t.sqrt_factorial[nb]);
        // (u00 a + u10 b)^na (u01 a + u11 b)^nb
        for (unsigned k = 0; k <= na; ++k) {
            const Amplitude ck = t.binomial[na][k] * ipow(u[0][0], k) * ipow(u[1][0], na - k);
            if (ck == Amplitude{}) continue;
            for (unsigned l = 0; l <= nb; ++l) {
                const Amplitude cl =
                    t.binomial[nb][l] * ipow(u[0][1], l) * ipow(u[1][1], nb - l);
                if (cl == Amplitude{}) continue;
                const unsigned oa = k + l;
                const unsigned ob = na + nb - oa;
                if (oa > static_cast<unsigned>(state.truncation()) ||
                    ob > static_cast<unsigned>(state.truncation()))
                    continue;
                Occupation next = with_occupation(with_occupation(occ, ia, oa), ib, ob);
                out.accumulate(next, base * ck * cl * t.sqrt_factorial[oa] * t.sqrt_factorial[ob]);
            }
        }
    }
    return out.pruned();
}

FockState apply_beam_splitter(const FockState& state, std::string_view mode_a,
                              std::string_view mode_b, double transmissivity) {
    check_unit_interval(transmissivity, "transmissivity");
    const ModeId& a = photonic_mode(state.reg(), mode_a);
    const ModeId& b = photonic_mode(state.reg(), mode_b);
    if (a.polarization != b.polarization)
        throw std::invalid_argument("beam splitter modes carry different polarizations");
    const double r = std::sqrt(transmissivity);
    const Amplitude s{0.0, std::sqrt(1.0 - transmissivity)};
    return apply_two_mode(state, mode_a, mode_b, Matrix2{{{r, s}, {s, r}}});
}

FockState apply_phase(const FockState& state, std::string_view mode, double phi) {
    const std::size_t idx = state.reg().index_of(mode);
    FockState out(state.register_ptr(), state.truncation());
    for (const auto& [occ, amp] : state.amplitudes())
        out.accumulate(occ, amp * std::polar(1.0, phi * occupation_at(occ, idx)));
    return out;
}

Matrix2 basis_change(Basis basis) {
    const double s = std::numbers::sqrt2 / 2.0;
    const Amplitude i{0.0, 1.0};
    switch (basis) {
        case Basis::HV: return Matrix2{{{1.0, 0.0}, {0.0, 1.0}}};
        case Basis::DIAG: return Matrix2{{{s, s}, {s, -s}}};
        case Basis::CIRC: return Matrix2{{{s, -i * s}, {s, i * s}}};
    }
    throw std::invalid_argument("unknown basis");
}

namespace {

Matrix2 adjoint(const Matrix2& u) {
    return Matrix2{{{std::conj(u[0][0]), std::conj(u[1][0])},
                    {std::conj(u[0][1]), std::conj(u[1][1])}}};
}

std::pair<Polarization, Polarization> basis_labels(Basis basis) {
    switch (basis) {
        case Basis::HV: return {Polarization::H, Polarization::V};
        case Basis::DIAG: return {Polarization::plus, Polarization::minus};
        case Basis::CIRC: return {Polarization::right, Polarization::left};
    }
    throw std::invalid_argument("unknown basis");
}

}  // namespace

FockState to_basis(const FockState& state, const Port& port, Basis basis, const Port& relabel) {
    photonic_mode(state.reg(), port.h);
    photonic_mode(state.reg(), port.v);
    FockState rotated = apply_two_mode(state, port.h, port.v, basis_change(basis));
    const auto [first, second] = basis_labels(basis);
    return rotated.relabeled(rename(state.reg(), {{state.reg().index_of(port.h), photonic(relabel.h, first)},
                                                  {state.reg().index_of(port.v), photonic(relabel.v, second)}}));
}

FockState apply_pbs(const FockState& state, const Port& in_a, const Port& in_b,
                    const Port& out_a, const Port& out_b, Basis basis) {
    for (const auto* label : {&in_a.h, &in_a.v, &in_b.h, &in_b.v}) photonic_mode(state.reg(), *label);
    const Matrix2 u = basis_change(basis);
    const Matrix2 back = adjoint(u);
    const Matrix2 swap{{{0.0, 1.0}, {1.0, 0.0}}};

    FockState s = apply_two_mode(state, in_a.h, in_a.v, u);
    s = apply_two_mode(s, in_b.h, in_b.v, u);
    s = apply_two_mode(s, in_a.v, in_b.v, swap);
    s = apply_two_mode(s, in_a.h, in_a.v, back);
    s = apply_two_mode(s, in_b.h, in_b.v, back);

    const Register& reg = state.reg();
    return s.relabeled(rename(reg, {{reg.index_of(in_a.h), photonic(out_a.h, Polarization::H)},
                                    {reg.index_of(in_a.v), photonic(out_a.v, Polarization::V)},
                                    {reg.index_of(in_b.h), photonic(out_b.h, Polarization::H)},
                                    {reg.index_of(in_b.v), photonic(out_b.v, Polarization::V)}}));
}

MixedState apply_loss(const FockState& state, std::string_view mode, double transmission) {
    check_unit_interval(transmission, "transmission");
    const auto& t = tables();
    const std::size_t idx = state.reg().index_of(mode);
    std::map<unsigned, FockState> by_lost;
    for (const auto& [occ, amp] : state.amplitudes()) {
        const unsigned n = occupation_at(occ, idx);
        for (unsigned k = 0; k <= n; ++k) {
            const double w = t.binomial[n][k] * ipow(transmission, n - k) * ipow(1.0 - transmission, k);
            if (w == 0.0) continue;
            auto it = by_lost.find(k);
            if (it == by_lost.end()) it = by_lost.emplace(k, FockState(state.register_ptr(), state.truncation())).first;
            it->second.accumulate(with_occupation(occ, idx, n - k), amp * std::sqrt(w));
        }
    }
    MixedState out;
    for (auto& [k, branch] : by_lost)
        if (!branch.empty()) out.branches.push_back(std::move(branch));
    return out;
}

MixedState apply_loss(const MixedState& state, std::string_view mode, double transmission) {
    MixedState out;
    for (const auto& b : state.branches) out.append(apply_loss(b, mode, transmission));
    return out;
}

MixedState transfer(const MixedState& state, std::string_view from, std::string_view to,
                    double efficiency) {
    MixedState moved;
    const Matrix2 swap{{{0.0, 1.0}, {1.0, 0.0}}};
    for (const auto& b : state.branches) {
        const std::size_t it = b.reg().index_of(to);
        for (const auto& [occ, amp] : b.amplitudes())
            if (occupation_at(occ, it) != 0)
                throw std::invalid_argument("transfer target '" + std::string(to) + "' is occupied");
        moved.branches.push_back(apply_two_mode(b, from, to, swap));
    }
    return apply_loss(moved, to, efficiency);
}

double DetectorModel::effective_eta2() const {
    return eta2 ? *eta2 : 1.0 - (1.0 - eta1) * (1.0 - eta1);
}

void DetectorModel::validate() const {
    check_unit_interval(eta1, "eta1");
    if (eta2) check_unit_interval(*eta2, "eta2");
}

double DetectorModel::click_probability(unsigned n) const {
    if (n == 0) return 0.0;
    if (n == 1) return eta1;
    if (n == 2) return effective_eta2();
    return 1.0 - std::pow(1.0 - eta1, n);
}

double DetectorModel::count_probability(unsigned k, unsigned n) const {
    if (k > n) return 0.0;
    return tables().binomial[n][k] * ipow(eta1, k) * ipow(1.0 - eta1, n - k);
}

std::vector<DetectionOutcome> detect(const FockState& state, std::string_view mode,
                                     const DetectorModel& detector) {
    detector.validate();
    photonic_mode(state.reg(), mode);
    const auto parts = split_on_mode(state, state.reg().index_of(mode));
    const double total = state.norm2();

    auto finish = [&](Click c, std::optional<unsigned> photons, MixedState m) {
        const double p = m.trace();
        DetectionOutcome o{c, photons, {}, total > 0.0 ? p / total : 0.0};
        if (p > 0.0) o.conditional = m.scaled(1.0 / p);
        return o;
    };

    std::vector<DetectionOutcome> out;
    if (!detector.number_resolving) {
        MixedState none, click;
        for (const auto& [n, part] : parts) {
            const double c = detector.click_probability(n);
            if (c < 1.0) none.branches.push_back(part.scaled(std::sqrt(1.0 - c)));
            if (c > 0.0) click.branches.push_back(part.scaled(std::sqrt(c)));
        }
        out.push_back(finish(Click::no_click, std::nullopt, std::move(none)));
        out.push_back(finish(Click::click, std::nullopt, std::move(click)));
        return out;
    }
    unsigned max_n = 0;
    for (const auto& [n, part] : parts) max_n = std::max(max_n, n);
    for (unsigned k = 0; k <= max_n; ++k) {
        MixedState m;
        for (const auto& [n, part] : parts) {
            const double w = detector.count_probability(k, n);
            if (w > 0.0) m.branches.push_back(part.scaled(std::sqrt(w)));
        }
        out.push_back(finish(k > 0 ? Click::click : Click::no_click, k, std::move(m)));
    }
    return out;
}

ClickPattern ClickPattern::all_of(std::initializer_list<std::string> detectors) {
    ClickPattern p;
    for (const auto& d : detectors) p.groups.push_back({d});
    return p;
}

ConditionalResult condition_on_pattern(const MixedState& state,
                                       std::span<const std::string> detector_modes,
                                       const ClickPattern& pattern,
                                       const DetectorModel& detector) {
    detector.validate();
    const std::size_t nd = detector_modes.size();
    // group index per detector, -1 when unconstrained
    std::vector<int> group_of(nd, -1);
    for (std::size_t g = 0; g < pattern.groups.size(); ++g) {
        if (pattern.groups[g].empty()) throw std::invalid_argument("empty click group");
        for (const auto& label : pattern.groups[g]) {
            auto it = std::find(detector_modes.begin(), detector_modes.end(), label);
            if (it == detector_modes.end())
                throw std::invalid_argument("pattern names '" + label + "' which is not a detector mode");
            auto& slot = group_of[static_cast<std::size_t>(it - detector_modes.begin())];
            if (slot != -1) throw std::invalid_argument("detector '" + label + "' appears in two groups");
            slot = static_cast<int>(g);
        }
    }

    auto weight = [&](const std::vector<unsigned>& counts) {
        double p = 1.0;
        for (std::size_t g = 0; g < pattern.groups.size(); ++g) {
            if (detector.number_resolving) {
                // exactly one registered photon within the group
                double q = 0.0;
                for (std::size_t d = 0; d < nd; ++d) {
                    if (group_of[d] != static_cast<int>(g)) continue;
                    double term = detector.count_probability(1, counts[d]);
                    for (std::size_t e = 0; e < nd; ++e)
                        if (e != d && group_of[e] == static_cast<int>(g))
                            term *= detector.count_probability(0, counts[e]);
                    q += term;
                }
                p *= q;
            } else {
                double silent = 1.0;
                for (std::size_t d = 0; d < nd; ++d)
                    if (group_of[d] == static_cast<int>(g)) silent *= 1.0 - detector.click_probability(counts[d]);
                p *= 1.0 - silent;
            }
        }
        if (detector.number_resolving)
            for (std::size_t d = 0; d < nd; ++d)
                if (group_of[d] == -1) p *= detector.count_probability(0, counts[d]);
        return p;
    };

    ConditionalResult result;
    const double input_trace = state.trace();
    if (input_trace <= 0.0) return result;

    double total = 0.0;
    MixedState kept;
    for (const auto& branch : state.branches) {
        const Register& reg = branch.reg();
        std::vector<std::size_t> ids;
        for (const auto& label : detector_modes) {
            const std::size_t id = reg.index_of(label);
            if (reg[id].kind != ModeKind::photonic)
                throw std::invalid_argument("detector mode '" + label + "' is not photonic");
            ids.push_back(id);
        }
        RegisterPtr reduced = without_modes(reg, ids);
        std::vector<std::size_t> rest;
        for (std::size_t m = 0; m < reg.size(); ++m)
            if (std::find(ids.begin(), ids.end(), m) == ids.end()) rest.push_back(m);

        std::map<Occupation, FockState> by_key;  // detector occupations packed as key
        for (const auto& [occ, amp] : branch.amplitudes()) {
            Occupation key = 0, remaining = 0;
            for (std::size_t d = 0; d < ids.size(); ++d) key = with_occupation(key, d, occupation_at(occ, ids[d]));
            for (std::size_t r = 0; r < rest.size(); ++r)
                remaining = with_occupation(remaining, r, occupation_at(occ, rest[r]));
            auto it = by_key.find(key);
            if (it == by_key.end()) it = by_key.emplace(key, FockState(reduced, branch.truncation())).first;
            it->second.accumulate(remaining, amp);
        }
        for (auto& [key, part] : by_key) {
            std::vector<unsigned> counts(nd);
            for (std::size_t d = 0; d < nd; ++d) counts[d] = occupation_at(key, d);
            const double w = weight(counts);
            if (w <= 0.0) continue;
            FockState s = part.scaled(std::sqrt(w)).pruned();
            const double p = s.norm2();
            if (p <= 0.0) continue;
            total += p;
            kept.branches.push_back(std::move(s));
        }
    }
    if (total <= 0.0) return result;
    result.probability = total / input_trace;
    result.state = kept.scaled(1.0 / total);
    return result;
}

}  // namespace qrep::fock
