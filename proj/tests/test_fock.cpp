#include "doctest.h"
#include "qrep/fock.hpp"

#include <cmath>
#include <numbers>

using namespace qrep::fock;

namespace {

RegisterPtr two_modes() {
    return make_register({photonic("a", Polarization::H), photonic("b", Polarization::H)});
}

RegisterPtr two_ports() {
    return make_register({photonic("ah", Polarization::H), photonic("av", Polarization::V),
                          photonic("bh", Polarization::H), photonic("bv", Polarization::V)});
}

FockState one_photon(RegisterPtr reg, const std::string& mode, int trunc = 2) {
    return apply_creation(FockState::vacuum(std::move(reg), trunc), {{1.0, {{mode, 1}}}});
}

constexpr double kTol = 1e-12;

}  // namespace

TEST_CASE("register rejects duplicate labels and polarized atoms") {
    CHECK_THROWS(make_register({photonic("a", Polarization::H), photonic("a", Polarization::V)}));
    CHECK_THROWS(make_register({ModeId{"s", ModeKind::atomic, Polarization::H}}));
    auto reg = two_modes();
    CHECK(reg->index_of("b") == 1);
    CHECK_THROWS(reg->index_of("c"));
}

TEST_CASE("source expansion") {
    auto reg = make_register({photonic("a", Polarization::none), atomic("s")});
    SUBCASE("chi=0 is vacuum") {
        auto s = make_tmss(reg, "a", "s", {0.0, 2});
        CHECK(s.amplitudes().size() == 1);
        CHECK(std::abs(s.amplitude(0) - 1.0) < kTol);
    }
    SUBCASE("first order") {
        auto s = make_tmss(reg, "a", "s", {0.01, 1});
        CHECK(std::abs(s.amplitude({{"a", 1}, {"s", 1}}) - 0.1) < kTol);
        CHECK(std::abs(s.amplitude({{"a", 2}, {"s", 2}})) < kTol);
    }
    SUBCASE("second order") {
        // (chi/2)(S+ a+)^2|0> puts chi = 0.01 on the normalized |2,2>, i.e. operator coefficient 0.005
        auto s = make_tmss(reg, "a", "s", {0.01, 2});
        CHECK(std::abs(s.amplitude({{"a", 2}, {"s", 2}}) - 0.01) < kTol);
        auto op = apply_creation(FockState::vacuum(reg), {{0.005, {{"a", 2}, {"s", 2}}}});
        CHECK(std::abs(op.amplitude({{"a", 2}, {"s", 2}}) - 0.01) < kTol);
    }
    CHECK_THROWS(make_tmss(reg, "a", "s", {0.01, 2}, 1));
    CHECK_THROWS(make_tmss(reg, "a", "x", {0.01, 1}));
}

TEST_CASE("beam splitter") {
    auto reg = two_modes();
    SUBCASE("single photon 50/50") {
        auto s = apply_beam_splitter(one_photon(reg, "a"), "a", "b", 0.5);
        const double h = std::numbers::sqrt2 / 2;
        CHECK(std::abs(s.amplitude({{"a", 1}}) - Amplitude(h, 0)) < kTol);
        CHECK(std::abs(s.amplitude({{"b", 1}}) - Amplitude(0, h)) < kTol);
    }
    SUBCASE("Hong-Ou-Mandel") {
        auto in = apply_creation(FockState::vacuum(reg), {{1.0, {{"a", 1}, {"b", 1}}}});
        auto s = apply_beam_splitter(in, "a", "b", 0.5);
        CHECK(std::abs(s.amplitude({{"a", 1}, {"b", 1}})) < kTol);
        CHECK(std::abs(s.norm2() - 1.0) < kTol);
        CHECK(std::norm(s.amplitude({{"a", 2}})) == doctest::Approx(0.5));
    }
    SUBCASE("T=1 is identity") {
        auto in = apply_creation(FockState::vacuum(reg), {{0.6, {{"a", 1}}}, {0.8, {{"b", 2}}}});
        auto s = apply_beam_splitter(in, "a", "b", 1.0);
        CHECK(s.amplitudes() == in.amplitudes());
    }
    SUBCASE("kind mismatch") {
        auto r = make_register({photonic("a", Polarization::H), atomic("s")});
        CHECK_THROWS(apply_beam_splitter(FockState::vacuum(r), "a", "s", 0.5));
    }
}

TEST_CASE("polarizing beam splitter") {
    auto reg = two_ports();
    const Port a{"ah", "av"}, b{"bh", "bv"}, x{"xh", "xv"}, y{"yh", "yv"};
    SUBCASE("H through HV transmits") {
        auto s = apply_pbs(one_photon(reg, "ah"), a, b, x, y, Basis::HV);
        CHECK(std::abs(s.amplitude({{"xh", 1}}) - 1.0) < kTol);
    }
    SUBCASE("H through DIAG splits") {
        auto s = apply_pbs(one_photon(reg, "ah"), a, b, x, y, Basis::DIAG);
        // transmitted |+> stays in x, reflected |-> goes to y
        CHECK(std::norm(s.amplitude({{"xh", 1}})) == doctest::Approx(0.25));
        CHECK(std::norm(s.amplitude({{"xv", 1}})) == doctest::Approx(0.25));
        CHECK(std::norm(s.amplitude({{"yh", 1}})) == doctest::Approx(0.25));
        CHECK(std::norm(s.amplitude({{"yv", 1}})) == doctest::Approx(0.25));
        auto plus = to_basis(s, x, Basis::DIAG, {"xp", "xm"});
        auto minus = to_basis(s, y, Basis::DIAG, {"yp", "ym"});
        CHECK(std::norm(plus.amplitude({{"xp", 1}})) == doctest::Approx(0.5));
        CHECK(std::abs(plus.amplitude({{"xm", 1}})) < kTol);
        CHECK(std::norm(minus.amplitude({{"ym", 1}})) == doctest::Approx(0.5));
    }
    SUBCASE("V into circular basis") {
        auto s = to_basis(one_photon(reg, "av"), a, Basis::CIRC, {"r", "l"});
        const Amplitude r = s.amplitude({{"r", 1}}), l = s.amplitude({{"l", 1}});
        CHECK(std::abs(r) == doctest::Approx(std::abs(l)));
        CHECK(std::abs(r / l + 1.0) < kTol);  // -i/sqrt2 vs +i/sqrt2
        CHECK(std::abs(r - Amplitude(0, -std::numbers::sqrt2 / 2)) < kTol);
    }
    SUBCASE("unitary and round trip") {
        auto in = apply_creation(FockState::vacuum(reg, 3),
                                 {{0.5, {{"ah", 1}, {"bv", 1}}}, {Amplitude(0, 0.5), {{"av", 2}}},
                                  {0.5, {{"bh", 1}, {"bv", 1}}}, {0.5, {}}});
        for (auto basis : {Basis::HV, Basis::DIAG, Basis::CIRC}) {
            auto s = apply_pbs(in, a, b, a, b, basis);
            CHECK(std::abs(s.norm2() - in.norm2()) < kTol);
            auto back = apply_pbs(s, a, b, a, b, basis);  // a PBS is its own inverse
            for (const auto& [occ, amp] : in.amplitudes()) CHECK(std::abs(back.amplitude(occ) - amp) < kTol);
        }
        auto d = to_basis(in, a, Basis::DIAG, a);
        auto rt = apply_two_mode(d, "ah", "av", basis_change(Basis::DIAG));
        for (const auto& [occ, amp] : in.amplitudes()) CHECK(std::abs(rt.amplitude(occ) - amp) < kTol);
    }
}

TEST_CASE("loss channel") {
    auto reg = two_modes();
    SUBCASE("lossless keeps a single branch") {
        auto m = apply_loss(one_photon(reg, "a"), "a", 1.0);
        REQUIRE(m.branches.size() == 1);
        CHECK(m.branches[0].amplitudes() == one_photon(reg, "a").amplitudes());
    }
    SUBCASE("one photon") {
        auto m = apply_loss(one_photon(reg, "a"), "a", 0.7);
        REQUIRE(m.branches.size() == 2);
        CHECK(m.branches[0].norm2() == doctest::Approx(0.7));
        CHECK(m.branches[1].norm2() == doctest::Approx(0.3));
    }
    SUBCASE("two photons") {
        auto in = apply_creation(FockState::vacuum(reg), {{std::sqrt(0.5), {{"a", 2}}}});
        const double eta = 0.8;
        auto m = apply_loss(in, "a", eta);
        REQUIRE(m.branches.size() == 3);
        CHECK(m.branches[0].norm2() == doctest::Approx(eta * eta));
        CHECK(m.branches[1].norm2() == doctest::Approx(2 * eta * (1 - eta)));
        CHECK(m.branches[2].norm2() == doctest::Approx((1 - eta) * (1 - eta)));
        CHECK(m.trace() == doctest::Approx(1.0));
    }
    CHECK_THROWS(apply_loss(one_photon(reg, "a"), "a", 1.5));
}

TEST_CASE("detector POVM") {
    auto reg = two_modes();
    DetectorModel d{0.9, std::nullopt, false};
    CHECK(d.click_probability(2) == doctest::Approx(0.99));
    CHECK(d.click_probability(3) == doctest::Approx(0.999));

    auto vac = detect(FockState::vacuum(reg), "a", d);
    CHECK(vac[0].outcome == Click::no_click);
    CHECK(vac[0].probability == doctest::Approx(1.0));
    CHECK(vac[1].probability == doctest::Approx(0.0));

    DetectorModel d99{0.99, std::nullopt, false};
    auto one = detect(one_photon(reg, "a"), "a", d99);
    CHECK(one[1].probability == doctest::Approx(0.99));
    CHECK(one[1].conditional.trace() == doctest::Approx(1.0));

    auto in = apply_creation(FockState::vacuum(reg), {{0.6, {{"a", 1}, {"b", 1}}}, {0.8, {{"a", 2}}}});
    auto outs = detect(in, "a", DetectorModel{0.7, std::nullopt, true});
    double total = 0;
    for (const auto& o : outs) total += o.probability;
    CHECK(total == doctest::Approx(1.0));
    CHECK(outs.size() == 3);
    CHECK(outs[2].photons == 2u);
}

TEST_CASE("conditioning on click patterns") {
    DetectorModel ideal{1.0, std::nullopt, false};
    SUBCASE("vacuum never clicks") {
        auto reg = two_modes();
        MixedState m{{FockState::vacuum(reg)}};
        std::vector<std::string> dets{"a", "b"};
        auto r = condition_on_pattern(m, dets, ClickPattern::all_of({"a"}), ideal);
        CHECK(r.probability == 0.0);
        CHECK(r.state.branches.empty());
    }
    SUBCASE("herald a DLCZ excitation") {
        auto reg = make_register({photonic("a", Polarization::none), atomic("s")});
        const double chi = 0.01;
        MixedState m{{make_tmss(reg, "a", "s", {chi, 1})}};
        std::vector<std::string> dets{"a"};
        auto r = condition_on_pattern(m, dets, ClickPattern::all_of({"a"}), ideal);
        CHECK(r.probability == doctest::Approx(chi / (1 + chi)));
        REQUIRE(r.state.branches.size() == 1);
        CHECK(std::abs(r.state.branches[0].amplitude({{"s", 1}}) - 1.0) < kTol);
    }
    SUBCASE("two-photon interference coincidence") {
        // psi+ photons leave the 50/50 beam splitter together; psi- always splits.
        auto reg = two_ports();
        std::vector<std::string> dets{"ah", "av", "bh", "bv"};
        ClickPattern both;
        both.groups = {{"ah", "av"}, {"bh", "bv"}};
        for (double sign : {1.0, -1.0}) {
            auto bell = apply_creation(FockState::vacuum(reg),
                                       {{std::numbers::sqrt2 / 2, {{"ah", 1}, {"bv", 1}}},
                                        {sign * std::numbers::sqrt2 / 2, {{"av", 1}, {"bh", 1}}}});
            auto s = apply_beam_splitter(bell, "ah", "bh", 0.5);
            s = apply_beam_splitter(s, "av", "bv", 0.5);
            auto r = condition_on_pattern(MixedState{{s}}, dets, both, ideal);
            CHECK(r.probability == doctest::Approx(sign > 0 ? 0.0 : 1.0));
        }
    }
    SUBCASE("pattern must name detector modes") {
        auto reg = two_modes();
        std::vector<std::string> dets{"a"};
        CHECK_THROWS(condition_on_pattern(MixedState{{FockState::vacuum(reg)}}, dets,
                                          ClickPattern::all_of({"b"}), ideal));
    }
}
