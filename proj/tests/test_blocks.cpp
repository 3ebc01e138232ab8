#include "doctest.h"
#include "qrep/ensemble_model.hpp"
#include "qrep/optical_blocks.hpp"
#include "qrep/verify.hpp"

#include <cmath>
#include <sstream>

using namespace qrep;
using namespace qrep::blocks;

namespace {

fock::DetectorModel ideal_resolving() { return {1.0, std::nullopt, true}; }
fock::DetectorModel ideal_threshold() { return {1.0, std::nullopt, false}; }

void check_coefficients_sum(const BlockResult& r) {
    CHECK(std::abs(r.coefficients.total() - r.probability) < 1e-10);
    CHECK(r.coefficients.bell >= 0.0);
    CHECK(r.coefficients.one >= 0.0);
    CHECK(r.coefficients.vacuum >= 0.0);
    CHECK(r.coefficients.spurious >= 0.0);
}

}  // namespace

TEST_CASE("detection patterns") {
    CHECK(DetectionPattern::parse("D1D4") == DetectionPattern{Detector::D1, Detector::D4});
    CHECK(DetectionPattern::parse("D4^D2") == DetectionPattern{Detector::D2, Detector::D4});
    CHECK_THROWS(DetectionPattern::parse("D1D2"));
    CHECK_THROWS(DetectionPattern::parse("D3&D4"));
    CHECK_THROWS(DetectionPattern::parse("D1"));
    GenerationOptions g;
    g.pattern = {Detector::D1, Detector::D2};
    CHECK_THROWS(bsm1_generate(g));
}

TEST_CASE("generation heralds the printed state") {
    for (const auto& p : accepted_patterns()) {
        GenerationOptions o;
        o.pattern = p;
        const auto r = bsm1_generate(o);
        const double printed[] = {0.5, 0.5, 0.25, 0.25, -0.25, -0.25};
        for (int k = 0; k < 6; ++k) CHECK(std::abs(r.operator_coefficients[k] - printed[k]) < 1e-10);
        CHECK(r.bell_operator_weight / r.spurious_operator_weight == doctest::Approx(2.0));
        // In probability the two sectors carry equal weight since (S+)^2|0> = sqrt2 |2>.
        CHECK(r.block.coefficients.bell == doctest::Approx(r.block.coefficients.spurious));
        CHECK(r.block.bell_fidelity == doctest::Approx(1.0));
        check_coefficients_sum(r.block);
    }
}

TEST_CASE("generation probability scales as chi^2") {
    GenerationOptions o;
    o.chi = 1e-6;
    const double a = bsm1_generate(o).block.probability / (o.chi * o.chi);
    o.chi = 1e-5;
    const double b = bsm1_generate(o).block.probability / (o.chi * o.chi);
    CHECK(a == doctest::Approx(b).epsilon(1e-3));
    // a blocked arm removes the Bell sector; the open arm's double excitations still coincide
    o.transmission = {0.0, 1.0};
    const auto blocked = bsm1_generate(o).block;
    CHECK(blocked.coefficients.bell == 0.0);
    CHECK(blocked.coefficients.spurious == doctest::Approx(blocked.probability));
    CHECK(blocked.probability / (o.chi * o.chi) == doctest::Approx(0.25).epsilon(1e-3));
    o.transmission = {0.6, 0.6};
    const double lossy = bsm1_generate(o).block.probability / (o.chi * o.chi);
    CHECK(lossy == doctest::Approx(b * 0.36).epsilon(1e-3));
}

TEST_CASE("phase plates leave sector weights unchanged") {
    GenerationOptions o;
    o.transmission = {0.7, 0.9};
    o.detector = {0.9, std::nullopt, false};
    o.leading_order = false;
    o.chi = 1e-3;
    const auto ref = bsm1_generate(o).block;
    o.phase = {0.3, 0.7};
    const auto r = bsm1_generate(o).block;
    CHECK(std::abs(r.coefficients.bell - ref.coefficients.bell) < 1e-12);
    CHECK(std::abs(r.coefficients.one - ref.coefficients.one) < 1e-12);
    CHECK(std::abs(r.coefficients.vacuum - ref.coefficients.vacuum) < 1e-12);
    CHECK(std::abs(r.coefficients.spurious - ref.coefficients.spurious) < 1e-12);
}

TEST_CASE("swapping order removes spurious coincidences") {
    SwapOptions o;
    o.detector = ideal_resolving();
    for (const auto& p : accepted_patterns()) {
        o.pattern = p;
        o.ordering = PbsOrdering::hv_then_diag;
        const auto good = bsm2_swap(o);
        CHECK(good.coefficients.spurious <= 1e-12);
        CHECK(good.probability == doctest::Approx(1.0 / 32));
        CHECK(std::abs(good.bell_fidelity - 1.0) < 1e-10);
        o.ordering = PbsOrdering::diag_then_hv;
        const auto bad = bsm2_swap(o);
        CHECK(bad.coefficients.spurious > 1e-3);
    }
}

TEST_CASE("swap coefficients at the ideal point and with no retrieval") {
    SwapOptions o;
    o.detector = ideal_threshold();
    const auto r = bsm2_swap(o);
    CHECK(r.coefficients.bell == doctest::Approx(1.0 / 32));
    CHECK(r.coefficients.one == doctest::Approx(3.0 / 64));
    CHECK(r.coefficients.vacuum == doctest::Approx(5.0 / 256));
    check_coefficients_sum(r);
    o.eta_r = 0.0;
    const auto z = bsm2_swap(o);
    CHECK(z.probability == 0.0);
    CHECK(z.coefficients.total() == 0.0);
}

TEST_CASE("pattern symmetry of swapping") {
    SwapOptions o;
    o.eta_r = 0.9;
    o.detector = {0.8, 0.9, false};
    const double ref = bsm2_swap(o).probability;
    for (const auto& p : accepted_patterns()) {
        o.pattern = p;
        const auto r = bsm2_swap(o);
        CHECK(r.probability == doctest::Approx(ref).epsilon(1e-12));
        CHECK(r.bell_fidelity == doctest::Approx(1.0));
    }
}

TEST_CASE("entangler") {
    EntanglerOptions o;
    o.detector = ideal_resolving();
    double total = 0.0;
    for (const auto& p : accepted_patterns()) {
        o.pattern = p;
        const auto r = entangler_run(o);
        total += r.probability;
        CHECK(r.bell_fidelity == doctest::Approx(1.0));
    }
    CHECK(std::abs(total - 0.125) < 1e-12);
    o.p_r = 0.0;
    CHECK(entangler_run(o).probability == 0.0);

    o.p_r = 0.8;
    o.detector = {0.95, std::nullopt, false};
    o.pattern = accepted_patterns()[0];
    const auto r = entangler_run(o);
    const auto f = ensemble::entangler_coefficients(0.8, 0.95, 1 - 0.05 * 0.05);
    CHECK(std::abs(r.coefficients.bell - f.p2) < 1e-10);
    CHECK(std::abs(r.coefficients.one - f.p1) < 1e-10);
    CHECK(std::abs(r.coefficients.vacuum - f.p0) < 1e-10);
    const auto printed = ensemble::entangler_coefficients(0.8, 0.95, 1 - 0.05 * 0.05, ensemble::EntanglerFormula::printed);
    CHECK(std::abs(r.coefficients.vacuum - printed.p0) > 1e-4);
}

TEST_CASE("purification") {
    for (double F : {1.0, 0.5, 0.88}) {
        PurificationOptions o;
        o.F = F;
        const auto r = purification_run(o);
        CHECK(r.bell_fidelity == doctest::Approx(ensemble::purified_fidelity(F)).epsilon(1e-10));
        check_coefficients_sum(r);
    }
    PurificationOptions o;
    o.F = 0.88;
    CHECK(purification_run(o).bell_fidelity == doctest::Approx(0.98175).epsilon(1e-5));
    o.F = 1.2;
    CHECK_THROWS(purification_run(o));
}

TEST_CASE("formula and oracle agree on the default grids") {
    verify::Options opts;
    const auto report = verify::run(opts);
    CHECK(report.passed);
    CHECK(report.max_deviation < 1e-10);
    if (report.first_failure) MESSAGE(report.first_failure->block << " " << report.first_failure->cell);

    opts.corrupt_formula = true;
    opts.grid.efficiencies = {0.9};
    const auto bad = verify::run(opts);
    CHECK_FALSE(bad.passed);
    REQUIRE(bad.first_failure);
    CHECK(bad.first_failure->block == "swap");

    opts.corrupt_formula = false;
    opts.grid.efficiencies = {0.0, 1.0};
    CHECK(verify::run(opts).passed);
}

TEST_CASE("parallel and serial verification agree exactly") {
    verify::Options a;
    a.grid.efficiencies = {0.5, 1.0};
    a.parallel = true;
    verify::Options b = a;
    b.parallel = false;
    std::ostringstream sa, sb;
    verify::write_csv(sa, verify::run(a));
    verify::write_csv(sb, verify::run(b));
    CHECK(sa.str() == sb.str());
}

TEST_CASE("coefficient table") {
    verify::GridSpec g;
    g.efficiencies = {1.0};
    std::ostringstream out;
    write_coefficient_csv(out, verify::swap_table(g));
    CHECK(out.str().rfind("eta_r,eta1,eta2,p2,p1,p0,source\n", 0) == 0);
    CHECK(out.str().find(",formula\n") != std::string::npos);
    CHECK(out.str().find(",oracle\n") != std::string::npos);
}
