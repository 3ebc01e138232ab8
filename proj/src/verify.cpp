#include "qrep/verify.hpp"

#include "qrep/ensemble_model.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qrep::verify {
namespace {

using blocks::accepted_patterns;
using fock::DetectorModel;

double default_eta2(double eta1) { return 1.0 - (1.0 - eta1) * (1.0 - eta1); }

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

void push(std::vector<Comparison>& out, const std::string& block, const std::string& cell,
          const std::string& quantity, double formula, double oracle) {
    out.push_back({block, cell, quantity, formula, oracle});
}

std::vector<Comparison> swap_cell(double er, double e1, double e2, bool corrupt) {
    std::vector<Comparison> out;
    auto f = ensemble::swap_coefficients({er, e1, e2});
    if (corrupt) f.p2 *= 1.0 + 1e-6;
    for (const auto& p : accepted_patterns()) {
        blocks::SwapOptions o;
        o.eta_r = er;
        o.detector = DetectorModel{e1, e2, false};
        o.pattern = p;
        const auto r = blocks::bsm2_swap(o);
        const std::string cell = "eta_r=" + fmt(er) + ";eta1=" + fmt(e1) + ";eta2=" + fmt(e2) + ";pattern=" + p.name();
        push(out, "swap", cell, "p2", f.p2, r.coefficients.bell);
        push(out, "swap", cell, "p1", f.p1, r.coefficients.one);
        push(out, "swap", cell, "p0", f.p0, r.coefficients.vacuum);
        push(out, "swap", cell, "spurious", 0.0, r.coefficients.spurious);
    }
    return out;
}

std::vector<Comparison> entangler_cell(double pr, double e1) {
    std::vector<Comparison> out;
    const double e2 = default_eta2(e1);
    const auto f = ensemble::entangler_coefficients(pr, e1, e2);
    for (const auto& p : accepted_patterns()) {
        blocks::EntanglerOptions o;
        o.p_r = pr;
        o.detector = DetectorModel{e1, std::nullopt, false};
        o.pattern = p;
        const auto r = blocks::entangler_run(o);
        const std::string cell = "p_r=" + fmt(pr) + ";eta1=" + fmt(e1) + ";eta2=" + fmt(e2) + ";pattern=" + p.name();
        push(out, "entangler", cell, "p2", f.p2, r.coefficients.bell);
        push(out, "entangler", cell, "p1", f.p1, r.coefficients.one);
        push(out, "entangler", cell, "p0", f.p0, r.coefficients.vacuum);
        push(out, "entangler", cell, "spurious", 0.0, r.coefficients.spurious);
    }
    return out;
}

struct PurificationSetting {
    double p2, p1, p0, eta_r, eta1;
};

constexpr PurificationSetting kPurificationSettings[] = {
    {1.0, 0.0, 0.0, 1.0, 1.0},
    {0.7, 0.2, 0.1, 0.9, 0.95},
    {0.5, 0.3, 0.2, 0.98, 0.99},
};

std::vector<Comparison> purification_cell(double F, const PurificationSetting& s) {
    std::vector<Comparison> out;
    const double e2 = default_eta2(s.eta1);
    ensemble::MixtureState m{s.p2, s.p1, s.p0, 0.0, 0.0, F};
    const auto f = ensemble::purification_coefficients(m, F, {s.eta_r, s.eta1, e2});
    blocks::PurificationOptions o;
    o.p2 = s.p2;
    o.p1 = s.p1;
    o.p0 = s.p0;
    o.F = F;
    o.eta_r = s.eta_r;
    o.detector = DetectorModel{s.eta1, std::nullopt, false};
    const auto r = blocks::purification_run(o);
    const std::string cell = "F=" + fmt(F) + ";p2m=" + fmt(s.p2) + ";p1m=" + fmt(s.p1) + ";p0m=" + fmt(s.p0) +
                             ";eta_r=" + fmt(s.eta_r) + ";eta1=" + fmt(s.eta1);
    push(out, "purification", cell, "p2", f.coefficients.p2, r.coefficients.bell);
    push(out, "purification", cell, "p1", f.coefficients.p1, r.coefficients.one);
    push(out, "purification", cell, "p0", f.coefficients.p0, r.coefficients.vacuum);
    push(out, "purification", cell, "F'", f.F_prime, r.bell_fidelity);
    return out;
}

std::vector<Comparison> generation_cell(const blocks::DetectionPattern& p) {
    std::vector<Comparison> out;
    blocks::GenerationOptions o;
    o.chi = 1e-6;
    o.pattern = p;
    const auto r = blocks::bsm1_generate(o);
    const std::string cell = "chi=1e-06;pattern=" + p.name();
    static const char* names[] = {"uA.uB", "dA.dB", "uA^2", "uB^2", "dA^2", "dB^2"};
    static const double printed[] = {0.5, 0.5, 0.25, 0.25, -0.25, -0.25};
    for (int k = 0; k < 6; ++k) push(out, "generation", cell, names[k], printed[k], r.operator_coefficients[k].real());
    for (int k = 0; k < 6; ++k)
        push(out, "generation", cell, std::string(names[k]) + ".imag", 0.0, r.operator_coefficients[k].imag());
    push(out, "generation", cell, "ratio", 2.0, r.bell_operator_weight / r.spurious_operator_weight);
    return out;
}

}  // namespace

double Comparison::deviation() const { return std::abs(formula - oracle); }

GridSpec GridSpec::parse(std::string_view efficiencies) {
    GridSpec g;
    g.efficiencies.clear();
    std::string item;
    std::istringstream in{std::string(efficiencies)};
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("grid value '" + item + "' is not a number");
        }
        if (used != item.size()) throw std::invalid_argument("grid value '" + item + "' is not a number");
        g.efficiencies.push_back(v);
    }
    g.validate();
    return g;
}

void GridSpec::validate() const {
    if (efficiencies.empty()) throw std::invalid_argument("grid must contain at least one value");
    for (const auto* list : {&efficiencies, &source_probs, &entangler_eta1, &fidelities})
        for (double v : *list)
            if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("grid value " + fmt(v) + " outside [0,1]");
}

Report run(const Options& options) {
    options.grid.validate();
    const GridSpec& g = options.grid;
    std::vector<std::function<std::vector<Comparison>()>> tasks;
    for (double er : g.efficiencies)
        for (double e1 : g.efficiencies)
            for (double e2 : g.efficiencies)
                tasks.emplace_back([=, c = options.corrupt_formula] { return swap_cell(er, e1, e2, c); });
    for (double pr : g.source_probs)
        for (double e1 : g.entangler_eta1) tasks.emplace_back([=] { return entangler_cell(pr, e1); });
    for (double F : g.fidelities)
        for (const auto& s : kPurificationSettings) tasks.emplace_back([=] { return purification_cell(F, s); });
    for (const auto& p : accepted_patterns()) tasks.emplace_back([=] { return generation_cell(p); });

    std::vector<std::vector<Comparison>> slots(tasks.size());
    const long n = static_cast<long>(tasks.size());
    if (options.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < n; ++i) slots[i] = tasks[i]();
    } else {
        for (long i = 0; i < n; ++i) slots[i] = tasks[i]();
    }

    Report report;
    for (auto& s : slots)
        for (auto& c : s) {
            report.max_deviation = std::max(report.max_deviation, c.deviation());
            if (!(c.deviation() <= options.tolerance) && !report.first_failure) report.first_failure = c;
            report.rows.push_back(std::move(c));
        }
    report.passed = !report.first_failure;
    return report;
}

void write_csv(std::ostream& out, const Report& report) {
    const auto old = out.precision(17);
    out << "block,cell,quantity,formula,oracle,deviation\n";
    for (const auto& c : report.rows)
        out << c.block << ",\"" << c.cell << "\"," << c.quantity << ',' << c.formula << ',' << c.oracle << ','
            << c.deviation() << '\n';
    out.precision(old);
}

std::vector<blocks::CoefficientRow> swap_table(const GridSpec& grid) {
    grid.validate();
    std::vector<blocks::CoefficientRow> rows;
    for (double er : grid.efficiencies)
        for (double e1 : grid.efficiencies)
            for (double e2 : grid.efficiencies) {
                const auto f = ensemble::swap_coefficients({er, e1, e2});
                rows.push_back({er, e1, e2, f.p2, f.p1, f.p0, "formula"});
                blocks::SwapOptions o;
                o.eta_r = er;
                o.detector = DetectorModel{e1, e2, false};
                const auto r = blocks::bsm2_swap(o);
                rows.push_back({er, e1, e2, r.coefficients.bell, r.coefficients.one, r.coefficients.vacuum, "oracle"});
            }
    return rows;
}

}  // namespace qrep::verify
