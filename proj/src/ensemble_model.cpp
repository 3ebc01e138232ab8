#include "qrep/ensemble_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qrep::ensemble {
namespace {

void check_unit(double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

void check_nonneg(double x, const char* name) {
    if (!(x >= 0.0)) throw std::invalid_argument(std::string(name) + " must be non-negative");
}

void require_normalized(const MixtureState& s) {
    if (std::abs(s.total() - 1.0) > 1e-9) throw std::invalid_argument("mixture state is not normalized");
}

}  // namespace

void MixtureState::validate() const {
    check_nonneg(p2, "p2");
    check_nonneg(p1, "p1");
    check_nonneg(p0, "p0");
    check_nonneg(p2_hi, "p2_hi");
    check_nonneg(p3_hi, "p3_hi");
    check_unit(F, "F");
    if (level < 0) throw std::invalid_argument("level must be non-negative");
    if (normalized && std::abs(total() - 1.0) > 1e-12)
        throw std::invalid_argument("normalized mixture does not sum to 1");
}

MixtureState normalize(const MixtureState& state) {
    const double t = state.total();
    if (!(t > 0.0)) throw std::invalid_argument("cannot normalize a mixture with zero total weight");
    MixtureState out = state;
    out.p2 /= t;
    out.p1 /= t;
    out.p0 /= t;
    out.p2_hi /= t;
    out.p3_hi /= t;
    out.normalized = true;
    return out;
}

EfficiencyParams EfficiencyParams::with_default_eta2(double eta_r, double eta1) {
    return {eta_r, eta1, 1.0 - (1.0 - eta1) * (1.0 - eta1)};
}

void EfficiencyParams::validate() const {
    check_unit(eta_r, "eta_r");
    check_unit(eta1, "eta1");
    check_unit(eta2, "eta2");
}

Coefficients swap_coefficients(const EfficiencyParams& params) {
    params.validate();
    const double r = params.eta_r, e1 = params.eta1, e2 = params.eta2;
    Coefficients c;
    c.p2 = r * r * e1 * e1 / 32.0;
    c.p1 = r * r * (1 - r) * e1 * e1 / 16.0 + r * r * r / 32.0 * (e1 * e2 / 2.0 + e1 * e1);
    c.p0 = r * r * r / 32.0 * (1 - r) * (0.5 * e1 * e2 + e1 * e1) +
           r * r * (1 - r) * (1 - r) * e1 * e1 / 32.0 +
           r * r * r * r / 64.0 * (0.25 * e2 * e2 + e1 * e1);
    c.success = c.p2 + c.p1 + c.p0;
    return c;
}

ConnectResult connect_step(const MixtureState& previous, double chi, const EfficiencyParams& params,
                           const HigherOrderConstants& constants) {
    previous.validate();
    params.validate();
    require_normalized(previous);
    const double eta = params.eta();
    const double p2 = previous.p2, p1 = previous.p1, p0 = previous.p0;
    const double q2 = previous.p2_hi, q3 = previous.p3_hi;
    const double c = constants.bracket, s = constants.spurious;

    MixtureState u;
    u.p2 = 0.5 * p2 * p2 * eta;
    u.p1 = 0.5 * eta * (p1 * p2 + c * p2 * q2 + c * p1 * q2 + c * p0 * q3);
    u.p0 = 0.125 * eta * (p1 * p1 + c * p0 * q2);
    u.p2_hi = s * eta * (p2 * q2 * q2 + p1 * q3);
    u.p3_hi = s * eta * p2 * q3;
    u.F = swapped_fidelity(previous.F);
    u.level = previous.level + 1;

    ConnectResult r;
    r.unnormalized = u;
    r.success = u.p2 + u.p1 + u.p0;
    r.small_chi_violated = u.level * chi > 0.1;
    if (u.total() > 0.0) {
        r.normalized = normalize(u);
    } else {
        r.normalized = u;
    }
    return r;
}

Coefficients entangler_coefficients(double p_r, double eta1, double eta2, EntanglerFormula formula) {
    check_unit(p_r, "p_r");
    check_unit(eta1, "eta1");
    check_unit(eta2, "eta2");
    const double p = p_r, q = 1.0 - p_r, e1 = eta1, e2 = eta2;
    const double p3q = p * p * p * q, p4 = p * p * p * p;
    Coefficients c;
    c.p2 = p4 * e1 * e1 / 32.0;
    c.p1 = p3q * e1 * e1 / 8.0 + p4 * e1 * e1 / 32.0 + p4 * e1 * e2 / 64.0;
    if (formula == EntanglerFormula::printed) {
        c.p0 = (p3q * (2 * e1 * e1 + e1 * e2) + p4 * e1 * e2 + 4 * p * p * (1 - p * p) * e1 * e1) / 32.0;
    } else {
        // two-photon emissions occur with p^2 (1-p)^2; all four photons in the BSM give e1 e2 / 64
        c.p0 = (p3q * (2 * e1 * e1 + e1 * e2) + 4 * p * p * q * q * e1 * e1) / 32.0 + p4 * e1 * e2 / 64.0;
    }
    c.success = c.p2 + c.p1 + c.p0;
    return c;
}

PurificationResult purification_coefficients(const MixtureState& rho_m, double F,
                                             const EfficiencyParams& params) {
    check_unit(F, "F");
    params.validate();
    rho_m.validate();
    require_normalized(rho_m);
    const double a = rho_m.p2, b = rho_m.p1, z = rho_m.p0;
    const double r = params.eta_r, e1 = params.eta1, e2 = params.eta2;
    const double r2 = r * r, r3 = r2 * r, r4 = r3 * r, l = 1.0 - r;

    Coefficients c;
    c.p2 = 0.5 * a * a * r4 * e1 * e1 * (F * F + (1 - F) * (1 - F));
    c.p1 = a * a * r3 * l * e1 * e1 + 0.5 * b * a * r3 * e1 * e1 + a * a * r4 * F * (1 - F) * e1 * e2;
    c.p0 = a * a * (0.25 * r4 * F * F * e2 * e2 + r3 * l * F * (1 - F) * e1 * e2 +
                    r2 * l * l * (F + 0.5) * e1 * e1 + r3 * l * F * F * e1 * e2) +
           a * b * (r2 * l * (F + 0.5) * e1 * e1 + r3 * F / 2.0 * e1 * e2) +
           0.125 * b * b * r2 * e1 * e1 + a * z * r2 * F * e1 * e1;
    c.success = c.p2 + c.p1 + c.p0;

    PurificationResult out;
    out.coefficients = c;
    out.F_prime = purified_fidelity(F);
    MixtureState u;
    u.p2 = c.p2;
    u.p1 = c.p1;
    u.p0 = c.p0;
    if (a > 0.0) {
        u.p2_hi = c.p2 * rho_m.p2_hi / a;
        u.p3_hi = c.p2 * rho_m.p3_hi / a;
    }
    u.F = out.F_prime;
    u.level = rho_m.level;
    out.unnormalized = u;
    return out;
}

double swapped_fidelity(double F) {
    check_unit(F, "F");
    return F * F + (1 - F) * (1 - F);
}

double purified_fidelity(double F) {
    check_unit(F, "F");
    const double d = F * F + (1 - F) * (1 - F);
    return F * F / d;
}

}  // namespace qrep::ensemble
