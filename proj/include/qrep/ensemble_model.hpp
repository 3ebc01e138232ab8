#pragma once

// Closed-form mixture-state algebra for the effective entangled pairs
//   rho = p2 rho2 + p1 rho1 + p0 rho0 + p2' rho2' + p3' rho3'
// and the coefficient formulas for swapping, nested connection, the
// event-ready entangler and purification.

namespace qrep::ensemble {

struct MixtureState {
    double p2 = 0.0;
    double p1 = 0.0;
    double p0 = 0.0;
    double p2_hi = 0.0;  // spurious two-excitation weight
    double p3_hi = 0.0;  // spurious three-excitation weight
    double F = 1.0;      // Bell-sector fidelity onto phi+
    int level = 0;
    bool normalized = false;

    double total() const noexcept { return p2 + p1 + p0 + p2_hi + p3_hi; }
    void validate() const;
};

MixtureState normalize(const MixtureState& state);

struct EfficiencyParams {
    double eta_r = 1.0;
    double eta1 = 1.0;
    double eta2 = 1.0;

    // eta2 defaults to 1 - (1 - eta1)^2
    static EfficiencyParams with_default_eta2(double eta_r, double eta1);
    double eta() const noexcept { return eta_r * eta_r * eta1 * eta1; }
    void validate() const;
};

struct Coefficients {
    double p2 = 0.0;
    double p1 = 0.0;
    double p0 = 0.0;
    double success = 0.0;  // p2 + p1 + p0
};

// Unnormalized swap coefficients for one accepted coincidence pattern.
Coefficients swap_coefficients(const EfficiencyParams& params);

// Multipliers for the order-of-magnitude terms of the connection recursion.
// `bracket` scales the O(.) corrections inside p1 and p0; `spurious` scales
// the p2' and p3' recursions. spurious = 1/2 keeps p3'/p2 stationary.
struct HigherOrderConstants {
    double bracket = 1.0;
    double spurious = 0.5;
};

struct ConnectResult {
    MixtureState unnormalized;
    MixtureState normalized;
    double success = 0.0;
    bool small_chi_violated = false;  // level * chi not small
};

ConnectResult connect_step(const MixtureState& previous, double chi, const EfficiencyParams& params,
                           const HigherOrderConstants& constants = {});

enum class EntanglerFormula {
    corrected,  // vacuum term as reproduced by the linear-optics oracle
    printed,
};

// Unnormalized entangler coefficients for one accepted coincidence pattern.
Coefficients entangler_coefficients(double p_r, double eta1, double eta2,
                                    EntanglerFormula formula = EntanglerFormula::corrected);

struct PurificationResult {
    Coefficients coefficients;
    double F_prime = 0.0;
    MixtureState unnormalized;  // carries F' and the input p2'/p2, p3'/p2 ratios
};

// Coefficients summed over the accepted outcomes of both nodes.
PurificationResult purification_coefficients(const MixtureState& rho_m, double F,
                                             const EfficiencyParams& params);

double swapped_fidelity(double F);   // F^2 + (1-F)^2
double purified_fidelity(double F);  // F^2 / (F^2 + (1-F)^2)

}  // namespace qrep::ensemble
