#pragma once

// Closed-form coefficients against the linear-optics oracle over parameter
// grids. Cells are evaluated independently; the parallel and serial paths
// produce identical reports.

#include "qrep/optical_blocks.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qrep::verify {

struct Comparison {
    std::string block;     // swap, entangler, purification, generation
    std::string cell;      // parameter tuple, e.g. "eta_r=0.5;eta1=0.8;eta2=0.9;pattern=D1D4"
    std::string quantity;  // p2, p1, p0, F', ratio, ...
    double formula = 0.0;
    double oracle = 0.0;

    double deviation() const;
};

struct GridSpec {
    std::vector<double> efficiencies{0.5, 0.8, 0.9, 0.98, 1.0};  // eta_r, eta1, eta2 for swapping
    std::vector<double> source_probs{0.5, 0.8, 0.9, 1.0};        // entangler p_r
    std::vector<double> entangler_eta1{0.9, 0.95, 0.99, 1.0};
    std::vector<double> fidelities{0.6, 0.75, 0.88, 0.95};

    // "0.5,0.8,1" sets the swap efficiencies
    static GridSpec parse(std::string_view efficiencies);
    void validate() const;
};

struct Options {
    GridSpec grid;
    double tolerance = 1e-10;
    bool parallel = true;
    // Test hook: perturbs one closed-form constant so the run must fail.
    bool corrupt_formula = false;
};

struct Report {
    std::vector<Comparison> rows;
    double max_deviation = 0.0;
    std::optional<Comparison> first_failure;
    bool passed = true;
};

Report run(const Options& options);

void write_csv(std::ostream& out, const Report& report);

// D1D4 swap coefficients from both sources, for the coefficient table.
std::vector<blocks::CoefficientRow> swap_table(const GridSpec& grid);

}  // namespace qrep::verify
