#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "thetacbc/certificate.hpp"
#include "thetacbc/montecarlo.hpp"
#include "thetacbc/scenario.hpp"

namespace thetacbc {

enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,
    kExitInvalidCertificate = 2,
    kExitDominanceViolation = 3,
    kExitReproMismatch = 4,
};

/// One row of the paper-repro comparison table.
struct ReproRow {
    std::string quantity;
    double published;
    double computed;
    double tolerance;

    double abs_diff() const;
    bool passed() const;
};

/// Published eta, beta, c and bound of the RLC example against `cert`.
std::vector<ReproRow> compare_to_published(const CertificateReport& cert);

/// Certifies and simulates `scenario`, prints the comparison table to `out`
/// and returns kExitOk only when every row is within tolerance.
int paper_repro(const Scenario& scenario, const MonteCarloConfig& mc, std::ostream& out,
                std::ostream& err);

/// Entry point of the thetacbc executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thetacbc
