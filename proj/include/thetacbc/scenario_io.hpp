#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thetacbc/certificate.hpp"
#include "thetacbc/montecarlo.hpp"
#include "thetacbc/scenario.hpp"

namespace thetacbc {

enum class ReportFormat { Json, Csv };

/// Parses and fully validates a scenario JSON document. Every rejection
/// names the offending location as a JSON pointer (e.g. "/init_set/center").
/// Schema problems raise SchemaError, dimension mismatches ShapeError.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Serializes a scenario with full double precision; parse_scenario of the
/// result reproduces the input.
std::string emit_scenario(const Scenario& scenario);

/// Rounds to 9 significant digits, the precision of every emitted report.
double round_report_value(double x);

std::string emit_report(const CertificateReport& cert,
                        const std::optional<MonteCarloReport>& mc, ReportFormat format);
std::string emit_monte_carlo_report(const MonteCarloReport& mc, ReportFormat format);

struct ParsedReport {
    std::optional<CertificateReport> certificate;
    std::optional<MonteCarloReport> monte_carlo;
};

/// Reads a JSON report produced by emit_report / emit_monte_carlo_report.
ParsedReport parse_report(std::string_view text);

/// Header row is always present, even for an empty sweep.
std::string emit_sweep(const std::vector<SweepRow>& rows, ReportFormat format);

}  // namespace thetacbc
