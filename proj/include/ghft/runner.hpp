#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ghft/algebra.hpp"
#include "ghft/convergence.hpp"

namespace ghft {

// Malformed or out-of-range configuration (exit status 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// INI scenario. Sections and keys (defaults in parentheses):
//   [spacetime] family (minkowski) | n_t, n_x (64) | dx (1/n_x) | dt (cfl * dx) | t_origin (0)
//               scale = cosh | polynomial (cosh) | radius (1.3) | a0, a1, a2 (1, 0, 0)
//               conformal (false) | metric_amplitude (0.2, ultrastatic h = (1 + A sin(2 pi x / L))^2)
//   [model]     scalar_m2 (1) | scalar_xi (0) | dirac_m (1) | proca_m2 (1)
//   [numerics]  identity_tol (1e-9) | causality_tol (1e-12) | slice_tol (1e-3) | timeslice_tol (1e-8)
//               cfl (1) | band_lo, band_hi (1/3, 2/3 of the time range) | seed (1) | samples (4)
//               levels (3)
//   [suites]    run = comma separated subset of scalar, dirac, proca, algebra, greenops
//   [algebra]   model = scalar | proca | dirac (scalar) | observables (4)
//   [output]    dir (ghft_out)
struct ScenarioConfig {
    SpacetimeSpec spacetime;
    double scalar_m2 = 1.0;
    double scalar_xi = 0.0;
    double dirac_m = 1.0;
    double proca_m2 = 1.0;
    double identity_tol = 1e-9;
    double causality_tol = 1e-12;
    double slice_tol = 1e-3;
    double timeslice_tol = 1e-8;
    double cfl = 1.0;
    double band_lo = 1.0 / 3.0;
    double band_hi = 2.0 / 3.0;
    std::uint64_t seed = 1;
    int samples = 4;
    int levels = 3;
    std::vector<std::string> suites;
    std::string algebra_model = "scalar";
    int algebra_observables = 4;
    std::string output_dir = "ghft_out";
};

ScenarioConfig parse_config(std::istream& is);
ScenarioConfig load_config(const std::string& path);
// GHFT_OUT, when set and nonempty, replaces the configured directory.
std::string resolve_output_dir(const ScenarioConfig& cfg);

struct ReportRow {
    std::string suite;
    std::string check;
    double measured = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct SuiteResult {
    std::string suite;
    std::vector<ReportRow> rows;
    bool pass() const;
};

// Runs one suite, writing its masks and Gram tables into out_dir.
SuiteResult run_suite(const ScenarioConfig& cfg, const std::string& suite, const std::string& out_dir);

struct RunResult {
    std::vector<SuiteResult> suites;
    bool pass() const;
};

// Runs the selected suites (optionally concurrently) and writes report.csv.
RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir, bool parallel = false);

void write_report_csv(const std::vector<SuiteResult>& suites, std::ostream& os);

// Error series over cfg.levels dyadic refinements of the configured grid.
std::vector<ConvergenceSeries> run_convergence(const ScenarioConfig& cfg);
void write_convergence_csv(const std::vector<ConvergenceSeries>& series, std::ostream& os);
// fitted orders >= 1.8 and exact identities at roundoff
bool convergence_pass(const std::vector<ConvergenceSeries>& series);

// Normal form of an expression over the registry of cfg.algebra_observables seeded compact
// observables of cfg.algebra_model; the Gram table is written to out_dir.
std::string run_algebra(const ScenarioConfig& cfg, const std::string& expr, const std::string& out_dir);

// E+-, or E for which == "causal", of a CSV source for the named model (scalar, dirac, proca);
// writes green_<which>.csv and the support mask to out_dir.
Section run_green(const ScenarioConfig& cfg, const std::string& model, const std::string& source_csv,
                  const std::string& which, const std::string& out_dir);

// RFC-4180 field quoting and 17-significant-digit numbers
std::string csv_field(const std::string& s);
std::string csv_number(double v);

}  // namespace ghft
