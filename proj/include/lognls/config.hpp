#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lognls/gaussian.hpp"
#include "lognls/solver.hpp"

namespace lognls::cfg {

enum class Kind { gaussian_ode, pde, compare, fp, asymptotics };

const char* kind_name(Kind k);
std::optional<Kind> kind_from_name(const std::string& name);

struct TimesSpec {
    double t_end = 0.0;
    double dt = 0.0; // 0 = unset (not needed by ODE-only kinds)
    std::vector<double> snapshots;

    bool operator==(const TimesSpec&) const = default;
};

struct OutputSpec {
    std::string dir = "out";
    std::vector<std::string> formats{"csv", "json"};
    bool field_snapshots = false;

    bool operator==(const OutputSpec&) const = default;
};

/// A fully validated experiment description. Schedules given as
/// linear/logarithmic generators are expanded to explicit snapshot lists at
/// parse time, so serialize/parse round-trips the canonical form.
struct ExperimentConfig {
    Kind kind = Kind::pde;
    pde::ModelParams model;       // epsilon defaults to 1e-12
    gaussian::GaussianInit init;  // used when field_file is empty
    std::string field_file;      // nonempty: load the initial state instead
    int grid_d = 1;
    int grid_n = 0; // 0 = no grid section (ODE-only kinds)
    double grid_L = 0.0;
    TimesSpec times;
    OutputSpec output;
    double rel_tol = 1e-10;
    double compare_tol = 1e-4;

    bool operator==(const ExperimentConfig& o) const;
};

struct ParseResult {
    std::optional<ExperimentConfig> config; // set iff errors is empty
    std::vector<std::string> errors;        // all problems, not just the first
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

/// Parse the key = value experiment grammar: [section] headers, scalar and
/// bracketed array values, # and ; comments. Collects every syntax and
/// semantic problem instead of stopping at the first.
ParseResult parse_config(const std::string& text);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& cfg);

} // namespace lognls::cfg
