#pragma once

#include <stdexcept>
#include <string>

namespace lognls {

// Invalid user input: bad parameters, malformed configs, domain violations.
// The CLI maps these to exit code 2.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failure at runtime: blow-up, non-convergence, resolution loss,
// mass escaping the box. The CLI maps these to exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Step-size underflow or an invariant drifting past its corrector budget.
class convergence_error : public numerical_error {
public:
    explicit convergence_error(const std::string& msg) : numerical_error(msg) {}
};

// NaN/Inf detected in a field. Carries where the run died.
class blowup_error : public numerical_error {
public:
    blowup_error(const std::string& msg, double t_, long step_)
        : numerical_error(msg), t(t_), step(step_) {}
    double t;
    long step;
};

// Field support no longer representable on the grid (truncated tails,
// boundary-shell mass over budget, undersampled rescaled grid).
class resolution_error : public numerical_error {
public:
    explicit resolution_error(const std::string& msg, double defect_ = 0.0)
        : numerical_error(msg), defect(defect_) {}
    double defect;
};

} // namespace lognls
