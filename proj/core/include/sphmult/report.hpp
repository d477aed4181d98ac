#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace sphmult {

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

// Least-squares line y = slope * x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Fit of an observed quantity against a claimed bound.
struct EstimateReport {
    std::string name;
    std::string bound;        // symbolic description of the claimed bound
    std::string surrogate;    // quantity actually measured
    double fitted = 0.0;      // fitted exponent / rate / value
    double claimed = 0.0;
    double tolerance = 0.0;
    double fitted_constant = 0.0;
    double residual = 0.0;
    Verdict verdict = Verdict::inconclusive;
    std::vector<std::pair<double, double>> samples;

    bool passed() const noexcept { return verdict == Verdict::pass; }
    nlohmann::json to_json() const;
};

}  // namespace sphmult
