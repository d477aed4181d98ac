#include "sphmult/report.hpp"

#include <cmath>
#include <stdexcept>

namespace sphmult {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::fail: return "FAIL";
        case Verdict::inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit needs >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    return f;
}

nlohmann::json EstimateReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["bound"] = bound;
    j["surrogate"] = surrogate;
    j["fitted"] = fitted;
    j["claimed"] = claimed;
    j["tolerance"] = tolerance;
    j["fitted_constant"] = fitted_constant;
    j["residual"] = residual;
    j["verdict"] = to_string(verdict);
    auto& s = j["samples"] = nlohmann::json::array();
    for (const auto& [a, b] : samples) s.push_back({a, b});
    return j;
}

}  // namespace sphmult
