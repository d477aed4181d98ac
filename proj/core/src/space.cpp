#include "sphmult/space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sphmult {

RankOneSpace::RankOneSpace(int m_alpha, int m_2alpha) : m_alpha_(m_alpha), m_2alpha_(m_2alpha) {
    if (m_alpha < 1) throw std::invalid_argument("m_alpha must be >= 1");
    if (m_2alpha < 0) throw std::invalid_argument("m_2alpha must be >= 0");
}

std::string RankOneSpace::name() const {
    if (*this == H2()) return "H2";
    if (*this == H3()) return "H3";
    if (*this == CH2()) return "CH2";
    return std::to_string(m_alpha_) + "," + std::to_string(m_2alpha_);
}

std::string ProductSpace::name() const { return x1.name() + "x" + x2.name(); }

Exponent::Exponent(double p) : p_(p), delta_(std::abs(2.0 / p - 1.0)) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must lie in (1, inf)");
}

RankOneSpace parse_space(std::string_view text) {
    if (text == "H2") return RankOneSpace::H2();
    if (text == "H3") return RankOneSpace::H3();
    if (text == "CH2") return RankOneSpace::CH2();
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw std::invalid_argument("unknown space: " + std::string(text));
    try {
        const int a = std::stoi(std::string(text.substr(0, comma)));
        const int b = std::stoi(std::string(text.substr(comma + 1)));
        return RankOneSpace(a, b);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("bad space multiplicities: " + std::string(text));
    }
}

ProductSpace parse_product_space(std::string_view text) {
    auto sep = text.find('x');
    if (sep == std::string_view::npos) sep = text.find(';');
    if (sep == std::string_view::npos) throw std::invalid_argument("product space needs two factors: " + std::string(text));
    return {parse_space(text.substr(0, sep)), parse_space(text.substr(sep + 1))};
}

double log_density_delta(const RankOneSpace& space, double t) {
    if (!(t > 0.0)) throw std::domain_error("density requires t > 0");
    // log(e^t - e^-t) = t + log1p(-e^{-2t}); same for 2t.
    const double l1 = t + std::log(-std::expm1(-2.0 * t));
    const double l2 = 2.0 * t + std::log(-std::expm1(-4.0 * t));
    return -2.0 * space.rho() * std::log(2.0) + space.m_alpha() * l1 + space.m_2alpha() * l2;
}

double density_delta(const RankOneSpace& space, double t) { return std::exp(log_density_delta(space, t)); }

double weight_w(const RankOneSpace& space, double t) {
    if (!(t > 0.0)) throw std::domain_error("weight requires t > 0");
    return std::exp(0.5 * ((space.n() - 1) * std::log(t) - log_density_delta(space, t)));
}

double cartan_measure_weight(const RankOneSpace& space, double t) { return density_delta(space, t); }

}  // namespace sphmult
