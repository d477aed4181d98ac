#pragma once

#include <string>
#include <string_view>
#include <utility>

namespace sphmult {

// Rank-one symmetric space described by its root multiplicities.
// The coordinate t = alpha(log a) is used for every element of A.
class RankOneSpace {
public:
    RankOneSpace(int m_alpha, int m_2alpha);

    static RankOneSpace H2() { return {1, 0}; }
    static RankOneSpace H3() { return {2, 0}; }
    static RankOneSpace CH2() { return {2, 1}; }

    int m_alpha() const noexcept { return m_alpha_; }
    int m_2alpha() const noexcept { return m_2alpha_; }
    int n() const noexcept { return m_alpha_ + m_2alpha_ + 1; }
    double rho() const noexcept { return 0.5 * (m_alpha_ + 2.0 * m_2alpha_); }

    std::string name() const;

    friend bool operator==(const RankOneSpace&, const RankOneSpace&) = default;

private:
    int m_alpha_;
    int m_2alpha_;
};

struct ProductSpace {
    RankOneSpace x1;
    RankOneSpace x2;

    std::pair<int, int> n() const { return {x1.n(), x2.n()}; }
    std::pair<double, double> rho() const { return {x1.rho(), x2.rho()}; }
    const RankOneSpace& factor(int i) const { return i == 0 ? x1 : x2; }
    std::string name() const;
};

// Lebesgue exponent p in (1, inf) with delta(p) = |2/p - 1|.
class Exponent {
public:
    explicit Exponent(double p);
    double p() const noexcept { return p_; }
    double delta() const noexcept { return delta_; }
    Exponent conjugate() const { return Exponent(p_ / (p_ - 1.0)); }

private:
    double p_;
    double delta_;
};

// Accepts "H2", "H3", "CH2" or "m_alpha,m_2alpha".
RankOneSpace parse_space(std::string_view text);
// Accepts "H2xH2", "H3xH2", or "a,b;c,d".
ProductSpace parse_product_space(std::string_view text);

// Cartan density delta(t) = 2^{-2 rho}(e^t - e^-t)^{m_a}(e^{2t} - e^{-2t})^{m_2a}.
double density_delta(const RankOneSpace& space, double t);
// log delta(t), accurate for large t where delta itself overflows.
double log_density_delta(const RankOneSpace& space, double t);
// w(t) = (t^{n-1} / delta(t))^{1/2}; tends to 1 as t -> 0.
double weight_w(const RankOneSpace& space, double t);
// Quadrature weight for radial integrals (group constant fixed to 1).
double cartan_measure_weight(const RankOneSpace& space, double t);

}  // namespace sphmult
