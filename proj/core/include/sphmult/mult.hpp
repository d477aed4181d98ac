#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sphmult/report.hpp"
#include "sphmult/space.hpp"
#include "sphmult/specfun.hpp"
#include "sphmult/transform.hpp"

namespace sphmult {

// Strip |Im l| < delta(p) rho (rank one) or the product of two strips.
class Tube {
public:
    Tube(const RankOneSpace& space, Exponent p);
    Tube(const ProductSpace& space, Exponent p);

    int rank() const noexcept { return rank_; }
    double half_width(int i = 0) const { return half_width_.at(i); }
    bool contains(cplx z) const;
    bool contains(cplx z1, cplx z2) const;
    bool contains_closed(cplx z1, cplx z2) const;

private:
    int rank_;
    std::array<double, 2> half_width_{};
};

double theta_p(const RankOneSpace& space, const Exponent& p, cplx zeta);
// Distance-type weight for the joint condition; rejects points outside the closed tube.
double dp_ionescu(const ProductSpace& space, const Exponent& p, cplx z1, cplx z2);

// Weyl-symmetric function of two spectral variables.
struct MultiplierSpec {
    std::string name;
    std::function<cplx(cplx, cplx)> evaluator;
    // Optional closed-form partial derivatives d^{j1}_1 d^{j2}_2.
    std::function<cplx(cplx, cplx, int, int)> analytic_derivative;
    bool weyl_symmetric = true;
    std::array<double, 2> analytic_strip{0.0, 0.0};  // holomorphic for |Im l_i| < strip_i
    std::array<int, 2> derivative_order_available{8, 8};
    // Also holomorphic on the sector |Im l| < |Re l| (e.g. principal powers of l^2 + c, c > 0).
    bool sector_holomorphic = false;
    std::vector<double> real_singularities;         // points of a* where the real derivatives blow up

    cplx operator()(cplx z1, cplx z2) const { return evaluator(z1, z2); }
    bool check_weyl(double tol = 1e-10) const;
    // Restriction to the first variable with the second one frozen.
    SpectralFunction slice_first(cplx z2) const;
};

enum class DerivativeMethod { automatic, analytic, cauchy, richardson };

struct DerivativeOptions {
    DerivativeMethod method = DerivativeMethod::automatic;
    int contour_samples = 16;
    double radius_fraction = 0.25;  // of the distance to the edge of holomorphy
    double max_radius = 1.0;        // cap for entire functions
    double step_fraction = 0.1;     // finite-difference step relative to the local scale
};

// Table D[j1 * (N2 + 1) + j2] = d^{j1}_1 d^{j2}_2 m(z1, z2).
std::vector<cplx> derivative_table(const MultiplierSpec& m, cplx z1, cplx z2, int N1, int N2,
                                   const DerivativeOptions& opt = {});

// j-th derivative of a real-variable function by Richardson-extrapolated central differences.
double richardson_derivative(const std::function<double(double)>& f, double x, int order, double step);
cplx richardson_derivative(const std::function<cplx(double)>& f, double x, int order, double step);

enum class Condition { horm, horm_infty, marc, marc_infty, marc_frastar, ionescu };
const char* to_string(Condition c);
Condition parse_condition(const std::string& s);

enum class NormDomain { tube, real_axis };

struct NormOptions {
    NormDomain domain = NormDomain::tube;
    int refinements = 3;
    double growth_flag = 10.0;
    DerivativeOptions derivative;
};

struct NormReport {
    Condition condition = Condition::marc;
    std::array<int, 2> order{0, 0};
    double value = 0.0;
    bool infinite = false;
    std::array<cplx, 2> argmax_point{};
    std::array<int, 2> argmax_order{0, 0};
    std::vector<double> refinement_values;
    nlohmann::json to_json() const;
};

// Sampled supremum (a lower bound of the true norm) with divergence flagging.
NormReport multiplier_norm(Condition condition, const ProductSpace& space, const Exponent& p,
                           const MultiplierSpec& m, std::array<int, 2> order, const NormOptions& opt = {});
// Several conditions from one pass over the derivative tables.
std::vector<NormReport> multiplier_norms(std::span<const Condition> conditions, const ProductSpace& space,
                                         const Exponent& p, const MultiplierSpec& m, std::array<int, 2> order,
                                         const NormOptions& opt = {});
inline NormReport marc_norm(const ProductSpace& s, const Exponent& p, const MultiplierSpec& m, std::array<int, 2> N,
                            const NormOptions& o = {}) {
    return multiplier_norm(Condition::marc, s, p, m, N, o);
}
inline NormReport ionescu_norm(const ProductSpace& s, const Exponent& p, const MultiplierSpec& m,
                               std::array<int, 2> N, const NormOptions& o = {}) {
    return multiplier_norm(Condition::ionescu, s, p, m, N, o);
}

// Rank-one Hormander-type norms of a spectral function.
NormReport horm_norm(const RankOneSpace& space, const Exponent& p, const SpectralFunction& m, int N,
                     bool at_infinity = false, const NormOptions& opt = {});

// Rejects multipliers whose values jump along lines crossing the tube.
void check_branch_continuity(const MultiplierSpec& m, const ProductSpace& space, const Exponent& p);

// Built-in families: imaginary_powers(t,u,v), gaussian(eps), constant(c), euclid_marc(u,v).
MultiplierSpec builtin_multiplier(const std::string& kind, const std::vector<double>& params,
                                  const ProductSpace& space);

// One-variable families on a rank-one space.
SpectralFunction gaussian_1d(double epsilon);
SpectralFunction imaginary_power_1d(const RankOneSpace& space, double u);
// (l^2 + delta(p)^2 rho^2)^{iu}: branch points exactly at the tube corners +-i delta(p) rho.
SpectralFunction boundary_power_1d(const RankOneSpace& space, const Exponent& p, double u);
SpectralFunction product_1d(SpectralFunction a, SpectralFunction b);
MultiplierSpec tensor_product(SpectralFunction a, SpectralFunction b);
MultiplierSpec times(MultiplierSpec m, SpectralFunction a, SpectralFunction b);

struct IndependenceReport {
    std::array<int, 2> J{1, 1};
    double regime_a_slope = 0.0;      // d log(marc weight / joint weight) / d log gap
    double regime_b_marc_exponent = 0.0;
    double regime_b_joint_exponent = 0.0;
    double zero_order_ratio = 0.0;
    std::vector<std::array<double, 3>> regime_a;  // gap, marc weight, joint weight
    std::vector<std::array<double, 3>> regime_b;
    nlohmann::json to_json() const;
};

IndependenceReport independence_witness(const ProductSpace& space, const Exponent& p, std::array<int, 2> J = {1, 1});

}  // namespace sphmult
