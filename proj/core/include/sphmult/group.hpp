#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sphmult/report.hpp"
#include "sphmult/transform.hpp"

// Matrix model of SL(2,R) for the hyperbolic plane, with
//   a(t) = diag(e^{t/2}, e^{-t/2}),  v(x) = [[1, 0], [x, 1]],  G = N A K.
// The N A coordinates (x, t) compose as (x, t)(y, s) = (x + e^{-t} y, t + s);
// the left Haar measure is e^t dx dt.
namespace sphmult {

struct MatrixElement {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static MatrixElement identity() { return {}; }
    static MatrixElement nbar(double x) { return {1.0, 0.0, x, 1.0}; }
    static MatrixElement torus(double t);
    static MatrixElement rotation(double angle);

    double det() const noexcept { return a * d - b * c; }
    MatrixElement operator*(const MatrixElement& o) const noexcept;
    MatrixElement inverse() const noexcept;
    double distance(const MatrixElement& o) const noexcept;  // max entry difference
};

struct IwasawaCoords {
    double x = 0.0;
    double t = 0.0;
    double k_angle = 0.0;

    MatrixElement matrix() const;
};

// g = v(x) a(t) k(angle); rejects |det g - 1| > 1e-10.
IwasawaCoords iwasawa(const MatrixElement& g);
// alpha(H(g)) for G = K A N (first column length squared, logged).
double iwasawa_h(const MatrixElement& g);
// P(v) = e^{-rho H(v)} with rho = 1/2.
double poisson_weight(double x, double q = 1.0);
// Radial part t+ of g = k1 a(t+) k2.
double cartan_radius(const MatrixElement& g);
// t+ of v(x) a(t), computed without cancellation.
double cartan_radius_nbar_a(double x, double t);
// E(v, b) = t+(v b) - t_b - alpha(H(v)); t_b > 0 required.
double iwasawa_cartan_gap(double x, double t_b);

// e^{rho t_b} int f(t+(v(x) a(t_b))) dx / (2 pi).
double abel_horocycle(const RadialFunction& f, double t_b);

// int int f(t+(x, t)) e^t dx/(2 pi) dt over a box, against int f(t) delta(t) dt.
struct HaarComparison {
    double iwasawa = 0.0;
    double cartan = 0.0;
    double relative_error = 0.0;
};
HaarComparison haar_consistency(const std::function<double(double)>& radial, double t_max);

// Truncated integrals of P^q and H P^q over |x| < R for each R in radii.
struct TailReport {
    double q = 1.0;
    std::vector<double> radii;
    std::vector<double> p_integrals;
    std::vector<double> hp_integrals;
    double p_tail_exponent = 0.0;   // fitted d log(I_inf - I_R) / d log R
    bool converges = false;
};
TailReport poisson_tails(double q);

// Kernel on the N A group with a rectangular support.
struct GroupKernel {
    std::function<double(double x, double t)> value;
    double x_half_width = 1.0;
    double t_half_width = 1.0;
};

// Random smooth compactly supported kernel (sum of bumps with signed weights).
GroupKernel random_group_kernel(std::uint64_t seed, double x_half_width = 0.5, double t_half_width = 0.5);

// Grid of nx * nt points with the given spacing, centred at the identity.
struct TransferenceOptions {
    int nx = 96;
    int nt = 96;
    double spacing = 1.0 / 12.0;
    int power_iterations = 30;
    int starts = 3;
    std::uint64_t seed = 7;
};

struct TransferenceTrial {
    double lhs = 0.0;  // lower bound for the convolution norm on the group
    double rhs = 0.0;  // int || D^{1/p} kappa(x, .) ||_{Cv_p(A)} dx
    double lhs_coarse = 0.0;
    bool stable = true;
};

TransferenceTrial transference_trial(const GroupKernel& kernel, double p, const TransferenceOptions& opt = {});
// Cv_p norm of convolution by phi on (R, dt), sampled at spacing h on [-L, L].
double cvp_norm_1d(std::span<const double> phi, double h, double p, int power_iterations = 40);

// Runs `trials` random kernels; PASS iff every LHS <= 1.05 RHS.
EstimateReport transference_check(double p, int trials, const TransferenceOptions& opt = {});
// Kernel with D^{1/p} kappa(x, t) = Q(x) phi(t): RHS against ||Q||_1 ||phi||_{Cv_p(A)}, 2% tolerance.
EstimateReport separable_factorization(double p, const TransferenceOptions& opt = {});
// Normalised bump at the identity: LHS and RHS both close to 1.
TransferenceTrial identity_trial(double p, const TransferenceOptions& opt = {});

}  // namespace sphmult
