#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "sphmult/mult.hpp"
#include "sphmult/report.hpp"
#include "sphmult/space.hpp"
#include "sphmult/transform.hpp"

namespace sphmult {

// Smooth even bump: 1 on [-1, 1], 0 outside (-2, 2), monotone in between.
double bump_bC(double x);
double bump_bC_derivative(double x);

enum class CutoffKind { Phi_space_side, Psi_frequency_side };

// Phi(a) = bC(t) on the group side, Psi(l) = bC(l) on the spectral side.
struct Cutoff {
    CutoffKind kind = CutoffKind::Phi_space_side;
    double operator()(double x) const { return bump_bC(x); }
    double complement(double x) const { return 1.0 - bump_bC(x); }
};

enum class PhiRoute { raw, shifted_full, shifted_eps };
const char* to_string(PhiRoute r);
PhiRoute parse_route(const std::string& s);

struct KernelOptions {
    double epsilon = 0.0;          // Gaussian regulariser e^{-eps |l|^2} applied to m
    PhiRoute route = PhiRoute::shifted_eps;
    double contour_epsilon = 0.05;  // eps in (delta(p) - eps/|t|) rho
    double lambda_max = 0.0;        // 0: sqrt(40/eps), or 60 without a regulariser
    double min_panel = 1e-10;       // grading towards l = 0
    int nodes_per_panel = 16;
};

// phi_p(t) = (1 - Phi(t)) e^{delta rho t} int e^{i l t} C m(l) / c(-l) dl along the chosen contour.
cplx phi_p_eval(const RankOneSpace& space, const SpectralFunction& m, const Exponent& p, double t, PhiRoute route,
                const KernelOptions& opt = {});
std::vector<cplx> phi_p_table(const RankOneSpace& space, const SpectralFunction& m, const Exponent& p,
                              std::span<const double> ts, PhiRoute route, const KernelOptions& opt = {});

enum class KernelPieceId {
    // rank one
    kappa_A, kappa_R, kappa_1, kappa_omega, phi_p, phi_p_dt, tau_p1, tau_p2, tau_p3, xi, xi_psi, xi_one_minus_psi,
    // product
    AA, AR, RA, RR, k00, k10, k01, k11,
    oneA, oneR, omegaphi, Aone, Rone, phiomega,
    oneone, oneomega, omegaone, omegaomega,
    phi_p_11, phi_p_11_d1, phi_p_11_d2, phi_p_11_d12, phi_p_1A2,
    xi_00, xi_inf0, xi_0inf, xi_infinf,
    N1,        // point (t1, l2)
    J_average  // point (v1, v2): Chebyshev average of the space's parity case
};
const char* to_string(KernelPieceId id);
KernelPieceId parse_piece(const std::string& s);
bool is_rank_one(KernelPieceId id);

// Rank-one pieces at t = point[0]; tau pieces at (x, t_b) = (point[0], point[1]) on H2.
cplx kernel_piece_eval(KernelPieceId id, const RankOneSpace& space, const SpectralFunction& m, const Exponent& p,
                       std::array<double, 2> point, double epsilon, KernelOptions opt = {});
std::vector<cplx> kernel_piece_table(KernelPieceId id, const RankOneSpace& space, const SpectralFunction& m,
                                     const Exponent& p, std::span<const double> ts, double epsilon,
                                     KernelOptions opt = {});
// Product pieces at (t1, t2).
cplx kernel_piece_eval(KernelPieceId id, const ProductSpace& space, const MultiplierSpec& m, const Exponent& p,
                       std::array<double, 2> point, double epsilon, KernelOptions opt = {});
// Values on the tensor grid t1s x t2s, row-major in t1.
std::vector<cplx> kernel_piece_grid(KernelPieceId id, const ProductSpace& space, const MultiplierSpec& m,
                                    const Exponent& p, std::span<const double> t1s, std::span<const double> t2s,
                                    double epsilon, KernelOptions opt = {});

struct RankOneSplit {
    std::vector<double> t;
    std::vector<cplx> inverse;  // H^{-1} m_eps from the transform module
    std::vector<cplx> kappa_A, kappa_R, kappa_1, kappa_omega;
    double local_residual = 0.0;   // max |Phi H^{-1}m - kappa_A - kappa_R|
    double global_residual = 0.0;  // max |(1 - Phi) H^{-1}m - 2 kappa_1 - 2 kappa_omega|
};
RankOneSplit rank_one_split(const RankOneSpace& space, const SpectralFunction& m, std::span<const double> ts,
                            double epsilon, KernelOptions opt = {});

struct ProductSplit {
    std::vector<double> t1, t2;
    std::vector<cplx> kB0, kB1, kB2, inverse;  // row-major in t1
    double residual = 0.0;                     // max |kB0 + kB1 + kB2 - H^{-1} m_B|
};
ProductSplit product_split(const ProductSpace& space, const MultiplierSpec& m, std::span<const double> t1s,
                           std::span<const double> t2s, double epsilon, KernelOptions opt = {});

// N_1(t1, l2) = (1 - Phi1) e^{delta rho1 t1} int e^{i l1 t1} C1 m(l1, l2) / c1(-l1) dl1.
cplx n1_eval(const ProductSpace& space, const MultiplierSpec& m, const Exponent& p, double t1, double lambda2,
             double epsilon, KernelOptions opt = {});

// chi_{A+} D^{1/p} kappa_1(v b) = tau1 + tau2 + tau3 on H2, tables indexed [i_b * nx + i_x].
struct TauTables {
    std::vector<double> x, t_b;
    std::vector<cplx> tau1, tau2, tau3, whole;
    double residual = 0.0;
};
TauTables tau_decomposition(const RankOneSpace& space, const SpectralFunction& m, const Exponent& p,
                            std::span<const double> x_grid, std::span<const double> b_grid, double epsilon,
                            KernelOptions opt = {});

enum class ParityCase { even_even, even_odd, odd_odd };
const char* to_string(ParityCase c);

// Derivative d^{d1}_{v1} d^{d2}_{v2} of the Chebyshev average of
// (O1*)^{j1} (O2*)^{j2} M, M = (1 - Psi1)(1 - Psi2) m |c1|^{-2} |c2|^{-2}, with j = n/2 - 1 (even)
// or (n - 1)/2 (odd).  Even variables are averaged over [0, 1] against (1 - s^2)^{-1/2} ds,
// odd variables are evaluated at v directly.
cplx chebyshev_average(const ProductSpace& space, const MultiplierSpec& m, std::array<double, 2> v,
                       ParityCase parity, std::array<int, 2> v_derivative = {0, 0});
// [(O1*)^{j1}(O2*)^{j2} M] and its l-derivatives at a point.
cplx chebyshev_integrand(const ProductSpace& space, const MultiplierSpec& m, std::array<double, 2> lambda,
                         std::array<int, 2> o_star, std::array<int, 2> derivative);

// Declared bound for one estimate, fitted in one variable.
struct EstimateTarget {
    std::string name;
    KernelPieceId piece = KernelPieceId::phi_p;
    std::string bound_family;
    std::string surrogate;
    std::string space = "H2";
    std::array<double, 2> window{3.0, 30.0};
    double expected_exponent = 1.0;  // claimed decay (negative: allowed divergence)
    double tolerance = 0.15;
    bool exponential = false;        // fit log|f| against t instead of log t; tolerance is relative
    int variable = 0;                // fitted variable of a product piece
    double parameter = 0.0;          // frozen second variable (l2 for N1, v for averages)
    std::array<int, 2> orders{0, 0}; // derivative orders of a Chebyshev average
    double contour_epsilon = 0.05;
};

// The battery of pointwise bounds checked by `estimate_verify`.
std::vector<EstimateTarget> bound_targets(const Exponent& p);
// Runs one target with its model multiplier; PASS iff each fitted decay >= claimed - tolerance.
EstimateReport estimate_verify(const EstimateTarget& target, const Exponent& p);
std::vector<EstimateReport> estimate_battery(const Exponent& p);

}  // namespace sphmult
