#pragma once

#include <span>
#include <vector>

#include "sphmult/report.hpp"
#include "sphmult/specfun.hpp"

namespace sphmult {

enum class SphericalMethod { oracle, local, hc };
const char* to_string(SphericalMethod m);

struct SphericalSample {
    cplx lambda{};
    double t = 0.0;
    cplx value{};
    SphericalMethod method = SphericalMethod::oracle;
    Status status = Status::ok;
    double est_error = 0.0;
};

struct OracleOptions {
    double rel_tol = 1e-13;
    double abs_tol = 1e-14;
    double t_launch = 1e-3;
};

inline constexpr double oracle_t_max = 30.0;

// phi_lambda(t) from the radial eigen-equation, integrated in the rescaled
// variable psi = e^{(rho - |Im lambda|) t} phi.
cplx phi_oracle(const RankOneSpace& space, cplx lambda, double t, const OracleOptions& opt = {});

// phi_lambda on a nondecreasing grid of t >= 0 in one sweep; optional t-derivatives.
std::vector<cplx> phi_oracle_table(const RankOneSpace& space, cplx lambda, std::span<const double> ts,
                                   const OracleOptions& opt = {}, std::vector<cplx>* derivative = nullptr);

// Hypergeometric series 2F1((rho+i l)/2, (rho-i l)/2; n/2; -sinh^2 t), valid for sinh t < 1.
cplx phi_series(const RankOneSpace& space, cplx lambda, double t, cplx* derivative = nullptr);

// Leading local term A(lambda, t) = w(t) cJ_{n/2-1}(lambda t).
cplx local_term(const RankOneSpace& space, cplx lambda, double t);

SphericalSample phi_local(const RankOneSpace& space, cplx lambda, double t, double r0 = 1.0);

// Symmetrized Harish-Chandra sum without the oracle comparison.
Evaluated hc_value(const RankOneSpace& space, cplx lambda, double t, int L);
SphericalSample phi_hc(const RankOneSpace& space, cplx lambda, double t, int L);

// |u'' + P u' + (lambda^2 + rho^2) u| from central differences of the oracle.
double ode_residual(const RankOneSpace& space, cplx lambda, double t, double h = 1e-3);

EstimateReport weyl_symmetry_check(const RankOneSpace& space, std::span<const double> lambda_grid,
                                   std::span<const double> t_grid, double tol = 1e-8);

}  // namespace sphmult
