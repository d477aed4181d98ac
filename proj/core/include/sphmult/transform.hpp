#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sphmult/quadrature.hpp"
#include "sphmult/specfun.hpp"

namespace sphmult {

enum class DecayKind { compact, gaussian, exponential };

struct DecayHint {
    DecayKind kind = DecayKind::gaussian;
    double rate = 0.0;  // exponential rate when kind == exponential
};

// Gauss-Legendre panel grid on [0, T]; values live on the nodes.
struct RadialGrid {
    std::vector<double> breaks;
    int nodes_per_panel = 16;

    static RadialGrid uniform(double t_max, double panel_width, int nodes_per_panel = 16);
    QuadRule rule() const;
};

// Bi-K-invariant function sampled on the nodes of a RadialGrid.
class RadialFunction {
public:
    RadialFunction() = default;
    RadialFunction(RadialGrid grid, std::vector<cplx> values, DecayHint decay = {});

    static RadialFunction sample(const std::function<cplx(double)>& f, RadialGrid grid, DecayHint decay = {});

    const RadialGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& t_grid() const noexcept { return rule_.x; }
    const std::vector<double>& weights() const noexcept { return rule_.w; }
    const std::vector<cplx>& values() const noexcept { return values_; }
    DecayHint decay() const noexcept { return decay_; }

    // Panel-wise Lagrange interpolation; zero beyond the grid.
    cplx at(double t) const;

private:
    RadialGrid grid_;
    QuadRule rule_;
    std::vector<cplx> values_;
    DecayHint decay_;
};

// Function of the spectral parameter with declared symmetry and holomorphy strip.
struct SpectralFunction {
    std::function<cplx(cplx)> evaluator;
    bool weyl_symmetric = true;
    double analytic_strip = 0.0;
    std::string name;
    bool sector_holomorphic = false;  // also holomorphic on |Im l| < |Re l|

    cplx operator()(cplx lambda) const { return evaluator(lambda); }
    // Spot check of evaluator(l) == evaluator(-l).
    bool check_weyl(double tol = 1e-10) const;
};

struct InverseOptions {
    double lambda_max = 0.0;  // 0: chosen from epsilon so the Gaussian tail is below e^{-40}
    double lambda_min_panel = 1e-3;
    int nodes_per_panel = 16;
};

// Spectral cutoff used for a Gaussian regularizer e^{-eps l^2}.
double spectral_cutoff(double epsilon, double fallback = 60.0);

// Hf(lambda) = int_0^inf f(t) phi_{-lambda}(t) delta(t) dt.
cplx spherical_transform(const RankOneSpace& space, const RadialFunction& f, cplx lambda);
std::vector<cplx> spherical_transform(const RankOneSpace& space, const RadialFunction& f,
                                      std::span<const double> lambdas);

// H^{-1} of m e^{-eps l^2}: C int_R m(l) e^{-eps l^2} phi_l(t) |c(l)|^{-2} dl.
cplx inverse_spherical_transform(const RankOneSpace& space, const SpectralFunction& m, double t, double epsilon,
                                 const InverseOptions& opt = {});
std::vector<cplx> inverse_spherical_transform(const RankOneSpace& space, const SpectralFunction& m,
                                              std::span<const double> ts, double epsilon,
                                              const InverseOptions& opt = {});
RadialFunction inverse_spherical_transform(const RankOneSpace& space, const SpectralFunction& m,
                                           const RadialGrid& grid, double epsilon, const InverseOptions& opt = {});

// Abel transform via the slice identity: (1/2pi) int Hf(l) e^{i l b} dl, at each b.
std::vector<cplx> abel_transform(const RankOneSpace& space, const RadialFunction& f, std::span<const double> b,
                                 double lambda_max);

// f * k through the product of spherical transforms, sampled on f's grid.
RadialFunction convolve_radial(const RankOneSpace& space, const RadialFunction& f, const RadialFunction& k,
                               double lambda_max);

// Ratio int |f|^2 delta dt / int_R |Hf|^2 |c|^{-2} dl.
double plancherel_ratio(const RankOneSpace& space, const RadialFunction& f, double lambda_max);

}  // namespace sphmult
