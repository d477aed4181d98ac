#pragma once
// Frozen reference values; regenerate with tests/oracles/generate.py (mpmath, 60 digits).

#include <array>
#include <complex>

namespace ref {

using cplx = std::complex<double>;

struct PhiValue {
    const char* space;
    cplx lambda;
    double t;
    cplx value;
};

inline constexpr std::array<PhiValue, 27> kPhi{{
    {"H2", {0.5, 0.0}, 0.3, {0.98882338018336724, -4.2628127987946179e-74}},
    {"H2", {0.5, 0.0}, 1.5, {0.7588303492119881, 0.0}},
    {"H2", {0.5, 0.0}, 4, {0.13377113130233963, 0.0}},
    {"H2", {2.0, 0.0}, 0.3, {0.90698212239251846, 0.0}},
    {"H2", {2.0, 0.0}, 1.5, {-0.20986028017852814, 0.0}},
    {"H2", {2.0, 0.0}, 4, {0.06979147236747448, 0.0}},
    {"H2", {1.0, 0.3}, 0.3, {0.97412131449981225, -0.013275070055543047}},
    {"H2", {1.0, 0.3}, 1.5, {0.46885174589115735, -0.22092871435178976}},
    {"H2", {1.0, 0.3}, 4, {-0.27792852280635198, 0.030381981840837944}},
    {"H3", {0.5, 0.0}, 0.3, {0.98146583783939561, -5.831141008399769e-74}},
    {"H3", {0.5, 0.0}, 1.5, {0.64025298172332253, 0.0}},
    {"H3", {0.5, 0.0}, 4, {0.066639808414031004, 0.0}},
    {"H3", {2.0, 0.0}, 0.3, {0.92710155208924307, 0.0}},
    {"H3", {2.0, 0.0}, 1.5, {0.033137972501026903, 0.0}},
    {"H3", {2.0, 0.0}, 4, {0.018126809243809489, 0.0}},
    {"H3", {1.0, 0.3}, 0.3, {0.97173979956950229, -0.008793969761150815}},
    {"H3", {1.0, 0.3}, 1.5, {0.47829519804047087, -0.12802934290696714}},
    {"H3", {1.0, 0.3}, 4, {-0.056017718058916612, -0.019349055399146413}},
    {"CH2", {0.5, 0.0}, 0.3, {0.9536273393884777, -6.0729537279424135e-74}},
    {"CH2", {0.5, 0.0}, 1.5, {0.35124691174243137, 0.0}},
    {"CH2", {0.5, 0.0}, 4, {0.0048750388146325761, 0.0}},
    {"CH2", {2.0, 0.0}, 0.3, {0.91392013464378267, 0.0}},
    {"CH2", {2.0, 0.0}, 1.5, {0.083526072739154065, 0.0}},
    {"CH2", {2.0, 0.0}, 4, {0.00066077646648481232, 0.0}},
    {"CH2", {1.0, 0.3}, 0.3, {0.9465429320713737, -0.0064113023421053536}},
    {"CH2", {1.0, 0.3}, 1.5, {0.28485515206796158, -0.053761593096220662}},
    {"CH2", {1.0, 0.3}, 4, {-0.0019980996365549738, -0.0019066202743588605}},
}};

struct CValue {
    const char* space;
    double lambda;
    cplx value;
};

inline constexpr std::array<CValue, 9> kC{{
    {"H2", 0.5, {0.40429833970921244, -0.72847058074492978}},
    {"H2", 1, {0.34359140992945208, -0.44882725456241559}},
    {"H2", 3, {0.22048729318391303, -0.23976790928104798}},
    {"H3", 0.5, {8.2980709112621978e-35, -2.0}},
    {"H3", 1, {5.9249600642817227e-36, -1.0}},
    {"H3", 3, {1.8886516597172025e-36, -0.33333333333333333}},
    {"CH2", 0.5, {-2.258959518379142, -6.952411168963123}},
    {"CH2", 1, {-1.4832126662828213, -2.6724739783804325}},
    {"CH2", 3, {-0.39575340312752757, -0.46965361858378056}},
}};

struct BesselValue {
    double mu;
    cplx z;
    cplx value;
};

inline constexpr std::array<BesselValue, 9> kBessel{{
    {0, {0.7, 0.0}, {0.88120088860740528, 0.0}},
    {0, {9.0, 0.0}, {-0.090333611182876134, 0.0}},
    {0, {2.0, 1.0}, {0.18785372808246172, -0.64616943515398072}},
    {0.5, {0.7, 0.0}, {0.92031098176813008, 0.0}},
    {0.5, {9.0, 0.0}, {0.045790942804639619, 0.0}},
    {0.5, {2.0, 1.0}, {0.4634364484405575, -0.47624635374092559}},
    {1, {0.7, 0.0}, {0.93998783297159699, 0.0}},
    {1, {9.0, 0.0}, {0.054513730349627838, 0.0}},
    {1, {2.0, 1.0}, {0.60052563637563225, -0.38019551235559218}},
}};

}  // namespace ref
