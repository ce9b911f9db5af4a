#pragma once

#include <vector>

#include <json.hpp>

#include "mfp/measures.hpp"

namespace mfp {

struct Interval {
    double lo;
    double hi;  // may be +inf
};

/// Positive measure on [0, inf): atoms, intervals carrying the density
/// 1/(1+s^2) exactly, and a piecewise-linear sampled density.
struct RhoR {
    std::vector<AtomR> atoms;
    std::vector<Interval> unit_intervals;
    SampledDensity density;

    double total_mass() const;
};

/// u(z) = a + \int (1 + z s)/(z - s) drho(s).
struct NevanlinnaRepR {
    double a = 0.0;
    RhoR rho;
    bool exact = false;  // built in closed form rather than extracted
    int clipped_nodes = 0;
};

/// u(z) = i alpha + \int (zeta + z)/(zeta - z) drho(zeta). The density of rho is
/// stored through its Fourier coefficients b_n = \int e^{-in phi} rho'(phi) dphi,
/// n >= 0, so that Re u(r e^{i theta}) = sum_n b_|n| r^|n| e^{i n theta}.
struct HerglotzRepT {
    double alpha = 0.0;
    std::vector<AtomT> atoms;
    std::vector<Complex> coeffs;
    double mass_deficit = 0.0;
    int clipped_nodes = 0;

    double total_mass() const;
    /// Density of rho at angle theta.
    double density(double theta) const;
    /// Uniform angle grid on [-pi, pi) with the (clipped) density of rho.
    SampledDensity sampled(int n) const;
    /// Build from density samples on the uniform grid -pi + 2 pi k / n.
    static HerglotzRepT from_density(double alpha, const std::vector<double>& values,
                                     std::vector<AtomT> atoms = {});
};

/// Continuous branch of log kappa. Half-line: principal branch, real on (-inf, 0).
/// Disc: fixed by u(0) = -log eta'(0) and continued radially.
Complex log_kappa(const MeasureR& mu, Complex z);
Complex log_kappa(const MeasureT& mu, Complex z);
/// log kappa at z from already computed local transforms.
Complex log_kappa_principal_r(const LocalTransforms& lt);

struct ExtractOptionsR {
    int grid_size = 2048;
    double grid_lo = 1e-3;
    double grid_hi = 1e3;
    std::vector<double> eps = {1e-3, 1e-4, 1e-5};
    double refine_tol = 1e-8;
    int max_nodes = 200000;
};

struct ExtractOptionsT {
    int grid_size = 2048;
    std::vector<double> radii = {0.98, 0.99};
};

NevanlinnaRepR extract_rep_r(const MeasureR& mu, const ExtractOptionsR& opt = {});
NevanlinnaRepR closed_form_rho_atomic_r(const MeasureR& mu);
HerglotzRepT extract_rep_t(const MeasureT& mu, const ExtractOptionsT& opt = {});

Complex eval_u_from_rep(const NevanlinnaRepR& rep, Complex z);
Complex eval_u_from_rep(const HerglotzRepT& rep, Complex z);
/// Boundary value u(e^{i theta}) from the rep (no rho atom at theta).
Complex boundary_u(const HerglotzRepT& rep, double theta);

nlohmann::json to_json(const NevanlinnaRepR& rep);
nlohmann::json to_json(const HerglotzRepT& rep, int samples = 2048);

}  // namespace mfp
