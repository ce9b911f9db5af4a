#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "mfp/core.hpp"
#include "mfp/quadrature.hpp"

namespace mfp {

struct AtomR {
    double pos;
    double mass;
};

struct AtomT {
    double angle;  // radians in (-pi, pi]
    double mass;
};

/// Density given by linear interpolation between samples, zero outside the grid.
struct SampledDensity {
    std::vector<double> grid;
    std::vector<double> values;

    bool empty() const { return grid.size() < 2; }
    double operator()(double x) const;
    /// Exact integral of the interpolant.
    double integral() const;
    /// Cell boundaries of the cells carrying positive density, merged into runs.
    std::vector<std::vector<double>> positive_runs() const;
};

struct MeasureR {
    std::vector<AtomR> atoms;
    double mass_at_zero = 0.0;
    SampledDensity ac;
    int quadrature_hint = 0;  // interval budget override, 0 = default
};

struct MeasureT {
    std::vector<AtomT> atoms;
    SampledDensity ac;  // density in the angle variable
    int quadrature_hint = 0;
};

using Measure = std::variant<MeasureR, MeasureT>;

/// Throws MeasureError when the invariants of the type are violated.
void validate(const MeasureR& mu, double tol = 1e-8);
void validate(const MeasureT& mu, double tol = 1e-8);

bool is_atomic(const MeasureR& mu);
double total_mass(const MeasureR& mu);
double total_mass(const MeasureT& mu);
double first_moment(const MeasureR& mu);
Complex first_moment(const MeasureT& mu);

/// Smallest and largest point carrying mass (mass at zero ignored).
std::pair<double, double> support_range(const MeasureR& mu);

/// p = psi(z)/z and q = psi'(z). Both transforms and their derivatives are
/// assembled from this pair, which stays finite at z = 0.
struct MomentPair {
    Complex p;
    Complex q;
};

MomentPair moment_pair(const MeasureR& mu, Complex z, bool with_q = true,
                       const QuadOptions& opt = {});
MomentPair moment_pair(const MeasureT& mu, Complex z, bool with_q = true,
                       const QuadOptions& opt = {});

/// Quantities at a point derived from a MomentPair.
struct LocalTransforms {
    Complex z, psi, eta, kappa, eta_prime;
    Complex z_u_prime;  // z * u'(z) with u = log kappa

    static LocalTransforms from(Complex z, const MomentPair& m);
};

void check_domain(const MeasureR&, Complex z);
void check_domain(const MeasureT&, Complex z);

Complex psi(const MeasureR& mu, Complex z);
Complex psi(const MeasureT& mu, Complex z);
Complex eta(const MeasureR& mu, Complex z);
Complex eta(const MeasureT& mu, Complex z);
Complex eta_prime(const MeasureR& mu, Complex z);
Complex eta_prime(const MeasureT& mu, Complex z);
Complex kappa(const MeasureR& mu, Complex z);
Complex kappa(const MeasureT& mu, Complex z);

/// Sigma(z) = eta^{-1}(z)/z by Newton from the seed z/eta'(0).
Complex sigma(const MeasureR& mu, Complex z);
Complex sigma(const MeasureT& mu, Complex z);

struct MembershipReport {
    bool member = true;
    std::string reason;
    std::vector<std::string> violations;
    int zero_count = 0;
    int winding_samples = 0;
    int samples = 0;
};

using EtaFunction = std::function<Complex(Complex)>;

MembershipReport membership_r(const MeasureR& mu);
/// Sampling check of the half-line eta-transform conditions for an arbitrary function.
MembershipReport membership_r(const EtaFunction& f);
MembershipReport membership_t(const MeasureT& mu, int winding_samples = 4096);
/// Same check for an arbitrary function on the disc; zeros counted by phase unwrapping.
MembershipReport membership_t(const EtaFunction& f, int winding_samples = 4096);

/// Smoothed density of nu = pushforward of mu under x -> 1/x, on grid x.
/// Values live in the reciprocal variable x.
std::vector<double> stieltjes_invert_r(const EtaFunction& f, const std::vector<double>& grid,
                                       double eps);
/// Smoothed density (in theta) of the pushforward under zeta -> 1/zeta.
std::vector<double> poisson_invert_t(const EtaFunction& f, const std::vector<double>& theta,
                                     double r);

}  // namespace mfp
