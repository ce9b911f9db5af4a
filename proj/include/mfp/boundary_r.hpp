#pragma once

#include <string>
#include <vector>

#include "mfp/herglotz.hpp"

namespace mfp {

/// Boundary of the domain Omega_t for a measure on [0, inf).
struct BoundaryCurveR {
    double t = 0.0;
    std::vector<double> r_grid;
    std::vector<double> g;
    std::vector<double> angles;  // A_t(r)
    std::vector<double> h_values;
    std::vector<Interval> vt_plus;
};

/// True when g exceeds the threshold 1/(t-1) beyond a relative margin of 1e-9.
bool exceeds_threshold(double g, double t);

/// \int r (s^2 + 1)/(r - s)^2 drho(s), +inf on the closed support of rho.
double g_radial(const NevanlinnaRepR& rep, double r);
/// Same quantity from mu through z u'(z) just above the axis.
double g_radial(const MeasureR& mu, double r);
/// Uses the rep when it is exact, mu otherwise.
double g_value(const MeasureR& mu, const NevanlinnaRepR& rep, double r);

/// -Im u(r e^{i theta}) / theta.
double g_polar(const MeasureR& mu, double r, double theta);

double angle_a_t(const MeasureR& mu, const NevanlinnaRepR& rep, double t, double r);

/// Log-spaced grid around the support of mu and its reciprocal, widened until
/// both ends lie outside V_t^+.
std::vector<double> default_r_grid(const MeasureR& mu, const NevanlinnaRepR& rep, double t, int n = 1024);

std::vector<Interval> vt_plus_r(const MeasureR& mu, const NevanlinnaRepR& rep, double t,
                                const std::vector<double>& r_grid);

/// u(r e^{i theta}) from the rep when exact, else from mu, nudged off the axis at theta = 0.
Complex u_near_axis(const MeasureR& mu, const NevanlinnaRepR& rep, double r, double theta);

double h_t_r(const MeasureR& mu, const NevanlinnaRepR& rep, double t, double r);

BoundaryCurveR boundary_r(const MeasureR& mu, const NevanlinnaRepR& rep, double t,
                          std::vector<double> r_grid = {});

std::string to_csv(const BoundaryCurveR& curve);

}  // namespace mfp
