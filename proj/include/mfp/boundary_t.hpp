#pragma once

#include <string>
#include <vector>

#include "mfp/herglotz.hpp"

namespace mfp {

/// Arc [start, end] of the circle with end possibly beyond pi.
struct Arc {
    double start;
    double end;
    bool full = false;
};

struct BoundaryCurveT {
    double t = 0.0;
    std::vector<double> theta_grid;
    std::vector<double> radii;
    std::vector<double> g;
    std::vector<double> h_angles;  // unwrapped
    std::vector<Arc> vt_plus;
};

double t_kernel(double r, double theta);

/// \int drho(e^{i phi}) / (1 - cos(theta - phi)), +inf where the density of rho
/// does not vanish at theta.
double g_circle(const HerglotzRepT& rep, double theta);

/// \int T(r, theta - phi) drho(e^{i phi}) for r < 1.
double kernel_integral(const HerglotzRepT& rep, double r, double theta);

double radius_r_t(const HerglotzRepT& rep, double t, double theta);

std::vector<Arc> vt_plus_t(const HerglotzRepT& rep, double t, const std::vector<double>& theta_grid);

/// u at R e^{i theta}, using the boundary series when R = 1.
Complex u_at_radius(const HerglotzRepT& rep, double radius, double theta);

Complex h_t_t(const HerglotzRepT& rep, double t, double theta);

/// Uniform grid -pi + 2 pi k / n.
std::vector<double> uniform_theta_grid(int n);

BoundaryCurveT boundary_t(const HerglotzRepT& rep, double t, int n = 2048);

std::string to_csv(const BoundaryCurveT& curve);

}  // namespace mfp
