#pragma once

#include <string>
#include <vector>

#include "mfp/measures.hpp"

namespace mfp {

/// Outcome of solving Phi_t(omega) = z.
struct OmegaResult {
    Complex omega;
    double residual = 0.0;  // |Phi_t(omega) - z|
    int iterations = 0;     // Newton iterations summed over the path
    int damping = 0;        // step halvings summed over the path
    int path_points = 0;
    bool in_domain = true;  // arg omega in [arg z, pi) or |omega| <= |z|
    bool non_unique = false;  // a second seed found another admissible root
    std::string warning;      // "NonUniqueWarning: ..." when non_unique
};

OmegaResult solve_omega(const MeasureR& mu, double t, Complex z);
OmegaResult solve_omega(const MeasureT& mu, double t, Complex z);

/// eta of the t-th power at z, through eta_mu(omega_t(z)).
Complex eta_power(const MeasureR& mu, double t, Complex z);
Complex eta_power(const MeasureT& mu, double t, Complex z);

/// Largest relative gap between Sigma of the power (inverted through the
/// subordination function) and Sigma_mu^t over the probes.
double sigma_power_check(const MeasureR& mu, double t, const std::vector<Complex>& z_list);
double sigma_power_check(const MeasureT& mu, double t, const std::vector<Complex>& z_list);

/// Density of the power at the points y of the original variable, by
/// Stieltjes inversion at 1/y + i eps/y.
std::vector<double> oracle_density_r(const MeasureR& mu, double t, const std::vector<double>& y,
                                     double eps = 1e-5);
/// Density (in angle) of the power at the angles phi, by Poisson inversion at radius r.
std::vector<double> oracle_density_t(const MeasureT& mu, double t, const std::vector<double>& phi,
                                     double r = 1.0 - 1e-5);

/// |omega - eta_t(z) (z/eta_t(z))^{1/t}| with the root continued radially from 0.
double circle_formula_residual(const MeasureT& mu, double t, Complex z);

struct OracleTrace {
    double t = 0.0;
    std::vector<Complex> probes;
    std::vector<OmegaResult> results;
};

OracleTrace trace(const MeasureR& mu, double t, const std::vector<Complex>& probes);
OracleTrace trace(const MeasureT& mu, double t, const std::vector<Complex>& probes);

std::string to_csv(const OracleTrace& tr);

}  // namespace mfp
