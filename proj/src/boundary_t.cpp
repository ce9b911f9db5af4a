#include "mfp/boundary_t.hpp"

#include <cmath>
#include <sstream>

#include "mfp/boundary_r.hpp"

namespace mfp {

namespace {

constexpr double density_floor = 1e-10;
constexpr double atom_window = 1e-3;

bool exceeds_at(const HerglotzRepT& rep, double t, double theta) {
    return exceeds_threshold(g_circle(rep, theta), t);
}

// Crossing of the predicate between theta_out (false) and theta_in (true).
double refine_arc_end(const HerglotzRepT& rep, double t, double theta_out, double theta_in) {
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (theta_out + theta_in);
        (exceeds_at(rep, t, mid) ? theta_in : theta_out) = mid;
    }
    return 0.5 * (theta_out + theta_in);
}

std::vector<Arc> runs_to_arcs(const HerglotzRepT& rep, double t, const std::vector<double>& grid,
                              const std::vector<char>& in) {
    const std::size_t n = grid.size();
    std::vector<Arc> arcs;
    std::size_t first_out = n;
    for (std::size_t k = 0; k < n; ++k)
        if (!in[k]) {
            first_out = k;
            break;
        }
    if (first_out == n) {
        arcs.push_back({-pi, pi, true});
        return arcs;
    }
    // Walk once around the circle starting from a node outside the set.
    auto angle = [&](std::size_t j) { return grid[j % n] + two_pi * double(j / n); };
    for (std::size_t j = first_out; j < first_out + n;) {
        if (!in[j % n]) {
            ++j;
            continue;
        }
        std::size_t e = j;
        while (in[(e + 1) % n]) ++e;
        double start = refine_arc_end(rep, t, angle(j - 1), angle(j));
        double end = refine_arc_end(rep, t, angle(e + 1), angle(e));
        const double shift = two_pi * std::floor((start + pi) / two_pi);
        arcs.push_back({start - shift, end - shift, false});
        j = e + 1;
    }
    return arcs;
}

}  // namespace

double t_kernel(double r, double theta) {
    const double s = std::sin(0.5 * theta);
    if (r == 1.0) return s == 0.0 ? inf : 1.0 / (2.0 * s * s);
    const double f = (r - 1.0) * (r + 1.0) / std::log1p(r - 1.0);
    return f / ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s);
}

double g_circle(const HerglotzRepT& rep, double theta) {
    double g = 0.0;
    for (const auto& a : rep.atoms) {
        const double d = wrap_angle(theta - a.angle);
        if (std::abs(d) < atom_window) return inf;
        g += a.mass / (1.0 - std::cos(d));
    }
    if (rep.density(theta) > density_floor) return inf;
    // g = -d/dr Re u(r e^{i theta}) at r = 1.
    Complex s = 0.0;
    const Complex e = std::polar(1.0, theta);
    for (std::size_t n = rep.coeffs.size(); n-- > 1;) s = (s + double(n) * rep.coeffs[n]) * e;
    return g - 2.0 * s.real();
}

double kernel_integral(const HerglotzRepT& rep, double r, double theta) {
    return -eval_u_from_rep(rep, std::polar(r, theta)).real() / std::log(r);
}

double radius_r_t(const HerglotzRepT& rep, double t, double theta) {
    if (!exceeds_at(rep, t, theta)) return 1.0;
    const double thr = 1.0 / (t - 1.0);
    // K as a function of s = -log r decreases from g(theta) to 0.
    auto K = [&](double s) { return eval_u_from_rep(rep, std::polar(std::exp(-s), theta)).real() / s; };
    double lo = std::log(1e-15), hi = 0.0;
    if (K(std::exp(lo)) <= thr) return 1.0;
    while (K(std::exp(hi)) >= thr) {
        hi += std::log(2.0);
        if (hi > 10.0) throw BracketError("kernel integral does not fall below the threshold");
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (K(std::exp(mid)) > thr ? lo : hi) = mid;
    }
    return std::exp(-std::exp(0.5 * (lo + hi)));
}

std::vector<Arc> vt_plus_t(const HerglotzRepT& rep, double t, const std::vector<double>& theta_grid) {
    std::vector<char> in(theta_grid.size());
    for (std::size_t k = 0; k < theta_grid.size(); ++k) in[k] = exceeds_at(rep, t, theta_grid[k]);
    return runs_to_arcs(rep, t, theta_grid, in);
}

Complex u_at_radius(const HerglotzRepT& rep, double radius, double theta) {
    return radius == 1.0 ? boundary_u(rep, theta) : eval_u_from_rep(rep, std::polar(radius, theta));
}

namespace {

Complex h_at_radius(const HerglotzRepT& rep, double t, double radius, double theta) {
    const Complex h = std::polar(radius, theta) * std::exp((t - 1.0) * u_at_radius(rep, radius, theta));
    if (std::abs(std::abs(h) - 1.0) > 1e-8)
        throw ModulusError("|h_t| - 1 = " + format_double(std::abs(h) - 1.0) + " at theta = " + format_double(theta));
    return h;
}

}  // namespace

Complex h_t_t(const HerglotzRepT& rep, double t, double theta) {
    return h_at_radius(rep, t, radius_r_t(rep, t, theta), theta);
}

std::vector<double> uniform_theta_grid(int n) {
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = -pi + two_pi * k / n;
    return g;
}

BoundaryCurveT boundary_t(const HerglotzRepT& rep, double t, int n) {
    if (!(t > 1.0)) throw DomainError("boundary requires t > 1");
    BoundaryCurveT c;
    c.t = t;
    c.theta_grid = uniform_theta_grid(n);
    c.radii.resize(n);
    c.g.resize(n);
    c.h_angles.resize(n);
    std::vector<char> in(n);
    for (int k = 0; k < n; ++k) {
        const double th = c.theta_grid[k];
        c.g[k] = g_circle(rep, th);
        in[k] = exceeds_threshold(c.g[k], t);
        c.radii[k] = in[k] ? radius_r_t(rep, t, th) : 1.0;
        const double a = std::arg(h_at_radius(rep, t, c.radii[k], th));
        c.h_angles[k] = k == 0 ? a : c.h_angles[k - 1] + wrap_angle(a - c.h_angles[k - 1]);
    }
    c.vt_plus = runs_to_arcs(rep, t, c.theta_grid, in);
    return c;
}

std::string to_csv(const BoundaryCurveT& c) {
    std::ostringstream os;
    os << "theta,R_t,g_finite,g_value_or_inf,arg_h_t,in_vt_plus\n";
    for (std::size_t k = 0; k < c.theta_grid.size(); ++k)
        os << format_double(c.theta_grid[k]) << ',' << format_double(c.radii[k]) << ','
           << (std::isfinite(c.g[k]) ? 1 : 0) << ',' << format_double(c.g[k]) << ',' << format_double(c.h_angles[k])
           << ',' << (exceeds_threshold(c.g[k], c.t) ? 1 : 0) << '\n';
    return os.str();
}

}  // namespace mfp
