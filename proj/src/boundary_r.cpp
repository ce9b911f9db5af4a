#include "mfp/boundary_r.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfp {

namespace {

// Angle used to read boundary values just above the positive axis.
double axis_offset(double r) { return std::max(1e-9, 2e-12 / r); }

// r \int_a^b v(s) (s^2 + 1)/(r - s)^2 ds for v linear, r outside [a, b].
double g_linear_cell(double r, double a, double b, double va, double vb) {
    const double slope = (vb - va) / (b - a);
    const double A = va + slope * (r - a);
    const double B = r * r + 1.0;
    const double q = slope;
    const double wa = a - r, wb = b - r;
    const double h = b - a;
    const double c0 = A * B, c1 = 2.0 * r * A + q * B, c2 = A + 2.0 * r * q, c3 = q;
    const double val = c0 * h / (wa * wb) + c1 * std::log(wb / wa) + c2 * h + 0.5 * c3 * (wb * wb - wa * wa);
    return r * val;
}

}  // namespace

bool exceeds_threshold(double g, double t) {
    const double thr = 1.0 / (t - 1.0);
    return g > thr * (1.0 + 1e-9);
}

double g_radial(const NevanlinnaRepR& rep, double r) {
    double g = 0.0;
    for (const auto& at : rep.rho.atoms) {
        if (r == at.pos) return inf;
        g += at.mass * r * (at.pos * at.pos + 1.0) / ((r - at.pos) * (r - at.pos));
    }
    for (const auto& iv : rep.rho.unit_intervals) {
        if (r >= iv.lo && r <= iv.hi) return inf;
        g += std::isinf(iv.hi) ? r / (iv.lo - r) : r * (1.0 / (r - iv.hi) - 1.0 / (r - iv.lo));
    }
    const auto& d = rep.rho.density;
    for (std::size_t i = 0; i + 1 < d.grid.size(); ++i) {
        if (d.values[i] == 0.0 && d.values[i + 1] == 0.0) continue;
        if (r >= d.grid[i] && r <= d.grid[i + 1]) return inf;
        g += g_linear_cell(r, d.grid[i], d.grid[i + 1], d.values[i], d.values[i + 1]);
    }
    return g;
}

double g_radial(const MeasureR& mu, double r) {
    // Where mu has density at 1/r, psi and hence kappa are non-real on the axis.
    if (!mu.ac.empty() && mu.ac(1.0 / r) > 0.0) return inf;
    const double th = axis_offset(r);
    const Complex z = std::polar(r, th);
    const auto lt = LocalTransforms::from(z, moment_pair(mu, z, true));
    const double im = -log_kappa_principal_r(lt).imag();
    const double g = -lt.z_u_prime.real();
    // Off the support -Im u is about th * g; inside it stays of order one.
    if (im > 1e-6 && im > 10.0 * th * std::max(g, 0.0)) return inf;
    return g;
}

double g_value(const MeasureR& mu, const NevanlinnaRepR& rep, double r) {
    return rep.exact ? g_radial(rep, r) : g_radial(mu, r);
}

double g_polar(const MeasureR& mu, double r, double theta) {
    return -log_kappa(mu, std::polar(r, theta)).imag() / theta;
}

double angle_a_t(const MeasureR& mu, const NevanlinnaRepR& rep, double t, double r) {
    if (!exceeds_threshold(g_value(mu, rep, r), t)) return 0.0;
    const double thr = 1.0 / (t - 1.0);
    double lo = 1e-10, hi = pi - 1e-9;
    if (g_polar(mu, r, lo) <= thr) return 0.0;
    if (g_polar(mu, r, hi) >= thr)
        throw BracketError("g_polar stays above the threshold at r = " + format_double(r));
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (g_polar(mu, r, mid) > thr ? lo : hi) = mid;
    }
    const double a = 0.5 * (lo + hi);
    const double residual = log_kappa(mu, std::polar(r, a)).imag() + a * thr;
    if (std::abs(residual) > 1e-8)
        throw BracketError("angle residual " + format_double(residual) + " at r = " + format_double(r));
    return a;
}

std::vector<double> default_r_grid(const MeasureR& mu, const NevanlinnaRepR& rep, double t, int n) {
    auto [lo, hi] = support_range(mu);
    if (!std::isfinite(lo) || hi <= 0.0) {
        lo = 1.0;
        hi = 1.0;
    }
    double a = std::min(lo, 1.0 / hi) / 10.0;
    double b = std::max(hi, 1.0 / lo) * 10.0;
    while (a > 1e-12 && exceeds_threshold(g_value(mu, rep, a), t)) a /= 10.0;
    while (b < 1e12 && exceeds_threshold(g_value(mu, rep, b), t)) b *= 10.0;
    std::vector<double> grid(n);
    const double la = std::log(a), lb = std::log(b);
    for (int k = 0; k < n; ++k) grid[k] = std::exp(la + (lb - la) * k / (n - 1));
    return grid;
}

namespace {

// Crossing of the predicate between r_out (false) and r_in (true), in log r.
double refine_endpoint(const MeasureR& mu, const NevanlinnaRepR& rep, double t, double r_out, double r_in) {
    double lo = std::log(r_out), hi = std::log(r_in);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (exceeds_threshold(g_value(mu, rep, std::exp(mid)), t) ? hi : lo) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

std::vector<Interval> runs_to_intervals(const MeasureR& mu, const NevanlinnaRepR& rep, double t,
                                        const std::vector<double>& grid, const std::vector<char>& in) {
    std::vector<Interval> out;
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < n;) {
        if (!in[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && in[j + 1]) ++j;
        const double lo = i == 0 ? grid[0] : refine_endpoint(mu, rep, t, grid[i - 1], grid[i]);
        const double hi = j + 1 == n ? grid[n - 1] : refine_endpoint(mu, rep, t, grid[j + 1], grid[j]);
        out.push_back({lo, hi});
        i = j + 1;
    }
    return out;
}

}  // namespace

std::vector<Interval> vt_plus_r(const MeasureR& mu, const NevanlinnaRepR& rep, double t,
                                const std::vector<double>& r_grid) {
    std::vector<char> in(r_grid.size());
    for (std::size_t i = 0; i < r_grid.size(); ++i) in[i] = exceeds_threshold(g_value(mu, rep, r_grid[i]), t);
    return runs_to_intervals(mu, rep, t, r_grid, in);
}

Complex u_near_axis(const MeasureR& mu, const NevanlinnaRepR& rep, double r, double theta) {
    if (theta > 0.0) return log_kappa(mu, std::polar(r, theta));
    if (rep.exact) return eval_u_from_rep(rep, r);
    // u is real on the axis off the support of rho.
    return log_kappa(mu, std::polar(r, axis_offset(r))).real();
}

namespace {

double h_at_angle(const MeasureR& mu, const NevanlinnaRepR& rep, double t, double r, double a) {
    const Complex u = u_near_axis(mu, rep, r, a);
    const double phase = a + (t - 1.0) * u.imag();
    if (std::abs(phase) > 1e-8) throw PhaseError("arg Phi_t = " + format_double(phase) + " at r = " + format_double(r));
    return r * std::exp((t - 1.0) * u.real());
}

}  // namespace

double h_t_r(const MeasureR& mu, const NevanlinnaRepR& rep, double t, double r) {
    return h_at_angle(mu, rep, t, r, angle_a_t(mu, rep, t, r));
}

BoundaryCurveR boundary_r(const MeasureR& mu, const NevanlinnaRepR& rep, double t, std::vector<double> r_grid) {
    if (!(t > 1.0)) throw DomainError("boundary requires t > 1");
    BoundaryCurveR c;
    c.t = t;
    c.r_grid = r_grid.empty() ? default_r_grid(mu, rep, t) : std::move(r_grid);
    const std::size_t n = c.r_grid.size();
    c.g.resize(n);
    c.angles.resize(n);
    c.h_values.resize(n);
    std::vector<char> in(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = c.r_grid[i];
        c.g[i] = g_value(mu, rep, r);
        in[i] = exceeds_threshold(c.g[i], t);
        c.angles[i] = in[i] ? angle_a_t(mu, rep, t, r) : 0.0;
        c.h_values[i] = h_at_angle(mu, rep, t, r, c.angles[i]);
    }
    c.vt_plus = runs_to_intervals(mu, rep, t, c.r_grid, in);
    return c;
}

std::string to_csv(const BoundaryCurveR& c) {
    std::ostringstream os;
    os << "r,A_t,g,h_t,in_vt_plus\n";
    for (std::size_t i = 0; i < c.r_grid.size(); ++i)
        os << format_double(c.r_grid[i]) << ',' << format_double(c.angles[i]) << ',' << format_double(c.g[i]) << ','
           << format_double(c.h_values[i]) << ',' << (exceeds_threshold(c.g[i], c.t) ? 1 : 0) << '\n';
    return os.str();
}

}  // namespace mfp
