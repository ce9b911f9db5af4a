#include "mfp/herglotz.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <fftw3.h>

namespace mfp {

namespace {

// Extracted densities below this level are treated as zero.
constexpr double density_floor = 1e-10;
constexpr double clip_tolerance = 1e-9;

// X_m = sum_k f_k exp(-2 pi i m k / n) for m = 0 .. n/2.
std::vector<Complex> real_dft(const std::vector<double>& f) {
    const int n = int(f.size());
    std::vector<double> in(f);
    std::vector<Complex> out(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                          FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

// f_k = X_0 + 2 Re sum_{m >= 1} X_m exp(2 pi i m k / n), the inverse of real_dft up to 1/n.
std::vector<double> real_idft(const std::vector<Complex>& half, int n) {
    std::vector<Complex> in(n / 2 + 1, 0.0);
    std::copy_n(half.begin(), std::min(half.size(), in.size()), in.begin());
    std::vector<double> out(n);
    fftw_plan plan = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                                          FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

// \int_lo^hi (1 + z s)/((z - s)(1 + s^2)) ds, hi possibly infinite.
Complex unit_interval_term(Complex z, const Interval& iv) {
    const Complex la = std::log(Complex(iv.lo) - z);
    if (std::isinf(iv.hi)) return la - 0.5 * std::log1p(iv.lo * iv.lo);
    return std::log((Complex(iv.lo) - z) / (Complex(iv.hi) - z)) +
           0.5 * std::log((1.0 + iv.hi * iv.hi) / (1.0 + iv.lo * iv.lo));
}

// \int_a^b v(s) (1 + z s)/(z - s) ds for v linear from va to vb.
Complex linear_cell_term(Complex z, double a, double b, double va, double vb) {
    const double h = b - a;
    const double slope = (vb - va) / h;
    const Complex vz = va + slope * (z - a);
    const Complex L = -log1p(Complex(h) / (Complex(a) - z));  // \int ds/(z - s)
    return -z * (0.5 * h * (va + vb)) + (1.0 + z * z) * (vz * L - slope * h);
}

double real_psi(const MeasureR& mu, double x) {
    double s = 0.0;
    for (const auto& a : mu.atoms) s += a.mass * x * a.pos / (1.0 - x * a.pos);
    return s;
}

// Root of the increasing function psi - target on the open interval (lo, hi).
double bisect_psi(const MeasureR& mu, double target, double lo, double hi) {
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) return mid;
        const double v = real_psi(mu, mid) - target;
        if (!std::isfinite(v)) throw RootIsolationError("psi not finite inside bracket");
        (v < 0 ? lo : hi) = mid;
    }
    throw RootIsolationError("bisection did not separate the root");
}

}  // namespace

double RhoR::total_mass() const {
    double m = density.integral();
    for (const auto& a : atoms) m += a.mass;
    for (const auto& iv : unit_intervals) m += std::atan(iv.hi) - std::atan(iv.lo);
    return m;
}

Complex log_kappa_principal_r(const LocalTransforms& lt) {
    Complex u = std::log(lt.kappa);
    // arg kappa lies in (-pi, 0] on the upper half plane; a value near +pi is the
    // same point seen across the cut through rounding.
    if (lt.z.imag() > 0 && u.imag() > 0.5 * pi) u -= Complex(0.0, two_pi);
    if (lt.z.imag() < 0 && u.imag() < -0.5 * pi) u += Complex(0.0, two_pi);
    return u;
}

Complex log_kappa(const MeasureR& mu, Complex z) {
    check_domain(mu, z);
    return log_kappa_principal_r(LocalTransforms::from(z, moment_pair(mu, z, false)));
}

namespace {

Complex kappa_unchecked(const MeasureT& mu, Complex z) {
    const auto m = moment_pair(mu, z, false);
    if (m.p == 0.0) throw ZeroEtaError("eta vanishes on the continuation path");
    return (1.0 + z * m.p) / m.p;
}

// Advance log kappa from za to zb, splitting the step until each phase
// increment stays below pi/2.
Complex advance_log(const MeasureT& mu, Complex za, Complex ka, Complex zb, Complex& kb, int depth) {
    kb = kappa_unchecked(mu, zb);
    const Complex d = std::log(kb / ka);
    if (std::abs(d.imag()) <= 0.5 * pi) return d;
    if (depth > 30) throw BranchError("phase unwinding ambiguous near " + std::to_string(std::abs(zb)));
    const Complex zm = 0.5 * (za + zb);
    Complex km;
    const Complex d1 = advance_log(mu, za, ka, zm, km, depth + 1);
    const Complex d2 = advance_log(mu, zm, km, zb, kb, depth + 1);
    return d1 + d2;
}

}  // namespace

Complex log_kappa(const MeasureT& mu, Complex z) {
    check_domain(mu, z);
    const Complex p0 = moment_pair(mu, 0.0, false).p;
    if (p0 == 0.0) throw ZeroEtaError("eta'(0) vanishes");
    Complex u = -std::log(p0);
    if (z == 0.0) return u;
    const int steps = 8;
    Complex k_prev = 1.0 / p0;
    Complex z_prev = 0.0;
    for (int j = 1; j <= steps; ++j) {
        const Complex zj = z * (double(j) / steps);
        Complex kj;
        u += advance_log(mu, z_prev, k_prev, zj, kj, 0);
        k_prev = kj;
        z_prev = zj;
    }
    return u;
}

NevanlinnaRepR closed_form_rho_atomic_r(const MeasureR& mu) {
    if (!is_atomic(mu)) throw RootIsolationError("closed form requires a purely atomic measure");
    if (mu.atoms.empty()) throw RootIsolationError("no atoms away from zero");
    std::vector<double> poles;
    for (const auto& a : mu.atoms) poles.push_back(1.0 / a.pos);
    std::sort(poles.begin(), poles.end());
    NevanlinnaRepR rep;
    rep.exact = true;
    // psi increases from -inf to +inf between consecutive poles, so kappa < 0
    // exactly where -1 < psi < 0: one interval per gap.
    for (std::size_t i = 0; i + 1 < poles.size(); ++i) {
        const double lo = bisect_psi(mu, -1.0, poles[i], poles[i + 1]);
        const double hi = bisect_psi(mu, 0.0, poles[i], poles[i + 1]);
        if (!(lo < hi)) throw RootIsolationError("zero and pole of kappa not separated");
        rep.rho.unit_intervals.push_back({lo, hi});
    }
    // Beyond the last pole psi rises from -inf to -(1 - mu({0})).
    if (mu.mass_at_zero > 0.0) {
        double hi = 2.0 * poles.back();
        while (real_psi(mu, hi) <= -1.0) hi *= 2.0;
        rep.rho.unit_intervals.push_back({bisect_psi(mu, -1.0, poles.back(), hi), inf});
    }
    rep.a = 0.0;
    rep.a = log_kappa(mu, -1.0).real() - eval_u_from_rep(rep, -1.0).real();
    return rep;
}

NevanlinnaRepR extract_rep_r(const MeasureR& mu, const ExtractOptionsR& opt) {
    if (opt.eps.size() < 2) throw ExtrapolationError("need at least two smoothing levels");
    const std::size_t ne = opt.eps.size();
    const double e_fine = opt.eps[ne - 1], e_coarse = opt.eps[ne - 2];
    const double ratio = e_coarse / e_fine;

    struct Node {
        double x;
        std::vector<double> d;  // smoothed density per eps
        double r;               // extrapolated value
    };
    auto make_node = [&](double x) {
        Node n{x, {}, 0.0};
        for (double e : opt.eps) {
            const Complex u = log_kappa(mu, Complex(x, e));
            n.d.push_back(-u.imag() / (pi * (1.0 + x * x)));
        }
        n.r = (ratio * n.d[ne - 1] - n.d[ne - 2]) / (ratio - 1.0);
        return n;
    };

    std::vector<Node> nodes;
    const double llo = std::log(opt.grid_lo), lhi = std::log(opt.grid_hi);
    for (int k = 0; k < opt.grid_size; ++k)
        nodes.push_back(make_node(std::exp(llo + (lhi - llo) * k / (opt.grid_size - 1))));

    // Refine cells whose midpoint departs from linear interpolation.
    std::vector<Node> refined;
    refined.push_back(nodes.front());
    std::vector<std::pair<Node, Node>> stack;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        stack.push_back({nodes[i], nodes[i + 1]});
        while (!stack.empty()) {
            auto [left, right] = stack.back();
            stack.pop_back();
            const double w = right.x - left.x;
            bool split = false;
            Node mid{};
            if (w > e_fine / 8 && int(refined.size() + stack.size()) < opt.max_nodes) {
                mid = make_node(0.5 * (left.x + right.x));
                split = std::abs(mid.r - 0.5 * (left.r + right.r)) > opt.refine_tol;
            }
            if (split) {
                stack.push_back({mid, right});
                stack.push_back({left, mid});
            } else {
                refined.push_back(right);
            }
        }
    }

    // Total mass per smoothing level must change less and less.
    std::vector<double> masses(ne, 0.0);
    for (std::size_t i = 0; i + 1 < refined.size(); ++i)
        for (std::size_t k = 0; k < ne; ++k)
            masses[k] += 0.5 * (refined[i].d[k] + refined[i + 1].d[k]) * (refined[i + 1].x - refined[i].x);
    for (std::size_t k = 2; k < ne; ++k)
        if (std::abs(masses[k] - masses[k - 1]) > std::abs(masses[k - 1] - masses[k - 2]) + 1e-9)
            throw ExtrapolationError("smoothed masses do not contract");

    NevanlinnaRepR rep;
    for (const auto& n : refined) {
        // Pole-type boundary behaviour: eps |Im u| stays large at every level.
        bool pole = true;
        for (std::size_t k = 0; k < ne; ++k)
            pole = pole && opt.eps[k] * pi * (1.0 + n.x * n.x) * n.d[k] > 1e-3;
        if (pole) rep.rho.atoms.push_back({n.x, e_fine * pi * n.d[ne - 1]});
        double v = n.r;
        if (v < -clip_tolerance) ++rep.clipped_nodes;
        if (v < density_floor) v = 0.0;
        rep.rho.density.grid.push_back(n.x);
        rep.rho.density.values.push_back(v);
    }
    if (rep.clipped_nodes > 0)
        std::clog << "extract_rep_r: clipped " << rep.clipped_nodes << " negative density nodes\n";
    rep.a = 0.0;
    rep.a = log_kappa(mu, -1.0).real() - eval_u_from_rep(rep, -1.0).real();
    return rep;
}

Complex eval_u_from_rep(const NevanlinnaRepR& rep, Complex z) {
    Complex u = rep.a;
    for (const auto& at : rep.rho.atoms) u += at.mass * (1.0 + z * at.pos) / (z - at.pos);
    for (const auto& iv : rep.rho.unit_intervals) u += unit_interval_term(z, iv);
    const auto& d = rep.rho.density;
    for (std::size_t i = 0; i + 1 < d.grid.size(); ++i) {
        if (d.values[i] == 0.0 && d.values[i + 1] == 0.0) continue;
        u += linear_cell_term(z, d.grid[i], d.grid[i + 1], d.values[i], d.values[i + 1]);
    }
    return u;
}

double HerglotzRepT::total_mass() const {
    double m = coeffs.empty() ? 0.0 : coeffs[0].real();
    for (const auto& a : atoms) m += a.mass;
    return m;
}

double HerglotzRepT::density(double theta) const {
    if (coeffs.empty()) return 0.0;
    Complex s = 0.0;
    const Complex e = std::polar(1.0, theta);
    for (std::size_t n = coeffs.size() - 1; n >= 1; --n) s = (s + coeffs[n]) * e;
    return (coeffs[0].real() + 2.0 * s.real()) / two_pi;
}

SampledDensity HerglotzRepT::sampled(int n) const {
    SampledDensity d;
    std::vector<Complex> half(n / 2 + 1, 0.0);
    for (std::size_t m = 0; m < coeffs.size() && m < half.size(); ++m)
        half[m] = coeffs[m] * ((m % 2) ? -1.0 : 1.0);
    const auto vals = real_idft(half, n);
    for (int k = 0; k < n; ++k) {
        d.grid.push_back(-pi + two_pi * k / n);
        d.values.push_back(std::max(0.0, vals[k] / two_pi));
    }
    return d;
}

HerglotzRepT HerglotzRepT::from_density(double alpha, const std::vector<double>& values,
                                        std::vector<AtomT> atoms) {
    const int n = int(values.size());
    const auto x = real_dft(values);
    HerglotzRepT rep;
    rep.alpha = alpha;
    rep.atoms = std::move(atoms);
    for (int m = 0; m < n / 2; ++m) rep.coeffs.push_back(x[m] * (two_pi / n) * ((m % 2) ? -1.0 : 1.0));
    return rep;
}

HerglotzRepT extract_rep_t(const MeasureT& mu, const ExtractOptionsT& opt) {
    const int n = opt.grid_size;
    const Complex p0 = moment_pair(mu, 0.0, false).p;
    if (p0 == 0.0) throw ZeroEtaError("eta'(0) vanishes");
    QuadOptions tight{1e-14, 1e-13, 20000};

    std::vector<std::vector<Complex>> per_radius;
    for (double r : opt.radii) {
        std::vector<double> f(n);
        double fmax = 0.0;
        for (int k = 0; k < n; ++k) {
            const Complex z = std::polar(r, -pi + two_pi * k / n);
            const auto m = moment_pair(mu, z, false, tight);
            // Re u = log|kappa| needs no branch.
            f[k] = std::log(std::abs(1.0 + z * m.p)) - std::log(std::abs(m.p));
            fmax = std::max(fmax, std::abs(f[k]));
        }
        const auto x = real_dft(f);
        // Noise level from the top quarter of the spectrum; the series is cut where
        // it first sinks into it, since de-Poissonising amplifies noise by r^{-m}.
        std::vector<double> tail;
        for (int m = 3 * n / 8; m < n / 2; ++m) tail.push_back(std::abs(x[m]) / n);
        std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
        const double floor = std::max(1e-14 * (1.0 + fmax), 10.0 * tail[tail.size() / 2]);
        int last = 0, quiet = 0;
        for (int m = 0; m < n / 2 && quiet < 8; ++m) {
            if (std::abs(x[m]) / n >= floor) {
                last = m;
                quiet = 0;
            } else {
                ++quiet;
            }
        }
        std::vector<Complex> b(last + 1);
        for (int m = 0; m <= last; ++m)
            b[m] = x[m] / (double(n) * std::pow(r, m)) * ((m % 2) ? -1.0 : 1.0);
        per_radius.push_back(std::move(b));
    }
    for (std::size_t i = 1; i < per_radius.size(); ++i) {
        const auto& b0 = per_radius[i - 1];
        const auto& b1 = per_radius[i];
        const std::size_t m_max = std::min<std::size_t>({b0.size(), b1.size(), 65});
        double diff = 0.0;
        for (std::size_t m = 0; m < m_max; ++m) diff = std::max(diff, std::abs(b0[m] - b1[m]));
        if (diff > 1e-7 * (1.0 + std::abs(b1[0])))
            throw ExtrapolationError("radial estimates disagree by " + std::to_string(diff));
    }

    HerglotzRepT rep;
    rep.alpha = -std::arg(p0);
    rep.coeffs = per_radius.back();
    const auto d = rep.sampled(n);
    std::vector<Complex> half(n / 2 + 1, 0.0);
    for (std::size_t m = 0; m < rep.coeffs.size() && m < half.size(); ++m)
        half[m] = rep.coeffs[m] * ((m % 2) ? -1.0 : 1.0);
    const auto raw = real_idft(half, n);
    double clipped_mass = 0.0;
    for (int k = 0; k < n; ++k) {
        if (raw[k] / two_pi < -clip_tolerance) ++rep.clipped_nodes;
        clipped_mass += d.values[k] * two_pi / n;
    }
    if (rep.clipped_nodes > 0)
        std::clog << "extract_rep_t: clipped " << rep.clipped_nodes << " negative density nodes\n";
    rep.mass_deficit = -std::log(std::abs(p0)) - clipped_mass;
    return rep;
}

Complex eval_u_from_rep(const HerglotzRepT& rep, Complex z) {
    Complex s = 0.0;
    for (std::size_t n = rep.coeffs.size(); n-- > 1;) s = (s + rep.coeffs[n]) * z;
    Complex u(rep.coeffs.empty() ? 0.0 : rep.coeffs[0].real(), rep.alpha);
    u += 2.0 * s;
    for (const auto& a : rep.atoms) {
        const Complex zeta = std::polar(1.0, a.angle);
        u += a.mass * (zeta + z) / (zeta - z);
    }
    return u;
}

Complex boundary_u(const HerglotzRepT& rep, double theta) {
    return eval_u_from_rep(rep, std::polar(1.0, theta));
}

nlohmann::json to_json(const NevanlinnaRepR& rep) {
    nlohmann::json j;
    j["a"] = rep.a;
    auto atoms = nlohmann::json::array();
    for (const auto& a : rep.rho.atoms) atoms.push_back({{"pos", a.pos}, {"mass", a.mass}});
    auto intervals = nlohmann::json::array();
    for (const auto& iv : rep.rho.unit_intervals)
        intervals.push_back({iv.lo, std::isinf(iv.hi) ? nlohmann::json(nullptr) : nlohmann::json(iv.hi)});
    j["rho"] = {{"atoms", atoms},
                {"grid", rep.rho.density.grid},
                {"values", rep.rho.density.values},
                {"intervals", intervals}};
    j["total_mass"] = rep.rho.total_mass();
    return j;
}

nlohmann::json to_json(const HerglotzRepT& rep, int samples) {
    nlohmann::json j;
    j["alpha"] = rep.alpha;
    auto atoms = nlohmann::json::array();
    for (const auto& a : rep.atoms) atoms.push_back({{"pos", a.angle}, {"mass", a.mass}});
    const auto d = rep.sampled(samples);
    j["rho"] = {{"atoms", atoms}, {"grid", d.grid}, {"values", d.values}};
    j["total_mass"] = rep.total_mass();
    j["mass_deficit"] = rep.mass_deficit;
    return j;
}

}  // namespace mfp
