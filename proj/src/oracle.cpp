#include "mfp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "mfp/herglotz.hpp"

namespace mfp {

namespace {

constexpr double newton_tol = 1e-14;
constexpr double residual_tol = 1e-10;
constexpr int max_refinements = 40;
constexpr double ladder = 1.25;
const QuadOptions tight{1e-14, 1e-12, 20000};

// State at omega = exp(ell); u is the branch of log kappa carried along the path.
struct Point {
    Complex ell, u, kappa, zu;
};

// Evaluates u and z u' at exp(ell). The circle branch of u is continued from ref.
std::optional<Point> eval_point(const MeasureR& mu, Complex ell, const Point&) {
    if (!(ell.imag() > 0.0 && ell.imag() < two_pi)) return std::nullopt;
    try {
        const Complex w = std::exp(ell);
        check_domain(mu, w);
        const auto lt = LocalTransforms::from(w, moment_pair(mu, w, true, tight));
        return Point{ell, log_kappa_principal_r(lt), lt.kappa, lt.z_u_prime};
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<Point> eval_point(const MeasureT& mu, Complex ell, const Point& ref) {
    if (!(ell.real() < std::log1p(-boundary_margin))) return std::nullopt;
    try {
        const Complex w = std::exp(ell);
        const auto lt = LocalTransforms::from(w, moment_pair(mu, w, true, tight));
        const Complex d = std::log(lt.kappa / ref.kappa);
        if (std::abs(d.imag()) > 0.5 * pi) return std::nullopt;
        return Point{ell, ref.u + d, lt.kappa, lt.z_u_prime};
    } catch (const Error&) {
        return std::nullopt;
    }
}

template <class M>
struct Solver {
    const M& mu;
    double t;
    int iterations = 0;
    int damping = 0;

    Complex G(const Point& p, Complex L) const { return p.ell + (t - 1.0) * p.u - L; }

    // Damped Newton on ell + (t-1) u(e^ell) = L.
    std::optional<Point> newton(Point p, Complex L) {
        Complex g = G(p, L);
        for (int it = 0; it < 60; ++it) {
            if (std::abs(g) <= newton_tol) return p;
            ++iterations;
            const Complex step = -g / (1.0 + (t - 1.0) * p.zu);
            double lambda = 1.0;
            bool moved = false;
            for (int h = 0; h < 30; ++h, lambda *= 0.5) {
                auto c = eval_point(mu, p.ell + lambda * step, p);
                if (c) {
                    const Complex gc = G(*c, L);
                    if (std::abs(gc) < std::abs(g)) {
                        p = *c;
                        g = gc;
                        moved = true;
                        break;
                    }
                }
                ++damping;
            }
            if (!moved) break;
        }
        if (std::abs(g) <= 1e-12) return p;
        return std::nullopt;
    }

    // Follows the root along path, inserting midpoints where Newton fails.
    Point follow(std::vector<Complex> path, Point p, int& points) {
        Complex z_prev = path.front();
        std::size_t k = 1;
        int refinements = 0;
        while (k < path.size()) {
            const Complex z = path[k];
            const Complex dl = std::log(z) - std::log(z_prev);
            auto seed = eval_point(mu, p.ell + dl / (1.0 + (t - 1.0) * p.zu), p);
            if (!seed) seed = eval_point(mu, p.ell + dl, p);
            std::optional<Point> next;
            if (seed) next = newton(*seed, std::log(z));
            if (next) {
                p = *next;
                z_prev = z;
                ++k;
                ++points;
                continue;
            }
            if (++refinements > max_refinements)
                throw ContinuationError("path stalled near " + format_double(z.real()) + "+" +
                                        format_double(z.imag()) + "i");
            path.insert(path.begin() + k, 0.5 * (z_prev + z));
        }
        return p;
    }
};

double mean_r(const MeasureR& mu) {
    const double m = first_moment(mu);
    if (!(m > 0.0)) throw InversionError("first moment vanishes");
    return m;
}

// Smallest modulus on the path, where omega is close to its linearisation.
double start_modulus_r(const MeasureR& mu, Complex z) {
    const double smax = std::max(support_range(mu).second, 1e-300);
    return std::min(std::abs(z), 1e-3 / smax);
}

std::vector<Complex> ray(Complex dir, double m0, double m1) {
    std::vector<Complex> out{dir * m0};
    for (double m = m0 * ladder; m < m1; m *= ladder) out.push_back(dir * m);
    if (m1 > m0) out.push_back(dir * m1);
    return out;
}

std::vector<Complex> path_r(const MeasureR& mu, Complex z) {
    const double m0 = start_modulus_r(mu, z);
    if (std::arg(z) >= 0.25 * pi) return ray(std::polar(1.0, std::arg(z)), m0, std::abs(z));
    // Near the positive axis: reach x + ix along the diagonal, then descend.
    const double x = z.real();
    auto out = ray(std::polar(1.0, 0.25 * pi), std::min(m0, std::sqrt(2.0) * x), std::sqrt(2.0) * x);
    for (double y = x / ladder; y > z.imag(); y /= ladder) out.push_back(Complex(x, y));
    out.push_back(z);
    return out;
}

std::vector<Complex> path_t(Complex z) {
    const Complex dir = std::polar(1.0, std::arg(z));
    const double r = std::abs(z);
    const double m0 = std::min(r, 1e-3);
    auto out = ray(dir, m0, std::min(r, 0.5));
    if (r > 0.5) {
        for (double gap = 0.5 / ladder; gap > 1.0 - r; gap /= ladder) out.push_back(dir * (1.0 - gap));
        out.push_back(z);
    }
    return out;
}

OmegaResult exact_result(Complex w) {
    OmegaResult r;
    r.omega = w;
    return r;
}

OmegaResult finish(const Point& p, Complex z, double t, int iterations, int damping, int points) {
    OmegaResult res;
    res.omega = std::exp(p.ell);
    res.residual = std::abs(res.omega * std::exp((t - 1.0) * p.u) - z);
    res.iterations = iterations;
    res.damping = damping;
    res.path_points = points;
    if (res.residual > residual_tol * std::max(1.0, std::abs(z)))
        throw ContinuationError("residual " + format_double(res.residual) + " above tolerance");
    return res;
}

}  // namespace

OmegaResult solve_omega(const MeasureR& mu, double t, Complex z) {
    if (!(t >= 1.0)) throw DomainError("t must be at least 1");
    check_domain(mu, z);
    if (t == 1.0) return exact_result(z);
    if (z.imag() < 0.0) {
        auto r = solve_omega(mu, t, std::conj(z));
        r.omega = std::conj(r.omega);
        return r;
    }
    const double m = mean_r(mu);
    Solver<MeasureR> s{mu, t};
    const auto path = path_r(mu, z);
    // Near 0, u is about -log(mean), so omega is about z mean^{t-1}.
    const Complex w0 = path.front() * std::pow(m, t - 1.0);
    auto p0 = eval_point(mu, std::log(w0), Point{});
    if (!p0) throw ContinuationError("start point outside the domain");
    auto start = s.newton(*p0, std::log(path.front()));
    if (!start) throw ContinuationError("no root near the origin");
    int points = 1;
    const Point p = s.follow(path, *start, points);
    auto res = finish(p, z, t, s.iterations, s.damping, points);
    const double az = std::arg(z), aw = std::arg(res.omega);
    res.in_domain = aw >= az - 1e-12 && (aw < pi || z.imag() == 0.0);
    return res;
}

OmegaResult solve_omega(const MeasureT& mu, double t, Complex z) {
    if (!(t >= 1.0)) throw DomainError("t must be at least 1");
    check_domain(mu, z);
    if (t == 1.0) return exact_result(z);
    const Complex mean = first_moment(mu);
    if (mean == 0.0) throw InversionError("first moment vanishes");
    const Complex u0 = -std::log(mean);
    const Point origin{Complex(0.0), u0, 1.0 / mean, 0.0};
    Solver<MeasureT> s{mu, t};
    if (z == 0.0) return exact_result(0.0);
    const auto path = path_t(z);
    auto seed_at = [&](Complex zz) -> std::optional<Point> {
        // u is continued from the origin: the first evaluation only shifts the
        // branch by a small phase.
        return eval_point(mu, std::log(zz * std::exp(-(t - 1.0) * u0)), origin);
    };
    auto p0 = seed_at(path.front());
    if (!p0) throw ContinuationError("start point outside the domain");
    auto start = s.newton(*p0, std::log(path.front()));
    if (!start) throw ContinuationError("no root near the origin");
    int points = 1;
    const Point p = s.follow(path, *start, points);
    auto res = finish(p, z, t, s.iterations, s.damping, points);
    res.in_domain = std::abs(res.omega) <= std::abs(z) * (1.0 + 1e-12);
    // A direct Newton solve from the linearised seed can land on another root.
    if (auto q = seed_at(z)) {
        Solver<MeasureT> direct{mu, t};
        if (auto alt = direct.newton(*q, std::log(z))) {
            const Complex w = std::exp(alt->ell);
            const double resid = std::abs(w * std::exp((t - 1.0) * alt->u) - z);
            if (std::abs(w) < 1.0 && resid <= residual_tol && std::abs(w - res.omega) > 1e-8) {
                res.non_unique = true;
                res.warning = "NonUniqueWarning: second root " + format_double(w.real()) + "+" +
                              format_double(w.imag()) + "i";
                std::clog << res.warning << '\n';
            }
        }
    }
    return res;
}

Complex eta_power(const MeasureR& mu, double t, Complex z) { return eta(mu, solve_omega(mu, t, z).omega); }
Complex eta_power(const MeasureT& mu, double t, Complex z) { return eta(mu, solve_omega(mu, t, z).omega); }

namespace {

// w with eta_mu(omega_t(w)) = z by Newton, using omega' = omega / (w (1 + (t-1) z u'(omega))).
template <class M>
Complex invert_eta_power(const M& mu, double t, Complex z, Complex w) {
    for (int it = 0; it < 60; ++it) {
        const Complex om = solve_omega(mu, t, w).omega;
        const auto lt = LocalTransforms::from(om, moment_pair(mu, om, true, tight));
        const Complex f = lt.eta - z;
        if (std::abs(f) <= 1e-15 * std::abs(z)) return w;
        const Complex d_omega = om / (w * (1.0 + (t - 1.0) * lt.z_u_prime));
        w -= f / (lt.eta_prime * d_omega);
    }
    throw InversionError("eta of the power could not be inverted");
}

}  // namespace

double sigma_power_check(const MeasureR& mu, double t, const std::vector<Complex>& z_list) {
    const double m = mean_r(mu);
    double worst = 0.0;
    for (Complex z : z_list) {
        const Complex s_power = invert_eta_power(mu, t, z, z / std::pow(m, t)) / z;
        const Complex s_mu = sigma(mu, z);
        const Complex expect = std::exp(t * std::log(s_mu));
        worst = std::max(worst, std::abs(s_power - expect) / std::abs(expect));
    }
    return worst;
}

double sigma_power_check(const MeasureT& mu, double t, const std::vector<Complex>& z_list) {
    const Complex m = first_moment(mu);
    double worst = 0.0;
    for (Complex z : z_list) {
        const Complex s_power = invert_eta_power(mu, t, z, z * std::exp(-t * std::log(m))) / z;
        // log Sigma_mu continued from -log(mean) at 0.
        const Complex log_s = -std::log(m) + std::log(sigma(mu, z) * m);
        const Complex expect = std::exp(t * log_s);
        worst = std::max(worst, std::abs(s_power - expect) / std::abs(expect));
    }
    return worst;
}

std::vector<double> oracle_density_r(const MeasureR& mu, double t, const std::vector<double>& y, double eps) {
    std::vector<double> out;
    out.reserve(y.size());
    EtaFunction f = [&](Complex z) { return eta_power(mu, t, z); };
    for (double yy : y) {
        const double x = 1.0 / yy;
        out.push_back(stieltjes_invert_r(f, {x}, eps * x)[0] * x * x);
    }
    return out;
}

std::vector<double> oracle_density_t(const MeasureT& mu, double t, const std::vector<double>& phi, double r) {
    std::vector<double> theta;
    theta.reserve(phi.size());
    for (double p : phi) theta.push_back(-p);
    return poisson_invert_t([&](Complex z) { return eta_power(mu, t, z); }, theta, r);
}

double circle_formula_residual(const MeasureT& mu, double t, Complex z) {
    const Complex mean = first_moment(mu);
    // log(z / eta_t(z)) starts at -t log(mean) and is continued along the radius.
    Complex log_ratio = -t * std::log(mean);
    Complex prev_ratio = std::exp(log_ratio);
    const int steps = 32;
    Complex omega, eta_t;
    for (int k = 1; k <= steps; ++k) {
        const Complex zk = z * (double(k) / steps);
        omega = solve_omega(mu, t, zk).omega;
        eta_t = eta(mu, omega);
        const Complex ratio = zk / eta_t;
        const Complex d = std::log(ratio / prev_ratio);
        if (std::abs(d.imag()) > 0.5 * pi) throw BranchError("ratio phase jumps along the radius");
        log_ratio += d;
        prev_ratio = ratio;
    }
    return std::abs(omega - eta_t * std::exp(log_ratio / t));
}

OracleTrace trace(const MeasureR& mu, double t, const std::vector<Complex>& probes) {
    OracleTrace tr{t, probes, {}};
    for (Complex z : probes) tr.results.push_back(solve_omega(mu, t, z));
    return tr;
}

OracleTrace trace(const MeasureT& mu, double t, const std::vector<Complex>& probes) {
    OracleTrace tr{t, probes, {}};
    for (Complex z : probes) tr.results.push_back(solve_omega(mu, t, z));
    return tr;
}

std::string to_csv(const OracleTrace& tr) {
    std::ostringstream os;
    os << "probe_re,probe_im,omega_re,omega_im,residual,iterations\n";
    for (std::size_t i = 0; i < tr.probes.size(); ++i) {
        const auto& r = tr.results[i];
        os << format_double(tr.probes[i].real()) << ',' << format_double(tr.probes[i].imag()) << ','
           << format_double(r.omega.real()) << ',' << format_double(r.omega.imag()) << ','
           << format_double(r.residual) << ',' << r.iterations << '\n';
    }
    return os.str();
}

}  // namespace mfp
