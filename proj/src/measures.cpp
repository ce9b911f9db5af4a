#include "mfp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace mfp {

namespace {

// Two complex accumulators integrated together so p and q share quadrature nodes.
struct CPair {
    Complex a, b;
    CPair& operator+=(const CPair& o) {
        a += o.a;
        b += o.b;
        return *this;
    }
    friend CPair operator+(CPair x, const CPair& y) { return x += y; }
    friend CPair operator-(const CPair& x, const CPair& y) { return {x.a - y.a, x.b - y.b}; }
    friend CPair operator*(const CPair& x, double w) { return {x.a * w, x.b * w}; }
    friend double abs(const CPair& x) { return std::abs(x.a) + std::abs(x.b); }
};

QuadOptions with_hint(QuadOptions opt, int hint) {
    if (hint > 0) opt.max_intervals = hint;
    return opt;
}

bool near_pole(Complex w, double a, double b) {
    if (!std::isfinite(w.real())) return false;
    const double dx = w.real() < a ? a - w.real() : (w.real() > b ? w.real() - b : 0.0);
    return std::hypot(dx, w.imag()) < 2.0 * (b - a);
}

// \int_a^b v(s) s/(1 - z s) ds and \int_a^b v(s) s/(1 - z s)^2 ds for v linear
// from va to vb, with w = 1/z.
CPair linear_cell_moments(Complex z, Complex w, double a, double b, double va, double vb, bool with_q) {
    const double h = b - a;
    const double slope = (vb - va) / h;
    const Complex vw = va + slope * (w - a);
    const Complex lg = log1p(Complex(h) / (Complex(a) - w));  // log((b - w)/(a - w))
    const Complex first = vw * lg + slope * h;                // \int v/(s - w)
    CPair out;
    out.a = -(0.5 * h * (va + vb) + w * first) / z;
    if (with_q) {
        const Complex second = vw * h / ((Complex(a) - w) * (Complex(b) - w)) + slope * lg;  // \int v/(s - w)^2
        out.b = (first + w * second) / (z * z);
    }
    return out;
}

std::string fmt_complex(Complex z) {
    std::ostringstream os;
    os.precision(6);
    os << "(" << z.real() << "," << z.imag() << ")";
    return os.str();
}

void validate_density(const SampledDensity& d, double lo, double hi, const char* what) {
    if (d.grid.empty() && d.values.empty()) return;
    if (d.grid.size() != d.values.size())
        throw MeasureError(std::string(what) + ": grid and values differ in length");
    if (d.grid.size() < 2) throw MeasureError(std::string(what) + ": grid needs two nodes");
    for (std::size_t i = 0; i < d.grid.size(); ++i) {
        if (!std::isfinite(d.grid[i]) || !std::isfinite(d.values[i]))
            throw MeasureError(std::string(what) + ": non-finite sample");
        if (d.values[i] < 0.0) throw MeasureError(std::string(what) + ": negative density");
        if (i > 0 && !(d.grid[i] > d.grid[i - 1]))
            throw MeasureError(std::string(what) + ": grid not strictly increasing");
    }
    if (d.grid.front() < lo || d.grid.back() > hi)
        throw MeasureError(std::string(what) + ": grid outside admissible window");
}

}  // namespace

double SampledDensity::operator()(double x) const {
    if (empty() || x < grid.front() || x > grid.back()) return 0.0;
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = std::min<std::size_t>(std::size_t(it - grid.begin()), grid.size() - 1);
    if (i == 0) return values.front();
    const double w = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

double SampledDensity::integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        s += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
    return s;
}

std::vector<std::vector<double>> SampledDensity::positive_runs() const {
    std::vector<std::vector<double>> runs;
    std::vector<double> cur;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (values[i] > 0.0 || values[i + 1] > 0.0) {
            if (cur.empty()) cur.push_back(grid[i]);
            cur.push_back(grid[i + 1]);
        } else if (!cur.empty()) {
            runs.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) runs.push_back(std::move(cur));
    return runs;
}

double total_mass(const MeasureR& mu) {
    double m = mu.mass_at_zero + mu.ac.integral();
    for (const auto& a : mu.atoms) m += a.mass;
    return m;
}

double total_mass(const MeasureT& mu) {
    double m = mu.ac.integral();
    for (const auto& a : mu.atoms) m += a.mass;
    return m;
}

void validate(const MeasureR& mu, double tol) {
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        const auto& a = mu.atoms[i];
        if (!(a.pos > 0.0) || !std::isfinite(a.pos))
            throw MeasureError("atom position must be positive");
        if (!(a.mass > 0.0 && a.mass <= 1.0)) throw MeasureError("atom mass must lie in (0,1]");
        for (std::size_t j = 0; j < i; ++j)
            if (mu.atoms[j].pos == a.pos) throw MeasureError("duplicate atom position");
    }
    if (!(mu.mass_at_zero >= 0.0 && mu.mass_at_zero <= 1.0))
        throw MeasureError("mass_at_zero must lie in [0,1]");
    validate_density(mu.ac, std::numeric_limits<double>::min(), inf, "ac density");
    if (std::abs(total_mass(mu) - 1.0) > tol)
        throw MeasureError("total mass differs from 1");
}

void validate(const MeasureT& mu, double tol) {
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        const auto& a = mu.atoms[i];
        if (!(a.angle > -pi - 1e-15 && a.angle <= pi + 1e-15))
            throw MeasureError("atom angle must lie in (-pi, pi]");
        if (!(a.mass > 0.0 && a.mass <= 1.0)) throw MeasureError("atom mass must lie in (0,1]");
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(wrap_angle(mu.atoms[j].angle - a.angle)) < 1e-15)
                throw MeasureError("duplicate atom angle");
    }
    validate_density(mu.ac, -pi - 1e-12, pi + 1e-12, "ac density");
    if (std::abs(total_mass(mu) - 1.0) > tol)
        throw MeasureError("total mass differs from 1");
}

bool is_atomic(const MeasureR& mu) {
    return mu.ac.empty() || mu.ac.integral() == 0.0;
}

double first_moment(const MeasureR& mu) {
    double m = 0.0;
    for (const auto& a : mu.atoms) m += a.mass * a.pos;
    const auto& d = mu.ac;
    // Exact for the linear interpolant: integral of s*(v0 + slope*(s-x0)).
    for (std::size_t i = 0; i + 1 < d.grid.size(); ++i) {
        const double x0 = d.grid[i], x1 = d.grid[i + 1], v0 = d.values[i], v1 = d.values[i + 1];
        const double h = x1 - x0;
        m += h * (v0 * (2 * x0 + x1) + v1 * (x0 + 2 * x1)) / 6.0;
    }
    return m;
}

Complex first_moment(const MeasureT& mu) { return moment_pair(mu, 0.0, false).p; }

std::pair<double, double> support_range(const MeasureR& mu) {
    double lo = inf, hi = 0.0;
    for (const auto& a : mu.atoms) {
        lo = std::min(lo, a.pos);
        hi = std::max(hi, a.pos);
    }
    for (const auto& run : mu.ac.positive_runs()) {
        lo = std::min(lo, run.front());
        hi = std::max(hi, run.back());
    }
    return {lo, hi};
}

MomentPair moment_pair(const MeasureR& mu, Complex z, bool with_q, const QuadOptions& opt) {
    Complex p = 0.0, q = 0.0;
    for (const auto& a : mu.atoms) {
        const Complex d = 1.0 / (1.0 - z * a.pos);
        p += a.mass * a.pos * d;
        if (with_q) q += a.mass * a.pos * d * d;
    }
    if (!mu.ac.empty()) {
        auto f = [&](double s) -> CPair {
            const double w = mu.ac(s) * s;
            const Complex d = 1.0 / (1.0 - z * s);
            return {w * d, with_q ? w * d * d : Complex(0.0)};
        };
        const auto o = with_hint(opt, mu.quadrature_hint);
        const Complex w = z == 0.0 ? Complex(inf) : 1.0 / z;
        for (const auto& run : mu.ac.positive_runs()) {
            // Cells close to the pole 1/z are integrated exactly, the rest adaptively.
            std::vector<double> far{run.front()};
            auto flush = [&] {
                if (far.size() > 1) {
                    const auto r = integrate_cells<CPair>(f, far, o);
                    p += r.value.a;
                    q += r.value.b;
                }
            };
            for (std::size_t i = 0; i + 1 < run.size(); ++i) {
                const double a = run[i], b = run[i + 1];
                if (!near_pole(w, a, b)) {
                    far.push_back(b);
                    continue;
                }
                flush();
                far = {b};
                const auto c = linear_cell_moments(z, w, a, b, mu.ac(a), mu.ac(b), with_q);
                p += c.a;
                q += c.b;
            }
            flush();
        }
    }
    return {p, q};
}

MomentPair moment_pair(const MeasureT& mu, Complex z, bool with_q, const QuadOptions& opt) {
    Complex p = 0.0, q = 0.0;
    for (const auto& a : mu.atoms) {
        const Complex zeta = std::polar(1.0, a.angle);
        const Complex d = 1.0 / (1.0 - z * zeta);
        p += a.mass * zeta * d;
        if (with_q) q += a.mass * zeta * d * d;
    }
    if (!mu.ac.empty()) {
        auto f = [&](double th) -> CPair {
            const Complex zeta = std::polar(1.0, th);
            const Complex d = 1.0 / (1.0 - z * zeta);
            const double w = mu.ac(th);
            return {w * zeta * d, with_q ? w * zeta * d * d : Complex(0.0)};
        };
        const auto o = with_hint(opt, mu.quadrature_hint);
        for (const auto& run : mu.ac.positive_runs()) {
            auto r = integrate_cells<CPair>(f, run, o);
            p += r.value.a;
            q += r.value.b;
        }
    }
    return {p, q};
}

LocalTransforms LocalTransforms::from(Complex z, const MomentPair& m) {
    LocalTransforms lt;
    lt.z = z;
    lt.psi = z * m.p;
    const Complex op = 1.0 + lt.psi;
    if (std::abs(op) < 1e-14) throw PoleError("1 + psi vanishes at " + fmt_complex(z));
    if (m.p == 0.0) throw ZeroEtaError("eta vanishes at " + fmt_complex(z));
    lt.eta = lt.psi / op;
    lt.kappa = op / m.p;
    lt.eta_prime = m.q / (op * op);
    lt.z_u_prime = 1.0 - m.q / (m.p * op);
    return lt;
}

void check_domain(const MeasureR&, Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("non-finite argument");
    if (std::abs(z.imag()) <= boundary_margin && z.real() >= -boundary_margin)
        throw DomainError("argument " + fmt_complex(z) + " too close to [0,inf)");
}

void check_domain(const MeasureT&, Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("non-finite argument");
    if (std::abs(z) >= 1.0 - boundary_margin)
        throw DomainError("argument " + fmt_complex(z) + " outside the open disc");
}

namespace {

template <class M>
LocalTransforms local(const M& mu, Complex z, bool with_q) {
    check_domain(mu, z);
    return LocalTransforms::from(z, moment_pair(mu, z, with_q));
}

template <class M>
Complex sigma_impl(const M& mu, Complex z) {
    const Complex m1 = moment_pair(mu, 0.0, false).p;
    if (m1 == 0.0) throw InversionError("eta'(0) vanishes");
    if (z == 0.0) return 1.0 / m1;
    Complex w = z / m1;
    for (int it = 0; it < 100; ++it) {
        LocalTransforms lt;
        try {
            lt = local(mu, w, true);
        } catch (const DomainError& e) {
            throw InversionError(std::string("Newton left the domain: ") + e.what());
        }
        const Complex step = (lt.eta - z) / lt.eta_prime;
        w -= step;
        if (std::abs(step) <= 1e-15 * std::abs(w)) {
            const Complex res = local(mu, w, false).eta - z;
            if (std::abs(res) > 1e-10 * std::max(1.0, std::abs(z)))
                throw InversionError("residual " + std::to_string(std::abs(res)));
            return w / z;
        }
    }
    throw InversionError("Newton did not converge for z = " + fmt_complex(z));
}

}  // namespace

Complex psi(const MeasureR& mu, Complex z) { return local(mu, z, false).psi; }
Complex psi(const MeasureT& mu, Complex z) { return local(mu, z, false).psi; }
Complex eta(const MeasureR& mu, Complex z) { return local(mu, z, false).eta; }
Complex eta(const MeasureT& mu, Complex z) { return local(mu, z, false).eta; }
Complex eta_prime(const MeasureR& mu, Complex z) { return local(mu, z, true).eta_prime; }
Complex eta_prime(const MeasureT& mu, Complex z) { return local(mu, z, true).eta_prime; }
Complex kappa(const MeasureR& mu, Complex z) { return local(mu, z, false).kappa; }
Complex kappa(const MeasureT& mu, Complex z) { return local(mu, z, false).kappa; }
Complex sigma(const MeasureR& mu, Complex z) { return sigma_impl(mu, z); }
Complex sigma(const MeasureT& mu, Complex z) { return sigma_impl(mu, z); }

MembershipReport membership_r(const EtaFunction& f) {
    MembershipReport rep;
    auto fail = [&](const std::string& msg) {
        rep.member = false;
        if (rep.reason.empty()) rep.reason = msg;
        if (rep.violations.size() < 20) rep.violations.push_back(msg);
    };
    for (int j = 1; j <= 11; ++j) {
        const double th = pi * j / 12.0;
        for (int k = 0; k < 24; ++k) {
            const Complex z = std::polar(std::pow(10.0, -3.0 + 6.0 * k / 23.0), th);
            const Complex e = f(z);
            ++rep.samples;
            if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
                fail("non-finite eta at " + fmt_complex(z));
                continue;
            }
            const double ae = std::arg(e);
            if (ae < th - 1e-9 || !(e.imag() > 0.0) || ae >= pi)
                fail("arg eta outside [arg z, pi) at " + fmt_complex(z));
            const Complex ec = f(std::conj(z));
            if (std::abs(ec - std::conj(e)) > 1e-10 * std::max(1.0, std::abs(e)))
                fail("conjugate symmetry broken at " + fmt_complex(z));
        }
    }
    for (int k = 0; k < 24; ++k) {
        const double x = -std::pow(10.0, -3.0 + 6.0 * k / 23.0);
        const Complex e = f(x);
        ++rep.samples;
        if (std::abs(e.imag()) > 1e-9 * std::max(1.0, std::abs(e)) || !(e.real() < 0.0))
            fail("eta not negative on (-inf,0) at " + std::to_string(x));
    }
    if (std::abs(f(-1e-10)) > 1e-6) fail("eta(0-) differs from 0");
    return rep;
}

MembershipReport membership_r(const MeasureR& mu) {
    MembershipReport rep;
    try {
        validate(mu);
    } catch (const MeasureError& e) {
        rep.member = false;
        rep.reason = e.what();
        return rep;
    }
    if (mu.mass_at_zero >= 1.0 - 1e-12) {
        rep.member = false;
        rep.reason = "excluded point measure";
        return rep;
    }
    return membership_r([&](Complex z) { return eta(mu, z); });
}

namespace {

// Winding number of f(z)/z on |z| = radius by phase unwrapping with n samples.
// Returns NaN when a phase step is too large to be unwrapped reliably.
double unwrap_winding(const EtaFunction& f, double radius, int n) {
    double total = 0.0;
    Complex prev = f(Complex(radius, 0.0)) / radius;
    for (int k = 1; k <= n; ++k) {
        const Complex z = std::polar(radius, two_pi * k / n);
        const Complex cur = f(z) / z;
        const double step = std::arg(cur / prev);
        if (std::abs(step) > pi / 4) return std::numeric_limits<double>::quiet_NaN();
        total += step;
        prev = cur;
    }
    return total / two_pi;
}

void schwarz_samples(const EtaFunction& f, MembershipReport& rep,
                     const std::function<void(const std::string&)>& fail) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> rad(0.0, 0.999), ang(-pi, pi);
    for (int i = 0; i < 256; ++i) {
        const Complex z = std::polar(std::sqrt(rad(rng)) * 0.999, ang(rng));
        const Complex e = f(z);
        ++rep.samples;
        if (std::abs(e) > std::abs(z) * (1.0 + 1e-12) + 1e-300)
            fail("|eta(z)| exceeds |z| at " + fmt_complex(z));
    }
}

constexpr double winding_radius = 1.0 - 1e-3;
constexpr int winding_max_samples = 1 << 20;

}  // namespace

MembershipReport membership_t(const EtaFunction& f, int winding_samples) {
    MembershipReport rep;
    auto fail = [&](const std::string& msg) {
        rep.member = false;
        if (rep.reason.empty()) rep.reason = msg;
        if (rep.violations.size() < 20) rep.violations.push_back(msg);
    };
    const double h = 1e-4;
    const Complex d0 = (f(h) - f(-h)) / (2 * h);
    if (std::abs(d0) < 1e-10) fail("eta'(0) vanishes");
    schwarz_samples(f, rep, fail);
    for (int n = winding_samples; n <= winding_max_samples; n *= 2) {
        const double w = unwrap_winding(f, winding_radius, n);
        if (std::isnan(w)) continue;
        rep.winding_samples = n;
        rep.zero_count = int(std::lround(w));
        if (rep.zero_count != 0) fail("eta(z)/z has zeros in the disc");
        return rep;
    }
    throw WindingAmbiguity("phase unwrapping unresolved at " +
                           std::to_string(winding_max_samples) + " samples");
}

MembershipReport membership_t(const MeasureT& mu, int winding_samples) {
    MembershipReport rep;
    auto fail = [&](const std::string& msg) {
        rep.member = false;
        if (rep.reason.empty()) rep.reason = msg;
        if (rep.violations.size() < 20) rep.violations.push_back(msg);
    };
    try {
        validate(mu);
    } catch (const MeasureError& e) {
        fail(e.what());
        return rep;
    }
    const Complex m1 = first_moment(mu);
    const double h = 1e-4;
    const Complex d0 = (eta(mu, h) - eta(mu, -h)) / (2 * h);
    if (std::abs(m1) < 1e-12 || std::abs(d0) < 1e-10) {
        fail("zero first moment");
        return rep;
    }
    schwarz_samples([&](Complex z) { return eta(mu, z); }, rep, fail);
    // Argument principle for eta(z)/z: (1/2 pi i) \oint (eta'/eta - 1/z) dz, i.e. the
    // mean of z eta'/eta - 1 over equispaced boundary points.
    for (int n = winding_samples; n <= winding_max_samples; n *= 2) {
        Complex acc = 0.0;
        for (int k = 0; k < n; ++k) {
            const Complex z = std::polar(winding_radius, two_pi * k / n);
            const auto lt = LocalTransforms::from(z, moment_pair(mu, z, true));
            acc -= lt.z_u_prime;
        }
        const Complex w = acc / double(n);
        if (std::abs(w.real() - std::round(w.real())) <= 1e-3 && std::abs(w.imag()) <= 1e-3) {
            rep.winding_samples = n;
            rep.zero_count = int(std::lround(w.real()));
            if (rep.zero_count != 0) fail("eta(z)/z has zeros in the disc");
            return rep;
        }
    }
    throw WindingAmbiguity("winding integral not integral at " +
                           std::to_string(winding_max_samples) + " samples");
}

std::vector<double> stieltjes_invert_r(const EtaFunction& f, const std::vector<double>& grid,
                                       double eps) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid) {
        const Complex z(x, eps);
        // Im(z/(1-eta))/pi tends to the density of mu at 1/x; the 1/x^2 factor
        // turns it into the density of nu at x.
        const double raw = (z / (1.0 - f(z))).imag() / pi;
        out.push_back(raw / (x * x));
    }
    return out;
}

std::vector<double> poisson_invert_t(const EtaFunction& f, const std::vector<double>& theta,
                                     double r) {
    std::vector<double> out;
    out.reserve(theta.size());
    for (double th : theta) {
        const Complex e = f(std::polar(r, th));
        out.push_back((1.0 - std::norm(e)) / std::norm(1.0 - e) / two_pi);
    }
    return out;
}

}  // namespace mfp
