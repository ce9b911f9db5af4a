#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "mfp/measures.hpp"
#include "mfp/measures_io.hpp"

using namespace mfp;

namespace {

// Partial fractions of the two-atom measure (1/2)(delta_1 + delta_4).
Complex psi_two_atom(Complex z) { return z * (5.0 - 8.0 * z) / (2.0 * (1.0 - z) * (1.0 - 4.0 * z)); }
Complex eta_two_atom(Complex z) { return z * (5.0 - 8.0 * z) / (2.0 - 5.0 * z); }
Complex kappa_two_atom(Complex z) { return (2.0 - 5.0 * z) / (5.0 - 8.0 * z); }

const std::vector<Complex> probes_r = {{-1.0, 0.0}, {-0.05, 0.0}, {0.3, 0.4}, {2.0, 1.5},
                                       {0.5, -0.2}, {-3.0, 2.0}, {10.0, 0.1}};
const std::vector<Complex> probes_d = {{0.0, 0.3}, {0.5, 0.1}, {-0.7, -0.2}, {0.1, -0.9},
                                       {0.98, 0.0}, {-0.3, 0.3}};

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    return s;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("adaptive Gauss-Kronrod quadrature") {
    auto r = integrate<double>([](double x) { return std::exp(x); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    // Near-singular complex integrand: int_0^1 zs/(1-zs) ds = -1 - log(1-z)/z.
    const Complex z(2.0, 1e-5);
    auto c = integrate<Complex>([&](double s) { return z * s / (1.0 - z * s); }, 0.0, 1.0);
    const Complex exact = -1.0 - std::log(1.0 - z) / z;
    CHECK(std::abs(c.value - exact) < 1e-9);
    CHECK_THROWS_AS(integrate<double>([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                      QuadOptions{1e-14, 0.0, 50}),
                    QuadratureError);
}

TEST_CASE("psi on point masses and the two-atom measure") {
    for (double c : {0.5, 2.0, 7.0}) CHECK(std::abs(psi(corpus::delta_r(c), -1.0) - (-c / (1 + c))) < 1e-15);
    const auto mu = corpus::two_atom();
    for (auto z : probes_r) {
        CHECK(std::abs(psi(mu, z) - psi_two_atom(z)) < 1e-13 * std::max(1.0, std::abs(psi_two_atom(z))));
        CHECK(std::abs(eta(mu, z) - eta_two_atom(z)) < 1e-13 * std::max(1.0, std::abs(eta_two_atom(z))));
        CHECK(std::abs(kappa(mu, z) - kappa_two_atom(z)) < 1e-13 * std::max(1.0, std::abs(kappa_two_atom(z))));
    }
    CHECK(std::abs(LocalTransforms::from(0.0, moment_pair(mu, 0.0)).eta_prime - 2.5) < 1e-14);
    CHECK(std::abs(eta_prime(mu, -1e-6) - 2.5) < 1e-4);
}

TEST_CASE("kappa of the two-atom measure is negative exactly on (2/5, 5/8)") {
    const auto mu = corpus::two_atom();
    for (double x : {0.3, 0.39, 0.41, 0.5, 0.62, 0.63, 0.9, 3.0}) {
        const Complex k = kappa(mu, Complex(x, 1e-10));
        const bool inside = x > 0.4 && x < 0.625;
        CHECK((k.real() < 0) == inside);
    }
}

TEST_CASE("circle transforms of atom plus Haar") {
    for (double s : {0.3, 0.5, 0.7}) {
        const auto mu = corpus::atom_haar(s);
        for (auto z : probes_d) {
            const Complex psi_exact = (1 - s) * z / (1.0 - z);
            const Complex eta_exact = (1 - s) * z / (1.0 - s * z);
            const Complex kappa_exact = (1.0 - s * z) / (1 - s);
            CHECK(std::abs(psi(mu, z) - psi_exact) < 1e-9 * std::max(1.0, std::abs(psi_exact)));
            CHECK(std::abs(eta(mu, z) - eta_exact) < 1e-9);
            CHECK(std::abs(kappa(mu, z) - kappa_exact) < 1e-9);
        }
    }
    const auto d = corpus::delta_t(0.7);
    CHECK(std::abs(eta(d, Complex(0.2, 0.3)) - std::polar(1.0, 0.7) * Complex(0.2, 0.3)) < 1e-15);
}

TEST_CASE("domain guards") {
    const auto mu = corpus::two_atom();
    CHECK_THROWS_AS(eta(mu, Complex(0.5, 0.0)), DomainError);
    CHECK_THROWS_AS(eta(mu, Complex(0.0, 0.0)), DomainError);
    CHECK_NOTHROW(eta(mu, Complex(0.5, 1e-9)));
    const auto h = corpus::atom_haar(0.5);
    CHECK_THROWS_AS(eta(h, Complex(1.0, 0.0)), DomainError);
    CHECK_THROWS_AS(eta(h, std::polar(1.0 - 1e-13, 0.4)), DomainError);
}

TEST_CASE("sigma by local inversion") {
    CHECK(std::abs(sigma(corpus::delta_r(3.0), -0.01) - 1.0 / 3.0) < 1e-14);
    const auto mu = corpus::two_atom();
    const Complex z = -0.05;
    const Complex w = z * sigma(mu, z);
    CHECK(std::abs(eta_two_atom(w) - z) < 1e-12);
    const double s = 0.5;
    const auto h = corpus::atom_haar(s);
    for (Complex zc : {Complex(0.05, 0.0), Complex(0.0, 0.05), Complex(-0.03, 0.02)}) {
        // (1-s)w/(1-sw) = z  =>  w = z / ((1-s) + s z)
        CHECK(std::abs(sigma(h, zc) - 1.0 / ((1 - s) + s * zc)) < 1e-9);
    }
}

TEST_CASE("half-line membership") {
    CHECK(membership_r(corpus::delta_r(1.0)).member);
    CHECK(membership_r(corpus::two_atom()).member);
    CHECK(membership_r(corpus::atom_uniform(1.0, 0.5, 2.0, 3.0)).member);
    MeasureR d0;
    d0.mass_at_zero = 1.0;
    const auto rep = membership_r(d0);
    CHECK_FALSE(rep.member);
    CHECK(rep.reason == "excluded point measure");
    // z -> z^2 is not an eta-transform of a half-line measure.
    CHECK_FALSE(membership_r([](Complex z) { return -z * z; }).member);
}

TEST_CASE("circle membership") {
    CHECK(membership_t(corpus::delta_t(0.4)).member);
    CHECK(membership_t(corpus::atom_haar(0.5)).member);
    CHECK(membership_t(corpus::two_atom_poisson()).member);
    MeasureT bad;
    bad.atoms = {{0.0, 0.75}, {M_PI, 0.25}};
    const auto rep = membership_t(bad);
    CHECK_FALSE(rep.member);
    CHECK(rep.zero_count == 1);
    // Two atoms on Haar background: eta vanishes at the mean direction.
    MeasureT two;
    two.atoms = {{0.6, 0.3}, {-0.6, 0.3}};
    two.ac = corpus::atom_haar(0.4).ac;
    CHECK_FALSE(membership_t(two).member);
    // Function form with phase unwrapping.
    CHECK(membership_t([](Complex z) { return 0.5 * z / (1.0 - 0.5 * z); }).member);
    CHECK_FALSE(membership_t([](Complex z) { return z * (z + 0.5) / 2.0; }).member);
}

TEST_CASE("conjugate symmetry, Schwarz bound and argument monotonicity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& [name, mu] : corpus::half_line()) {
        for (int i = 0; i < 40; ++i) {
            const double r = std::pow(10.0, -2 + 4 * u(rng));
            const double th = M_PI * (0.01 + 0.98 * u(rng));
            const Complex z = std::polar(r, th);
            const Complex e = eta(mu, z);
            CHECK(std::abs(eta(mu, std::conj(z)) - std::conj(e)) <= 1e-12 * std::max(1.0, std::abs(e)));
            CHECK(std::arg(e) >= th - 1e-12);
        }
    }
    for (const auto& [name, mu] : corpus::circle()) {
        for (int i = 0; i < 40; ++i) {
            const Complex z = std::polar(0.999 * std::sqrt(u(rng)), M_PI * (2 * u(rng) - 1));
            CHECK(std::abs(eta(mu, z)) <= std::abs(z) + 1e-12);
        }
    }
}

TEST_CASE("Stieltjes inversion returns the reciprocal-variable density") {
    const double eps = 1e-3;
    const auto grid = std::vector<double>{0.5};
    const auto zero = stieltjes_invert_r([](Complex) { return Complex(0.0); }, grid, eps);
    CHECK(zero[0] == doctest::Approx(eps / M_PI / 0.25).epsilon(1e-12));

    // delta_2 pushes forward to delta_{1/2}: the window mass tends to 1.
    const auto d2 = corpus::delta_r(2.0);
    const auto x = linspace(0.49, 0.51, 40001);
    const auto dens = stieltjes_invert_r([&](Complex z) { return eta(d2, z); }, x, 1e-6);
    CHECK(trapezoid(x, dens) == doctest::Approx(1.0).epsilon(1e-3));

    // Uniform density on [1,2] with an atom at zero: nu has mass 1 - mu({0}).
    MeasureR mu;
    mu.mass_at_zero = 0.2;
    mu.ac.grid = {1.0, 2.0};
    mu.ac.values = {0.8, 0.8};
    const auto xs = linspace(0.2, 1.5, 26001);
    const auto dn = stieltjes_invert_r([&](Complex z) { return eta(mu, z); }, xs, 1e-4);
    CHECK(trapezoid(xs, dn) == doctest::Approx(0.8).epsilon(2e-3));
    // Interior value: density of nu at x is f(1/x)/x^2 = 0.8/x^2.
    const auto mid = stieltjes_invert_r([&](Complex z) { return eta(mu, z); }, {0.75}, 1e-7);
    CHECK(mid[0] == doctest::Approx(0.8 / 0.5625).epsilon(1e-4));
}

TEST_CASE("Poisson inversion on the circle") {
    const auto flat = poisson_invert_t([](Complex) { return Complex(0.0); }, {0.3}, 0.9);
    CHECK(flat[0] == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-15));

    const double beta = 0.9;
    const auto d = corpus::delta_t(beta);
    const auto th = linspace(-M_PI, M_PI, 20001);
    const auto vals = poisson_invert_t([&](Complex z) { return eta(d, z); }, th, 0.99);
    const auto peak = std::max_element(vals.begin(), vals.end()) - vals.begin();
    CHECK(th[peak] == doctest::Approx(-beta).epsilon(1e-3));

    const auto h = corpus::atom_haar(0.5);
    const auto fine = linspace(-M_PI, M_PI, 200001);
    const auto ph = poisson_invert_t([&](Complex z) { return eta(h, z); }, fine, 0.999);
    CHECK(trapezoid(fine, ph) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("measure validation and JSON round trip") {
    MeasureR bad = corpus::two_atom();
    bad.atoms[1].mass = 0.4;
    CHECK_THROWS_AS(validate(bad), MeasureError);
    MeasureR dup = corpus::atoms_r({{1.0, 0.5}, {1.0, 0.5}});
    CHECK_THROWS_AS(validate(dup), MeasureError);
    CHECK_NOTHROW(validate(corpus::atom_uniform(1.0, 0.5, 2.0, 3.0)));
    CHECK_NOTHROW(validate(corpus::two_atom_poisson()));

    const auto j = nlohmann::json::parse(R"({"space":"Rplus","atoms":[{"pos":1,"mass":0.5},{"pos":4,"mass":0.5}]})");
    const auto m = parse_measure(j);
    REQUIRE(std::holds_alternative<MeasureR>(m));
    CHECK(std::get<MeasureR>(m).atoms.size() == 2);
    const auto back = parse_measure(to_json(m));
    CHECK(std::get<MeasureR>(back).atoms[1].pos == 4.0);
    CHECK_THROWS_AS(parse_measure(nlohmann::json::parse(R"({"space":"Q"})")), ParseError);
    CHECK_THROWS_AS(parse_measure(nlohmann::json::parse(R"({"atoms":[]})")), ParseError);
}

TEST_CASE("moment pair near the pole agrees with direct quadrature") {
    MeasureR mu;
    mu.ac.grid = {2.0, 2.4, 3.0};
    mu.ac.values = {0.5, 1.5, 0.2};
    const double scale = 1.0 / mu.ac.integral();
    for (auto& v : mu.ac.values) v *= scale;
    for (Complex w : {Complex(2.5, 0.1), Complex(2.01, -0.3), Complex(1.9, 0.05), Complex(2.4, 1e-3)}) {
        const Complex z = 1.0 / w;
        const auto m = moment_pair(mu, z, true);
        QuadOptions tight{1e-13, 1e-12, 100000};
        const Complex p = integrate<Complex>([&](double s) { return mu.ac(s) * s / (1.0 - z * s); },
                                             2.0, 2.4, tight).value +
                          integrate<Complex>([&](double s) { return mu.ac(s) * s / (1.0 - z * s); },
                                             2.4, 3.0, tight).value;
        const Complex q = integrate<Complex>([&](double s) { return mu.ac(s) * s / std::pow(1.0 - z * s, 2); },
                                             2.0, 2.4, tight).value +
                          integrate<Complex>([&](double s) { return mu.ac(s) * s / std::pow(1.0 - z * s, 2); },
                                             2.4, 3.0, tight).value;
        CHECK(std::abs(m.p - p) < 1e-9 * std::abs(p));
        CHECK(std::abs(m.q - q) < 1e-9 * std::abs(q));
    }
}
