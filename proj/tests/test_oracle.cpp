#include <doctest.h>

#include <cmath>
#include <random>

#include "corpus.hpp"
#include "mfp/boundary_r.hpp"
#include "mfp/oracle.hpp"

using namespace mfp;

TEST_CASE("omega for a point mass") {
    const auto mu = corpus::delta_r(2.0);
    for (double t : {1.5, 3.0})
        for (Complex z : {Complex(-0.3, 0.0), Complex(0.2, 0.5), Complex(5.0, 1e-3), Complex(-4.0, -2.0)}) {
            const auto r = solve_omega(mu, t, z);
            CHECK(std::abs(r.omega - z * std::pow(2.0, t - 1)) < 1e-12 * std::abs(z) * std::pow(2.0, t));
        }
    const auto d = corpus::delta_t(0.7);
    for (Complex z : {Complex(0.3, 0.1), Complex(-0.9, 0.2)}) {
        const auto r = solve_omega(d, 2.5, z);
        CHECK(std::abs(r.omega - z * std::polar(1.0, 1.5 * 0.7)) < 1e-12);
    }
}

TEST_CASE("omega on the negative axis for two atoms") {
    const auto r = solve_omega(corpus::two_atom(), 2.0, -0.1);
    CHECK(r.residual <= 1e-10);
    CHECK(r.omega.real() < 0.0);
    CHECK(std::abs(r.omega.imag()) < 1e-15);
}

TEST_CASE("subordination contract on random probes") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& [name, mu] : corpus::half_line()) {
        CAPTURE(name);
        for (int i = 0; i < 25; ++i) {
            const Complex z = std::polar(std::exp(6.0 * unit(rng) - 3.0), pi * unit(rng));
            const auto r = solve_omega(mu, 2.0, z);
            CHECK(r.residual <= 1e-10);
            CHECK(r.in_domain);
            CHECK(std::arg(r.omega) >= std::arg(z) - 1e-12);
            CHECK(std::arg(r.omega) < pi);
        }
    }
    for (const auto& [name, mu] : corpus::circle()) {
        CAPTURE(name);
        for (int i = 0; i < 25; ++i) {
            const Complex z = std::polar(std::sqrt(unit(rng)) * 0.999, two_pi * unit(rng));
            const auto r = solve_omega(mu, 2.0, z);
            CHECK(r.residual <= 1e-10);
            CHECK(std::abs(r.omega) <= std::abs(z) * (1 + 1e-12));
            CHECK(!r.non_unique);
        }
    }
}

TEST_CASE("Sigma of the power") {
    std::vector<Complex> neg;
    for (int k = 1; k <= 10; ++k) neg.push_back(-0.01 * k);
    CHECK(sigma_power_check(corpus::two_atom(), 2.0, neg) <= 1e-6);
    CHECK(sigma_power_check(corpus::delta_r(3.0), 2.5, neg) <= 1e-12);
    std::vector<Complex> ring;
    for (int k = 0; k < 12; ++k) ring.push_back(std::polar(0.05, two_pi * k / 12));
    CHECK(sigma_power_check(corpus::atom_haar(0.5), 2.0, ring) <= 1e-6);
    CHECK(sigma_power_check(corpus::two_atom_poisson(), 3.0, ring) <= 1e-6);
}

TEST_CASE("circle formula for omega") {
    for (const auto& mu : {corpus::atom_haar(0.5), corpus::two_atom_poisson()})
        for (double t : {1.5, 2.0, 4.0})
            for (Complex z : {Complex(0.3, 0.4), Complex(-0.7, 0.1), Complex(0.2, -0.95)})
                CHECK(circle_formula_residual(mu, t, z) <= 1e-8);
}

TEST_CASE("omega at the boundary curve") {
    const auto mu = corpus::two_atom();
    const auto rep = closed_form_rho_atomic_r(mu);
    for (double r : {0.3, 0.5, 0.8}) {
        const double a = angle_a_t(mu, rep, 2.0, r);
        const double h = h_t_r(mu, rep, 2.0, r);
        const auto res = solve_omega(mu, 2.0, Complex(h, 1e-8 * h));
        CHECK(std::abs(res.omega - std::polar(r, a)) < 1e-4);
    }
}

TEST_CASE("omega passes the eta-transform sampling checks") {
    for (const auto& mu : {corpus::two_atom(), corpus::atom_uniform(1.0, 0.5, 2.0, 3.0)}) {
        const auto rep = membership_r([&](Complex z) { return solve_omega(mu, 2.0, z).omega; });
        CHECK(rep.member);
    }
    const auto mu = corpus::atom_haar(0.5);
    const auto rep = membership_t([&](Complex z) { return solve_omega(mu, 2.0, z).omega; }, 256);
    CHECK(rep.member);
}

TEST_CASE("oracle densities") {
    // delta_c: the smoothed profile peaks at c^t.
    const auto d = oracle_density_r(corpus::delta_r(2.0), 2.0, {3.9, 4.0, 4.1});
    CHECK(d[1] > 100 * d[0]);
    CHECK(d[1] > 100 * d[2]);
    // delta at angle beta: the power is the point mass at t beta.
    const double beta = 0.4, t = 2.5, r = 0.9;
    const std::vector<double> phi{-1.0, 0.9, 1.0, 2.0};
    const auto v = oracle_density_t(corpus::delta_t(beta), t, phi, r);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double expect = (1 - r * r) / std::norm(1.0 - std::polar(r, t * beta - phi[i])) / two_pi;
        CHECK(v[i] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("oracle csv") {
    const auto tr = trace(corpus::two_atom(), 2.0, {Complex(-0.5, 0.0), Complex(1.0, 1.0)});
    const auto csv = to_csv(tr);
    CHECK(csv.rfind("probe_re,probe_im,omega_re,omega_im,residual,iterations\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
