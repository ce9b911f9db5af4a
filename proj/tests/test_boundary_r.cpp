#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "corpus.hpp"
#include "mfp/boundary_r.hpp"

using namespace mfp;

namespace {

// g for rho = (1+s^2)^{-1} ds on (2/5, 5/8), the two-atom measure.
double g_two_atom(double r) { return (9.0 / 40) * r / ((r - 5.0 / 8) * (r - 2.0 / 5)); }

}  // namespace

TEST_CASE("g_radial closed form for two atoms") {
    const auto mu = corpus::two_atom();
    const auto rep = closed_form_rho_atomic_r(mu);
    CHECK(g_radial(rep, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
    for (double r : {0.01, 0.1, 0.3, 0.39, 0.63, 0.8, 1.0, 3.0, 100.0}) {
        CAPTURE(r);
        CHECK(g_radial(rep, r) == doctest::Approx(g_two_atom(r)).epsilon(1e-11));
        CHECK(g_radial(mu, r) == doctest::Approx(g_two_atom(r)).epsilon(1e-6));
    }
    for (double r : {0.4, 0.5, 0.625}) CHECK(std::isinf(g_radial(rep, r)));
    CHECK(std::isinf(g_radial(mu, 0.5)));
    CHECK(g_radial(NevanlinnaRepR{}, 2.0) == 0.0);
}

TEST_CASE("g_radial from an extracted rep") {
    const auto mu = corpus::two_atom();
    const auto rep = extract_rep_r(mu);
    for (double r : {0.1, 0.3, 1.0, 3.0}) CHECK(g_radial(rep, r) == doctest::Approx(g_two_atom(r)).epsilon(1e-4));
    CHECK(std::isinf(g_radial(rep, 0.5)));
}

TEST_CASE("g_polar is nonincreasing in the angle and vanishes near pi") {
    const auto mu = corpus::two_atom();
    for (double r : {0.2, 0.5, 0.9, 2.0}) {
        double prev = inf;
        for (int k = 1; k < 200; ++k) {
            const double g = g_polar(mu, r, pi * k / 200);
            CHECK(g <= prev + 1e-12);
            prev = g;
        }
        CHECK(g_polar(mu, r, pi - 1e-7) < 1e-5);
    }
    for (double th : {0.1, 1.0, 3.0}) CHECK(g_polar(corpus::delta_r(2.0), 1.3, th) == doctest::Approx(0.0));
}

TEST_CASE("A_t for two atoms at t = 2") {
    const auto mu = corpus::two_atom();
    const auto rep = closed_form_rho_atomic_r(mu);
    CHECK(angle_a_t(mu, rep, 2.0, 0.25) == 0.0);
    CHECK(angle_a_t(mu, rep, 2.0, 1.0) == 0.0);
    const double a = angle_a_t(mu, rep, 2.0, 0.5);
    CHECK(a > 0.0);
    CHECK(std::abs(log_kappa(mu, std::polar(0.5, a)).imag() + a) < 1e-8);
    const auto d = corpus::delta_r(3.0);
    const auto drep = closed_form_rho_atomic_r(d);
    for (double r : {0.1, 1.0, 10.0}) CHECK(angle_a_t(d, drep, 2.5, r) == 0.0);
}

TEST_CASE("V_t^+ for two atoms") {
    const auto mu = corpus::two_atom();
    const auto rep = closed_form_rho_atomic_r(mu);
    const auto v = vt_plus_r(mu, rep, 2.0, default_r_grid(mu, rep, 2.0));
    REQUIRE(v.size() == 1);
    CHECK(v[0].lo == doctest::Approx(0.25).epsilon(1e-7));
    CHECK(v[0].hi == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(vt_plus_r(corpus::delta_r(2.0), NevanlinnaRepR{}, 2.0, default_r_grid(corpus::delta_r(2.0), {}, 2.0)).empty());
}

TEST_CASE("h_t values") {
    const auto mu = corpus::two_atom();
    const auto rep = closed_form_rho_atomic_r(mu);
    CHECK(h_t_r(mu, rep, 2.0, 0.25) == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(h_t_r(mu, rep, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    const auto d = corpus::delta_r(3.0);
    const auto drep = closed_form_rho_atomic_r(d);
    for (double r : {0.1, 1.0, 10.0}) CHECK(h_t_r(d, drep, 2.5, r) == doctest::Approx(r * std::pow(3.0, -1.5)));
}

TEST_CASE("boundary curve properties over the corpus") {
    for (const auto& [name, mu] : corpus::half_line()) {
        const auto rep = is_atomic(mu) ? closed_form_rho_atomic_r(mu) : NevanlinnaRepR{};
        std::vector<BoundaryCurveR> curves;
        for (double t : {1.5, 2.0, 3.0}) {
            CAPTURE(name);
            CAPTURE(t);
            std::vector<double> grid;
            if (!curves.empty()) grid = curves.front().r_grid;
            const auto c = boundary_r(mu, rep, t, grid.empty() ? default_r_grid(mu, rep, 1.5, 256) : grid);
            const double thr = 1.0 / (t - 1.0);
            for (std::size_t i = 0; i < c.r_grid.size(); ++i) {
                const bool in = exceeds_threshold(c.g[i], t);
                CHECK((c.angles[i] > 0.0) == in);
                if (in) {
                    CHECK(std::abs(g_polar(mu, c.r_grid[i], c.angles[i]) - thr) <= 1e-8 * std::max(1.0, thr));
                    CHECK(c.angles[i] < pi);
                }
                if (i > 0) CHECK(c.h_values[i] > c.h_values[i - 1]);
            }
            // Discrete convexity of g on maximal runs where it is finite.
            for (std::size_t i = 1; i + 1 < c.r_grid.size(); ++i) {
                if (!std::isfinite(c.g[i - 1]) || !std::isfinite(c.g[i]) || !std::isfinite(c.g[i + 1])) continue;
                const double h0 = c.r_grid[i] - c.r_grid[i - 1], h1 = c.r_grid[i + 1] - c.r_grid[i];
                const double second = (c.g[i + 1] - c.g[i]) / h1 - (c.g[i] - c.g[i - 1]) / h0;
                CHECK(second >= -1e-9 * std::max(1.0, std::abs(c.g[i])));
            }
            curves.push_back(c);
        }
        // Growing t lowers the threshold, so the node sets grow.
        for (std::size_t k = 1; k < curves.size(); ++k)
            for (std::size_t i = 0; i < curves[k].r_grid.size(); ++i)
                if (exceeds_threshold(curves[k - 1].g[i], curves[k - 1].t))
                    CHECK(exceeds_threshold(curves[k].g[i], curves[k].t));
    }
}

TEST_CASE("boundary csv export") {
    const auto mu = corpus::two_atom();
    const auto c = boundary_r(mu, closed_form_rho_atomic_r(mu), 2.0, {0.1, 0.5, 2.0});
    const auto csv = to_csv(c);
    CHECK(csv.rfind("r,A_t,g,h_t,in_vt_plus\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.find(",inf,") != std::string::npos);
}
