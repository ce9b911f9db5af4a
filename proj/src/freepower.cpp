#include "mfp/freepower.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfp {

namespace {

// Chebyshev-Lobatto points of [a, b], clustered at both ends.
std::vector<double> clustered(double a, double b, int n) {
    std::vector<double> x(n + 1);
    for (int k = 0; k <= n; ++k) x[k] = 0.5 * (a + b) - 0.5 * (b - a) * std::cos(pi * k / n);
    x.front() = a;
    x.back() = b;
    return x;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) s += 0.5 * (f[i] + f[i + 1]) * (x[i + 1] - x[i]);
    return s;
}

// \int f dy over values sampled at Chebyshev-Lobatto nodes, integrated in the node
// angle, where f dy/dphi stays bounded even at inverse square-root edges.
double chebyshev_mass(const std::vector<double>& y, const std::vector<double>& f) {
    const std::size_t n = y.size();
    if (n < 4) return std::abs(trapezoid(y, f));
    std::vector<double> w(n);
    for (std::size_t k = 1; k + 1 < n; ++k) w[k] = f[k] * 0.5 * std::abs(y[k + 1] - y[k - 1]);
    w[0] = std::max(0.0, 2.0 * w[1] - w[2]);
    w[n - 1] = std::max(0.0, 2.0 * w[n - 2] - w[n - 3]);
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) s += 0.5 * (w[k] + w[k + 1]);
    return s;
}

bool dominant(double m, double t) { return m > (t - 1.0) / t; }

// Merge sorted intervals whose gap is below tol (tol applied to log-locations when
// log_scale is set).
std::vector<Interval> merge_sorted(std::vector<Interval> v, double tol, bool log_scale) {
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& iv : v) {
        if (!out.empty()) {
            auto& cur = out.back();
            const bool close = log_scale ? (cur.hi > 0.0 && iv.lo > 0.0 && std::log(iv.lo / cur.hi) < tol) ||
                                               iv.lo <= cur.hi
                                         : iv.lo - cur.hi < tol;
            if (close) {
                cur.hi = std::max(cur.hi, iv.hi);
                continue;
            }
        }
        out.push_back(iv);
    }
    return out;
}

PowerResult identity_r(const MeasureR& mu) {
    PowerResult res;
    res.t = 1.0;
    res.mass_at_zero = mu.mass_at_zero;
    for (const auto& a : mu.atoms) {
        res.atoms.push_back({a.pos, a.mass});
        res.components.push_back({a.pos, a.pos});
    }
    if (!mu.ac.empty()) {
        DensityPiece p{mu.ac.grid, mu.ac.values, mu.ac.integral()};
        res.pieces.push_back(p);
        for (const auto& run : mu.ac.positive_runs()) res.components.push_back({run.front(), run.back()});
    }
    if (mu.mass_at_zero > 0.0) res.components.push_back({0.0, 0.0});
    res.components = merge_sorted(res.components, 0.0, false);
    res.component_count = int(res.components.size());
    res.mass_balance = total_mass(mu);
    return res;
}

PowerResult identity_t(const MeasureT& mu) {
    PowerResult res;
    res.t = 1.0;
    res.space = Space::circle;
    for (const auto& a : mu.atoms) {
        res.atoms.push_back({a.angle, a.mass});
        res.components.push_back({a.angle, a.angle});
    }
    if (!mu.ac.empty()) {
        res.pieces.push_back({mu.ac.grid, mu.ac.values, mu.ac.integral()});
        for (const auto& run : mu.ac.positive_runs()) res.components.push_back({run.front(), run.back()});
    }
    res.components = merge_sorted(res.components, 0.0, false);
    res.component_count = int(res.components.size());
    res.mass_balance = total_mass(mu);
    return res;
}

}  // namespace

std::pair<double, double> density_r(const MeasureR& mu, const NevanlinnaRepR& rep, double t, double r) {
    const double a = angle_a_t(mu, rep, t, r);
    const Complex u = u_near_axis(mu, rep, r, a);
    const double phase = a + (t - 1.0) * u.imag();
    if (std::abs(phase) > 1e-8) throw PhaseError("arg Phi_t = " + format_double(phase) + " at r = " + format_double(r));
    const double h = r * std::exp((t - 1.0) * u.real());
    if (a == 0.0) return {1.0 / h, 0.0};
    // |eta_mu(r e^{iA})| = r exp(-Re u), which is what Re/Im eta = l cos, l sin require.
    const double l = r * std::exp(-u.real());
    const double th = t * a / (t - 1.0);
    const double value = h * l * std::sin(th) / (pi * (1.0 - 2.0 * l * std::cos(th) + l * l));
    return {1.0 / h, value};
}

std::pair<double, double> density_t(const HerglotzRepT& rep, double t, double theta) {
    const double radius = radius_r_t(rep, t, theta);
    const Complex u = u_at_radius(rep, radius, theta);
    const Complex h = std::polar(radius, theta) * std::exp((t - 1.0) * u);
    if (std::abs(std::abs(h) - 1.0) > 1e-8)
        throw ModulusError("|h_t| - 1 = " + format_double(std::abs(h) - 1.0) + " at theta = " + format_double(theta));
    const double l = std::pow(radius, t / (t - 1.0));
    const double alpha = theta - u.imag();
    const double value = (1.0 - l * l) / (two_pi * (1.0 - 2.0 * l * std::cos(alpha) + l * l));
    return {-std::arg(h), value};
}

std::vector<AtomR> atoms_r(const MeasureR& mu, double t) {
    std::vector<AtomR> out;
    for (const auto& a : mu.atoms)
        if (dominant(a.mass, t)) out.push_back({std::pow(a.pos, t), t * a.mass - (t - 1.0)});
    return out;
}

std::vector<AtomT> atoms_t(const MeasureT& mu, const HerglotzRepT& rep, double t) {
    std::vector<AtomT> out;
    for (const auto& a : mu.atoms) {
        if (!dominant(a.mass, t)) continue;
        const double theta = wrap_angle(-a.angle);
        if (radius_r_t(rep, t, theta) < 1.0)
            throw LocateError("atom at angle " + format_double(a.angle) + " is not on the boundary of Omega_t");
        const double loc = wrap_angle(a.angle - (t - 1.0) * boundary_u(rep, theta).imag());
        out.push_back({loc, t * a.mass - (t - 1.0)});
    }
    return out;
}

double atom_identity_check_r(const MeasureR& mu, const NevanlinnaRepR& rep, double r) {
    double m = 0.0;
    for (const auto& a : mu.atoms)
        if (std::abs(a.pos * r - 1.0) <= 1e-12) m += a.mass;
    if (m == 0.0) return inf;
    return std::abs(1.0 + g_value(mu, rep, r) - 1.0 / m);
}

double atom_identity_check_t(const MeasureT& mu, const HerglotzRepT& rep, double theta) {
    double m = 0.0;
    for (const auto& a : mu.atoms)
        if (std::abs(wrap_angle(a.angle + theta)) <= 1e-12) m += a.mass;
    if (m == 0.0) return inf;
    return std::abs(1.0 + g_circle(rep, theta) - 1.0 / m);
}

NevanlinnaRepR working_rep(const MeasureR& mu) {
    return is_atomic(mu) && !mu.atoms.empty() ? closed_form_rho_atomic_r(mu) : NevanlinnaRepR{};
}

PowerResult assemble(const MeasureR& mu, double t, const AssembleOptions& opt) {
    validate(mu);
    if (t == 1.0) return identity_r(mu);
    if (!(t > 1.0)) throw DomainError("t must be at least 1");
    const auto rep = working_rep(mu);
    const auto grid = default_r_grid(mu, rep, t, opt.r_grid);
    const auto curve = boundary_r(mu, rep, t, grid);

    PowerResult res;
    res.t = t;
    res.mass_at_zero = mu.mass_at_zero;
    for (const auto& iv : curve.vt_plus) {
        DensityPiece piece, recip;
        const auto nodes = clustered(std::log(iv.lo), std::log(iv.hi), opt.nodes_per_component);
        for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
            const auto [y, v] = density_r(mu, rep, t, std::exp(*it));
            piece.locations.push_back(y);
            piece.values.push_back(v);
        }
        piece.mass = chebyshev_mass(piece.locations, piece.values);
        // A_t vanishes at the ends of V_t^+; the sample there is the closure point.
        piece.values.front() = piece.values.back() = 0.0;
        for (std::size_t i = piece.locations.size(); i-- > 0;) {
            const double y = piece.locations[i];
            recip.locations.push_back(1.0 / y);
            recip.values.push_back(piece.values[i] * y * y);
        }
        recip.mass = piece.mass;
        res.components.push_back({piece.locations.front(), piece.locations.back()});
        res.pieces.push_back(std::move(piece));
        res.reciprocal_pieces.push_back(std::move(recip));
    }
    for (const auto& a : atoms_r(mu, t)) {
        res.atoms.push_back({a.pos, a.mass});
        res.components.push_back({a.pos, a.pos});
    }
    if (mu.mass_at_zero > 0.0) res.components.push_back({0.0, 0.0});
    res.components = merge_sorted(res.components, std::log(grid[1] / grid[0]), true);
    res.component_count = int(res.components.size());
    res.mass_balance = res.mass_at_zero;
    for (const auto& a : res.atoms) res.mass_balance += a.second;
    for (const auto& p : res.pieces) res.mass_balance += p.mass;
    return res;
}

PowerResult assemble(const MeasureT& mu, double t, const AssembleOptions& opt) {
    validate(mu);
    if (t == 1.0) return identity_t(mu);
    if (!(t > 1.0)) throw DomainError("t must be at least 1");
    const auto rep = extract_rep_t(mu);
    const auto curve = boundary_t(rep, t, opt.theta_grid);

    PowerResult res;
    res.t = t;
    res.space = Space::circle;
    std::vector<Interval> arcs;
    for (const auto& arc : curve.vt_plus) {
        std::vector<double> nodes;
        if (arc.full) {
            nodes = uniform_theta_grid(opt.theta_grid);
            nodes.push_back(pi);
        } else {
            nodes = clustered(arc.start, arc.end, opt.nodes_per_component);
        }
        DensityPiece piece;
        double prev = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            auto [loc, v] = density_t(rep, t, nodes[k]);
            if (k > 0) loc = prev + wrap_angle(loc - prev);
            prev = loc;
            piece.locations.push_back(loc);
            piece.values.push_back(v);
        }
        // Locations run backwards as theta increases.
        std::reverse(piece.locations.begin(), piece.locations.end());
        std::reverse(piece.values.begin(), piece.values.end());
        if (arc.full) {
            piece.locations.pop_back();
            piece.values.pop_back();
        }
        const double shift = two_pi * std::floor((piece.locations.front() + pi) / two_pi);
        for (auto& x : piece.locations) x -= shift;
        if (arc.full) {
            std::vector<double> x = piece.locations, f = piece.values;
            x.push_back(x.front() + two_pi);
            f.push_back(f.front());
            piece.mass = trapezoid(x, f);
            arcs.push_back({-pi, pi});
        } else {
            piece.mass = chebyshev_mass(piece.locations, piece.values);
            piece.values.front() = piece.values.back() = 0.0;
            arcs.push_back({piece.locations.front(), piece.locations.back()});
        }
        res.pieces.push_back(std::move(piece));
    }
    for (const auto& a : atoms_t(mu, rep, t)) {
        res.atoms.push_back({a.angle, a.mass});
        arcs.push_back({a.angle, a.angle});
    }
    const bool full = std::any_of(curve.vt_plus.begin(), curve.vt_plus.end(), [](const Arc& a) { return a.full; });
    if (full) {
        res.components = {{-pi, pi}};
    } else {
        auto merged = merge_sorted(arcs, two_pi / opt.theta_grid, false);
        // Close the cycle: the last arc may reach around to the first.
        while (merged.size() > 1 && merged.front().lo + two_pi - merged.back().hi < two_pi / opt.theta_grid) {
            merged.front().lo = merged.back().lo - two_pi;
            merged.pop_back();
        }
        if (!merged.empty() && merged.front().hi - merged.front().lo >= two_pi) merged = {{-pi, pi}};
        res.components = merged;
    }
    res.component_count = int(res.components.size());
    for (const auto& a : res.atoms) res.mass_balance += a.second;
    for (const auto& p : res.pieces) res.mass_balance += p.mass;
    return res;
}

std::vector<int> component_count_sweep(const MeasureR& mu, const std::vector<double>& t_list,
                                       const AssembleOptions& opt) {
    std::vector<int> out;
    for (double t : t_list) out.push_back(assemble(mu, t, opt).component_count);
    return out;
}

std::vector<int> component_count_sweep(const MeasureT& mu, const std::vector<double>& t_list,
                                       const AssembleOptions& opt) {
    std::vector<int> out;
    for (double t : t_list) out.push_back(assemble(mu, t, opt).component_count);
    return out;
}

nlohmann::json to_json(const PowerResult& res) {
    nlohmann::json j;
    j["t"] = res.t;
    j["space"] = res.space == Space::half_line ? "half_line" : "circle";
    auto atoms = nlohmann::json::array();
    for (const auto& [loc, m] : res.atoms) atoms.push_back({{"pos", loc}, {"mass", m}});
    j["atoms"] = atoms;
    if (res.space == Space::half_line) j["mass_at_zero"] = res.mass_at_zero;
    auto comps = nlohmann::json::array();
    for (const auto& c : res.components) comps.push_back({c.lo, c.hi});
    j["components"] = comps;
    std::vector<double> locs, vals;
    for (const auto& p : res.pieces) {
        locs.insert(locs.end(), p.locations.begin(), p.locations.end());
        vals.insert(vals.end(), p.values.begin(), p.values.end());
    }
    j["density"] = {{"locations", locs}, {"values", vals}};
    j["mass_balance"] = res.mass_balance;
    j["component_count"] = res.component_count;
    return j;
}

std::string density_csv(const PowerResult& res) {
    std::ostringstream os;
    os << "location,value\n";
    for (const auto& p : res.pieces)
        for (std::size_t i = 0; i < p.locations.size(); ++i)
            os << format_double(p.locations[i]) << ',' << format_double(p.values[i]) << '\n';
    return os.str();
}

}  // namespace mfp
