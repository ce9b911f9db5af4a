#pragma once

// Measures shared by the unit and acceptance tests.

#include <cmath>
#include <string>
#include <vector>

#include "mfp/measures.hpp"

namespace corpus {

using mfp::MeasureR;
using mfp::MeasureT;

inline MeasureR atoms_r(std::vector<mfp::AtomR> atoms) {
    MeasureR mu;
    mu.atoms = std::move(atoms);
    return mu;
}

inline MeasureR delta_r(double c) { return atoms_r({{c, 1.0}}); }

inline MeasureR two_atom() { return atoms_r({{1.0, 0.5}, {4.0, 0.5}}); }

inline MeasureR three_atom() {
    return atoms_r({{1.0, 1.0 / 3}, {2.0, 1.0 / 3}, {3.0, 1.0 / 3}});
}

inline MeasureR dominant_atom() { return atoms_r({{1.0, 0.8}, {4.0, 0.2}}); }

inline MeasureR four_atom() {
    return atoms_r({{0.1, 0.25}, {0.2, 0.25}, {5.0, 0.25}, {10.0, 0.25}});
}

/// Atom at c with mass m plus uniform density of mass 1-m on [a,b].
inline MeasureR atom_uniform(double c, double m, double a, double b) {
    MeasureR mu = atoms_r({{c, m}});
    const double h = (1.0 - m) / (b - a);
    mu.ac.grid = {a, b};
    mu.ac.values = {h, h};
    return mu;
}

inline MeasureT delta_t(double beta) {
    MeasureT mu;
    mu.atoms = {{beta, 1.0}};
    return mu;
}

/// (1-s) delta_{e^{i beta}} + s Haar.
inline MeasureT atom_haar(double s, double beta = 0.0) {
    MeasureT mu;
    mu.atoms = {{beta, 1.0 - s}};
    const double h = s / (2.0 * M_PI);
    mu.ac.grid = {-M_PI, M_PI};
    mu.ac.values = {h, h};
    return mu;
}

/// Two atoms of mass m at angles +-gamma and a Poisson-kernel background of
/// mass 1-2m with parameter q, sampled on n nodes and renormalised exactly.
inline MeasureT two_atom_poisson(double m = 0.3, double gamma = 0.6, double q = 0.5, int n = 257) {
    MeasureT mu;
    mu.atoms = {{gamma, m}, {-gamma, m}};
    mu.ac.grid.resize(n);
    mu.ac.values.resize(n);
    for (int k = 0; k < n; ++k) {
        const double th = -M_PI + 2.0 * M_PI * k / (n - 1);
        mu.ac.grid[k] = th;
        mu.ac.values[k] = (1 - q * q) / (1 - 2 * q * std::cos(th) + q * q);
    }
    const double scale = (1.0 - 2 * m) / mu.ac.integral();
    for (auto& v : mu.ac.values) v *= scale;
    return mu;
}

struct NamedR {
    std::string name;
    MeasureR mu;
};

struct NamedT {
    std::string name;
    MeasureT mu;
};

inline std::vector<NamedR> half_line() {
    return {
        {"delta_0.5", delta_r(0.5)},
        {"delta_2", delta_r(2.0)},
        {"two_atom", two_atom()},
        {"three_atom", three_atom()},
        {"dominant_atom", dominant_atom()},
        {"atom_uniform_a", atom_uniform(1.0, 0.5, 2.0, 3.0)},
        {"atom_uniform_b", atom_uniform(0.5, 0.6, 1.0, 2.0)},
    };
}

inline std::vector<NamedT> circle() {
    return {
        {"delta_beta", delta_t(0.7)},
        {"haar_0.3", atom_haar(0.3)},
        {"haar_0.5", atom_haar(0.5)},
        {"haar_0.7", atom_haar(0.7)},
        {"haar_0.2", atom_haar(0.2)},
        {"two_atom_poisson", two_atom_poisson()},
    };
}

}  // namespace corpus
