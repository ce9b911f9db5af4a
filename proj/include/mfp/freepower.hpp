#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mfp/boundary_r.hpp"
#include "mfp/boundary_t.hpp"

namespace mfp {

enum class Space { half_line, circle };

/// Density samples of one support component, sorted by location.
struct DensityPiece {
    std::vector<double> locations;
    std::vector<double> values;
    double mass = 0.0;
};

struct PowerResult {
    double t = 1.0;
    Space space = Space::half_line;
    std::vector<DensityPiece> pieces;
    /// (location, mass); the location is a point of [0, inf) or an angle.
    std::vector<std::pair<double, double>> atoms;
    double mass_at_zero = 0.0;
    /// Half-line: [lo, hi]. Circle: arcs [start, end] with end possibly beyond pi.
    std::vector<Interval> components;
    int component_count = 0;
    double mass_balance = 0.0;
    /// Half-line only: the profile in the reciprocal variable x = 1/y.
    std::vector<DensityPiece> reciprocal_pieces;
};

/// Density of the power at y = 1/h_t(r) for r inside V_t^+; returns (y, value).
std::pair<double, double> density_r(const MeasureR& mu, const NevanlinnaRepR& rep, double t, double r);
/// Density (in angle) at conj(h_t(e^{i theta})) for theta inside V_t^+; returns (angle, value).
std::pair<double, double> density_t(const HerglotzRepT& rep, double t, double theta);

std::vector<AtomR> atoms_r(const MeasureR& mu, double t);
/// Atoms of the power; the atom of mu at e^{i beta} is read at theta = -beta.
std::vector<AtomT> atoms_t(const MeasureT& mu, const HerglotzRepT& rep, double t);

/// |1 + g(r) - 1/mu({1/r})|.
double atom_identity_check_r(const MeasureR& mu, const NevanlinnaRepR& rep, double r);
/// |1 + g(theta) - 1/mu({e^{-i theta}})|.
double atom_identity_check_t(const MeasureT& mu, const HerglotzRepT& rep, double theta);

/// Rep used by the half-line pipeline: closed form for atomic mu, empty otherwise
/// (g, A_t and h_t are then read from mu).
NevanlinnaRepR working_rep(const MeasureR& mu);

struct AssembleOptions {
    int r_grid = 1024;
    int theta_grid = 2048;
    int nodes_per_component = 2048;
};

PowerResult assemble(const MeasureR& mu, double t, const AssembleOptions& opt = {});
PowerResult assemble(const MeasureT& mu, double t, const AssembleOptions& opt = {});

std::vector<int> component_count_sweep(const MeasureR& mu, const std::vector<double>& t_list,
                                       const AssembleOptions& opt = {});
std::vector<int> component_count_sweep(const MeasureT& mu, const std::vector<double>& t_list,
                                       const AssembleOptions& opt = {});

nlohmann::json to_json(const PowerResult& res);
/// location,value rows over all pieces.
std::string density_csv(const PowerResult& res);

}  // namespace mfp
