#include "mfp/measures_io.hpp"

#include <fstream>

namespace mfp {

namespace {

SampledDensity parse_density(const nlohmann::json& j) {
    SampledDensity d;
    if (j.is_null()) return d;
    if (!j.is_object()) throw ParseError("\"ac\" must be an object");
    d.grid = j.at("grid").get<std::vector<double>>();
    d.values = j.at("values").get<std::vector<double>>();
    return d;
}

}  // namespace

Measure parse_measure(const nlohmann::json& j) {
    try {
        const std::string space = j.at("space").get<std::string>();
        const auto atoms = j.value("atoms", nlohmann::json::array());
        const auto ac = parse_density(j.value("ac", nlohmann::json()));
        const int hint = j.value("quadrature_hint", 0);
        if (space == "Rplus") {
            MeasureR mu;
            for (const auto& a : atoms) mu.atoms.push_back({a.at("pos").get<double>(), a.at("mass").get<double>()});
            mu.mass_at_zero = j.value("mass_at_zero", 0.0);
            mu.ac = ac;
            mu.quadrature_hint = hint;
            return mu;
        }
        if (space == "T") {
            MeasureT mu;
            for (const auto& a : atoms) mu.atoms.push_back({a.at("pos").get<double>(), a.at("mass").get<double>()});
            mu.ac = ac;
            mu.quadrature_hint = hint;
            return mu;
        }
        throw ParseError("unknown space \"" + space + "\"");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
}

Measure load_measure(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return parse_measure(j);
}

nlohmann::json to_json(const Measure& mu) {
    nlohmann::json j;
    auto density = [](const SampledDensity& d) {
        return nlohmann::json{{"grid", d.grid}, {"values", d.values}};
    };
    if (const auto* r = std::get_if<MeasureR>(&mu)) {
        j["space"] = "Rplus";
        j["atoms"] = nlohmann::json::array();
        for (const auto& a : r->atoms) j["atoms"].push_back({{"pos", a.pos}, {"mass", a.mass}});
        j["mass_at_zero"] = r->mass_at_zero;
        j["ac"] = density(r->ac);
    } else {
        const auto& t = std::get<MeasureT>(mu);
        j["space"] = "T";
        j["atoms"] = nlohmann::json::array();
        for (const auto& a : t.atoms) j["atoms"].push_back({{"pos", a.angle}, {"mass", a.mass}});
        j["ac"] = density(t.ac);
    }
    return j;
}

}  // namespace mfp
