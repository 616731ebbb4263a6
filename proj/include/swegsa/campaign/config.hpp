#pragma once

// Study configuration: a sectioned plain-text file with [parameters],
// [scenario], [probes] and [campaign]. Keys and defaults are documented in
// the README; every parse failure names the offending key.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swegsa/gsa/distributions.hpp"
#include "swegsa/swe/types.hpp"

namespace swegsa::campaign {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace detail

/// Ordered key/value file with [section] headers; '#' and ';' start comments.
class IniFile {
public:
    static IniFile parse(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        IniFile ini;
        ini.path_ = path;
        std::string line, section;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find_first_of("#;");
            if (hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed section");
                section = detail::trim(line.substr(1, line.size() - 2));
                ini.sections_[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
            ini.sections_[section].push_back({key, value});
        }
        return ini;
    }

    bool has_section(const std::string& s) const { return sections_.count(s) > 0; }

    const std::vector<std::pair<std::string, std::string>>& section(const std::string& s) const {
        static const std::vector<std::pair<std::string, std::string>> empty;
        auto it = sections_.find(s);
        return it == sections_.end() ? empty : it->second;
    }

    std::optional<std::string> get(const std::string& section, const std::string& key) const {
        for (const auto& [k, v] : this->section(section))
            if (k == key) return v;
        return std::nullopt;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        auto v = get(section, key);
        return v ? *v : fallback;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        auto v = get(section, key);
        if (!v) return fallback;
        try {
            return std::stod(*v);
        } catch (const std::exception&) {
            throw ConfigError(path_ + ": key '" + key + "' is not a number: '" + *v + "'");
        }
    }

    long long get_int(const std::string& section, const std::string& key, long long fallback) const {
        auto v = get(section, key);
        if (!v) return fallback;
        try {
            return std::stoll(*v);
        } catch (const std::exception&) {
            throw ConfigError(path_ + ": key '" + key + "' is not an integer: '" + *v + "'");
        }
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

struct Probe {
    enum class Kind { Point, AreaMean, AreaMax, FullMap };
    Kind kind = Kind::Point;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct NamedProbe {
    std::string name;
    Probe probe;
};

struct InitSpec {
    enum class Kind { Dry, Depth, Level, DepthRaster };
    Kind kind = Kind::Dry;
    double value = 0.0;
    std::string path;  // DepthRaster only
};

struct ScenarioSpec {
    std::map<std::string, std::string> dem_paths;  // structure label -> path
    std::string default_dem;                       // used by `simulate` and as S-fallback
    std::string error_param, structure_param, resolution_param, manning_param;
    double error_sigma = 0.0;
    InitSpec init;
    swe::SolverConfig solver;
    swe::FrictionLaw friction_law = swe::FrictionLaw::None;
    double friction_coef = 0.0;
    std::string friction_map;
    double t_end = 0.0;
    std::optional<swe::Hydrograph> inflow;
    double analysis_resolution = 0.0;  // 0 = derive from the resolution parameter
};

struct StudyConfig {
    std::vector<gsa::InputParameter> parameters;
    ScenarioSpec scenario;
    std::vector<NamedProbe> probes;
    int n = 0;
    std::uint64_t seed = 0;
    int max_workers = 30;
    int retry = 1;
    std::string base_dir;

    std::string resolve_path(const std::string& p) const {
        namespace fs = std::filesystem;
        if (p.empty() || fs::path(p).is_absolute() || base_dir.empty()) return p;
        return (fs::path(base_dir) / p).string();
    }

    int param_index(const std::string& name) const {
        for (std::size_t i = 0; i < parameters.size(); ++i)
            if (parameters[i].name == name) return static_cast<int>(i);
        return -1;
    }

    /// Coarsest resolution in the Var R set, or the explicit override.
    double analysis_resolution() const {
        if (scenario.analysis_resolution > 0.0) return scenario.analysis_resolution;
        if (!scenario.resolution_param.empty()) {
            const int idx = param_index(scenario.resolution_param);
            if (idx >= 0) {
                if (const auto* d = std::get_if<gsa::DiscreteUniform>(&parameters[idx].dist)) {
                    double coarsest = 0.0;
                    for (double v : d->values) coarsest = std::max(coarsest, v);
                    return coarsest;
                }
            }
        }
        return 0.0;  // native resolution
    }
};

namespace detail {

inline swe::BoundarySpec parse_boundary(const std::string& text, const std::string& key) {
    const auto toks = split_ws(text);
    if (toks.empty()) throw ConfigError("key '" + key + "': empty boundary spec");
    swe::BoundarySpec bc;
    if (toks[0] == "wall") {
        bc.kind = swe::BoundaryKind::Wall;
    } else if (toks[0] == "outflow") {
        bc.kind = swe::BoundaryKind::FreeOutflow;
    } else if (toks[0] == "discharge") {
        bc.kind = swe::BoundaryKind::ImposedDischarge;
        if (toks.size() != 2) throw ConfigError("key '" + key + "': discharge needs a value");
        bc.value = std::stod(toks[1]);
    } else if (toks[0] == "depth") {
        bc.kind = swe::BoundaryKind::ImposedDepth;
        if (toks.size() != 2) throw ConfigError("key '" + key + "': depth needs a value");
        bc.value = std::stod(toks[1]);
    } else {
        throw ConfigError("key '" + key + "': unknown boundary type '" + toks[0] + "'");
    }
    return bc;
}

inline Probe parse_probe(const std::string& text, const std::string& key) {
    const auto toks = split_ws(text);
    if (toks.empty()) throw ConfigError("probe '" + key + "': empty spec");
    Probe p;
    auto num = [&](std::size_t i) {
        if (i >= toks.size()) throw ConfigError("probe '" + key + "': missing coordinate");
        return std::stod(toks[i]);
    };
    if (toks[0] == "point") {
        p.kind = Probe::Kind::Point;
        p.x0 = num(1);
        p.y0 = num(2);
    } else if (toks[0] == "area_mean" || toks[0] == "area_max") {
        p.kind = toks[0] == "area_mean" ? Probe::Kind::AreaMean : Probe::Kind::AreaMax;
        p.x0 = num(1);
        p.y0 = num(2);
        p.x1 = num(3);
        p.y1 = num(4);
        if (!(p.x0 <= p.x1 && p.y0 <= p.y1))
            throw ConfigError("probe '" + key + "': need x0<=x1 and y0<=y1");
    } else if (toks[0] == "full_map") {
        p.kind = Probe::Kind::FullMap;
    } else {
        throw ConfigError("probe '" + key + "': unknown kind '" + toks[0] + "'");
    }
    return p;
}

inline swe::Hydrograph parse_hydrograph(const std::string& text, const std::string& key) {
    swe::Hydrograph h;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("key '" + key + "': expected t:q pairs");
        const double t = std::stod(item.substr(0, colon));
        const double q = std::stod(item.substr(colon + 1));
        if (!h.points.empty() && t <= h.points.back().first)
            throw ConfigError("key '" + key + "': times must be strictly increasing");
        h.points.push_back({t, q});
    }
    if (h.points.empty()) throw ConfigError("key '" + key + "': empty hydrograph");
    return h;
}

}  // namespace detail

inline StudyConfig load_study_config(const std::string& path) {
    const IniFile ini = IniFile::parse(path);
    StudyConfig cfg;
    cfg.base_dir = std::filesystem::path(path).parent_path().string();

    for (const auto& [name, spec] : ini.section("parameters")) {
        try {
            cfg.parameters.push_back({name, gsa::parse_distribution(spec)});
        } catch (const gsa::InvalidDistribution& e) {
            throw ConfigError("parameter '" + name + "': " + e.what());
        }
    }

    ScenarioSpec& sc = cfg.scenario;
    sc.default_dem = ini.get_string("scenario", "dem", "");
    for (const char* label : {"s1", "s2", "s3", "s4"}) {
        const std::string key = std::string("dem_") + label;
        const std::string val = ini.get_string("scenario", key, "");
        if (!val.empty()) {
            std::string upper = label;
            upper[0] = 'S';
            sc.dem_paths[upper] = val;
        }
    }
    if (sc.default_dem.empty() && sc.dem_paths.count("S1")) sc.default_dem = sc.dem_paths.at("S1");

    sc.error_param = ini.get_string("scenario", "error_param", "");
    sc.structure_param = ini.get_string("scenario", "structure_param", "");
    sc.resolution_param = ini.get_string("scenario", "resolution_param", "");
    sc.manning_param = ini.get_string("scenario", "manning_param", "");
    sc.error_sigma = ini.get_double("scenario", "error_sigma", 0.0);
    sc.analysis_resolution = ini.get_double("scenario", "analysis_resolution", 0.0);

    {
        const std::string init = ini.get_string("scenario", "init", "dry");
        const auto toks = detail::split_ws(init);
        if (toks[0] == "dry") sc.init = {InitSpec::Kind::Dry, 0.0, ""};
        else if (toks[0] == "depth" && toks.size() == 2)
            sc.init = {InitSpec::Kind::Depth, std::stod(toks[1]), ""};
        else if (toks[0] == "level" && toks.size() == 2)
            sc.init = {InitSpec::Kind::Level, std::stod(toks[1]), ""};
        else if (toks[0] == "depth_raster" && toks.size() == 2)
            sc.init = {InitSpec::Kind::DepthRaster, 0.0, toks[1]};
        else
            throw ConfigError(
                "key 'init': expected dry | depth <v> | level <v> | depth_raster <path>");
    }

    swe::SolverConfig& solver = sc.solver;
    {
        const std::string flux = ini.get_string("scenario", "flux", "hll");
        if (flux == "hll") solver.flux = swe::FluxScheme::Hll;
        else if (flux == "rusanov") solver.flux = swe::FluxScheme::Rusanov;
        else throw ConfigError("key 'flux': expected hll or rusanov");
    }
    solver.order = static_cast<int>(ini.get_int("scenario", "order", 2));
    solver.cfl = ini.get_double("scenario", "cfl", 0.0);
    solver.g = ini.get_double("scenario", "g", 9.81);
    solver.h_dry = ini.get_double("scenario", "h_dry", 1e-10);
    solver.dt_max = ini.get_double("scenario", "dt_max", 1.0);
    solver.step_cap = ini.get_int("scenario", "step_cap", 100000000);
    solver.mass_interval = ini.get_double("scenario", "mass_interval", 0.0);
    try {
        solver.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("solver configuration: ") + e.what());
    }

    const char* side_keys[4] = {"boundary_north", "boundary_east", "boundary_south",
                                "boundary_west"};
    for (int s = 0; s < 4; ++s) {
        const std::string val = ini.get_string("scenario", side_keys[s], "wall");
        solver.boundary[s] = detail::parse_boundary(val, side_keys[s]);
    }

    {
        const std::string law = ini.get_string("scenario", "friction_law", "none");
        if (law == "none") sc.friction_law = swe::FrictionLaw::None;
        else if (law == "manning") sc.friction_law = swe::FrictionLaw::Manning;
        else if (law == "strickler") sc.friction_law = swe::FrictionLaw::Strickler;
        else if (law == "chezy") sc.friction_law = swe::FrictionLaw::Chezy;
        else throw ConfigError("key 'friction_law': expected none|manning|strickler|chezy");
        sc.friction_coef = ini.get_double("scenario", "friction_coef", 0.0);
        sc.friction_map = ini.get_string("scenario", "friction_map", "");
        if (sc.friction_law != swe::FrictionLaw::None && sc.friction_map.empty() &&
            !(sc.friction_coef > 0.0))
            throw ConfigError("key 'friction_coef': must be positive when friction_law is set");
    }

    sc.t_end = ini.get_double("scenario", "t_end", 0.0);
    if (sc.t_end < 0.0) throw ConfigError("key 't_end': must be >= 0");
    {
        const std::string inflow = ini.get_string("scenario", "inflow", "");
        if (!inflow.empty()) sc.inflow = detail::parse_hydrograph(inflow, "inflow");
    }

    for (const auto& [name, spec] : ini.section("probes"))
        cfg.probes.push_back({name, detail::parse_probe(spec, name)});

    cfg.n = static_cast<int>(ini.get_int("campaign", "n", 0));
    cfg.seed = static_cast<std::uint64_t>(ini.get_int("campaign", "seed", 0));
    cfg.max_workers = static_cast<int>(ini.get_int("campaign", "max_workers", 30));
    cfg.retry = static_cast<int>(ini.get_int("campaign", "retry", 1));
    if (cfg.max_workers < 1) throw ConfigError("key 'max_workers': must be >= 1");

    // Role parameters must reference declared parameters.
    for (const auto& [role, value] :
         {std::pair<std::string, std::string>{"error_param", sc.error_param},
          {"structure_param", sc.structure_param},
          {"resolution_param", sc.resolution_param},
          {"manning_param", sc.manning_param}}) {
        if (!value.empty() && cfg.param_index(value) < 0)
            throw ConfigError("key '" + role + "': unknown parameter '" + value + "'");
    }
    return cfg;
}

}  // namespace swegsa::campaign
