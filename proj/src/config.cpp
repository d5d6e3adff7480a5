#include "orra/config.hpp"

#include "orra/error.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace orra::harness {

using nlohmann::json;

double ScenarioSpec::disturbance(double t, std::uint64_t seed) const {
    switch (kind) {
        case ScenarioKind::None:
            return 0.0;
        case ScenarioKind::Step:
            return grid::scenario_step_load(t, start_s, magnitude_mw);
        case ScenarioKind::Fluctuation: {
            if (t < start_s) return 0.0;
            if (!antithetic) return grid::scenario_fluctuation(t - start_s, seed, amplitude_mw, hold_s);
            const double period = std::floor((t - start_s) / hold_s);
            const double odd = std::fmod(period, 2.0);
            const double draw = grid::scenario_fluctuation((period - odd) * hold_s, seed,
                                                           amplitude_mw, hold_s);
            return odd == 0.0 ? draw : -draw;
        }
    }
    return 0.0;
}

std::size_t ScenarioConfig::steps() const {
    return static_cast<std::size_t>(std::llround(duration_s / tau_s));
}

void ScenarioConfig::validate() const {
    if (!(tau_s > 0.0)) throw ParameterError("control interval must be positive");
    if (!(duration_s >= 0.0)) throw ParameterError("duration must be nonnegative");
    if (substeps < 1) throw ParameterError("substeps must be at least 1");
    if (fleet.empty()) throw EmptyInputError("fleet has no batteries");
    const auto n_cg = grid.areas[0].generators.size();
    std::set<std::size_t> generator_buses;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        const auto& b = fleet[i];
        b.params.validate();
        const std::string who = "battery " + std::to_string(i);
        if (b.initial_soc < b.params.soc_min || b.initial_soc > b.params.soc_max) {
            throw ParameterError(who + ": initial SoC outside its band");
        }
        if (b.bus.index >= n_cg) throw ParameterError(who + ": generator index out of range");
        if (b.bus.generator) {
            if (!generator_buses.insert(b.bus.index).second) {
                throw ParameterError(who + ": generator bus already hosts a battery");
            }
        } else if (b.bus.hops < 1) {
            throw ParameterError(who + ": non-generator bus needs at least one hop");
        }
    }
    if (topology.n != fleet.size()) {
        throw TopologyError("topology has " + std::to_string(topology.n) + " agents for " +
                            std::to_string(fleet.size()) + " batteries");
    }
    comm::build_metropolis_weights(topology);
    aging.validate();
    grid.validate();
    aie.rbf.validate();
    optimizer.validate();
    if (!(aie.d_prime_fraction >= 0.0)) throw ParameterError("D' fraction must be nonnegative");
    if (std::abs(aie.mode_sign) != 1.0 || std::abs(aie.frr_measurement_sign) != 1.0) {
        throw ParameterError("sign constants must be +1 or -1");
    }
    if (scenario.kind == ScenarioKind::Fluctuation && !(scenario.hold_s > 0.0)) {
        throw ParameterError("fluctuation hold time must be positive");
    }
}

namespace {

/// Reads optional keys of one JSON object and rejects keys nobody asked for.
class Obj {
public:
    Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(where_ + ": " + msg); }

    const json* find(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void num(const char* key, double& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number()) fail(std::string(key) + " must be a number");
            out = v->get<double>();
        }
    }

    template <class Int>
    void integer(const char* key, Int& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number_integer()) fail(std::string(key) + " must be an integer");
            if (v->is_number_unsigned()) {
                out = static_cast<Int>(v->get<std::uint64_t>());
            } else {
                const auto x = v->get<std::int64_t>();
                if (std::is_unsigned_v<Int> && x < 0) fail(std::string(key) + " must be >= 0");
                out = static_cast<Int>(x);
            }
        }
    }

    void boolean(const char* key, bool& out) {
        if (const auto* v = find(key)) {
            if (!v->is_boolean()) fail(std::string(key) + " must be true or false");
            out = v->get<bool>();
        }
    }

    void str(const char* key, std::string& out) {
        if (const auto* v = find(key)) {
            if (!v->is_string()) fail(std::string(key) + " must be a string");
            out = v->get<std::string>();
        }
    }

    std::string sub(const char* key) const { return where_ + "." + key; }

    void done() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) fail("unknown key '" + it.key() + "'");
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

const json& array_at(const json* v, const std::string& where) {
    if (!v->is_array()) throw ConfigError(where + ": expected an array");
    return *v;
}

bess::BessParams parse_bess(Obj& o, bess::BessParams p) {
    o.num("capacity_mwh", p.capacity_mwh);
    o.num("charge_limit_mw", p.charge_limit_mw);
    o.num("discharge_limit_mw", p.discharge_limit_mw);
    o.num("eta_c", p.eta_c);
    o.num("eta_d", p.eta_d);
    o.num("soc_min", p.soc_min);
    o.num("soc_max", p.soc_max);
    o.num("theta_a", p.theta_a);
    o.num("theta_b", p.theta_b);
    return p;
}

BatteryConfig parse_battery(const json& j, const std::string& where) {
    Obj o(j, where);
    BatteryConfig b;
    b.params = parse_bess(o, b.params);
    o.num("initial_soc", b.initial_soc);
    if (const auto* bus = o.find("bus")) {
        Obj ob(*bus, o.sub("bus"));
        const auto* gen = ob.find("generator");
        const auto* fol = ob.find("follows");
        if ((gen == nullptr) == (fol == nullptr)) {
            ob.fail("give exactly one of 'generator' or 'follows'");
        }
        if (gen != nullptr) {
            b.bus.generator = true;
            ob.integer("generator", b.bus.index);
            b.bus.hops = 0;
        } else {
            b.bus.generator = false;
            ob.integer("follows", b.bus.index);
            b.bus.hops = 1;
            ob.integer("hops", b.bus.hops);
        }
        ob.done();
    }
    o.done();
    return b;
}

grid::AreaParams parse_area(const json& j, const std::string& where) {
    Obj o(j, where);
    grid::AreaParams a;
    o.num("two_h", a.two_h);
    o.num("damping", a.damping);
    o.num("load_mw", a.load_mw);
    o.num("agc_gain", a.agc_gain);
    if (const auto* gens = o.find("generators")) {
        a.generators.clear();
        const auto& arr = array_at(gens, o.sub("generators"));
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Obj og(arr[i], o.sub("generators") + "[" + std::to_string(i) + "]");
            grid::GeneratorParams g;
            og.num("droop_inv", g.droop_inv);
            og.num("t_gov", g.t_gov);
            og.num("t_turb", g.t_turb);
            og.num("ramp", g.ramp);
            og.num("saturation", g.saturation);
            og.done();
            a.generators.push_back(g);
        }
        a.sigma.assign(a.generators.size(), 1.0 / static_cast<double>(a.generators.size()));
    }
    if (const auto* sig = o.find("sigma")) {
        const auto& arr = array_at(sig, o.sub("sigma"));
        a.sigma.clear();
        for (const auto& v : arr) {
            if (!v.is_number()) o.fail("sigma entries must be numbers");
            a.sigma.push_back(v.get<double>());
        }
    }
    if (const auto* frr = o.find("frr")) {
        Obj of(*frr, o.sub("frr"));
        of.num("deadband_hz", a.frr.deadband);
        of.num("slope_mw_per_hz", a.frr.slope);
        of.boolean("enabled", a.frr.enabled);
        of.done();
    }
    o.done();
    return a;
}

ScenarioKind parse_kind(const std::string& s, const Obj& o) {
    if (s == "none") return ScenarioKind::None;
    if (s == "step") return ScenarioKind::Step;
    if (s == "fluctuation") return ScenarioKind::Fluctuation;
    o.fail("scenario kind must be none, step or fluctuation");
}

std::string kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::None:
            return "none";
        case ScenarioKind::Step:
            return "step";
        case ScenarioKind::Fluctuation:
            return "fluctuation";
    }
    return "none";
}

}  // namespace

ScenarioConfig parse_config(const json& j) {
    Obj o(j, "config");
    ScenarioConfig c;
    o.str("name", c.name);
    o.integer("seed", c.seed);
    o.num("duration_s", c.duration_s);
    o.num("control_interval_s", c.tau_s);
    o.integer("substeps", c.substeps);
    std::string signal = "AIE";
    o.str("signal", signal);
    if (signal == "AIE") {
        c.signal = Signal::Aie;
    } else if (signal == "ACE") {
        c.signal = Signal::Ace;
    } else {
        o.fail("signal must be AIE or ACE");
    }
    o.boolean("bess_enabled", c.bess_enabled);
    o.boolean("log_oracle", c.log_oracle);

    if (const auto* sc = o.find("scenario")) {
        Obj os(*sc, "config.scenario");
        std::string kind = "step";
        os.str("kind", kind);
        c.scenario.kind = parse_kind(kind, os);
        os.num("start_s", c.scenario.start_s);
        os.num("magnitude_mw", c.scenario.magnitude_mw);
        os.num("amplitude_mw", c.scenario.amplitude_mw);
        os.num("hold_s", c.scenario.hold_s);
        os.boolean("antithetic", c.scenario.antithetic);
        os.done();
    }

    bool topology_given = false;
    if (const auto* fl = o.find("fleet")) {
        const auto& arr = array_at(fl, "config.fleet");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            c.fleet.push_back(parse_battery(arr[i], "config.fleet[" + std::to_string(i) + "]"));
        }
    }
    if (const auto* ag = o.find("aging")) {
        Obj oa(*ag, "config.aging");
        oa.num("a", c.aging.a);
        oa.num("b", c.aging.b);
        oa.done();
    }
    if (const auto* tp = o.find("topology")) {
        Obj ot(*tp, "config.topology");
        c.topology.n = c.fleet.size();
        if (const auto* edges = ot.find("edges")) {
            for (const auto& e : array_at(edges, "config.topology.edges")) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
                    !e[1].is_number_unsigned()) {
                    ot.fail("each edge must be a pair of nonnegative integers");
                }
                c.topology.edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
            }
        }
        ot.done();
        topology_given = true;
    }
    if (!topology_given) c.topology = comm::ring_with_chord(c.fleet.size());

    if (const auto* gr = o.find("grid")) {
        Obj og(*gr, "config.grid");
        og.num("tie_sync", c.grid.tie_sync);
        if (const auto* areas = og.find("areas")) {
            const auto& arr = array_at(areas, "config.grid.areas");
            if (arr.size() != 2) og.fail("exactly two areas are required");
            for (std::size_t a = 0; a < 2; ++a) {
                c.grid.areas[a] = parse_area(arr[a], "config.grid.areas[" + std::to_string(a) + "]");
            }
        }
        og.done();
    }
    if (const auto* ai = o.find("aie")) {
        Obj oa(*ai, "config.aie");
        oa.num("d_prime_fraction", c.aie.d_prime_fraction);
        oa.boolean("surrogate", c.aie.surrogate);
        oa.num("xi", c.aie.rbf.xi);
        oa.num("d_min_hz", c.aie.rbf.d_min);
        oa.integer("max_samples", c.aie.rbf.max_samples);
        oa.num("max_condition", c.aie.rbf.max_condition);
        oa.num("mode_sign", c.aie.mode_sign);
        oa.num("frr_measurement_sign", c.aie.frr_measurement_sign);
        oa.done();
    }
    if (const auto* op = o.find("optimizer")) {
        Obj oo(*op, "config.optimizer");
        oo.num("alpha", c.optimizer.alpha);
        oo.num("beta", c.optimizer.beta);
        oo.num("gamma", c.optimizer.gamma);
        oo.num("kappa0", c.optimizer.kappa0);
        oo.num("eps0", c.optimizer.eps0);
        oo.integer("t_max", c.optimizer.t_max);
        oo.num("f_threshold_hz", c.optimizer.f_threshold);
        oo.done();
    }
    o.done();
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

namespace {

json area_json(const grid::AreaParams& a) {
    json gens = json::array();
    for (const auto& g : a.generators) {
        gens.push_back({{"droop_inv", g.droop_inv},
                        {"t_gov", g.t_gov},
                        {"t_turb", g.t_turb},
                        {"ramp", g.ramp},
                        {"saturation", g.saturation}});
    }
    return {{"two_h", a.two_h},
            {"damping", a.damping},
            {"load_mw", a.load_mw},
            {"agc_gain", a.agc_gain},
            {"generators", gens},
            {"sigma", a.sigma},
            {"frr",
             {{"deadband_hz", a.frr.deadband},
              {"slope_mw_per_hz", a.frr.slope},
              {"enabled", a.frr.enabled}}}};
}

}  // namespace

json to_json(const ScenarioConfig& c) {
    json fleet = json::array();
    for (const auto& b : c.fleet) {
        json bus = b.bus.generator ? json{{"generator", b.bus.index}}
                                   : json{{"follows", b.bus.index}, {"hops", b.bus.hops}};
        fleet.push_back({{"capacity_mwh", b.params.capacity_mwh},
                         {"charge_limit_mw", b.params.charge_limit_mw},
                         {"discharge_limit_mw", b.params.discharge_limit_mw},
                         {"eta_c", b.params.eta_c},
                         {"eta_d", b.params.eta_d},
                         {"soc_min", b.params.soc_min},
                         {"soc_max", b.params.soc_max},
                         {"theta_a", b.params.theta_a},
                         {"theta_b", b.params.theta_b},
                         {"initial_soc", b.initial_soc},
                         {"bus", bus}});
    }
    json edges = json::array();
    for (const auto& [a, b] : c.topology.edges) edges.push_back({a, b});
    return {{"name", c.name},
            {"seed", c.seed},
            {"duration_s", c.duration_s},
            {"control_interval_s", c.tau_s},
            {"substeps", c.substeps},
            {"signal", c.signal == Signal::Aie ? "AIE" : "ACE"},
            {"bess_enabled", c.bess_enabled},
            {"log_oracle", c.log_oracle},
            {"scenario",
             {{"kind", kind_name(c.scenario.kind)},
              {"start_s", c.scenario.start_s},
              {"magnitude_mw", c.scenario.magnitude_mw},
              {"amplitude_mw", c.scenario.amplitude_mw},
              {"hold_s", c.scenario.hold_s},
              {"antithetic", c.scenario.antithetic}}},
            {"fleet", fleet},
            {"aging", {{"a", c.aging.a}, {"b", c.aging.b}}},
            {"topology", {{"edges", edges}}},
            {"grid",
             {{"tie_sync", c.grid.tie_sync},
              {"areas", {area_json(c.grid.areas[0]), area_json(c.grid.areas[1])}}}},
            {"aie",
             {{"d_prime_fraction", c.aie.d_prime_fraction},
              {"surrogate", c.aie.surrogate},
              {"xi", c.aie.rbf.xi},
              {"d_min_hz", c.aie.rbf.d_min},
              {"max_samples", c.aie.rbf.max_samples},
              {"max_condition", c.aie.rbf.max_condition},
              {"mode_sign", c.aie.mode_sign},
              {"frr_measurement_sign", c.aie.frr_measurement_sign}}},
            {"optimizer",
             {{"alpha", c.optimizer.alpha},
              {"beta", c.optimizer.beta},
              {"gamma", c.optimizer.gamma},
              {"kappa0", c.optimizer.kappa0},
              {"eps0", c.optimizer.eps0},
              {"t_max", c.optimizer.t_max},
              {"f_threshold_hz", c.optimizer.f_threshold}}}};
}

void save_config(const ScenarioConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file " + path.string());
    out << to_json(config).dump(2) << '\n';
}

namespace {

std::vector<BatteryConfig> default_fleet() {
    const double theta_b[] = {0.08, 0.10, 0.12, 0.09, 0.11};
    const double soc0[] = {0.45, 0.55, 0.50, 0.60, 0.40};
    const BusPlacement buses[] = {{true, 0, 0}, {true, 1, 0}, {true, 2, 0}, {false, 0, 1},
                                  {false, 2, 2}};
    std::vector<BatteryConfig> fleet;
    for (int i = 0; i < 5; ++i) {
        BatteryConfig b;
        b.params.theta_b = theta_b[i];
        b.initial_soc = soc0[i];
        b.bus = buses[i];
        fleet.push_back(b);
    }
    return fleet;
}

}  // namespace

ScenarioConfig case_study_1() {
    ScenarioConfig c;
    c.name = "case_study_1";
    c.seed = 1;
    c.duration_s = 300.0;
    c.scenario.kind = ScenarioKind::Step;
    c.scenario.start_s = 10.0;
    c.scenario.magnitude_mw = 5.0;
    c.fleet = default_fleet();
    c.topology = comm::ring_with_chord(c.fleet.size());
    return c;
}

ScenarioConfig case_study_2() {
    ScenarioConfig c = case_study_1();
    c.name = "case_study_2";
    c.seed = 20240;
    c.duration_s = 1800.0;
    c.log_oracle = false;
    c.scenario.kind = ScenarioKind::Fluctuation;
    c.scenario.start_s = 0.0;
    c.scenario.amplitude_mw = 6.0;
    c.scenario.hold_s = 60.0;
    c.scenario.antithetic = true;
    return c;
}

}  // namespace orra::harness
