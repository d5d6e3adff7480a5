#include "orra/harness.hpp"

#include "orra/aie_signal.hpp"
#include "orra/analysis.hpp"
#include "orra/error.hpp"
#include "orra/grid_sim.hpp"
#include "orra/orra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <optional>

namespace orra::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> trace_columns(std::size_t agents, std::size_t cgs) {
    std::vector<std::string> c = {
        "k",          "time_s",     "stage",        "stage_t",   "reset",      "kappa",
        "eps",        "disturbance_mw", "df1_hz",   "df2_hz",    "ptie_mw",    "pm1_mw",
        "pm2_mw",     "agc1_mw",    "agc2_mw",      "pbess_mw",  "ace1_mw",    "ace2_mw",
        "aie1_mw",    "aie1_corrected_mw", "signal1_mw", "surrogate_m", "target_mw", "cost",
        "oracle_cost", "nu",        "oracle_clamped"};
    for (std::size_t g = 0; g < cgs; ++g) c.push_back("pm_cg_" + std::to_string(g));
    const char* per_agent[] = {"d",     "c",       "soc",   "mode",  "hi",    "aie",
                               "lambda", "y",      "lambda_mixed", "y_mixed", "h", "s_d",
                               "s_c",   "dstar",   "cstar", "mc",    "mu",    "loss"};
    for (std::size_t i = 0; i < agents; ++i) {
        for (const char* name : per_agent) c.push_back(std::string(name) + "_" + std::to_string(i));
    }
    return c;
}

struct Battery {
    bess::BessParams params;
    double soc = 0.5;
    bess::Mode mode = bess::Mode::Discharge;
    degradation::ResidueStack residues;
    BusPlacement bus;
};

}  // namespace

RunResult simulate(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto n = cfg.fleet.size();
    const auto& area1 = cfg.grid.areas[0];
    const auto& area2 = cfg.grid.areas[1];
    const auto n_cg = area1.generators.size();
    const double tau = cfg.tau_s;
    const double dt = tau / cfg.substeps;
    const auto steps = cfg.steps();
    const double d_prime = cfg.aie.d_prime_fraction * area1.load_mw;
    const bess::ModeConvention convention{cfg.aie.mode_sign};
    const auto w = comm::build_metropolis_weights(cfg.topology);

    std::vector<Battery> fleet(n);
    double b_u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fleet[i].params = cfg.fleet[i].params;
        fleet[i].soc = cfg.fleet[i].initial_soc;
        fleet[i].bus = cfg.fleet[i].bus;
        fleet[i].residues = {{0, fleet[i].soc}};
        b_u = std::max({b_u, fleet[i].params.charge_limit_mw, fleet[i].params.discharge_limit_mw});
    }

    std::vector<aie::RbfSurrogate> surrogates(n_cg, aie::RbfSurrogate(cfg.aie.rbf));
    std::vector<bess::Mode> cg_mode(n_cg, bess::Mode::Discharge);
    std::deque<std::vector<bess::Mode>> cg_mode_history;  // front = most recent
    std::size_t max_hops = 0;
    for (const auto& b : cfg.fleet) max_hops = std::max(max_hops, b.bus.hops);

    grid::GridState gs = grid::GridState::zero(cfg.grid);
    grid::AgcController agc1, agc2;
    auto schedule = cfg.optimizer;
    schedule.t = 0;

    std::vector<opt::AgentState> agents;

    RunResult result;
    Trace trace(trace_columns(n, n_cg));
    trace.meta["name"] = cfg.name;
    trace.meta["agents"] = std::to_string(n);
    trace.meta["cgs"] = std::to_string(n_cg);
    trace.meta["gamma"] = format_number(cfg.optimizer.gamma);
    trace.meta["b_u"] = format_number(b_u);
    trace.meta["tau_s"] = format_number(tau);
    trace.meta["event_s"] = format_number(
        cfg.scenario.kind == ScenarioKind::None ? 0.0 : cfg.scenario.start_s);
    trace.meta["signal"] = cfg.signal == Signal::Aie ? "AIE" : "ACE";
    trace.meta["bess"] = cfg.bess_enabled ? "1" : "0";
    trace.meta["oracle"] = cfg.log_oracle && cfg.bess_enabled ? "1" : "0";
    {
        std::vector<double> lo, hi;
        for (const auto& b : fleet) {
            lo.push_back(b.params.soc_min);
            hi.push_back(b.params.soc_max);
        }
        trace.meta["soc_min"] = format_list(lo);
        trace.meta["soc_max"] = format_list(hi);
    }

    long stage = 0;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * tau;
        const auto& a1 = gs.areas[0];
        const auto& a2 = gs.areas[1];
        const double df1 = a1.df;
        const double df2 = a2.df;

        // Injection error per generator bus.
        aie::AieInputs in;
        in.dptie = gs.ptie;
        in.df = df1;
        in.d_prime = d_prime;
        for (std::size_t g = 0; g < n_cg; ++g) {
            in.sigma.push_back(area1.sigma[g]);
            in.du_gov.push_back(agc1.setpoint * area1.sigma[g]);
            in.dpm.push_back(a1.generators[g].pm);
            in.generator.push_back(true);
        }
        const double ace1 = aie::compute_ace(gs.ptie, area1.bias(), df1);
        const double ace2 = aie::compute_ace(-gs.ptie, area2.bias(), df2);
        std::vector<double> bus_signal(n_cg);
        double aie_raw = 0.0;
        double aie_corr = 0.0;
        std::size_t surrogate_m = 0;
        for (std::size_t g = 0; g < n_cg; ++g) {
            const double raw = aie::compute_aie_bus(in, g);
            double corrected = raw;
            if (cfg.signal == Signal::Aie && cfg.aie.surrogate) {
                auto& s = surrogates[g];
                if (s.infill_decide(df1)) {
                    const double measured = cfg.aie.frr_measurement_sign * area1.sigma[g] *
                                            grid::frr_response(df1, area1.frr);
                    s.add_sample(df1, measured);
                }
                corrected = aie::corrected_aie(raw, s, df1);
                surrogate_m = std::max(surrogate_m, s.size());
            }
            aie_raw += raw;
            aie_corr += corrected;
            bus_signal[g] = cfg.signal == Signal::Aie ? corrected : area1.sigma[g] * ace1;
        }
        double signal1 = 0.0;
        for (double s : bus_signal) signal1 += s;

        // Modes: generator buses follow their own signal, the others copy a
        // delayed generator-bus mode.
        for (std::size_t g = 0; g < n_cg; ++g) {
            cg_mode[g] = bess::mode_select(bus_signal[g], std::nullopt, true, cg_mode[g], convention);
        }
        cg_mode_history.push_front(cg_mode);
        while (cg_mode_history.size() > max_hops + 1) cg_mode_history.pop_back();

        std::vector<double> agent_aie(n, 0.0);
        std::vector<opt::AgentProblem> problems;
        std::vector<oracle::OracleAgent> oracle_agents;
        problems.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& b = fleet[i];
            if (b.bus.generator) {
                agent_aie[i] = bus_signal[b.bus.index];
                b.mode = cg_mode[b.bus.index];
            } else if (b.bus.hops < cg_mode_history.size()) {
                b.mode = cg_mode_history[b.bus.hops][b.bus.index];
            }
            const auto interval = bess::feasible_interval(b.soc, b.mode, b.params, tau);
            degradation::CostModel cost(b.params, cfg.aging,
                                        degradation::OpenHalfCycle::from(b.residues), tau);
            problems.push_back({cost, interval, b.mode, agent_aie[i]});
            oracle_agents.push_back({cost, interval, b.mode});
        }

        if (agents.empty()) agents = opt::initialize_agents(std::vector<bess::Decision>(n), agent_aie);
        const auto before = agents;

        // Per-step comparator.
        double target = 0.0;
        for (double a : agent_aie) target -= a;
        double cost_now = 0.0;
        for (std::size_t i = 0; i < n; ++i) cost_now += problems[i].cost(before[i].u.d, before[i].u.c);
        std::vector<bess::Decision> u_star(n, bess::Decision{kNaN, kNaN});
        double oracle_cost = kNaN;
        double nu = kNaN;
        double clamped = 0.0;
        if (cfg.bess_enabled && cfg.log_oracle) {
            oracle::CentralizedSolution sol;
            try {
                sol = oracle::centralized_solve(oracle_agents, target);
            } catch (const InfeasibleError& e) {
                sol = oracle::centralized_solve(
                    oracle_agents, std::clamp(target, e.achievable_lo(), e.achievable_hi()));
                clamped = 1.0;
                if (result.oracle_clamped++ == 0) result.first_clamp_time = t;
            }
            u_star = sol.u_star;
            nu = sol.nu;
            oracle_cost = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                oracle_cost += problems[i].cost(u_star[i].d, u_star[i].c);
            }
        }

        opt::ScheduleStep rates{kNaN, kNaN, 0, false};
        const long row_stage = stage;
        if (cfg.bess_enabled) {
            rates = opt::orra_iteration(agents, w, problems, schedule, df1);
            if (rates.reset) ++stage;
        }

        std::vector<double> soc_start(n), mu(n, 0.0), loss(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) soc_start[i] = fleet[i].soc;
        if (k < steps) {
            for (std::size_t i = 0; i < n; ++i) {
                auto& b = fleet[i];
                const auto& u = agents[i].u;
                b.soc = bess::soc_step(b.soc, u.c, u.d, b.params, tau);
                const auto step = degradation::rainflow_step(b.soc, static_cast<long>(k + 1), b.residues);
                mu[i] = step.mu;
                loss[i] = degradation::step_damage(b.residues, step, cfg.aging);
                b.residues = step.residues;
            }
        }

        double pbess_applied = 0.0;
        for (const auto& a : before) pbess_applied += a.u.d - a.u.c;

        std::vector<double> row;
        row.reserve(trace.cols());
        row.insert(row.end(), {static_cast<double>(k), t, static_cast<double>(row_stage),
                               static_cast<double>(rates.t), rates.reset ? 1.0 : 0.0, rates.kappa,
                               rates.eps, a1.disturbance, df1, df2, gs.ptie, a1.pm_sum(),
                               a2.pm_sum(), agc1.setpoint, agc2.setpoint, pbess_applied, ace1, ace2,
                               aie_raw, aie_corr, signal1, static_cast<double>(surrogate_m), target,
                               cost_now, oracle_cost, nu, clamped});
        for (std::size_t g = 0; g < n_cg; ++g) row.push_back(a1.generators[g].pm);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& b = fleet[i];
            const auto& pre = before[i];
            const auto& post = agents[i];
            const double q = pre.u.d - pre.u.c;
            const bool active = cfg.bess_enabled;
            row.insert(row.end(),
                       {pre.u.d, pre.u.c, soc_start[i],
                        static_cast<double>(bess::to_int(b.mode)), problems[i].interval.hi,
                        agent_aie[i], pre.lambda, pre.y, active ? post.lambda_mixed : kNaN,
                        active ? post.y_mixed : kNaN, pre.h_prev, active ? post.s[0] : kNaN,
                        active ? post.s[1] : kNaN, u_star[i].d, u_star[i].c,
                        problems[i].cost.derivative_q(q), mu[i], loss[i]});
        }
        trace.add_row(std::move(row));

        if (k == steps) break;

        // AGC and plant over the next interval.
        agc1.step(cfg.signal == Signal::Aie ? signal1 : ace1, area1.agc_gain,
                  area1.aggregate_ramp(), tau);
        agc2.step(ace2, area2.agc_gain, area2.aggregate_ramp(), tau);
        double pbess = 0.0;
        for (const auto& a : agents) pbess += a.u.d - a.u.c;
        std::array<grid::AreaInputs, 2> inputs;
        inputs[0].bess_mw = pbess;
        for (std::size_t g = 0; g < n_cg; ++g) inputs[0].du_gov.push_back(agc1.setpoint * area1.sigma[g]);
        for (std::size_t g = 0; g < area2.generators.size(); ++g) {
            inputs[1].du_gov.push_back(agc2.setpoint * area2.sigma[g]);
        }
        for (int s = 0; s < cfg.substeps; ++s) {
            inputs[0].disturbance = cfg.scenario.disturbance(t + s * dt, cfg.seed);
            gs = grid::grid_step(gs, inputs, cfg.grid, dt);
        }
    }

    result.trace = std::move(trace);
    return result;
}

std::filesystem::path output_dir() {
    if (const char* env = std::getenv("ORRA_OUTPUT_DIR"); env && *env) return env;
    return "orra_out";
}

std::filesystem::path run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
    const auto result = simulate(config);
    const auto path = out_dir / (config.name + ".csv");
    result.trace.write_csv(path);
    return path;
}

nlohmann::json run_summary(const ScenarioConfig& config, const Trace& trace) {
    const double event = trace.meta_number("event_s");
    nlohmann::json j;
    j["name"] = config.name;
    j["signal"] = trace.meta_string("signal");
    j["bess"] = trace.meta_string("bess") == "1";
    j["nadir_hz"] = nadir(trace);
    const double settle = settling_time(trace, event);
    if (std::isnan(settle)) {
        j["settling_s"] = nullptr;
    } else {
        j["settling_s"] = settle;
    }
    j["df1_rms_hz"] = rms(trace.column("df1_hz"));
    j["ace1_rms_mw"] = rms(trace.column("ace1_mw"));
    j["signal1_rms_mw"] = rms(trace.column("signal1_mw"));
    const double w = withdrawal_time(trace);
    if (std::isnan(w)) {
        j["withdrawal_s"] = nullptr;
    } else {
        j["withdrawal_s"] = w;
    }
    return j;
}

const std::vector<AblationArm>& ablation_arms() {
    static const std::vector<AblationArm> arms = {
        {"aie_bess", Signal::Aie, true},
        {"ace_bess", Signal::Ace, true},
        {"aie", Signal::Aie, false},
        {"ace", Signal::Ace, false},
    };
    return arms;
}

nlohmann::json run_ablation(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                            std::vector<Trace>* traces) {
    nlohmann::json arms = nlohmann::json::array();
    for (const auto& arm : ablation_arms()) {
        auto cfg = config;
        cfg.name = config.name + "_" + arm.label;
        cfg.signal = arm.signal;
        cfg.bess_enabled = arm.bess;
        cfg.log_oracle = false;
        auto result = simulate(cfg);
        if (!out_dir.empty()) result.trace.write_csv(out_dir / (cfg.name + ".csv"));
        auto summary = run_summary(cfg, result.trace);
        summary["arm"] = arm.label;
        arms.push_back(summary);
        if (traces) traces->push_back(std::move(result.trace));
    }
    auto settle = [&](std::size_t i) {
        const auto& v = arms[i]["settling_s"];
        return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
    };
    nlohmann::json j;
    j["arms"] = arms;
    j["bess_reduces_nadir"] = arms[0]["nadir_hz"].get<double>() < arms[2]["nadir_hz"].get<double>() &&
                              arms[1]["nadir_hz"].get<double>() < arms[3]["nadir_hz"].get<double>();
    j["aie_settles_no_later"] = settle(0) <= settle(1);
    return j;
}

nlohmann::json run_regret_study(const ScenarioConfig& config, const std::vector<long>& horizons,
                                const Trace* precomputed) {
    if (horizons.empty()) throw ParameterError("no regret horizons given");
    std::optional<RunResult> run;
    if (!precomputed) {
        auto cfg = config;
        cfg.log_oracle = true;
        cfg.bess_enabled = true;
        run = simulate(cfg);
        precomputed = &run->trace;
    }
    const Trace& trace = *precomputed;
    auto rt = regret_trace(trace);
    const std::size_t start = row_at_time(trace, trace.meta_number("event_s"));
    if (start >= rt.records.size()) throw ParameterError("event lies beyond the simulated horizon");

    nlohmann::json stages = nlohmann::json::array();
    bool lemmas = true;
    for (const auto& [b, e] : rt.stages()) {
        const auto l1 = regret::lemma1_check(rt, b, e);
        const auto l2 = regret::lemma2_check(rt, b, e);
        lemmas = lemmas && l1.holds && l2.holds;
        stages.push_back({{"stage", rt.records[b].stage},
                          {"iterations", e - b},
                          {"lemma1_lhs", l1.lhs},
                          {"lemma1_rhs", l1.rhs},
                          {"lemma1", l1.holds},
                          {"lemma1_eps_form", l1.holds_eps},
                          {"lemma2_s", l2.s_t},
                          {"lemma2_bound", l2.bound},
                          {"lemma2", l2.holds}});
    }

    rt.records.erase(rt.records.begin(), rt.records.begin() + static_cast<std::ptrdiff_t>(start));
    std::vector<double> hs;
    std::vector<double> reg;
    for (long h : horizons) {
        if (h <= 0 || static_cast<std::size_t>(h) > rt.records.size()) {
            throw ParameterError("horizon " + std::to_string(h) + " outside 1.." +
                                 std::to_string(rt.records.size()));
        }
        hs.push_back(static_cast<double>(h));
        reg.push_back(regret::dynamic_regret(rt, static_cast<std::size_t>(h)));
    }
    nlohmann::json j;
    j["name"] = config.name;
    j["horizons"] = hs;
    j["regret"] = reg;
    std::vector<double> avg;
    for (std::size_t i = 0; i < hs.size(); ++i) avg.push_back(reg[i] / hs[i]);
    j["regret_per_iteration"] = avg;
    try {
        const auto fit = regret::regret_slope(hs, reg);
        j["slope"] = fit.slope;
        j["intercept"] = fit.intercept;
        j["excluded"] = fit.excluded;
        j["sublinear"] = fit.sublinear();
    } catch (const PreconditionError& e) {
        j["slope"] = nullptr;
        j["sublinear"] = false;
        j["fit_error"] = e.what();
    }
    j["stages"] = stages;
    j["lemmas_hold"] = lemmas;
    std::size_t clamped = 0;
    for (double v : trace.column("oracle_clamped")) clamped += v != 0.0;
    j["oracle_clamped_steps"] = clamped;
    return j;
}

}  // namespace orra::harness
