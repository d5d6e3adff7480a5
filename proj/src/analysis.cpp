#include "orra/analysis.hpp"

#include "orra/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orra::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t agent_count(const Trace& trace) {
    return static_cast<std::size_t>(trace.meta_number("agents"));
}

std::string col(const char* name, std::size_t i) { return std::string(name) + "_" + std::to_string(i); }

struct AgentColumns {
    std::size_t d, c, soc, mode, hi, lambda, y, lambda_mixed, y_mixed, h, s_d, s_c, dstar, cstar, mc;
};

std::vector<AgentColumns> agent_columns(const Trace& trace) {
    std::vector<AgentColumns> out;
    for (std::size_t i = 0; i < agent_count(trace); ++i) {
        out.push_back({trace.index(col("d", i)), trace.index(col("c", i)), trace.index(col("soc", i)),
                       trace.index(col("mode", i)), trace.index(col("hi", i)),
                       trace.index(col("lambda", i)), trace.index(col("y", i)),
                       trace.index(col("lambda_mixed", i)), trace.index(col("y_mixed", i)),
                       trace.index(col("h", i)), trace.index(col("s_d", i)), trace.index(col("s_c", i)),
                       trace.index(col("dstar", i)), trace.index(col("cstar", i)),
                       trace.index(col("mc", i))});
    }
    return out;
}

bool optimizer_active(const Trace& trace) {
    return trace.meta.count("bess") == 0 || trace.meta_string("bess") != "0";
}

}  // namespace

FleetCheck check_fleet(const Trace& trace) {
    FleetCheck out;
    const auto cols = agent_columns(trace);
    const auto lo = trace.meta_list("soc_min");
    const auto hi = trace.meta_list("soc_max");
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        bool both = false;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const double soc = trace.at(r, cols[i].soc);
            if (!(soc >= lo.at(i) - 1e-9 && soc <= hi.at(i) + 1e-9)) ++out.soc_violations;
            if (trace.at(r, cols[i].d) * trace.at(r, cols[i].c) != 0.0) both = true;
        }
        if (both) ++out.simultaneous;
    }
    out.ok = out.soc_violations == 0 && out.simultaneous == 0;
    return out;
}

double nadir(const Trace& trace) {
    double m = 0.0;
    for (double v : trace.column("df1_hz")) m = std::max(m, std::abs(v));
    return m;
}

double settling_time(const Trace& trace, double event_s, double band, double hold_s) {
    const auto t = trace.column("time_s");
    const auto df = trace.column("df1_hz");
    std::size_t start = t.size();
    for (std::size_t r = 0; r < t.size(); ++r) {
        if (t[r] < event_s - 1e-9) continue;
        if (std::abs(df[r]) >= band) {
            start = t.size();
            continue;
        }
        if (start == t.size()) start = r;
        if (t[r] - t[start] >= hold_s - 1e-9) return t[start] - event_s;
    }
    return kNaN;
}

double rms(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s / static_cast<double>(values.size()));
}

DualBound check_dual_bound(const Trace& trace) {
    DualBound out;
    if (!optimizer_active(trace)) return out;
    const auto cols = agent_columns(trace);
    const double gamma = trace.meta_number("gamma");
    const auto kappa = trace.column("kappa");
    const auto eps = trace.column("eps");
    double b_y = 0.0;
    for (std::size_t r = 0; r + 1 < trace.rows(); ++r) {
        for (const auto& c : cols) {
            b_y = std::max({b_y, std::abs(trace.at(r, c.y)), std::abs(trace.at(r, c.y_mixed))});
        }
        const double bound = gamma * b_y * kappa[r] / eps[r];
        for (const auto& c : cols) {
            const double lam = std::abs(trace.at(r + 1, c.lambda));
            ++out.checked;
            if (bound > 0.0) out.max_ratio = std::max(out.max_ratio, lam / bound);
            if (lam > bound + 1e-12) ++out.violations;
        }
    }
    return out;
}

double max_tracking_error(const Trace& trace) {
    if (!optimizer_active(trace)) return 0.0;
    const auto cols = agent_columns(trace);
    double worst = 0.0;
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        double y = 0.0;
        double h = 0.0;
        for (const auto& c : cols) {
            y += trace.at(r, c.y);
            h += trace.at(r, c.h);
        }
        worst = std::max(worst, std::abs(y - h) / static_cast<double>(cols.size()));
    }
    return worst;
}

double withdrawal_time(const Trace& trace, double tol) {
    const auto cols = agent_columns(trace);
    const auto t = trace.column("time_s");
    double since = kNaN;
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        bool quiet = true;
        for (const auto& c : cols) {
            if (!(std::abs(trace.at(r, c.d) - trace.at(r, c.c)) < tol)) quiet = false;
        }
        if (!quiet) {
            since = kNaN;
        } else if (std::isnan(since)) {
            since = t[r];
        }
    }
    return since;
}

Fairness fairness(const Trace& trace, double from_s, double rel_tol) {
    Fairness out;
    const auto cols = agent_columns(trace);
    const auto t = trace.column("time_s");
    std::size_t passed = 0;
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        if (t[r] < from_s) continue;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double scale = 0.0;
        std::size_t interior = 0;
        for (const auto& c : cols) {
            const double q = trace.at(r, c.d) - trace.at(r, c.c);
            const bool discharge = trace.at(r, c.mode) == 1.0;
            const double active = discharge ? q : -q;
            if (!(active > 1e-3 && active < trace.at(r, c.hi) - 1e-6)) continue;
            const double mc = trace.at(r, c.mc);
            lo = std::min(lo, mc);
            hi = std::max(hi, mc);
            scale = std::max(scale, std::abs(mc));
            ++interior;
        }
        if (interior < 2) continue;
        ++out.counted;
        if (hi - lo <= rel_tol * scale) ++passed;
    }
    out.fraction = out.counted ? static_cast<double>(passed) / static_cast<double>(out.counted) : 1.0;
    return out;
}

std::vector<StageGap> near_optimality(const Trace& trace, std::size_t min_len, double rel,
                                      double abs_floor) {
    std::vector<StageGap> out;
    if (trace.rows() == 0) return out;
    const auto stage = trace.column("stage");
    const auto cost = trace.column("cost");
    const auto oracle = trace.column("oracle_cost");
    // The closing row carries no iteration of its own.
    const std::size_t n = trace.rows() > 0 ? trace.rows() - 1 : 0;
    // Stages are clipped to the event response; the quiet lead-in has a zero target.
    std::size_t begin = std::min(n, row_at_time(trace, trace.meta_number("event_s")));
    while (begin < n) {
        std::size_t end = begin;
        while (end < n && stage[end] == stage[begin]) ++end;
        if (end - begin >= min_len) {
            StageGap g;
            g.stage = static_cast<long>(stage[begin]);
            g.begin = begin;
            g.end = end;
            const std::size_t from = end - (end - begin) / 4;
            std::size_t m = 0;
            for (std::size_t r = from; r < end; ++r) {
                if (std::isnan(oracle[r])) continue;
                g.mean_gap += std::abs(cost[r] - oracle[r]);
                g.mean_oracle += oracle[r];
                ++m;
            }
            if (m > 0) {
                g.mean_gap /= static_cast<double>(m);
                g.mean_oracle /= static_cast<double>(m);
                g.ok = g.mean_gap <= rel * g.mean_oracle + abs_floor;
                out.push_back(g);
            }
        }
        begin = end;
    }
    return out;
}

regret::RegretTrace regret_trace(const Trace& trace) {
    if (trace.rows() < 2) throw IncompleteTraceError("trace has fewer than two rows");
    const auto cols = agent_columns(trace);
    const auto n = static_cast<Eigen::Index>(cols.size());
    regret::RegretTrace out;
    out.gamma = trace.meta_number("gamma");
    out.b_u = trace.meta_number("b_u");
    const auto stage = trace.index("stage");
    const auto kappa = trace.index("kappa");
    const auto eps = trace.index("eps");
    const auto cost = trace.index("cost");
    const auto oracle = trace.index("oracle_cost");

    auto stacked = [&](std::size_t r, auto first, auto second, double sign) {
        Eigen::VectorXd v(2 * n);
        for (Eigen::Index i = 0; i < n; ++i) {
            v(2 * i) = trace.at(r, cols[i].*first);
            v(2 * i + 1) = sign * trace.at(r, cols[i].*second);
        }
        return v;
    };
    auto per_agent = [&](std::size_t r, auto member) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = trace.at(r, cols[i].*member);
        return v;
    };

    const std::size_t last = trace.rows() - 1;
    for (std::size_t r = 0; r < last; ++r) {
        regret::IterationRecord rec;
        rec.stage = static_cast<long>(trace.at(r, stage));
        rec.kappa = trace.at(r, kappa);
        rec.eps = trace.at(r, eps);
        rec.u = stacked(r, &AgentColumns::d, &AgentColumns::c, -1.0);
        rec.u_star = stacked(r, &AgentColumns::dstar, &AgentColumns::cstar, -1.0);
        rec.s = stacked(r, &AgentColumns::s_d, &AgentColumns::s_c, 1.0);
        rec.lambda = per_agent(r, &AgentColumns::lambda);
        rec.lambda_mixed = per_agent(r, &AgentColumns::lambda_mixed);
        rec.y = per_agent(r, &AgentColumns::y);
        rec.y_mixed = per_agent(r, &AgentColumns::y_mixed);
        rec.cost = trace.at(r, cost);
        rec.oracle_cost = trace.at(r, oracle);
        out.records.push_back(std::move(rec));
    }
    out.u_final = stacked(last, &AgentColumns::d, &AgentColumns::c, -1.0);
    out.lambda_final = per_agent(last, &AgentColumns::lambda);
    out.u_star_final = stacked(last, &AgentColumns::dstar, &AgentColumns::cstar, -1.0);
    if (!out.u_star_final.allFinite()) out.u_star_final.resize(0);
    return out;
}

std::size_t row_at_time(const Trace& trace, double t) {
    const auto times = trace.column("time_s");
    for (std::size_t r = 0; r < times.size(); ++r) {
        if (times[r] >= t - 1e-9) return r;
    }
    return times.size();
}

nlohmann::json verify_report(const Trace& trace) {
    nlohmann::json j;
    bool pass = true;

    const auto fleet = check_fleet(trace);
    j["fleet"] = {{"ok", fleet.ok},
                  {"soc_violations", fleet.soc_violations},
                  {"simultaneous_charge_discharge", fleet.simultaneous}};
    pass = pass && fleet.ok;

    if (!optimizer_active(trace)) {
        j["optimizer"] = "disabled";
        j["pass"] = pass;
        return j;
    }

    const auto dual = check_dual_bound(trace);
    j["dual_bound"] = {{"max_ratio", dual.max_ratio},
                       {"violations", dual.violations},
                       {"checked", dual.checked}};
    const double track = max_tracking_error(trace);
    j["tracking"] = {{"max_error_mw", track}, {"ok", track <= 1e-9}};
    pass = pass && dual.violations == 0 && track <= 1e-9;

    const bool has_oracle = trace.meta.count("oracle") && trace.meta_string("oracle") == "1";
    if (!has_oracle) {
        j["regret"] = "no oracle columns";
        j["pass"] = pass;
        return j;
    }

    const auto rt = regret_trace(trace);
    nlohmann::json stages = nlohmann::json::array();
    bool lemmas = true;
    for (const auto& [b, e] : rt.stages()) {
        const auto l1 = regret::lemma1_check(rt, b, e);
        const auto l2 = regret::lemma2_check(rt, b, e);
        lemmas = lemmas && l1.holds && l2.holds;
        stages.push_back({{"stage", rt.records[b].stage},
                          {"begin", b},
                          {"end", e},
                          {"lemma1_lhs", l1.lhs},
                          {"lemma1_rhs", l1.rhs},
                          {"lemma1", l1.holds},
                          {"lemma1_eps_form", l1.holds_eps},
                          {"lemma2_s", l2.s_t},
                          {"lemma2_bound", l2.bound},
                          {"lemma2", l2.holds}});
    }
    j["stages"] = stages;
    j["lemmas_hold"] = lemmas;
    pass = pass && lemmas;

    // Geometric horizons counted from the event row.
    const std::size_t start = row_at_time(trace, trace.meta_number("event_s"));
    const std::size_t avail = rt.records.size() > start ? rt.records.size() - start : 0;
    std::vector<double> horizons;
    for (std::size_t h = std::max<std::size_t>(avail / 32, 1); h < avail; h *= 2) {
        horizons.push_back(static_cast<double>(h));
    }
    if (avail > 0) horizons.push_back(static_cast<double>(avail));
    if (horizons.size() >= 4 && horizons.back() / horizons.front() >= 10.0) {
        regret::RegretTrace tail = rt;
        tail.records.erase(tail.records.begin(),
                           tail.records.begin() + static_cast<std::ptrdiff_t>(start));
        std::vector<double> reg;
        for (double h : horizons) reg.push_back(regret::dynamic_regret(tail, static_cast<std::size_t>(h)));
        nlohmann::json r = {{"horizons", horizons}, {"regret", reg}};
        try {
            const auto fit = regret::regret_slope(horizons, reg);
            r["slope"] = fit.slope;
            r["excluded"] = fit.excluded;
            r["sublinear"] = fit.sublinear();
            pass = pass && fit.sublinear();
        } catch (const PreconditionError& e) {
            r["error"] = e.what();
            pass = false;
        }
        j["regret"] = r;
    }
    j["pass"] = pass;
    return j;
}

}  // namespace orra::harness
