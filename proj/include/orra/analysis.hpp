#pragma once

#include "orra/oracle_regret.hpp"
#include "orra/trace.hpp"

#include <json.hpp>

#include <vector>

namespace orra::harness {

struct FleetCheck {
    bool ok = true;
    std::size_t soc_violations = 0;
    std::size_t simultaneous = 0;  // rows with d * c != 0
};

/// SoC inside [soc_min, soc_max] (+-1e-9) and d * c = 0 on every row.
FleetCheck check_fleet(const Trace& trace);

/// max |df1| over the trace.
double nadir(const Trace& trace);

/// Seconds from `event_s` to the start of the first `hold_s` window in which
/// |df1| stays below `band`. NaN if there is none.
double settling_time(const Trace& trace, double event_s, double band = 0.005, double hold_s = 10.0);

double rms(const std::vector<double>& values);

struct DualBound {
    double max_ratio = 0.0;  // max_t max_i |lambda_{t+1}| / (gamma B_y kappa_t / eps_t)
    std::size_t violations = 0;
    std::size_t checked = 0;
};

/// Dual magnitude bound with B_y the running max of |y| and |y~|.
DualBound check_dual_bound(const Trace& trace);

/// max_t |mean_i y_t - mean_i h_{t-1}(u_t)|
double max_tracking_error(const Trace& trace);

/// Earliest time after which every |d - c| stays below tol; NaN if never.
double withdrawal_time(const Trace& trace, double tol = 1e-3);

struct Fairness {
    double fraction = 0.0;  // share of counted iterations whose spread is within tolerance
    std::size_t counted = 0;
};

/// Agents with 1e-3 < |q| < hi - 1e-6 and q matching their mode are interior.
/// Iterations from `from_s` with at least two interior agents are counted; an
/// iteration passes when (max mc - min mc) / max |mc| <= rel_tol.
Fairness fairness(const Trace& trace, double from_s, double rel_tol = 0.05);

struct StageGap {
    long stage = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
    double mean_gap = 0.0;     // mean |cost - oracle_cost| over the final quarter
    double mean_oracle = 0.0;  // mean oracle cost over the final quarter
    bool ok = false;
};

/// Final-quarter cost gaps of every stage with at least `min_len` iterations
/// at or after the event row.
/// A stage passes when mean_gap <= rel * mean_oracle + abs_floor.
std::vector<StageGap> near_optimality(const Trace& trace, std::size_t min_len = 40,
                                      double rel = 0.05, double abs_floor = 1e-6);

/// Regret log of the rows that carry an iteration; the last row closes it.
regret::RegretTrace regret_trace(const Trace& trace);

/// First row index with time_s >= t.
std::size_t row_at_time(const Trace& trace, double t);

/// Lemma checks per stage, regret slope over geometric horizons, fleet and
/// optimizer invariants. "pass" summarises everything.
nlohmann::json verify_report(const Trace& trace);

}  // namespace orra::harness
