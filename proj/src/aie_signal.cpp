#include "orra/aie_signal.hpp"

#include "orra/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace orra::aie {

double compute_ace(double dptie_mw, double bias_mw_per_hz, double df_hz) {
    return dptie_mw + bias_mw_per_hz * df_hz;
}

void AieInputs::validate() const {
    const auto n = generator.size();
    if (sigma.size() != n || du_gov.size() != n || dpm.size() != n) {
        throw DimensionError("AIE inputs: per-bus vectors must all have " + std::to_string(n) +
                             " entries");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sigma[i] < 0.0) throw ParameterError("participation factors must be nonnegative");
        if (!generator[i] && sigma[i] != 0.0)
            throw ParameterError("non-generator bus " + std::to_string(i) + " has participation");
        total += sigma[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw ParameterError("participation factors must sum to 1");
}

double compute_aie_bus(const AieInputs& in, std::size_t bus) {
    if (bus >= in.buses()) throw DimensionError("bus index out of range");
    if (!in.generator[bus]) return 0.0;
    return in.sigma[bus] * (in.dptie + in.d_prime * in.df) + in.du_gov[bus] - in.dpm[bus];
}

double aggregate_aie(const AieInputs& in) {
    double total = in.dptie + in.d_prime * in.df;
    for (std::size_t i = 0; i < in.buses(); ++i) {
        if (in.generator[i]) total += in.du_gov[i] - in.dpm[i];
    }
    return total;
}

double gaussian_basis(double x, double xi) {
    if (!(xi > 0.0)) throw ParameterError("RBF shape parameter xi must be positive");
    return std::exp(-xi * x * x);
}

Eigen::MatrixXd build_gram(const std::vector<double>& df, double xi) {
    const auto m = static_cast<Eigen::Index>(df.size());
    Eigen::MatrixXd g(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
        g(r, r) = 1.0;
        for (Eigen::Index c = r + 1; c < m; ++c) {
            const double dist = df[static_cast<std::size_t>(r)] - df[static_cast<std::size_t>(c)];
            if (dist == 0.0) {
                throw InfillViolationError("duplicate surrogate sample at df = " +
                                           std::to_string(df[static_cast<std::size_t>(r)]));
            }
            g(r, c) = g(c, r) = gaussian_basis(dist, xi);
        }
    }
    return g;
}

double condition_number(const Eigen::MatrixXd& gram) {
    if (gram.rows() == 0) return 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

Eigen::VectorXd fit_weights(const Eigen::MatrixXd& gram, const Eigen::VectorXd& s,
                            double max_condition) {
    if (gram.rows() != gram.cols() || gram.rows() != s.size()) {
        throw DimensionError("fit_weights: Gram matrix and sample vector sizes differ");
    }
    const double cond = condition_number(gram);
    if (!(cond <= max_condition)) {
        throw IllConditionedError("Gram matrix condition number " + std::to_string(cond) +
                                      " exceeds " + std::to_string(max_condition),
                                  cond);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram.transpose());
    Eigen::VectorXd w = ldlt.solve(s);
    // One step of iterative refinement keeps the interpolation residual near roundoff.
    w += ldlt.solve(s - gram.transpose() * w);
    return w;
}

void RbfSettings::validate() const {
    if (!(xi > 0.0)) throw ParameterError("RBF shape parameter xi must be positive");
    if (!(d_min > 0.0)) throw ParameterError("RBF infill distance must be positive");
    if (max_samples < 2) throw ParameterError("RBF sample cap must be at least 2");
}

RbfSurrogate::RbfSurrogate(RbfSettings settings) : settings_(settings) { settings_.validate(); }

bool RbfSurrogate::infill_decide(double df) const {
    return std::all_of(samples_.begin(), samples_.end(), [&](const RbfSample& s) {
        return std::abs(df - s.df) >= settings_.d_min;
    });
}

void RbfSurrogate::add_sample(double df, double dp) {
    const auto saved = samples_;
    samples_.push_back({df, dp});
    if (samples_.size() > settings_.max_samples) {
        const auto [lo, hi] = std::minmax_element(
            samples_.begin(), samples_.end(),
            [](const RbfSample& a, const RbfSample& b) { return a.df < b.df; });
        const auto lo_df = lo->df;
        const auto hi_df = hi->df;
        auto victim = std::find_if(samples_.begin(), samples_.end(), [&](const RbfSample& s) {
            return s.df != lo_df && s.df != hi_df;
        });
        samples_.erase(victim);
    }
    try {
        refit();
    } catch (...) {
        samples_ = saved;
        refit();
        throw;
    }
}

void RbfSurrogate::refit() {
    std::vector<double> df;
    Eigen::VectorXd s(static_cast<Eigen::Index>(samples_.size()));
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        df.push_back(samples_[i].df);
        s(static_cast<Eigen::Index>(i)) = samples_[i].dp;
    }
    auto gram = build_gram(df, settings_.xi);
    weights_ = fit_weights(gram, s, settings_.max_condition);
    gram_ = std::move(gram);
}

double RbfSurrogate::evaluate(double df) const {
    double total = 0.0;
    for (std::size_t m = 0; m < samples_.size(); ++m) {
        total += weights_(static_cast<Eigen::Index>(m)) *
                 gaussian_basis(df - samples_[m].df, settings_.xi);
    }
    return total;
}

double corrected_aie(double aie_bus, const RbfSurrogate& surrogate, double df) {
    return aie_bus + surrogate.evaluate(df);
}

}  // namespace orra::aie
