#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace orra::aie {

/// dPtie + B * df
double compute_ace(double dptie_mw, double bias_mw_per_hz, double df_hz);

/// Per-bus measurements entering the injection error of one area.
struct AieInputs {
    double dptie = 0.0;    // MW
    double df = 0.0;       // Hz
    double d_prime = 0.0;  // MW/Hz
    std::vector<double> sigma;   // participation per bus, zero on non-generator buses
    std::vector<double> du_gov;  // MW
    std::vector<double> dpm;     // MW
    std::vector<bool> generator;

    std::size_t buses() const { return generator.size(); }
    /// Throws DimensionError on ragged vectors, ParameterError on bad participation factors.
    void validate() const;
};

/// sigma_i (dPtie + D' df) + du_gov_i - dPm_i on generator buses, 0 elsewhere.
double compute_aie_bus(const AieInputs& inputs, std::size_t bus);

/// dPtie + D' df + sum over generator buses of (du_gov_i - dPm_i).
double aggregate_aie(const AieInputs& inputs);

/// exp(-xi x^2). Throws ParameterError for xi <= 0.
double gaussian_basis(double x, double xi);

/// [G]_rc = exp(-xi (df_r - df_c)^2). Throws InfillViolationError on duplicate samples.
Eigen::MatrixXd build_gram(const std::vector<double>& df, double xi);

/// 2-norm condition number of a symmetric matrix.
double condition_number(const Eigen::MatrixXd& gram);

/// Solves G^T w = S. Throws IllConditionedError when cond(G) > max_condition.
Eigen::VectorXd fit_weights(const Eigen::MatrixXd& gram, const Eigen::VectorXd& s,
                            double max_condition = 1e12);

struct RbfSettings {
    double xi = 3000.0;    // Hz^-2
    double d_min = 0.008;  // Hz
    std::size_t max_samples = 24;
    double max_condition = 1e12;

    void validate() const;
};

struct RbfSample {
    double df = 0.0;
    double dp = 0.0;
};

/// Exact Gaussian interpolant of sampled frequency-responsive power.
class RbfSurrogate {
public:
    explicit RbfSurrogate(RbfSettings settings = {});

    /// True when df is at least d_min from every stored sample.
    bool infill_decide(double df) const;

    /// Appends a sample and refits. On overflow the oldest sample that is not
    /// the smallest or largest df is evicted. The previous state is restored
    /// if the refit fails.
    void add_sample(double df, double dp);

    /// Sum_m w_m exp(-xi (df - df_m)^2); 0 when empty.
    double evaluate(double df) const;

    bool empty() const { return samples_.empty(); }
    std::size_t size() const { return samples_.size(); }
    const std::vector<RbfSample>& samples() const { return samples_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    const Eigen::MatrixXd& gram() const { return gram_; }
    const RbfSettings& settings() const { return settings_; }

private:
    void refit();

    RbfSettings settings_;
    std::vector<RbfSample> samples_;
    Eigen::MatrixXd gram_;
    Eigen::VectorXd weights_;
};

/// aie_bus + surrogate(df)
double corrected_aie(double aie_bus, const RbfSurrogate& surrogate, double df);

}  // namespace orra::aie
