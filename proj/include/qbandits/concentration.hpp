#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qbandits/distributions.hpp"
#include "qbandits/rng.hpp"

namespace qbandits {

// Parameters of the order-statistic tail bounds. Right tail needs
// 1 <= k < n, left tail 1 < k <= n.
struct OsBoundParams {
    std::int64_t n;
    std::int64_t k;
    double hazard_floor; // L > 0
};

// sqrt(2 v_r gamma) + c_r gamma with v_r = 2/(k L^2), c_r = 2/(k L).
double os_right_radius(const OsBoundParams& p, double gamma);

// sqrt(2 v_l gamma) with v_l = 2(n-k+1)/((k-1)^2 L^2).
double os_left_radius(const OsBoundParams& p, double gamma);

struct QuantileBoundParams {
    std::int64_t n;
    QuantileLevel tau;
    double hazard_floor;   // L > 0
    double bias_constant;  // b >= 0, w_n = b/n
};

struct TwoSided {
    double right;
    double left;
};

// Deviation radii of the empirical tau-quantile around the population
// quantile at confidence exp(-gamma): order-statistic radii plus b/n.
TwoSided quantile_radii(const QuantileBoundParams& p, double gamma);

struct TailProbabilities {
    double right;          // bound on P(Qhat - Q >= epsilon)
    double left;           // bound on P(Q - Qhat >= epsilon)
    double right_exponent; // epsilon^2 / (2 (v_r + (c_r + w_n) eps))
    double left_exponent;  // epsilon^2 / (2 (v_l + w_n eps))
    // The epsilon-form is derived assuming gamma >= 1; set when either
    // implied exponent falls below 1 (result still returned).
    bool gamma_below_one;
};

// Epsilon-form of the quantile concentration bound.
TailProbabilities quantile_epsilon_bound(const QuantileBoundParams& p, double epsilon);

// Numeric inversion of the combined-coefficient radius
// sqrt(2 v gamma) + (c + w_n) gamma = epsilon; returns gamma*.
double invert_right_radius(const QuantileBoundParams& p, double epsilon);
double invert_left_radius(const QuantileBoundParams& p, double epsilon);

// Two-sided n-form bound 2 exp(-n(1-tau) L^2 eps^2 / (2(alpha + beta eps)))
// with alpha = 4(1+tau)/(1-tau), beta = 4/3 (2L + b(1-tau)L^2). Requires
// n >= 4/(1-tau). Capped at 1.
double quantile_n_form_bound(const QuantileBoundParams& p, double epsilon);

// Variant without the sample-size assumption: alpha~ = 2(tau+2)/(1-tau),
// beta~ = 2L + b(1-tau)L^2, with the additive constant exponent term.
double quantile_n_form_bound_unrestricted(const QuantileBoundParams& p, double epsilon);

struct ComplexityInputs {
    std::vector<double> gaps;           // per-arm Delta_i, all > 0
    std::vector<double> hazard_floors;  // per-arm L_i
    std::vector<double> bias_constants; // per-arm b_i
    double tau;
};

struct ComplexityTerm {
    std::size_t arm;      // i (0-based)
    std::size_t gap_rank; // j (1-based rank into the sorted gaps)
    double value;
};

struct ComplexityReport {
    double h_tau;
    double h_tilde;
    double constant_c;
    ComplexityTerm h_tau_argmax;
    ComplexityTerm h_tilde_argmax;
    ComplexityTerm c_argmax;
    std::vector<double> gaps_sorted;          // Delta_(1) <= ... <= Delta_(K)
    std::vector<std::vector<double>> h_terms; // [i][j-1] contributions to H^tau
};

// H^tau = max_{i,j} (8j/(1-tau)) (4 alpha / (L_i^2 Delta_(j)^2)
//                                 + beta_i / (L_i^2 Delta_(j)))
// plus the tilde variant and its additive constant C, by exact enumeration.
ComplexityReport problem_complexity(const ComplexityInputs& in);

// 2 K^2 exp(-(N-K)/(logbar(K) H)) capped at 1; the variant form adds the
// constant C in the exponent and drops the budget precondition.
double qsar_error_bound(std::int64_t budget, std::int64_t num_arms, double tau,
                        const ComplexityReport& complexity, bool variant);

// 1/2 + sum_{i=2}^{K} 1/i.
double log_bar(std::int64_t num_arms);
// m/(m+1) + sum_{p=1}^{K-m} 1/(K+1-p).
double log_tilde(std::int64_t num_arms, std::int64_t m);

// One row of a Monte-Carlo tail validation: the frequency with which the
// deviation exceeded the radius, against the theoretical bound exp(-gamma).
struct TailValidationRow {
    std::string spec;
    std::int64_t n = 0;
    std::int64_t k = 0;
    double tau = 0;       // 0 marks order-statistic rows
    double gamma = 0;
    std::string side;     // "right" or "left"
    double radius = 0;
    double bound = 0;     // exp(-gamma)
    double frequency = 0;
    std::int64_t trials = 0;
    double stderr_ = 0;   // binomial std error at the bound value
    bool pass = false;    // frequency <= bound + 3 stderr
};

struct TailValidationReport {
    std::vector<TailValidationRow> rows;
    double center = 0;        // E[X_(k)] estimate (OS) or true quantile
    double center_stderr = 0; // MC std error of the center (0 when analytic)
    bool all_pass() const;
};

// Estimates E[X_(k)] from oracle_trials independent size-n samples, then over
// fresh trials measures how often the deviation exceeds each side's radius.
TailValidationReport mc_validate_os_tail(const DistributionSpec& spec, std::int64_t n,
                                         std::int64_t k, std::span<const double> gammas,
                                         std::int64_t trials, std::int64_t oracle_trials,
                                         RngStream stream, int jobs = 1);

// Same shape, deviations measured against the true tau-quantile and radii
// include the bias term b/n.
TailValidationReport mc_validate_quantile_tail(const DistributionSpec& spec, std::int64_t n,
                                               QuantileLevel tau, double bias_constant,
                                               std::span<const double> gammas,
                                               std::int64_t trials, RngStream stream,
                                               int jobs = 1);

// b_hat = max over the n-grid of n (|E_hat[X_(k)] - Q^tau| + 3 se), the
// default bias constant for (spec, tau).
double estimate_bias_constant(const DistributionSpec& spec, QuantileLevel tau,
                              std::span<const std::int64_t> n_grid,
                              std::int64_t oracle_trials, RngStream stream, int jobs = 1);

void write_validation_csv(std::ostream& out, std::span<const TailValidationRow> rows);

} // namespace qbandits
