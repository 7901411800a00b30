#include "qbandits/concentration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>

#include "qbandits/order_stats.hpp"
#include "qbandits/parallel.hpp"

namespace qbandits {

namespace {

constexpr std::int64_t kMcBlock = 8192;

void check_os_params(const OsBoundParams& p) {
    if (p.n < 1) throw std::invalid_argument("os bound: n must be >= 1");
    if (!(p.hazard_floor > 0.0)) throw std::invalid_argument("os bound: L must be > 0");
}

double v_right(std::int64_t k, double L) { return 2.0 / (static_cast<double>(k) * L * L); }
double c_right(std::int64_t k, double L) { return 2.0 / (static_cast<double>(k) * L); }
double v_left(std::int64_t n, std::int64_t k, double L) {
    const double km1 = static_cast<double>(k - 1);
    return 2.0 * static_cast<double>(n - k + 1) / (km1 * km1 * L * L);
}

// Smallest gamma with sqrt(2 v g) + c g = eps, written to avoid cancellation.
double invert_sub_gamma(double v, double c, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("invert radius: epsilon must be >= 0");
    const double s = v + c * eps;
    return eps * eps / (s + std::sqrt(std::max(0.0, s * s - c * c * eps * eps)));
}

std::string fmt(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

} // namespace

double os_right_radius(const OsBoundParams& p, double gamma) {
    check_os_params(p);
    if (p.k < 1 || p.k >= p.n) {
        throw std::out_of_range("os_right_radius: requires 1 <= k < n");
    }
    if (!(gamma >= 0.0)) throw std::invalid_argument("os bound: gamma must be >= 0");
    const double v = v_right(p.k, p.hazard_floor);
    return std::sqrt(2.0 * v * gamma) + c_right(p.k, p.hazard_floor) * gamma;
}

double os_left_radius(const OsBoundParams& p, double gamma) {
    check_os_params(p);
    if (p.k == 1) throw std::out_of_range("os_left_radius: left tail undefined at k=1");
    if (p.k < 1 || p.k > p.n) {
        throw std::out_of_range("os_left_radius: requires 1 < k <= n");
    }
    if (!(gamma >= 0.0)) throw std::invalid_argument("os bound: gamma must be >= 0");
    return std::sqrt(2.0 * v_left(p.n, p.k, p.hazard_floor) * gamma);
}

namespace {

void check_quantile_params(const QuantileBoundParams& p) {
    if (!(p.hazard_floor > 0.0)) throw std::invalid_argument("quantile bound: L must be > 0");
    if (!(p.bias_constant >= 0.0)) throw std::invalid_argument("quantile bound: b must be >= 0");
}

} // namespace

TwoSided quantile_radii(const QuantileBoundParams& p, double gamma) {
    check_quantile_params(p);
    const std::int64_t k = rank_for(p.n, p.tau).k;
    const double w = p.bias_constant / static_cast<double>(p.n);
    const OsBoundParams os{p.n, k, p.hazard_floor};
    return {os_right_radius(os, gamma) + w, os_left_radius(os, gamma) + w};
}

TailProbabilities quantile_epsilon_bound(const QuantileBoundParams& p, double epsilon) {
    check_quantile_params(p);
    if (!(epsilon > 0.0)) throw std::invalid_argument("quantile bound: epsilon must be > 0");
    const std::int64_t k = rank_for(p.n, p.tau).k;
    if (k >= p.n) throw std::out_of_range("quantile bound: requires k < n");
    if (k == 1) throw std::out_of_range("quantile bound: left tail undefined at k=1");
    const double L = p.hazard_floor;
    const double w = p.bias_constant / static_cast<double>(p.n);
    const double vr = v_right(k, L);
    const double cr = c_right(k, L);
    const double vl = v_left(p.n, k, L);
    TailProbabilities out;
    out.right_exponent = epsilon * epsilon / (2.0 * (vr + (cr + w) * epsilon));
    out.left_exponent = epsilon * epsilon / (2.0 * (vl + w * epsilon));
    out.right = std::exp(-out.right_exponent);
    out.left = std::exp(-out.left_exponent);
    out.gamma_below_one = std::min(out.right_exponent, out.left_exponent) < 1.0;
    return out;
}

double invert_right_radius(const QuantileBoundParams& p, double epsilon) {
    check_quantile_params(p);
    const std::int64_t k = rank_for(p.n, p.tau).k;
    if (k >= p.n) throw std::out_of_range("quantile bound: requires k < n");
    const double L = p.hazard_floor;
    const double w = p.bias_constant / static_cast<double>(p.n);
    return invert_sub_gamma(v_right(k, L), c_right(k, L) + w, epsilon);
}

double invert_left_radius(const QuantileBoundParams& p, double epsilon) {
    check_quantile_params(p);
    const std::int64_t k = rank_for(p.n, p.tau).k;
    if (k == 1) throw std::out_of_range("quantile bound: left tail undefined at k=1");
    const double L = p.hazard_floor;
    const double w = p.bias_constant / static_cast<double>(p.n);
    return invert_sub_gamma(v_left(p.n, k, L), w, epsilon);
}

namespace {

double n_form_alpha(double tau) { return 4.0 * (1.0 + tau) / (1.0 - tau); }
double n_form_beta(double tau, double L, double b) {
    return (4.0 / 3.0) * (2.0 * L + b * (1.0 - tau) * L * L);
}
double n_form_alpha_tilde(double tau) { return 2.0 * (tau + 2.0) / (1.0 - tau); }
double n_form_beta_tilde(double tau, double L, double b) {
    return 2.0 * L + b * (1.0 - tau) * L * L;
}

} // namespace

double quantile_n_form_bound(const QuantileBoundParams& p, double epsilon) {
    check_quantile_params(p);
    if (!(epsilon >= 0.0)) throw std::invalid_argument("quantile bound: epsilon must be >= 0");
    const double tau = p.tau.tau;
    if (static_cast<double>(p.n) * (1.0 - tau) < 4.0 - 1e-9) {
        throw std::domain_error("quantile_n_form_bound: n below 4/(1-tau)");
    }
    const double L = p.hazard_floor;
    const double alpha = n_form_alpha(tau);
    const double beta = n_form_beta(tau, L, p.bias_constant);
    const double exponent = static_cast<double>(p.n) * (1.0 - tau) * L * L * epsilon * epsilon /
                            (2.0 * (alpha + beta * epsilon));
    return std::min(1.0, 2.0 * std::exp(-exponent));
}

double quantile_n_form_bound_unrestricted(const QuantileBoundParams& p, double epsilon) {
    check_quantile_params(p);
    if (!(epsilon >= 0.0)) throw std::invalid_argument("quantile bound: epsilon must be >= 0");
    if (p.n < 1) throw std::invalid_argument("quantile bound: n must be >= 1");
    const double tau = p.tau.tau;
    const double L = p.hazard_floor;
    const double denom =
        2.0 * (n_form_alpha_tilde(tau) + n_form_beta_tilde(tau, L, p.bias_constant) * epsilon);
    const double le2 = L * L * epsilon * epsilon;
    const double exponent = static_cast<double>(p.n) * (1.0 - tau) * le2 / denom - le2 / denom;
    return std::min(1.0, 2.0 * std::exp(-exponent));
}

double log_bar(std::int64_t num_arms) {
    if (num_arms < 2) throw std::invalid_argument("log_bar: K must be >= 2");
    double s = 0.5;
    for (std::int64_t i = 2; i <= num_arms; ++i) s += 1.0 / static_cast<double>(i);
    return s;
}

double log_tilde(std::int64_t num_arms, std::int64_t m) {
    if (num_arms < 2) throw std::invalid_argument("log_tilde: K must be >= 2");
    if (m < 1 || m >= num_arms) throw std::invalid_argument("log_tilde: requires 1 <= m < K");
    // Summed in ascending denominator order so that at m = 1 the result is
    // bitwise equal to log_bar (the Q-SAR/Q-SR schedules must coincide).
    double s = static_cast<double>(m) / static_cast<double>(m + 1);
    for (std::int64_t j = m + 1; j <= num_arms; ++j) {
        s += 1.0 / static_cast<double>(j);
    }
    return s;
}

ComplexityReport problem_complexity(const ComplexityInputs& in) {
    const std::size_t num_arms = in.gaps.size();
    if (num_arms == 0 || in.hazard_floors.size() != num_arms ||
        in.bias_constants.size() != num_arms) {
        throw std::invalid_argument("problem_complexity: per-arm inputs must have equal size");
    }
    if (!(in.tau > 0.0 && in.tau < 1.0)) {
        throw std::invalid_argument("problem_complexity: tau must be in (0,1)");
    }
    for (double g : in.gaps) {
        if (!(g > 0.0)) throw std::domain_error("problem_complexity: non-unique optimal set");
    }
    for (double l : in.hazard_floors) {
        if (!(l > 0.0)) throw std::invalid_argument("problem_complexity: L must be > 0");
    }

    ComplexityReport report;
    report.gaps_sorted = in.gaps;
    std::sort(report.gaps_sorted.begin(), report.gaps_sorted.end());

    report.h_tau = 0.0;
    report.h_tilde = 0.0;
    report.constant_c = 0.0;
    const double alpha = n_form_alpha(in.tau);
    const double alpha_t = n_form_alpha_tilde(in.tau);
    report.h_terms.assign(num_arms, std::vector<double>(num_arms, 0.0));
    for (std::size_t i = 0; i < num_arms; ++i) {
        const double L = in.hazard_floors[i];
        const double beta = n_form_beta(in.tau, L, in.bias_constants[i]);
        const double beta_t = n_form_beta_tilde(in.tau, L, in.bias_constants[i]);
        for (std::size_t j = 1; j <= num_arms; ++j) {
            const double gap = report.gaps_sorted[j - 1];
            const double scale = 8.0 * static_cast<double>(j) / (1.0 - in.tau);
            const double h = scale * (4.0 * alpha / (L * L * gap * gap) + beta / (L * L * gap));
            const double ht =
                scale * (4.0 * alpha_t / (L * L * gap * gap) + beta_t / (L * L * gap));
            const double c = L * L * gap * gap / (8.0 * (4.0 * alpha_t + beta_t * gap));
            report.h_terms[i][j - 1] = h;
            if (h > report.h_tau) {
                report.h_tau = h;
                report.h_tau_argmax = {i, j, h};
            }
            if (ht > report.h_tilde) {
                report.h_tilde = ht;
                report.h_tilde_argmax = {i, j, ht};
            }
            if (c > report.constant_c) {
                report.constant_c = c;
                report.c_argmax = {i, j, c};
            }
        }
    }
    return report;
}

double qsar_error_bound(std::int64_t budget, std::int64_t num_arms, double tau,
                        const ComplexityReport& complexity, bool variant) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("qsar_error_bound: bad tau");
    const double lb = log_bar(num_arms);
    const double k = static_cast<double>(num_arms);
    const double n = static_cast<double>(budget);
    if (!variant) {
        if (n + 1e-9 < 4.0 / (1.0 - tau) * lb + k) {
            throw std::domain_error(
                "qsar_error_bound: budget precondition violation, N below 4/(1-tau) logbar(K) + K");
        }
        return std::min(1.0, 2.0 * k * k * std::exp(-(n - k) / (lb * complexity.h_tau)));
    }
    return std::min(1.0, 2.0 * k * k *
                             std::exp(-(n - k) / (lb * complexity.h_tilde) +
                                      complexity.constant_c));
}

namespace {

struct CenterEstimate {
    double mean = 0;
    double stderr_ = 0;
};

// Mean of X_(k) over `trials` independent size-n samples.
CenterEstimate mc_order_stat_mean(const DistributionSpec& spec, std::int64_t n, std::int64_t k,
                                  std::int64_t trials, const RngStream& stream, int jobs) {
    const std::int64_t num_blocks = (trials + kMcBlock - 1) / kMcBlock;
    std::vector<double> sums(static_cast<std::size_t>(num_blocks), 0.0);
    std::vector<double> sq_sums(static_cast<std::size_t>(num_blocks), 0.0);
    parallel_blocks(trials, kMcBlock, jobs, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
        RngStream block_stream = stream.child(static_cast<std::uint64_t>(b));
        std::vector<double> sample(static_cast<std::size_t>(n));
        double s = 0.0, sq = 0.0;
        for (std::int64_t t = begin; t < end; ++t) {
            for (auto& x : sample) x = spec.sample(block_stream);
            auto nth = sample.begin() + (k - 1);
            std::nth_element(sample.begin(), nth, sample.end(), std::greater<>());
            s += *nth;
            sq += *nth * *nth;
        }
        sums[static_cast<std::size_t>(b)] = s;
        sq_sums[static_cast<std::size_t>(b)] = sq;
    });
    double total = 0.0, total_sq = 0.0;
    for (std::int64_t b = 0; b < num_blocks; ++b) {
        total += sums[static_cast<std::size_t>(b)];
        total_sq += sq_sums[static_cast<std::size_t>(b)];
    }
    CenterEstimate est;
    est.mean = total / static_cast<double>(trials);
    const double var =
        std::max(0.0, total_sq / static_cast<double>(trials) - est.mean * est.mean);
    est.stderr_ = std::sqrt(var / static_cast<double>(trials));
    return est;
}

// Shared tail-exceedance loop: count, per gamma and side, how often the
// order statistic deviates from `center` by more than the radius.
TailValidationReport validate_tails(const DistributionSpec& spec, std::int64_t n, std::int64_t k,
                                    double tau, double center, double center_stderr,
                                    const std::vector<double>& right_radii,
                                    const std::vector<double>& left_radii,
                                    std::span<const double> gammas, std::int64_t trials,
                                    const RngStream& stream, int jobs) {
    const std::size_t num_gammas = gammas.size();
    const std::int64_t num_blocks = (trials + kMcBlock - 1) / kMcBlock;
    std::vector<std::vector<std::int64_t>> counts(
        static_cast<std::size_t>(num_blocks),
        std::vector<std::int64_t>(2 * num_gammas, 0));
    parallel_blocks(trials, kMcBlock, jobs, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
        RngStream block_stream = stream.child(static_cast<std::uint64_t>(b));
        std::vector<double> sample(static_cast<std::size_t>(n));
        auto& c = counts[static_cast<std::size_t>(b)];
        for (std::int64_t t = begin; t < end; ++t) {
            for (auto& x : sample) x = spec.sample(block_stream);
            auto nth = sample.begin() + (k - 1);
            std::nth_element(sample.begin(), nth, sample.end(), std::greater<>());
            const double dev = *nth - center;
            for (std::size_t g = 0; g < num_gammas; ++g) {
                if (!right_radii.empty() && dev >= right_radii[g]) c[2 * g] += 1;
                if (!left_radii.empty() && -dev >= left_radii[g]) c[2 * g + 1] += 1;
            }
        }
    });
    std::vector<std::int64_t> merged(2 * num_gammas, 0);
    for (std::int64_t b = 0; b < num_blocks; ++b) {
        for (std::size_t i = 0; i < merged.size(); ++i) {
            merged[i] += counts[static_cast<std::size_t>(b)][i];
        }
    }

    TailValidationReport report;
    report.center = center;
    report.center_stderr = center_stderr;
    auto push_row = [&](std::size_t g, bool right) {
        TailValidationRow row;
        row.spec = spec.name();
        row.n = n;
        row.k = k;
        row.tau = tau;
        row.gamma = gammas[g];
        row.side = right ? "right" : "left";
        row.radius = right ? right_radii[g] : left_radii[g];
        row.bound = std::exp(-gammas[g]);
        row.trials = trials;
        row.frequency =
            static_cast<double>(merged[2 * g + (right ? 0 : 1)]) / static_cast<double>(trials);
        row.stderr_ = std::sqrt(row.bound * (1.0 - row.bound) / static_cast<double>(trials));
        row.pass = row.frequency <= row.bound + 3.0 * row.stderr_;
        report.rows.push_back(std::move(row));
    };
    for (std::size_t g = 0; g < num_gammas; ++g) {
        if (!right_radii.empty()) push_row(g, true);
        if (!left_radii.empty()) push_row(g, false);
    }
    return report;
}

} // namespace

bool TailValidationReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
}

TailValidationReport mc_validate_os_tail(const DistributionSpec& spec, std::int64_t n,
                                         std::int64_t k, std::span<const double> gammas,
                                         std::int64_t trials, std::int64_t oracle_trials,
                                         RngStream stream, int jobs) {
    if (!spec.is_parametric()) {
        throw std::invalid_argument("mc_validate_os_tail: empirical specs rejected");
    }
    if (k < 1 || k > n) throw std::out_of_range("mc_validate_os_tail: k must be in [1, n]");
    if (trials < 1) throw std::invalid_argument("mc_validate_os_tail: trials must be >= 1");
    if (oracle_trials < 100000) {
        throw std::invalid_argument(
            "mc_validate_os_tail: oracle_trials must be >= 1e5 (E[X_(k)] estimate)");
    }
    const double L = spec.hazard_lower_bound();
    const CenterEstimate center =
        mc_order_stat_mean(spec, n, k, oracle_trials, stream.child(1), jobs);

    const OsBoundParams params{n, k, L};
    std::vector<double> right_radii, left_radii;
    if (k < n) {
        for (double g : gammas) right_radii.push_back(os_right_radius(params, g));
    }
    if (k > 1) {
        for (double g : gammas) left_radii.push_back(os_left_radius(params, g));
    }
    return validate_tails(spec, n, k, 0.0, center.mean, center.stderr_, right_radii, left_radii,
                          gammas, trials, stream.child(2), jobs);
}

TailValidationReport mc_validate_quantile_tail(const DistributionSpec& spec, std::int64_t n,
                                               QuantileLevel tau, double bias_constant,
                                               std::span<const double> gammas,
                                               std::int64_t trials, RngStream stream, int jobs) {
    if (!spec.is_parametric()) {
        throw std::invalid_argument("mc_validate_quantile_tail: empirical specs rejected");
    }
    if (trials < 1) throw std::invalid_argument("mc_validate_quantile_tail: trials must be >= 1");
    const QuantileBoundParams params{n, tau, spec.hazard_lower_bound(), bias_constant};
    const std::int64_t k = rank_for(n, tau).k;
    const double center = spec.true_quantile(tau);
    std::vector<double> right_radii, left_radii;
    for (double g : gammas) {
        const TwoSided radii = quantile_radii(params, g);
        right_radii.push_back(radii.right);
        left_radii.push_back(radii.left);
    }
    return validate_tails(spec, n, k, tau.tau, center, 0.0, right_radii, left_radii, gammas,
                          trials, stream.child(2), jobs);
}

double estimate_bias_constant(const DistributionSpec& spec, QuantileLevel tau,
                              std::span<const std::int64_t> n_grid, std::int64_t oracle_trials,
                              RngStream stream, int jobs) {
    if (!spec.is_parametric()) {
        throw std::invalid_argument("estimate_bias_constant: empirical specs rejected");
    }
    if (n_grid.empty()) throw std::invalid_argument("estimate_bias_constant: empty n grid");
    const double q = spec.true_quantile(tau);
    double b_hat = 0.0;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        const std::int64_t n = n_grid[i];
        const std::int64_t k = rank_for(n, tau).k; // throws on underflow
        const CenterEstimate est = mc_order_stat_mean(
            spec, n, k, oracle_trials, stream.child(static_cast<std::uint64_t>(i)), jobs);
        const double value =
            static_cast<double>(n) * (std::fabs(est.mean - q) + 3.0 * est.stderr_);
        b_hat = std::max(b_hat, value);
    }
    return b_hat;
}

void write_validation_csv(std::ostream& out, std::span<const TailValidationRow> rows) {
    out << "spec,n,k,tau,gamma,side,radius,bound,frequency,trials,stderr\n";
    for (const auto& r : rows) {
        out << r.spec << ',' << r.n << ',' << r.k << ',';
        if (r.tau > 0.0) out << fmt(r.tau);
        out << ',' << fmt(r.gamma) << ',' << r.side << ',' << fmt(r.radius) << ','
            << fmt(r.bound) << ',' << fmt(r.frequency) << ',' << r.trials << ','
            << fmt(r.stderr_) << '\n';
    }
}

} // namespace qbandits
