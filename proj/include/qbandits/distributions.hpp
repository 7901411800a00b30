#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qbandits/rng.hpp"

namespace qbandits {

// Standard normal helpers used by the folded-Gaussian model and by samplers.
double norm_pdf(double z);
double norm_cdf(double z);
double norm_sf(double z);
// Inverse standard normal CDF, accurate to ~1 ulp after refinement.
double norm_ppf(double p);

// Quantile level tau in the open interval (0, 1).
struct QuantileLevel {
    double tau;
    explicit QuantileLevel(double t);
};

struct AbsGaussian {
    double mu;    // location of the underlying Gaussian, >= 0
    double sigma; // standard deviation of the underlying Gaussian, > 0
    bool operator==(const AbsGaussian&) const = default;
};

struct Exponential {
    double rate; // > 0
    bool operator==(const Exponential&) const = default;
};

struct Empirical {
    std::vector<double> samples; // finite, non-negative, non-empty
    bool operator==(const Empirical&) const = default;
};

// Reward model of a single arm: |N(mu, sigma^2)|, Exp(rate), or a fixed
// finite population resampled with replacement. Immutable after
// construction; all randomness comes from caller-supplied streams.
class DistributionSpec {
public:
    using Model = std::variant<AbsGaussian, Exponential, Empirical>;

    static DistributionSpec abs_gaussian(double mu, double sigma);
    static DistributionSpec exponential(double rate);
    static DistributionSpec empirical(std::vector<double> samples);

    bool is_parametric() const { return !std::holds_alternative<Empirical>(model_); }
    const Model& model() const { return model_; }
    std::string name() const;

    double sample(RngStream& stream) const;
    std::vector<double> sample(std::int64_t count, RngStream& stream) const;

    // P(X <= x); 0 for x < 0. Empirical arms use the empirical CDF.
    double cdf(double x) const;
    // P(X > x), computed without cancellation so hazards stay finite deep
    // into the tail.
    double survival(double x) const;

    // inf{x : F(x) >= tau}. Parametric variants: closed form (Exponential)
    // or bracketing bisection to 1e-9 (AbsGaussian). Empirical variants:
    // the order-statistic rank floor(n(1-tau)).
    double true_quantile(QuantileLevel tau) const;

    // f(x) / (1 - F(x)); parametric variants only, requires F(x) < 1.
    double hazard_rate(double x) const;

    // L = inf_x h(x). Exponential: rate. AbsGaussian mu=0: 1/(sigma sqrt(2 pi)).
    // AbsGaussian mu>0: h(0) after a numeric monotonicity check on a grid.
    double hazard_lower_bound() const;

    double mean() const;

    bool operator==(const DistributionSpec& other) const = default;

private:
    explicit DistributionSpec(Model m) : model_(std::move(m)) {}
    Model model_;
};

} // namespace qbandits
