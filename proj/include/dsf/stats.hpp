#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace dsf {

/// Mean, k-statistics and normalized raw moments of a sample, each with a
/// jackknife standard error.
struct SampleSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< unbiased (k2)
    double k3 = 0.0;        ///< unbiased third cumulant
    /// normalized_moments[p-1] = <x^p> / <x>^p for p = 1..p_max
    std::vector<double> normalized_moments;

    double se_mean = 0.0;
    double se_variance = 0.0;
    double se_k3 = 0.0;
    std::vector<double> se_normalized_moments;

    double normalized_moment(int p) const { return normalized_moments.at(static_cast<std::size_t>(p - 1)); }
    double se_normalized_moment(int p) const { return se_normalized_moments.at(static_cast<std::size_t>(p - 1)); }
};

/// Requires at least 3 samples.
SampleSummary summarize(std::span<const double> samples, int p_max = 4);

/// Asymptotic Kolmogorov-Smirnov critical value sqrt(-ln(alpha/2)/2)/sqrt(n_eff).
double ks_critical_value(double alpha, double effective_n);

struct KsResult {
    double distance = 0.0;
    double critical_05 = 0.0;
    double critical_01 = 0.0;
    std::size_t n = 0;
    std::size_t m = 0;  ///< second sample size (0 for one-sample tests)

    bool rejects_at_05() const noexcept { return distance > critical_05; }
    bool rejects_at_01() const noexcept { return distance > critical_01; }
};

KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct BootstrapOptions {
    std::size_t resamples = 1000;
    std::uint64_t seed = 0x5eed'b007'57a7ULL;
};

/// Least-squares fit of log(response) against log(size).
struct ScalingFit {
    std::vector<double> sizes;
    std::vector<double> responses;
    std::vector<double> errors;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_ci_half_width = 0.0;  ///< 95% bootstrap percentile interval
};

/// Ordinary least squares; returns (slope, intercept).
std::pair<double, double> least_squares(std::span<const double> x, std::span<const double> y);

/// Parametric bootstrap: each resample perturbs log(response_i) by
/// (error_i / response_i) * Z. Zero errors give a zero-width interval.
ScalingFit loglog_fit(std::span<const double> sizes, std::span<const double> responses,
                      std::span<const double> errors, const BootstrapOptions& boot = {});

/// Replica-level bootstrap: responses are per-size replica means; each
/// resample redraws replicas with replacement within every size.
ScalingFit loglog_fit_replicas(std::span<const double> sizes, const std::vector<std::vector<double>>& replicas,
                               const BootstrapOptions& boot = {});

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_half_width = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t points = 0;
};

/// Log-log slope of an averaged density trace inside [t_lo, t_hi].
DecayFit decay_exponent(std::span<const double> times, std::span<const double> density, double t_lo, double t_hi);

/// Same, from per-replica traces, with the interval from resampling whole
/// replicas (which keeps the correlation between points of one trace).
DecayFit decay_exponent(std::span<const double> times, const std::vector<std::vector<double>>& replica_density,
                        double t_lo, double t_hi, const BootstrapOptions& boot = {});

} // namespace dsf
