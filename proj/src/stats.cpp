#include "dsf/stats.hpp"

#include "dsf/error.hpp"
#include "dsf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dsf {

namespace {

struct CentralStats {
    double mean, variance, k3;
};

// Cumulant estimators from power sums of d = x - shift over n points.
CentralStats from_shifted_sums(double shift, double d1, double d2, double d3, double n) {
    const double dbar = d1 / n;
    const double m2 = d2 - n * dbar * dbar;
    const double m3 = d3 - 3.0 * dbar * d2 + 2.0 * n * dbar * dbar * dbar;
    return {shift + dbar, m2 / (n - 1.0), n * m3 / ((n - 1.0) * (n - 2.0))};
}

double jackknife_se(std::span<const double> leave_one_out) {
    const double n = static_cast<double>(leave_one_out.size());
    const double mean = std::accumulate(leave_one_out.begin(), leave_one_out.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : leave_one_out) ss += (x - mean) * (x - mean);
    return std::sqrt((n - 1.0) / n * ss);
}

double percentile_half_width(std::vector<double> values) {
    if (values.size() < 2) return 0.0;
    std::sort(values.begin(), values.end());
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return 0.5 * (at(0.975) - at(0.025));
}

} // namespace

SampleSummary summarize(std::span<const double> x, int p_max) {
    if (x.size() < 3) throw InvalidArgument("summarize requires at least 3 samples");
    if (p_max < 1) throw InvalidArgument("summarize requires p_max >= 1");
    const std::size_t n = x.size();
    const double nd = static_cast<double>(n);
    const auto pm = static_cast<std::size_t>(p_max);

    const double shift = std::accumulate(x.begin(), x.end(), 0.0) / nd;
    double d1 = 0, d2 = 0, d3 = 0;
    std::vector<double> raw(pm + 1, 0.0);  // raw[p] = sum x^p
    for (double xi : x) {
        const double d = xi - shift;
        d1 += d;
        d2 += d * d;
        d3 += d * d * d;
        double pw = 1.0;
        for (std::size_t p = 1; p <= pm; ++p) raw[p] += (pw *= xi);
    }

    SampleSummary s;
    s.count = n;
    const auto full = from_shifted_sums(shift, d1, d2, d3, nd);
    s.mean = full.mean;
    s.variance = full.variance;
    s.k3 = full.k3;
    s.normalized_moments.resize(pm);
    for (std::size_t p = 1; p <= pm; ++p)
        s.normalized_moments[p - 1] = (raw[p] / nd) / std::pow(raw[1] / nd, static_cast<double>(p));

    // Leave-one-out replicates from the same power sums.
    std::vector<double> loo_mean(n), loo_var(n), loo_k3(n);
    std::vector<std::vector<double>> loo_mom(pm, std::vector<double>(n));
    const bool third_ok = n >= 4;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x[i], d = xi - shift;
        const double m = nd - 1.0;
        const double e1 = d1 - d, e2 = d2 - d * d, e3 = d3 - d * d * d;
        const double dbar = e1 / m;
        loo_mean[i] = shift + dbar;
        loo_var[i] = (e2 - m * dbar * dbar) / (m - 1.0);
        if (third_ok) loo_k3[i] = from_shifted_sums(shift, e1, e2, e3, m).k3;
        const double mean_x = (raw[1] - xi) / m;
        double pw = 1.0;
        for (std::size_t p = 1; p <= pm; ++p) {
            pw *= xi;
            loo_mom[p - 1][i] = ((raw[p] - pw) / m) / std::pow(mean_x, static_cast<double>(p));
        }
    }
    s.se_mean = jackknife_se(loo_mean);
    s.se_variance = jackknife_se(loo_var);
    s.se_k3 = third_ok ? jackknife_se(loo_k3) : 0.0;
    s.se_normalized_moments.resize(pm);
    for (std::size_t p = 0; p < pm; ++p) s.se_normalized_moments[p] = jackknife_se(loo_mom[p]);
    return s;
}

double ks_critical_value(double alpha, double effective_n) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("ks_critical_value requires 0 < alpha < 1");
    if (!(effective_n > 0.0)) throw InvalidArgument("ks_critical_value requires a positive sample size");
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(effective_n);
}

KsResult ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw InvalidArgument("ks_one_sample requires a nonempty sample");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    KsResult out;
    out.distance = d;
    out.n = xs.size();
    out.critical_05 = ks_critical_value(0.05, n);
    out.critical_01 = ks_critical_value(0.01, n);
    return out;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample requires nonempty samples");
    std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    const double na = static_cast<double>(xa.size()), nb = static_cast<double>(xb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < xa.size() && j < xb.size()) {
        const double v = std::min(xa[i], xb[j]);
        while (i < xa.size() && xa[i] == v) ++i;
        while (j < xb.size() && xb[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult out;
    out.distance = d;
    out.n = xa.size();
    out.m = xb.size();
    const double neff = na * nb / (na + nb);
    out.critical_05 = ks_critical_value(0.05, neff);
    out.critical_01 = ks_critical_value(0.01, neff);
    return out;
}

std::pair<double, double> least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("least_squares requires >= 2 paired points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("least_squares requires distinct abscissae");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

namespace {

void check_loglog_inputs(std::span<const double> sizes, std::span<const double> responses) {
    if (sizes.size() < 3) throw InvalidArgument("loglog_fit requires at least 3 sizes");
    if (sizes.size() != responses.size()) throw InvalidArgument("loglog_fit: sizes and responses differ in length");
    for (std::size_t i = 0; i < sizes.size(); ++i)
        if (!(sizes[i] > 0.0) || !(responses[i] > 0.0))
            throw InvalidArgument("loglog_fit requires positive sizes and responses");
}

std::vector<double> logs(std::span<const double> v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::log(x); });
    return out;
}

} // namespace

ScalingFit loglog_fit(std::span<const double> sizes, std::span<const double> responses,
                      std::span<const double> errors, const BootstrapOptions& boot) {
    check_loglog_inputs(sizes, responses);
    if (!errors.empty() && errors.size() != sizes.size())
        throw InvalidArgument("loglog_fit: errors must be empty or match sizes");
    ScalingFit fit;
    fit.sizes.assign(sizes.begin(), sizes.end());
    fit.responses.assign(responses.begin(), responses.end());
    fit.errors.assign(errors.begin(), errors.end());
    fit.errors.resize(sizes.size(), 0.0);

    const auto lx = logs(sizes), ly = logs(responses);
    std::tie(fit.slope, fit.intercept) = least_squares(lx, ly);

    const bool any_error = std::any_of(fit.errors.begin(), fit.errors.end(), [](double e) { return e > 0.0; });
    if (any_error && boot.resamples > 1) {
        Rng rng(boot.seed);
        std::vector<double> slopes(boot.resamples), y(ly.size());
        for (auto& s : slopes) {
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = ly[i] + fit.errors[i] / responses[i] * rng.normal();
            s = least_squares(lx, y).first;
        }
        fit.slope_ci_half_width = percentile_half_width(std::move(slopes));
    }
    return fit;
}

ScalingFit loglog_fit_replicas(std::span<const double> sizes, const std::vector<std::vector<double>>& replicas,
                               const BootstrapOptions& boot) {
    if (replicas.size() != sizes.size()) throw InvalidArgument("loglog_fit_replicas: one replica set per size");
    std::vector<double> means(sizes.size()), errors(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const auto& r = replicas[i];
        if (r.empty()) throw InvalidArgument("loglog_fit_replicas: empty replica set");
        const double n = static_cast<double>(r.size());
        means[i] = std::accumulate(r.begin(), r.end(), 0.0) / n;
        double ss = 0;
        for (double x : r) ss += (x - means[i]) * (x - means[i]);
        errors[i] = r.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    }
    check_loglog_inputs(sizes, means);

    ScalingFit fit;
    fit.sizes.assign(sizes.begin(), sizes.end());
    fit.responses = means;
    fit.errors = errors;
    const auto lx = logs(sizes);
    std::tie(fit.slope, fit.intercept) = least_squares(lx, logs(means));

    if (boot.resamples > 1) {
        Rng rng(boot.seed);
        std::vector<double> slopes;
        slopes.reserve(boot.resamples);
        std::vector<double> ly(sizes.size());
        for (std::size_t b = 0; b < boot.resamples; ++b) {
            bool ok = true;
            for (std::size_t i = 0; i < sizes.size(); ++i) {
                const auto& r = replicas[i];
                double acc = 0;
                for (std::size_t k = 0; k < r.size(); ++k) acc += r[rng.below(r.size())];
                const double mean = acc / static_cast<double>(r.size());
                ok = ok && mean > 0.0;
                ly[i] = ok ? std::log(mean) : 0.0;
            }
            if (ok) slopes.push_back(least_squares(lx, ly).first);
        }
        fit.slope_ci_half_width = percentile_half_width(std::move(slopes));
    }
    return fit;
}

namespace {

std::pair<std::size_t, std::size_t> window_range(std::span<const double> times, double t_lo, double t_hi) {
    if (times.empty()) throw InvalidArgument("decay_exponent requires a nonempty time grid");
    if (!(t_lo > 0.0) || !(t_hi > t_lo)) throw InvalidArgument("decay_exponent requires 0 < t_lo < t_hi");
    if (t_lo < times.front() || t_hi > times.back())
        throw InvalidArgument("decay_exponent window lies outside the time grid");
    const auto first = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t_lo) - times.begin());
    const auto last = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t_hi) - times.begin());
    if (last < first + 2) throw InvalidArgument("decay_exponent window holds fewer than 2 grid points");
    return {first, last};
}

std::pair<double, double> window_fit(std::span<const double> times, std::span<const double> density,
                                     std::size_t first, std::size_t last) {
    std::vector<double> lx, ly;
    for (std::size_t i = first; i < last; ++i) {
        if (!(density[i] > 0.0)) throw InvalidArgument("decay_exponent requires positive densities in the window");
        lx.push_back(std::log(times[i]));
        ly.push_back(std::log(density[i]));
    }
    return least_squares(lx, ly);
}

} // namespace

DecayFit decay_exponent(std::span<const double> times, std::span<const double> density, double t_lo, double t_hi) {
    if (times.size() != density.size()) throw InvalidArgument("decay_exponent: times and density differ in length");
    const auto [first, last] = window_range(times, t_lo, t_hi);
    DecayFit fit;
    std::tie(fit.slope, fit.intercept) = window_fit(times, density, first, last);
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.points = last - first;
    return fit;
}

DecayFit decay_exponent(std::span<const double> times, const std::vector<std::vector<double>>& replica_density,
                        double t_lo, double t_hi, const BootstrapOptions& boot) {
    if (replica_density.empty()) throw InvalidArgument("decay_exponent requires at least one replica");
    const std::size_t R = replica_density.size();
    for (const auto& r : replica_density)
        if (r.size() != times.size()) throw InvalidArgument("decay_exponent: replica trace length mismatch");

    auto average = [&](auto&& pick) {
        std::vector<double> mean(times.size(), 0.0);
        for (std::size_t k = 0; k < R; ++k) {
            const auto& r = replica_density[pick(k)];
            for (std::size_t i = 0; i < times.size(); ++i) mean[i] += r[i];
        }
        for (double& x : mean) x /= static_cast<double>(R);
        return mean;
    };

    DecayFit fit = decay_exponent(times, average([](std::size_t k) { return k; }), t_lo, t_hi);
    if (R > 1 && boot.resamples > 1) {
        const auto [first, last] = window_range(times, t_lo, t_hi);
        Rng rng(boot.seed);
        std::vector<double> slopes;
        slopes.reserve(boot.resamples);
        for (std::size_t b = 0; b < boot.resamples; ++b) {
            const auto mean = average([&](std::size_t) { return rng.below(R); });
            bool positive = true;
            for (std::size_t i = first; i < last; ++i) positive = positive && mean[i] > 0.0;
            if (positive) slopes.push_back(window_fit(times, mean, first, last).first);
        }
        fit.ci_half_width = percentile_half_width(std::move(slopes));
    }
    return fit;
}

} // namespace dsf
