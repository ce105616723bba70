#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsf/analytics.hpp"
#include "dsf/error.hpp"
#include "dsf/rng.hpp"
#include "dsf/stats.hpp"

#include <cmath>
#include <numeric>

using namespace dsf;

TEST_CASE("summary of a small sample") {
    const std::vector<double> x{1, 2, 3, 4, 10};
    const auto s = summarize(x, 3);
    CHECK(s.count == 5);
    CHECK(s.mean == doctest::Approx(4.0));
    CHECK(s.variance == doctest::Approx(12.5));
    // k3 = n^2/((n-1)(n-2)) * m3 with m3 the central third moment.
    double m3 = 0;
    for (double v : x) m3 += std::pow(v - 4.0, 3) / 5.0;
    CHECK(s.k3 == doctest::Approx(25.0 / 12.0 * m3));
    CHECK(s.normalized_moment(1) == doctest::Approx(1.0));
    CHECK(s.normalized_moment(2) == doctest::Approx((1 + 4 + 9 + 16 + 100) / 5.0 / 16.0));
    // The jackknife error of the mean is s / sqrt(n).
    CHECK(s.se_mean == doctest::Approx(std::sqrt(12.5 / 5.0)));
    CHECK_THROWS_AS(summarize(std::vector<double>{1, 2}), InvalidArgument);
}

TEST_CASE("k-statistics are unbiased") {
    // Exhaustive expectation over every sample of size n from a three-point law.
    const double values[] = {0.0, 1.0, 3.0};
    const double probs[] = {0.5, 0.3, 0.2};
    double mu = 0, m2 = 0, m3 = 0;
    for (int i = 0; i < 3; ++i) mu += probs[i] * values[i];
    for (int i = 0; i < 3; ++i) {
        m2 += probs[i] * std::pow(values[i] - mu, 2);
        m3 += probs[i] * std::pow(values[i] - mu, 3);
    }
    for (int n : {4, 5, 6}) {
        int total = 1;
        for (int i = 0; i < n; ++i) total *= 3;
        double e_var = 0, e_k3 = 0;
        for (int code = 0; code < total; ++code) {
            std::vector<double> x(n);
            double w = 1.0;
            int c = code;
            for (int i = 0; i < n; ++i, c /= 3) {
                x[i] = values[c % 3];
                w *= probs[c % 3];
            }
            const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
            if (std::all_of(x.begin(), x.end(), [&](double v) { return v == mean; })) continue;  // k2 = k3 = 0
            const auto s = summarize(x, 1);
            e_var += w * s.variance;
            e_k3 += w * s.k3;
        }
        CAPTURE(n);
        CHECK(e_var == doctest::Approx(m2).epsilon(1e-12));
        CHECK(e_k3 == doctest::Approx(m3).epsilon(1e-12));
    }
}

TEST_CASE("cumulants are shift invariant and stable at large offsets") {
    Rng rng(3);
    std::vector<double> x(1000), y(1000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.exponential(1.0);
        y[i] = x[i] + 1e6;
    }
    const auto a = summarize(x, 1), b = summarize(y, 1);
    CHECK(b.mean == doctest::Approx(a.mean + 1e6));
    CHECK(b.variance == doctest::Approx(a.variance).epsilon(1e-6));
    CHECK(b.k3 == doctest::Approx(a.k3).epsilon(1e-4));
}

TEST_CASE("jackknife errors are calibrated") {
    // Across many Exp(1) samples the spread of the estimates matches the
    // average reported error.
    const int reps = 400, n = 500;
    std::vector<double> means, vars, se_m, se_v;
    for (int r = 0; r < reps; ++r) {
        Rng rng = Rng::for_stream(99, r);
        std::vector<double> x(n);
        for (auto& v : x) v = rng.exponential(1.0);
        const auto s = summarize(x, 2);
        means.push_back(s.mean);
        vars.push_back(s.variance);
        se_m.push_back(s.se_mean);
        se_v.push_back(s.se_variance);
    }
    const auto sm = summarize(means, 1), sv = summarize(vars, 1);
    const double avg_se_m = std::accumulate(se_m.begin(), se_m.end(), 0.0) / reps;
    const double avg_se_v = std::accumulate(se_v.begin(), se_v.end(), 0.0) / reps;
    CHECK(std::sqrt(sm.variance) == doctest::Approx(avg_se_m).epsilon(0.12));
    CHECK(std::sqrt(sv.variance) == doctest::Approx(avg_se_v).epsilon(0.2));
}

TEST_CASE("KS critical values") {
    CHECK(ks_critical_value(0.05, 1.0) == doctest::Approx(1.3581).epsilon(1e-3));
    CHECK(ks_critical_value(0.01, 1.0) == doctest::Approx(1.6276).epsilon(1e-3));
    CHECK(ks_critical_value(0.05, 100.0) == doctest::Approx(0.13581).epsilon(1e-3));
    CHECK_THROWS_AS(ks_critical_value(0.0, 10.0), InvalidArgument);
}

TEST_CASE("KS distances on hand examples") {
    const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CHECK(ks_one_sample(std::vector<double>{0.5}, uniform).distance == doctest::Approx(0.5));
    CHECK(ks_one_sample(std::vector<double>{0.25, 0.75}, uniform).distance == doctest::Approx(0.25));
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6}, c{1, 2, 3};
    CHECK(ks_two_sample(a, b).distance == doctest::Approx(1.0));
    CHECK(ks_two_sample(a, c).distance == doctest::Approx(0.0));
    // Ties across samples are stepped together.
    CHECK(ks_two_sample(std::vector<double>{1, 1, 2}, std::vector<double>{1, 2, 2}).distance ==
          doctest::Approx(1.0 / 3.0));
    const auto r = ks_two_sample(a, std::vector<double>{1, 2, 3, 4, 5, 6});
    CHECK(r.n == 3);
    CHECK(r.m == 6);
    CHECK(r.critical_05 == doctest::Approx(ks_critical_value(0.05, 2.0)));
}

TEST_CASE("KS rejection rates are calibrated") {
    int one_05 = 0, two_05 = 0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        Rng rng = Rng::for_stream(7, r);
        std::vector<double> x(200), y(150);
        for (auto& v : x) v = rng.uniform();
        for (auto& v : y) v = rng.uniform();
        one_05 += ks_one_sample(x, [](double u) { return u; }).rejects_at_05();
        two_05 += ks_two_sample(x, y).rejects_at_05();
    }
    // Asymptotic critical values are slightly conservative at these sizes.
    CHECK(one_05 >= 6);
    CHECK(one_05 <= 36);
    CHECK(two_05 >= 6);
    CHECK(two_05 <= 36);
}

TEST_CASE("KS against the scaled halting law rejects a wrong law") {
    Rng rng(12);
    std::vector<double> x(10000);
    for (auto& v : x) v = rng.exponential(1.0);
    const auto r = ks_one_sample(x, scaled_halting_cdf);
    CHECK(r.rejects_at_01());
}

TEST_CASE("least squares and log-log fits") {
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto [slope, intercept] = least_squares(x, y);
    CHECK(slope == doctest::Approx(2.0));
    CHECK(intercept == doctest::Approx(1.0));

    const std::vector<double> sizes{16, 32, 64, 128};
    std::vector<double> resp;
    for (double n : sizes) resp.push_back(0.7 * std::pow(n, 4.0));
    const auto exact = loglog_fit(sizes, resp, {});
    CHECK(exact.slope == doctest::Approx(4.0));
    CHECK(exact.intercept == doctest::Approx(std::log(0.7)));
    CHECK(exact.slope_ci_half_width == 0.0);

    std::vector<double> err(resp.size());
    for (std::size_t i = 0; i < resp.size(); ++i) err[i] = 0.05 * resp[i];
    const auto noisy = loglog_fit(sizes, resp, err, {2000, 5});
    CHECK(noisy.slope == doctest::Approx(4.0));
    CHECK(noisy.slope_ci_half_width > 0.01);
    CHECK(noisy.slope_ci_half_width < 0.2);
    CHECK_THROWS_AS(loglog_fit(std::vector<double>{1, 2}, std::vector<double>{1, 2}, {}), InvalidArgument);
    CHECK_THROWS_AS(loglog_fit(sizes, std::vector<double>{1, 2, -1, 4}, {}), InvalidArgument);
}

TEST_CASE("replica bootstrap interval covers the true slope") {
    // Exponential replicas with mean N^2: slope 2.
    int covered = 0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) {
        Rng rng = Rng::for_stream(21, r);
        const std::vector<double> sizes{10, 20, 40, 80};
        std::vector<std::vector<double>> sets;
        for (double n : sizes) {
            std::vector<double> s(200);
            for (auto& v : s) v = rng.exponential(1.0 / (n * n));
            sets.push_back(s);
        }
        const auto fit = loglog_fit_replicas(sizes, sets, {400, static_cast<std::uint64_t>(r)});
        covered += std::abs(fit.slope - 2.0) <= fit.slope_ci_half_width;
    }
    CHECK(covered >= 32);
}

TEST_CASE("decay exponent") {
    std::vector<double> t, rho;
    for (double x = 1; x <= 1e4; x *= 1.5) {
        t.push_back(x);
        rho.push_back(0.3 * std::pow(x, -0.25));
    }
    const auto f = decay_exponent(t, rho, 10.0, t.back());
    CHECK(f.slope == doctest::Approx(-0.25));
    CHECK(f.points >= 2);
    CHECK(f.t_lo >= 10.0);
    CHECK_THROWS_AS(decay_exponent(t, rho, 2e4, 3e4), InvalidArgument);
    CHECK_THROWS_AS(decay_exponent(t, rho, 0.0, 10.0), InvalidArgument);

    const std::vector<std::vector<double>> reps{rho, rho, rho};
    const auto g = decay_exponent(t, reps, 10.0, t.back());
    CHECK(g.slope == doctest::Approx(-0.25));
    CHECK(g.ci_half_width == doctest::Approx(0.0).epsilon(1e-12));
}
