#include "dsf/analytics.hpp"

#include "dsf/error.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <vector>

namespace dsf {

namespace {

constexpr double kTermCutoff = 1e-15;
constexpr int kMaxTerms = 200;
const double kSqrtPi = std::sqrt(kPi);

void require_positive_tau(double tau, const char* what) {
    if (!(tau > 0.0)) throw InvalidArgument(std::string(what) + " requires tau > 0");
}

// Resummed-branch helper: sum_{n>=0} f(a_n) exp(-a_n/tau), a_n = pi^2 (n+1/2)^2,
// where f carries the tau powers.
template <class F>
double resummed_sum(double tau, F&& weight) {
    // every term underflows below this point
    if (kPi * kPi * 0.25 / tau > 740.0) return 0.0;
    double sum = 0.0;
    for (int n = 0; n < kMaxTerms; ++n) {
        const double h = n + 0.5;
        const double a = kPi * kPi * h * h;
        const double term = weight(a) * std::exp(-a / tau);
        sum += term;
        if (std::abs(term) < kTermCutoff && n > 0) break;
    }
    return sum;
}

} // namespace

double scaled_halting_pdf_direct(double tau) {
    require_positive_tau(tau, "scaled_halting_pdf");
    double sum = 0.0;
    for (int k = 1; k <= kMaxTerms; ++k) {
        const double kk = static_cast<double>(k) * k;
        const double term = 2.0 * kk * std::exp(-kk * tau);
        sum += (k % 2 == 1) ? term : -term;
        if (term < kTermCutoff) break;
    }
    return sum;
}

double scaled_halting_pdf_resummed(double tau) {
    require_positive_tau(tau, "scaled_halting_pdf");
    const double log_tau = std::log(tau);
    // 2 sqrt(pi) tau^{-5/2} sum (a - tau/2) e^{-a/tau}
    return resummed_sum(tau, [&](double a) {
        return 2.0 * kSqrtPi * (a * std::exp(-2.5 * log_tau) - 0.5 * std::exp(-1.5 * log_tau));
    });
}

double scaled_halting_pdf(double tau) {
    require_positive_tau(tau, "scaled_halting_pdf");
    return tau >= kSeriesBranch ? scaled_halting_pdf_direct(tau) : scaled_halting_pdf_resummed(tau);
}

double scaled_halting_cdf_direct(double tau) {
    require_positive_tau(tau, "scaled_halting_cdf");
    double sum = 0.0;
    for (int k = 1; k <= kMaxTerms; ++k) {
        const double kk = static_cast<double>(k) * k;
        const double term = 2.0 * std::exp(-kk * tau);
        sum += (k % 2 == 1) ? -term : term;
        if (term < kTermCutoff) break;
    }
    return 1.0 + sum;
}

double scaled_halting_cdf_resummed(double tau) {
    require_positive_tau(tau, "scaled_halting_cdf");
    const double pref = 2.0 * std::sqrt(kPi / tau);
    return resummed_sum(tau, [&](double) { return pref; });
}

double scaled_halting_cdf(double tau) {
    require_positive_tau(tau, "scaled_halting_cdf");
    return tau >= kSeriesBranch ? scaled_halting_cdf_direct(tau) : scaled_halting_cdf_resummed(tau);
}

double laplace_Q(double sigma) {
    if (!(sigma >= 0.0)) throw InvalidArgument("laplace_Q requires sigma >= 0");
    const double x = kPi * std::sqrt(sigma);
    if (x < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + 7.0 * x2 * x2 / 360.0;
    }
    if (x > 700.0) return 2.0 * x * std::exp(-x);
    return x / std::sinh(x);
}

double laplace_Q_finite(double s, double N, std::uint64_t m0) {
    if (!(s >= 0.0)) throw InvalidArgument("laplace_Q_finite requires s >= 0");
    if (m0 < 1) throw InvalidArgument("laplace_Q_finite requires m0 >= 1");
    // log-space product; each factor is in (0, 1]
    double log_q = 0.0;
    for (std::uint64_t m = 1; m <= m0; ++m) {
        const double md = static_cast<double>(m);
        log_q -= std::log1p(s * N / (md * md));
    }
    return std::exp(log_q);
}

std::string RationalMoment::str() const {
    return boost::multiprecision::numerator(value).str() + "/" + boost::multiprecision::denominator(value).str();
}

double RationalMoment::to_double() const { return value.convert_to<double>(); }

Rational bernoulli_number(int n) {
    if (n < 0) throw InvalidArgument("bernoulli_number requires n >= 0");
    static std::mutex mutex;
    static std::vector<Rational> table{Rational(1)};
    std::lock_guard lock(mutex);
    // sum_{k=0}^{j} C(j+1, k) B_k = 0
    while (static_cast<int>(table.size()) <= n) {
        const int j = static_cast<int>(table.size());
        Rational acc = 0;
        boost::multiprecision::cpp_int binom = 1;  // C(j+1, k)
        for (int k = 0; k < j; ++k) {
            acc += Rational(binom) * table[k];
            binom = binom * (j + 1 - k) / (k + 1);
        }
        table.push_back(-acc / Rational(j + 1));
    }
    return table[n];
}

namespace {

// Coefficient of x^{2n} in x/sinh(x).
Rational xcsch_coefficient(int n) {
    boost::multiprecision::cpp_int factorial = 1;
    for (int i = 2; i <= 2 * n; ++i) factorial *= i;
    boost::multiprecision::cpp_int two_pow = 1;
    two_pow <<= 2 * n;
    return Rational(2 - two_pow) * bernoulli_number(2 * n) / Rational(factorial);
}

} // namespace

RationalMoment normalized_moment(int p) {
    if (p < 1 || p > kMaxMomentOrder)
        throw InvalidArgument("normalized_moment supports 1 <= p <= " + std::to_string(kMaxMomentOrder));
    // Q(sigma) = sum_n c_n pi^{2n} sigma^n; <tau^p> = p! (-1)^p c_p pi^{2p}
    // and <tau> = -c_1 pi^2 = pi^2/6, so the powers of pi cancel.
    boost::multiprecision::cpp_int factorial = 1;
    for (int i = 2; i <= p; ++i) factorial *= i;
    boost::multiprecision::cpp_int six_pow = 1;
    for (int i = 0; i < p; ++i) six_pow *= 6;
    Rational value = Rational(factorial) * xcsch_coefficient(p) * Rational(six_pow);
    if (p % 2 == 1) value = -value;
    return RationalMoment{p, value};
}

double scaled_moment(int p) {
    if (p < 0 || p > kMaxMomentOrder) throw InvalidArgument("scaled_moment order out of range");
    if (p == 0) return 1.0;
    return normalized_moment(p).to_double() * std::pow(kZeta2, p);
}

double mean_halting_finite(double N, std::uint64_t m0) {
    if (m0 < 1) throw InvalidArgument("mean_halting_finite requires m0 >= 1");
    long double sum = 0.0L;
    for (std::uint64_t m = m0; m >= 1; --m) {
        const long double md = static_cast<long double>(m);
        sum += 1.0L / (md * md);
    }
    return static_cast<double>(static_cast<long double>(N) * sum);
}

double hypoexp_halting_pdf(double N, std::uint64_t m0, double T) {
    if (m0 < 1) throw InvalidArgument("hypoexp_halting_pdf requires m0 >= 1");
    if (m0 > kHypoexpMaxM0)
        throw UnsupportedRange("hypoexp_halting_pdf: m0 = " + std::to_string(m0) + " exceeds " +
                               std::to_string(kHypoexpMaxM0) +
                               "; use the scaling form scaled_halting_pdf(T/N)/N for large m0");
    if (!(N > 0.0)) throw InvalidArgument("hypoexp_halting_pdf requires N > 0");
    if (!(T > 0.0)) throw InvalidArgument("hypoexp_halting_pdf requires T > 0");

    // sum_m w_m r_m e^{-r_m T}, w_m = prod_{j != m} j^2 / (j^2 - m^2), with
    // Neumaier compensation across the alternating terms.
    long double sum = 0.0L, comp = 0.0L;
    for (std::uint64_t m = 1; m <= m0; ++m) {
        const long double m2 = static_cast<long double>(m) * m;
        long double w = 1.0L;
        for (std::uint64_t j = 1; j <= m0; ++j) {
            if (j == m) continue;
            const long double j2 = static_cast<long double>(j) * j;
            w *= j2 / (j2 - m2);
        }
        const long double rate = m2 / static_cast<long double>(N);
        const long double term = w * rate * std::exp(-rate * static_cast<long double>(T));
        const long double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    const double out = static_cast<double>(sum + comp);
    return out > 0.0 ? out : 0.0;
}

CumulantSolution::CumulantSolution(double n0, double v0, double w0) : n0_(n0), v0_(v0), w0_(w0) {
    if (!(n0 > 0.0 && n0 <= 1.0)) throw InvalidArgument("cumulant_solution requires 0 < n0 <= 1");
    if (!(v0 >= 0.0)) throw InvalidArgument("cumulant_solution requires v0 >= 0");
    const double n2 = n0 * n0, n4 = n2 * n2, n6 = n4 * n2, n7 = n6 * n0;
    C_ = (v0 - n0 / 3.0) / n4;
    a_ = C_;
    c_ = 6.0 * C_ * C_;
    // n^6 solves the homogeneous equation; b absorbs the initial condition
    b_ = (w0 - n0 / 15.0 - a_ * n4 - c_ * n7) / n6;
}

double CumulantSolution::v(double t) const noexcept {
    if (t == 0.0) return v0_;
    const double x = n(t);
    const double x2 = x * x;
    return x / 3.0 + C_ * x2 * x2;
}

double CumulantSolution::w(double t) const noexcept {
    if (t == 0.0) return w0_;
    const double x = n(t);
    const double x2 = x * x, x4 = x2 * x2, x6 = x4 * x2;
    return x / 15.0 + a_ * x4 + b_ * x6 + c_ * x6 * x;
}

CumulantSolution cumulant_solution(double n0, double v0, double w0) { return CumulantSolution(n0, v0, w0); }

InitialCumulants occupancy_cumulants(std::uint64_t V, double N) {
    if (V < 2) throw InvalidArgument("occupancy_cumulants requires V >= 2");
    const long double v = static_cast<long double>(V);
    std::array<long double, 4> F{1.0L, 0, 0, 0};
    long double falling = 1.0L;
    for (int k = 1; k <= 3; ++k) {
        falling *= (v - (k - 1));
        const long double base = k < v ? std::exp(v * std::log1p(-static_cast<long double>(k) / v)) : 0.0L;
        F[k] = falling * base;
    }
    const long double m1 = F[1];
    const long double m2 = F[2] + F[1];
    const long double m3 = F[3] + 3.0L * F[2] + F[1];
    const long double var = m2 - m1 * m1;
    const long double k3 = m3 - 3.0L * m2 * m1 + 2.0L * m1 * m1 * m1;
    return {static_cast<double>(m1 / N), static_cast<double>(var / N), static_cast<double>(k3 / N)};
}

double gaussian_scaling_pdf(double m, double N, double t, const CumulantSolution& sol) {
    const double var = N * sol.v(t);
    if (!(var > 0.0)) throw InvalidArgument("gaussian_scaling_pdf requires N v(t) > 0");
    const double xi = (m - N * sol.n(t)) / std::sqrt(var);
    return std::exp(-0.5 * xi * xi) / std::sqrt(2.0 * kPi * var);
}

double last_step_pdf(double N, double t) {
    if (!(N > 0.0)) throw InvalidArgument("last_step_pdf requires N > 0");
    if (!(t > 0.0)) throw InvalidArgument("last_step_pdf requires t > 0");
    return std::exp(-t / N) / N;
}

double last_step_moment_ratio(int p) {
    if (p < 1 || p > 170) throw InvalidArgument("last_step_moment_ratio requires 1 <= p <= 170");
    return std::tgamma(p + 1.0);
}

double joint_laplace_R(double sigma) {
    if (!(sigma >= 0.0)) throw InvalidArgument("joint_laplace_R requires sigma >= 0");
    return (1.0 + sigma) * laplace_Q(sigma);
}

double joint_R_direct(double tau) {
    require_positive_tau(tau, "joint_R");
    // 2 sum_{k>=2} (-1)^{k+1} k^2 (1 - k^2) e^{-k^2 tau}; the k = 1 term vanishes
    double sum = 0.0;
    for (int k = 2; k <= kMaxTerms; ++k) {
        const double kk = static_cast<double>(k) * k;
        const double term = 2.0 * kk * (kk - 1.0) * std::exp(-kk * tau);
        sum += (k % 2 == 1) ? -term : term;
        if (term < kTermCutoff) break;
    }
    return sum;
}

double joint_R_resummed(double tau) {
    require_positive_tau(tau, "joint_R");
    const double log_tau = std::log(tau);
    // P + P', P' = 2 sqrt(pi) sum (a^2 tau^{-9/2} - 3 a tau^{-7/2} + 3/4 tau^{-5/2}) e^{-a/tau}
    const double p52 = std::exp(-2.5 * log_tau), p72 = std::exp(-3.5 * log_tau), p92 = std::exp(-4.5 * log_tau);
    const double p32 = std::exp(-1.5 * log_tau);
    return resummed_sum(tau, [&](double a) {
        const double pdf = a * p52 - 0.5 * p32;
        const double dpdf = a * a * p92 - 3.0 * a * p72 + 0.75 * p52;
        return 2.0 * kSqrtPi * (pdf + dpdf);
    });
}

double joint_R(double tau) {
    require_positive_tau(tau, "joint_R");
    return tau >= kSeriesBranch ? joint_R_direct(tau) : joint_R_resummed(tau);
}

double joint_moment(int p) {
    if (p < 0 || p > 170) throw InvalidArgument("joint_moment requires 0 <= p <= 170");
    const double fact = std::tgamma(p + 1.0);
    return fact * kZeta2 + p * fact;
}

double scaled_joint_pdf(double tau, double tau_last) {
    if (!(tau_last > 0.0 && tau_last < tau)) throw InvalidArgument("scaled_joint_pdf requires 0 < tau' < tau");
    return joint_R(tau - tau_last) * std::exp(-tau_last);
}

double laplace_Qm_localized(double s, std::uint64_t m, std::uint64_t N) {
    if (!(s >= 0.0)) throw InvalidArgument("laplace_Qm_localized requires s >= 0");
    if (m < 1 || m > N) throw InvalidArgument("laplace_Qm_localized requires 1 <= m <= N");
    const double n = static_cast<double>(N);
    double log_prod = 0.0;
    for (std::uint64_t l = m; l <= N; ++l) {
        const double ld = static_cast<double>(l);
        log_prod -= std::log1p(s * n / (ld * ld));
    }
    const double md = static_cast<double>(m);
    return n / (md * md) * std::exp(log_prod);
}

} // namespace dsf
