#pragma once

// Closed-form results for the halting process on complete graphs K_{N+1}
// (each mobile particle hops at rate 1/N to each of N neighbors, so the
// number m of empty vertices drops at rate m^2/N).

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace dsf {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kZeta2 = kPi * kPi / 6.0;

/// Branch point between the direct exponential series (tau >= 1) and the
/// Poisson-resummed series (tau < 1).
inline constexpr double kSeriesBranch = 1.0;

// Scaled halting-time law P(tau), tau = T/N, in the N -> infinity limit:
//   P(tau) = sum_{k in Z} (-1)^(k+1) k^2 exp(-k^2 tau) = d/dtau theta(tau),
//   theta(tau) = sum_{k in Z} (-1)^k exp(-k^2 tau)            (the CDF)
//              = sqrt(pi/tau) sum_{n in Z} exp(-pi^2 (n+1/2)^2 / tau).
double scaled_halting_pdf(double tau);
double scaled_halting_cdf(double tau);
// Individual branches, valid for every tau > 0 but accurate only on their
// own side of kSeriesBranch.
double scaled_halting_pdf_direct(double tau);
double scaled_halting_pdf_resummed(double tau);
double scaled_halting_cdf_direct(double tau);
double scaled_halting_cdf_resummed(double tau);

/// pi sqrt(sigma) / sinh(pi sqrt(sigma)), the Laplace transform of P(tau).
double laplace_Q(double sigma);

/// prod_{m=1}^{m0} (1 + s N / m^2)^{-1}: exact Laplace transform of the
/// halting time on K_{N+1} started from m0 empty vertices.
double laplace_Q_finite(double s, double N, std::uint64_t m0);

/// Exact normalized moment <tau^p>/<tau>^p of the scaled law.
struct RationalMoment {
    int p = 0;
    Rational value;

    std::string str() const;  ///< "numerator/denominator"
    double to_double() const;
};

inline constexpr int kMaxMomentOrder = 12;

/// From the expansion x/sinh(x) = sum_n (2 - 2^{2n}) B_{2n} x^{2n} / (2n)!
/// with x^2 = pi^2 sigma; valid for 1 <= p <= kMaxMomentOrder.
RationalMoment normalized_moment(int p);

/// Exact Bernoulli number B_n (B_1 = -1/2 convention).
Rational bernoulli_number(int n);

/// <tau^p> of the scaled law as a float: p! |c_p| pi^{2p}.
double scaled_moment(int p);

/// N * sum_{m=1}^{m0} m^{-2}.
double mean_halting_finite(double N, std::uint64_t m0);

inline constexpr std::uint64_t kHypoexpMaxM0 = 40;

/// Density of sum_{m=1}^{m0} Exp(m^2/N) by partial fractions. Throws
/// UnsupportedRange for m0 > kHypoexpMaxM0; use scaled_halting_pdf(T/N)/N there.
double hypoexp_halting_pdf(double N, std::uint64_t m0, double T);

/// Large-N cumulant trajectories of m/N: mean n(t), variance v(t) and third
/// cumulant w(t), so that <m> = N n, <m^2>_c = N v, <m^3>_c = N w. Solves
///   n' = -n^2,  v' + 4 n v = n^2,  w' + 6 n w = -n^2 + 6 v (n - v)
/// with v = n/3 + C n^4 and w = n/15 + a n^4 + b n^6 + c n^7.
class CumulantSolution {
public:
    CumulantSolution(double n0, double v0, double w0);

    double n(double t) const noexcept { return n0_ / (1.0 + n0_ * t); }
    double v(double t) const noexcept;
    double w(double t) const noexcept;

    double n0() const noexcept { return n0_; }
    double v0() const noexcept { return v0_; }
    double w0() const noexcept { return w0_; }
    double C() const noexcept { return C_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double c() const noexcept { return c_; }

private:
    double n0_, v0_, w0_;
    double C_, a_, b_, c_;
};

CumulantSolution cumulant_solution(double n0, double v0, double w0 = 0.0);

/// Initial cumulants (n0, v0, w0) of the empty-vertex count when V particles
/// are dropped uniformly on V vertices, scaled by N. Exact for finite V via
/// factorial moments E[(m)_k] = (V)_k (1 - k/V)^V.
struct InitialCumulants {
    double n0 = 0, v0 = 0, w0 = 0;
};
InitialCumulants occupancy_cumulants(std::uint64_t V, double N);

/// Gaussian approximation of P_m(t) with mean N n(t) and variance N v(t).
double gaussian_scaling_pdf(double m, double N, double t, const CumulantSolution& sol);

/// Law of the last-step duration: exponential with mean N, for every N.
double last_step_pdf(double N, double t);
/// <t^p>/<t>^p = p!.
double last_step_moment_ratio(int p);

/// (1 + sigma) Q(sigma): Laplace transform of the density R of the halting
/// time minus the last step, in scaled units.
double joint_laplace_R(double sigma);
/// R(tau) = P(tau) + P'(tau), two-branch evaluation like P.
double joint_R(double tau);
double joint_R_direct(double tau);
double joint_R_resummed(double tau);
/// <T t^p>/N^{p+1} = p! pi^2/6 + p p!.
double joint_moment(int p);
/// Scaled joint density of (T, t_last)/N: R(tau - tau') exp(-tau').
double scaled_joint_pdf(double tau, double tau_last);

/// Laplace transform of P_m(t) for the localized start m0 = N:
/// (N/m^2) prod_{l=m}^{N} (1 + s N / l^2)^{-1}.
double laplace_Qm_localized(double s, std::uint64_t m, std::uint64_t N);

} // namespace dsf
