#pragma once

#include <vector>

#include "spamnet/kernels.hpp"

namespace spamnet {

enum class MixingKind { Beta, Phi };

/// Algebraic mixing description: coefficient <= const / ell^r.
/// For beta mixing, c0 in (0, 1] splits the block construction and the
/// block count is T^((c0*r-1)/(c0*r)), valid when r >= 1/c0.
/// For phi mixing with 0.781 <= r <= 2 the count is T^(r/(r+2)); for
/// r > 2 the beta formula applies with the stored c0.
struct MixingSpec {
    MixingKind kind = MixingKind::Beta;
    double r = 2.0;
    double c0 = 1.0;

    void validate() const;
};

struct RatesReport {
    int m = 1;
    double epsilon_m = 0.0;
    double epsilon_tilde_m = 0.0;
    int M0 = 1;
    double gamma_m = 0.0;
    double gamma_tilde_m = 0.0;
    double lambda_T = 0.0;
    double lambda_H = 0.0;
    std::vector<double> delta_mj;
    std::vector<double> bound;
};

/// Critical univariate rate: minimal sigma with
/// (1/sqrt(m)) * sqrt(sum_i min(mu_i, sigma^2)) <= sigma^2.
double epsilon_m(const KernelSpec& spec, long m);

/// Modified complexity rate: minimal sigma such that some M0 >= 1 gives
/// log(dT) * { 3 log(M0 dT)/sqrt(m) * sqrt(head) + sqrt(T/m) * sqrt(tail) } <= sigma^2.
/// Returns (sigma, argmin M0); M0 searched on a geometric grid
/// {1,2,4,...,cap} plus the exact rank for finite lists, cap = max(4096, 2*rank).
std::pair<double, int> epsilon_tilde_m(const KernelSpec& spec, long m, long T, long d);

/// Mixing-determined block count, floored and clamped to [1, T].
long block_count(const MixingSpec& mix, long T);

/// Composes the above into default tuning parameters:
/// gamma_m = c1 * max(eps_m, sqrt(log(dT)/m)), gamma~ = max(gamma, eps~),
/// lambda_T = 8*sqrt(2)*sqrt(m/T)*gamma~, lambda_H = 8*sqrt(2)*sqrt(m/T)*gamma~^2.
RatesReport tuning_with_m(const KernelSpec& spec, long m, long T, long d,
                          double c1 = 1.0);
RatesReport tuning(const KernelSpec& spec, const MixingSpec& mix, long T, long d,
                   double c1 = 1.0);

/// delta_{m,j} = sqrt(c4 * (s_j log d / m + s_j eps_m^2)).
double delta_mj(int s_j, long d, long m, double eps_m, double c4 = 1.0);

/// Mean-squared-error bound C * (s_j/theta^2) * (log(dT)/sqrt(mT) + sqrt(m/T)*eps~^2).
double error_bound(int s_j, double theta, long d, long m, long T,
                   double eps_tilde, double C = 1.0);

}  // namespace spamnet
