#include "spamnet/rates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spamnet/errors.hpp"

namespace spamnet {

void MixingSpec::validate() const {
    if (!(r > 0.0)) throw ConfigError("mixing decay exponent r must be positive");
    if (kind == MixingKind::Beta) {
        if (!(c0 > 0.0 && c0 <= 1.0))
            throw ConfigError("beta mixing requires c0 in (0, 1]");
        if (r * c0 < 1.0 - 1e-12) {
            std::ostringstream os;
            os << "beta mixing requires r >= 1/c0 (r=" << r << ", 1/c0=" << 1.0 / c0
               << ")";
            throw ConfigError(os.str());
        }
    } else {
        if (r < 0.781) {
            std::ostringstream os;
            os << "phi mixing requires r >= 0.781 (r=" << r << ")";
            throw ConfigError(os.str());
        }
        if (r > 2.0 && !(c0 > 0.0 && c0 <= 1.0))
            throw ConfigError("phi mixing with r > 2 falls back to the beta "
                              "formula and needs c0 in (0, 1]");
    }
}

namespace {

// Generic minimal-sigma bisection. ratio(sigma) = lhs(sigma)/sigma^2 must be
// non-increasing; returns the root of ratio == 1 to relative tolerance.
template <typename Ratio>
double bisect_min_sigma(Ratio ratio, double hint_hi, double rel_tol) {
    double hi = std::max(hint_hi, 1e-12);
    for (int i = 0; i < 200 && ratio(hi) > 1.0; ++i) hi *= 2.0;
    if (ratio(hi) > 1.0) throw NumericError("rate bisection: no feasible sigma");
    double lo = hi;
    for (int i = 0; i < 400 && ratio(lo) <= 1.0; ++i) lo *= 0.5;
    if (ratio(lo) <= 1.0) return lo;  // feasible all the way down
    while ((hi - lo) > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (ratio(mid) <= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

std::vector<int> m0_grid(const KernelSpec& spec) {
    const long cap = std::max<long>(4096, 2L * spec.rank());
    std::vector<int> grid;
    for (long v = 1; v <= cap; v *= 2) grid.push_back(static_cast<int>(v));
    if (spec.kind() != KernelKind::EigenDecay) grid.push_back(spec.rank());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

}  // namespace

double epsilon_m(const KernelSpec& spec, long m) {
    if (m < 1) throw ConfigError("epsilon_m: m must be >= 1");
    const double sqm = std::sqrt(static_cast<double>(m));
    auto ratio = [&](double sigma) {
        const double s2 = sigma * sigma;
        return std::sqrt(spec.sum_min_eigs(s2)) / (sqm * s2);
    };
    const double hint = std::sqrt(spec.eigenvalues()[0]) *
                        std::pow(static_cast<double>(m), 0.25);
    return bisect_min_sigma(ratio, hint, 1e-8);
}

std::pair<double, int> epsilon_tilde_m(const KernelSpec& spec, long m, long T,
                                       long d) {
    if (m < 1) throw ConfigError("epsilon_tilde_m: m must be >= 1");
    if (m > T) throw ConfigError("epsilon_tilde_m: m must not exceed T");
    if (d < 1) throw ConfigError("epsilon_tilde_m: d must be >= 1");
    const double logdT = std::log(static_cast<double>(d) * static_cast<double>(T));
    const double sqm = std::sqrt(static_cast<double>(m));
    const double sqTm = std::sqrt(static_cast<double>(T) / static_cast<double>(m));
    const std::vector<int> grid = m0_grid(spec);

    auto lhs_at = [&](double sigma, int m0) {
        const double s2 = sigma * sigma;
        const double head = spec.head_min_eigs(m0, s2);
        const double tail = spec.tail_min_eigs(m0, s2);
        const double logM0dT = std::log(static_cast<double>(m0) *
                                        static_cast<double>(d) *
                                        static_cast<double>(T));
        return logdT * (3.0 * logM0dT / sqm * std::sqrt(head) + sqTm * std::sqrt(tail));
    };
    auto best_m0 = [&](double sigma) {
        double best = std::numeric_limits<double>::infinity();
        int arg = grid.front();
        for (int m0 : grid) {
            const double v = lhs_at(sigma, m0);
            if (v < best) {
                best = v;
                arg = m0;
            }
        }
        return std::make_pair(best, arg);
    };
    auto ratio = [&](double sigma) {
        return best_m0(sigma).first / (sigma * sigma);
    };

    const double hint = std::sqrt(spec.eigenvalues()[0]) *
                        std::pow(static_cast<double>(m), 0.25) *
                        std::max(1.0, logdT * logdT);
    const double sigma = bisect_min_sigma(ratio, hint, 1e-6);
    return {sigma, best_m0(sigma).second};
}

long block_count(const MixingSpec& mix, long T) {
    mix.validate();
    if (T < 1) throw ConfigError("block_count: T must be >= 1");
    double exponent;
    if (mix.kind == MixingKind::Beta || mix.r > 2.0) {
        exponent = (mix.c0 * mix.r - 1.0) / (mix.c0 * mix.r);
    } else {
        exponent = mix.r / (mix.r + 2.0);
    }
    const double raw = std::pow(static_cast<double>(T), exponent);
    long m = static_cast<long>(std::floor(raw + 1e-12));
    return std::clamp<long>(m, 1, T);
}

RatesReport tuning_with_m(const KernelSpec& spec, long m, long T, long d,
                          double c1) {
    if (m < 1 || m > T) throw ConfigError("tuning: m must lie in [1, T]");
    RatesReport rep;
    rep.m = static_cast<int>(m);
    rep.epsilon_m = epsilon_m(spec, m);
    auto [et, m0] = epsilon_tilde_m(spec, m, T, d);
    rep.epsilon_tilde_m = et;
    rep.M0 = m0;
    const double logdT = std::log(static_cast<double>(d) * static_cast<double>(T));
    rep.gamma_m = c1 * std::max(rep.epsilon_m,
                                std::sqrt(logdT / static_cast<double>(m)));
    rep.gamma_tilde_m = std::max(rep.gamma_m, rep.epsilon_tilde_m);
    const double root_mT =
        std::sqrt(static_cast<double>(m) / static_cast<double>(T));
    rep.lambda_T = 8.0 * std::sqrt(2.0) * root_mT * rep.gamma_tilde_m;
    rep.lambda_H = 8.0 * std::sqrt(2.0) * root_mT * rep.gamma_tilde_m * rep.gamma_tilde_m;
    return rep;
}

RatesReport tuning(const KernelSpec& spec, const MixingSpec& mix, long T, long d,
                   double c1) {
    return tuning_with_m(spec, block_count(mix, T), T, d, c1);
}

double delta_mj(int s_j, long d, long m, double eps_m, double c4) {
    if (s_j < 1 || d < 1 || m < 1) throw ConfigError("delta_mj: arguments must be positive");
    const double sj = static_cast<double>(s_j);
    return std::sqrt(c4 * (sj * std::log(static_cast<double>(d)) /
                               static_cast<double>(m) +
                           sj * eps_m * eps_m));
}

double error_bound(int s_j, double theta, long d, long m, long T,
                   double eps_tilde, double C) {
    if (m < 1 || m > T) throw ConfigError("error_bound: m must lie in [1, T]");
    if (!(theta > 0.0 && theta <= 1.0))
        throw ConfigError("error_bound: theta must lie in (0, 1]");
    const double logdT = std::log(static_cast<double>(d) * static_cast<double>(T));
    const double md = static_cast<double>(m);
    const double Td = static_cast<double>(T);
    return C * (static_cast<double>(s_j) / (theta * theta)) *
           (logdT / std::sqrt(md * Td) + std::sqrt(md / Td) * eps_tilde * eps_tilde);
}

}  // namespace spamnet
