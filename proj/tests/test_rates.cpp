#include <doctest.h>

#include <cmath>
#include <vector>

#include "spamnet/errors.hpp"
#include "spamnet/rates.hpp"

using namespace spamnet;

namespace {

// Independent bisection for the finite-rank all-ones eigenvalue case:
// lhs(sigma) = sqrt(xi * min(1, sigma^2)) / sqrt(m).
double brute_epsilon_finite_rank(int xi, long m) {
    double lo = 1e-12, hi = 1e6;
    auto feasible = [&](double s) {
        return std::sqrt(xi * std::min(1.0, s * s) / m) <= s * s;
    };
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

TEST_CASE("epsilon_m closed forms") {
    KernelSpec xi5 = KernelSpec::finite_rank(std::vector<double>(5, 1.0),
                                             BasisId::PolyFactorial);
    const double e = epsilon_m(xi5, 1000);
    CHECK(e == doctest::Approx(std::sqrt(5.0 / 1000.0)).epsilon(0.01));
    CHECK(e == doctest::Approx(brute_epsilon_finite_rank(5, 1000)).epsilon(1e-6));

    KernelSpec xi1 = KernelSpec::finite_rank({1.0}, BasisId::PolyFactorial);
    CHECK(epsilon_m(xi1, 1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("epsilon_m finite-rank closed form across the grid") {
    for (int xi : {1, 2, 5, 17}) {
        KernelSpec spec = KernelSpec::finite_rank(std::vector<double>(xi, 1.0),
                                                  BasisId::PolyFactorial);
        for (long m : {50L, 200L, 1000L, 5000L}) {
            if (static_cast<double>(xi) / m > 1.0) continue;
            const double expect = std::sqrt(static_cast<double>(xi) / m);
            CHECK(epsilon_m(spec, m) == doctest::Approx(expect).epsilon(0.01));
        }
    }
}

TEST_CASE("epsilon_m eigen-decay log-log slope near -1/3") {
    KernelSpec dec = KernelSpec::eigen_decay(1.0, 256, BasisId::Cosine);
    const double e3 = epsilon_m(dec, 1000);
    const double e5 = epsilon_m(dec, 100000);
    const double slope = (std::log(e5) - std::log(e3)) /
                         (std::log(1e5) - std::log(1e3));
    CHECK(slope >= -0.36);
    CHECK(slope <= -0.30);
}

TEST_CASE("epsilon_m non-increasing in m") {
    for (const KernelSpec& spec :
         {KernelSpec::finite_rank({1.0, 0.5, 0.25}, BasisId::PolyFactorial),
          KernelSpec::eigen_decay(1.0, 128, BasisId::Cosine)}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 10; ++i) {
            const long m = 10L << i;
            const double e = epsilon_m(spec, m);
            CHECK(e <= prev + 1e-12);
            prev = e;
        }
    }
}

TEST_CASE("bisection minimality witness") {
    KernelSpec spec = KernelSpec::eigen_decay(1.0, 128, BasisId::Cosine);
    for (long m : {100L, 10000L}) {
        const double sigma = epsilon_m(spec, m);
        auto lhs = [&](double s) {
            return std::sqrt(spec.sum_min_eigs(s * s)) / std::sqrt(double(m));
        };
        CHECK(lhs(sigma * (1 + 1e-6)) <= sigma * (1 + 1e-6) * sigma * (1 + 1e-6));
        const double s99 = 0.99 * sigma;
        CHECK(lhs(s99) > s99 * s99);
    }
}

TEST_CASE("epsilon_tilde_m dominates epsilon_m") {
    std::vector<KernelSpec> kernels = {
        KernelSpec::finite_rank(std::vector<double>(5, 1.0), BasisId::PolyFactorial),
        KernelSpec::finite_rank({1.0, 0.25, 0.0625}, BasisId::PolyFactorial),
        KernelSpec::eigen_decay(1.0, 256, BasisId::Cosine),
        KernelSpec::eigen_decay(2.0, 256, BasisId::Cosine),
    };
    int checked = 0;
    for (const KernelSpec& spec : kernels) {
        for (long T : {100L, 10000L}) {
            for (long m : {10L, T / 10}) {
                for (long d : {8L, 64L}) {
                    auto [et, m0] = epsilon_tilde_m(spec, m, T, d);
                    CHECK(et >= epsilon_m(spec, m));
                    CHECK(m0 >= 1);
                    ++checked;
                    if (checked >= 20) break;
                }
            }
        }
    }
    CHECK(checked >= 20);
}

TEST_CASE("epsilon_tilde_m finite-rank order bound") {
    const int xi = 5;
    const long m = 100, T = 1000, d = 8;
    KernelSpec spec = KernelSpec::finite_rank(std::vector<double>(xi, 1.0),
                                              BasisId::PolyFactorial);
    auto [sigma, m0] = epsilon_tilde_m(spec, m, T, d);
    const double logterm = std::log(static_cast<double>(xi) * d * T);
    CHECK(sigma <= 10.0 * std::sqrt(static_cast<double>(xi) / m) * logterm * logterm);
    CHECK(m0 <= 2 * xi);
}

TEST_CASE("epsilon_tilde_m eigen-decay order bound") {
    const long m = 10000, T = 10000, d = 8;
    KernelSpec spec = KernelSpec::eigen_decay(1.0, 256, BasisId::Cosine);
    auto [sigma, m0] = epsilon_tilde_m(spec, m, T, d);
    const double logdT = std::log(static_cast<double>(d) * T);
    const double target = std::pow(logdT * logdT / std::sqrt(double(m)), 2.0 / 3.0);
    CHECK(sigma >= target / 10.0);
    CHECK(sigma <= target * 10.0);
    CHECK(m0 >= 1);
}

TEST_CASE("epsilon_tilde_m minimality witness") {
    const long m = 50, T = 2000, d = 8;
    const double logdT = std::log(static_cast<double>(d) * T);
    for (const KernelSpec& spec :
         {KernelSpec::finite_rank(std::vector<double>(5, 1.0), BasisId::PolyFactorial),
          KernelSpec::eigen_decay(1.0, 256, BasisId::Cosine)}) {
        auto [sigma, m0] = epsilon_tilde_m(spec, m, T, d);
        auto lhs = [&](double s, int M0) {
            const double s2 = s * s;
            return logdT * (3.0 * std::log(double(M0) * d * T) / std::sqrt(double(m)) *
                                std::sqrt(spec.head_min_eigs(M0, s2)) +
                            std::sqrt(double(T) / m) *
                                std::sqrt(spec.tail_min_eigs(M0, s2)));
        };
        const double s_hi = sigma * (1 + 1e-5);
        CHECK(lhs(s_hi, m0) <= s_hi * s_hi);
        // minimality: no grid M0 is feasible just below sigma
        const double s_lo = 0.99 * sigma;
        bool any_feasible = false;
        for (int M0 = 1; M0 <= 8192; M0 *= 2)
            if (lhs(s_lo, M0) <= s_lo * s_lo) any_feasible = true;
        if (spec.kind() != KernelKind::EigenDecay &&
            lhs(s_lo, spec.rank()) <= s_lo * s_lo)
            any_feasible = true;
        CHECK(!any_feasible);
    }
}

TEST_CASE("epsilon_tilde_m input validation") {
    KernelSpec spec = KernelSpec::finite_rank({1.0}, BasisId::PolyFactorial);
    CHECK_THROWS_AS(epsilon_tilde_m(spec, 200, 100, 8), ConfigError);
    CHECK_THROWS_AS(epsilon_tilde_m(spec, 0, 100, 8), ConfigError);
}

TEST_CASE("block counts for both mixing kinds") {
    MixingSpec beta{MixingKind::Beta, 2.0, 1.0};
    CHECK(block_count(beta, 10000) == 100);
    MixingSpec boundary{MixingKind::Beta, 2.0, 0.5};
    CHECK(block_count(boundary, 10000) == 1);
    CHECK(block_count(boundary, 77) == 1);
    MixingSpec phi{MixingKind::Phi, 2.0, 1.0};
    CHECK(block_count(phi, 10000) == 100);
}

TEST_CASE("phi mixing above r=2 falls back to the beta formula") {
    MixingSpec phi{MixingKind::Phi, 4.0, 1.0};
    MixingSpec beta{MixingKind::Beta, 4.0, 1.0};
    for (long T : {100L, 1000L, 100000L})
        CHECK(block_count(phi, T) == block_count(beta, T));
}

TEST_CASE("block_count monotone in T and r") {
    long prev = 0;
    for (long T : {10L, 100L, 1000L, 10000L, 100000L}) {
        MixingSpec mix{MixingKind::Beta, 3.0, 1.0};
        const long m = block_count(mix, T);
        CHECK(m >= prev);
        prev = m;
    }
    prev = 0;
    for (double r : {1.0, 1.5, 2.0, 4.0, 8.0}) {
        MixingSpec mix{MixingKind::Beta, r, 1.0};
        const long m = block_count(mix, 10000);
        CHECK(m >= prev);
        prev = m;
    }
    prev = 0;
    for (double r : {0.781, 1.0, 1.5, 2.0}) {
        MixingSpec mix{MixingKind::Phi, r, 1.0};
        const long m = block_count(mix, 10000);
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("mixing preconditions produce named errors") {
    MixingSpec bad_beta{MixingKind::Beta, 1.0, 0.5};  // r < 1/c0
    CHECK_THROWS_AS(block_count(bad_beta, 100), ConfigError);
    MixingSpec bad_phi{MixingKind::Phi, 0.5, 1.0};
    CHECK_THROWS_AS(block_count(bad_phi, 100), ConfigError);
    try {
        block_count(bad_beta, 100);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("1/c0") != std::string::npos);
    }
}

TEST_CASE("tuning composition identities") {
    KernelSpec spec = KernelSpec::finite_rank(std::vector<double>(3, 1.0),
                                              BasisId::PolyFactorial);
    // m = T: sqrt(m/T) = 1
    RatesReport rep = tuning_with_m(spec, 500, 500, 8);
    CHECK(rep.lambda_T ==
          doctest::Approx(8.0 * std::sqrt(2.0) * rep.gamma_tilde_m).epsilon(1e-12));
    // lambda_H / lambda_T = gamma_tilde always
    for (long m : {5L, 50L, 400L}) {
        RatesReport r2 = tuning_with_m(spec, m, 500, 8);
        CHECK(r2.lambda_H / r2.lambda_T ==
              doctest::Approx(r2.gamma_tilde_m).epsilon(1e-12));
        CHECK(r2.gamma_tilde_m ==
              doctest::Approx(std::max(r2.gamma_m, r2.epsilon_tilde_m)));
        CHECK(r2.epsilon_m <= r2.epsilon_tilde_m);
    }
}

TEST_CASE("tuning pipeline regression lock") {
    KernelSpec spec = KernelSpec::finite_rank(std::vector<double>(5, 1.0),
                                              BasisId::PolyFactorial);
    MixingSpec mix{MixingKind::Beta, 2.0, 1.0};
    RatesReport rep = tuning(spec, mix, 10000, 8);
    CHECK(rep.m == 100);
    CHECK(rep.epsilon_m == doctest::Approx(std::sqrt(5.0 / 100.0)).epsilon(0.01));
    CHECK(rep.M0 == 5);
    // frozen after the first run of this exact pipeline
    CHECK(rep.lambda_T == doctest::Approx(11.182342831253996).epsilon(1e-9));
    CHECK(rep.lambda_H == doctest::Approx(110.52502475816708).epsilon(1e-9));
}

TEST_CASE("delta_mj formula") {
    // delta^2 = c4 (s log d / m + s eps^2)
    CHECK(delta_mj(1, 3, 1, 0.0) == doctest::Approx(std::sqrt(std::log(3.0))));
    CHECK(delta_mj(1, 1, 1, 0.0) == doctest::Approx(0.0));
    for (int s : {1, 2, 7}) {
        const double one = delta_mj(s, 50, 20, 0.3, 2.0);
        const double four = delta_mj(4 * s, 50, 20, 0.3, 2.0);
        CHECK(four == doctest::Approx(2.0 * one).epsilon(1e-12));
        const double direct =
            std::sqrt(2.0 * (s * std::log(50.0) / 20.0 + s * 0.09));
        CHECK(one == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("error_bound substitutions") {
    // theta=1, s=1, m=T, eps~=0: C log(dT)/T
    const long T = 1000, d = 8;
    CHECK(error_bound(1, 1.0, d, T, T, 0.0, 2.5) ==
          doctest::Approx(2.5 * std::log(double(d) * T) / T).epsilon(1e-12));
    const double b1 = error_bound(3, 0.5, d, 100, T, 0.2);
    CHECK(error_bound(6, 0.5, d, 100, T, 0.2) == doctest::Approx(2.0 * b1));
    CHECK(error_bound(3, 0.25, d, 100, T, 0.2) == doctest::Approx(4.0 * b1));
}
