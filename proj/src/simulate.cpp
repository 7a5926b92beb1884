#include "spamnet/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "spamnet/errors.hpp"
#include "spamnet/kernels.hpp"

namespace spamnet {

void SimSpec::validate() const {
    if (family == FamilyKind::Bernoulli)
        throw ConfigError("no bernoulli simulation recipe");
    if (d < 1 || T < 1 || r < 1) throw ConfigError("d, T, r must be positive");
    if (s < 0 || s >= d) throw ConfigError("sparsity s must satisfy 0 <= s < d");
    if (burn_in < 0) throw ConfigError("burn_in must be nonnegative");
}

namespace {

double poly_factorial(int i, double x) {
    double term = 1.0;
    for (int j = 1; j <= i; ++j) term *= x / j;
    return term;
}

// s distinct column indices per row; exclude_diag keeps the diagonal free.
std::vector<int> pick_columns(int d, int s, int row, bool exclude_diag,
                              std::mt19937_64& rng) {
    std::vector<int> pool;
    pool.reserve(d);
    for (int k = 0; k < d; ++k)
        if (!(exclude_diag && k == row)) pool.push_back(k);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(s);
    std::sort(pool.begin(), pool.end());
    return pool;
}

GroundTruth make_truth(const SimSpec& spec, std::mt19937_64& rng) {
    GroundTruth gt;
    gt.A_star = Eigen::MatrixXd::Zero(spec.d, spec.d);
    gt.b.assign(spec.d, Eigen::MatrixXd::Zero(spec.d, spec.r));
    gt.supports.resize(spec.d);

    std::uniform_real_distribution<double> unif(-0.5 / spec.s, 0.5 / spec.s);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int j = 0; j < spec.d; ++j) {
        if (spec.family == FamilyKind::Gaussian) {
            gt.A_star(j, j) = 1.0;
            gt.supports[j].insert(j);
            for (int k : pick_columns(spec.d, spec.s, j, /*exclude_diag=*/true, rng)) {
                gt.A_star(j, k) = unif(rng);
                gt.supports[j].insert(k);
            }
        } else {
            for (int k : pick_columns(spec.d, spec.s, j, /*exclude_diag=*/false, rng)) {
                gt.A_star(j, k) = -2.0;
                gt.supports[j].insert(k);
            }
        }
        for (int k = 0; k < spec.d; ++k) {
            // One standardized vector per pair, shared across polynomial
            // orders: normalize over max(r, 3) components and keep the
            // first r. Keeps |b_1| < 1 so the linear recursion stays stable.
            const int len = std::max(spec.r, 3);
            Eigen::VectorXd v(len);
            for (int i = 0; i < len; ++i) v[i] = gauss(rng);
            // Count responses need A* b <= 0 so the chain mixes; with
            // negative A* entries that means nonnegative b components.
            if (spec.family == FamilyKind::Poisson) v = v.cwiseAbs();
            const double nrm = v.norm();
            if (nrm > 0.0) v /= nrm;
            gt.b[j].row(k) = v.head(spec.r).transpose();
        }
    }
    return gt;
}

}  // namespace

double GroundTruth::f_star(int j, const Eigen::VectorXd& x) const {
    const int d = static_cast<int>(A_star.rows());
    const int r = static_cast<int>(b[j].cols());
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
        if (A_star(j, k) == 0.0) continue;
        double inner = 0.0;
        for (int i = 1; i <= r; ++i) inner += b[j](k, i - 1) * poly_factorial(i, x[k]);
        s += A_star(j, k) * inner;
    }
    return s;
}

Eigen::VectorXd GroundTruth::f_star_all(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(A_star.rows());
    for (int j = 0; j < A_star.rows(); ++j) out[j] = f_star(j, x);
    return out;
}

std::pair<TimeSeries, GroundTruth> gen_gaussian(const SimSpec& spec) {
    SimSpec sp = spec;
    sp.family = FamilyKind::Gaussian;
    sp.validate();
    std::mt19937_64 rng(sp.seed);
    GroundTruth gt = make_truth(sp, rng);

    std::uniform_real_distribution<double> init(0.0, 1.0);
    std::uniform_real_distribution<double> noise(-0.4, 0.4);
    Eigen::VectorXd x(sp.d);
    for (int j = 0; j < sp.d; ++j) x[j] = init(rng);

    const int total = sp.burn_in + sp.T;
    Eigen::MatrixXd kept(sp.T + 1, sp.d);
    for (int t = 0; t <= total; ++t) {
        if (t >= sp.burn_in) kept.row(t - sp.burn_in) = x.transpose();
        if (t == total) break;
        Eigen::VectorXd next = gt.f_star_all(x);
        for (int j = 0; j < sp.d; ++j) next[j] += noise(rng);
        if (next.cwiseAbs().maxCoeff() > 1e6) {
            std::ostringstream os;
            os << "gaussian trajectory diverged at step " << t
               << "; lower r or s, or adjust the seed";
            throw NumericError(os.str());
        }
        x = next;
    }
    TimeSeries ts;
    ts.values = kept;
    ts.column_names.resize(sp.d);
    for (int j = 0; j < sp.d; ++j) ts.column_names[j] = "x" + std::to_string(j);
    return {ts, gt};
}

std::pair<TimeSeries, GroundTruth> gen_poisson(const SimSpec& spec) {
    SimSpec sp = spec;
    sp.family = FamilyKind::Poisson;
    sp.validate();
    std::mt19937_64 rng(sp.seed);
    GroundTruth gt = make_truth(sp, rng);

    Eigen::VectorXd x(sp.d);
    {
        std::poisson_distribution<long> pois(1.0);
        for (int j = 0; j < sp.d; ++j) x[j] = static_cast<double>(pois(rng));
    }

    const int total = sp.burn_in + sp.T;
    Eigen::MatrixXd kept(sp.T + 1, sp.d);
    for (int t = 0; t <= total; ++t) {
        if (t >= sp.burn_in) kept.row(t - sp.burn_in) = x.transpose();
        if (t == total) break;
        Eigen::VectorXd next(sp.d);
        for (int j = 0; j < sp.d; ++j) {
            const double rate = std::exp(gt.f_star(j, x));
            if (!std::isfinite(rate) || rate > 1e6) {
                std::ostringstream os;
                os << "poisson rate diverged at step " << t
                   << "; lower r or s, or adjust the seed";
                throw NumericError(os.str());
            }
            std::poisson_distribution<long> pois(rate);
            next[j] = static_cast<double>(pois(rng));
        }
        x = next;
    }
    TimeSeries ts;
    ts.values = kept;
    ts.column_names.resize(sp.d);
    for (int j = 0; j < sp.d; ++j) ts.column_names[j] = "x" + std::to_string(j);
    return {ts, gt};
}

double mse(const NetworkFit& fit, const GroundTruth& truth, const TimeSeries& data) {
    data.validate();
    const Eigen::Index T = data.transitions();
    const int d = fit.dim();
    if (truth.A_star.rows() != d || data.dim() != d)
        throw DataError("mse: dimension mismatch");
    double total = 0.0;
    for (Eigen::Index t = 0; t < T; ++t) {
        const Eigen::VectorXd x = data.values.row(t).transpose();
        Prediction pr = predict(fit, x);
        for (int j = 0; j < d; ++j) {
            const double diff = pr.eta[j] - truth.f_star(j, x);
            total += diff * diff;
        }
    }
    return total / (static_cast<double>(T) * static_cast<double>(d));
}

FitConfig replication_fit_config(FamilyKind family, int d, int T, int r) {
    FitConfig cfg;
    if (family == FamilyKind::Gaussian) {
        cfg.lambda_T = 3.0 * std::sqrt(std::log(static_cast<double>(d) * r) / T);
    } else {
        cfg.lambda_T = 1.3 * std::log(static_cast<double>(d)) * std::log(static_cast<double>(T)) *
                       std::sqrt(static_cast<double>(r)) / std::sqrt(static_cast<double>(T));
    }
    cfg.lambda_H = 0.0;  // first-penalty-only replication mode
    cfg.center = true;
    cfg.intercept_column = true;
    return cfg;
}

std::vector<GridRow> run_grid(const GridConfig& grid) {
    if (grid.families.empty() || grid.d_list.empty() || grid.T_list.empty() ||
        grid.r_list.empty() || grid.trials < 1)
        throw ConfigError("run_grid: empty grid");

    std::vector<GridRow> rows;
    for (FamilyKind family : grid.families) {
        for (int d : grid.d_list) {
            for (int T : grid.T_list) {
                for (int r : grid.r_list) {
                    for (int trial = 0; trial < grid.trials; ++trial) {
                        GridRow row;
                        row.family = family;
                        row.d = d;
                        row.T = T;
                        row.r = r;
                        row.trial = trial;
                        const auto t0 = std::chrono::steady_clock::now();
                        try {
                            SimSpec sp;
                            sp.family = family;
                            sp.d = d;
                            sp.T = T;
                            sp.r = r;
                            sp.s = std::min(grid.s, d - 1);
                            sp.seed = grid.seed0 + static_cast<std::uint64_t>(trial);
                            auto [data, truth] = family == FamilyKind::Gaussian
                                                     ? gen_gaussian(sp)
                                                     : gen_poisson(sp);
                            KernelSpec kernel = KernelSpec::finite_rank(
                                std::vector<double>(r, 1.0), BasisId::PolyFactorial);
                            FitConfig cfg = replication_fit_config(family, d, T, r);
                            GlmFamily fam(family);
                            NetworkFit fit =
                                fit_network(data, kernel, fam, cfg, grid.threads);
                            row.mse = mse(fit, truth, data);
                            long tp = 0, fp = 0, fn = 0;
                            for (int j = 0; j < d; ++j) {
                                std::set<int> rec = fit.node_fits[j].support();
                                for (int k : rec)
                                    (truth.supports[j].count(k) ? tp : fp) += 1;
                                for (int k : truth.supports[j])
                                    if (!rec.count(k)) ++fn;
                            }
                            row.precision = tp + fp > 0
                                                ? static_cast<double>(tp) / (tp + fp)
                                                : 1.0;
                            row.recall = tp + fn > 0
                                             ? static_cast<double>(tp) / (tp + fn)
                                             : 1.0;
                        } catch (const std::exception& e) {
                            row.failed = true;
                            row.error = e.what();
                        }
                        row.seconds =
                            std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
                        rows.push_back(std::move(row));
                    }
                }
            }
        }
    }
    return rows;
}

}  // namespace spamnet
