#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <vector>

#include "spamnet/estimator.hpp"
#include "spamnet/timeseries.hpp"

namespace spamnet {

struct SimSpec {
    FamilyKind family = FamilyKind::Gaussian;
    int d = 8;
    int T = 240;
    int r = 1;          // polynomial order (number of basis terms)
    int s = 3;          // nonzeros per row of A*
    std::uint64_t seed = 1;
    int burn_in = 200;

    void validate() const;
};

/// True generating mechanism: f*_j(x) = sum_k A*[j,k] sum_i b[j,k,i] Phi_i(x_k)
/// with Phi_i(x) = x^i / i!.
struct GroundTruth {
    Eigen::MatrixXd A_star;               // d x d
    std::vector<Eigen::MatrixXd> b;       // d matrices, each d x r, unit-norm rows
    std::vector<std::set<int>> supports;  // per-row nonzero columns of A*

    double f_star(int j, const Eigen::VectorXd& x) const;
    Eigen::VectorXd f_star_all(const Eigen::VectorXd& x) const;
};

std::pair<TimeSeries, GroundTruth> gen_gaussian(const SimSpec& spec);
std::pair<TimeSeries, GroundTruth> gen_poisson(const SimSpec& spec);

/// Mean over nodes of the empirical-norm squared error between the fitted
/// predictor (offset + intercept + additive blocks) and f*:
/// (1/d) sum_j (1/T) sum_t (eta_hat_j(X_t) - f*_j(X_t))^2.
double mse(const NetworkFit& fit, const GroundTruth& truth, const TimeSeries& data);

struct GridRow {
    FamilyKind family;
    int d, T, r, trial;
    double mse = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct GridConfig {
    std::vector<FamilyKind> families;
    std::vector<int> d_list;
    std::vector<int> T_list;
    std::vector<int> r_list;
    int trials = 20;
    std::uint64_t seed0 = 1;
    int s = 3;
    int threads = 1;
};

/// Paper replication grid: lambda_H = 0, per-family lambda_T schedule
/// (gaussian 3*sqrt(log(d r)/T), poisson 1.3*log(d)*log(T)*sqrt(r)/sqrt(T)),
/// trial seed = seed0 + trial.
std::vector<GridRow> run_grid(const GridConfig& grid);

/// Replication-mode fit configuration for one cell.
FitConfig replication_fit_config(FamilyKind family, int d, int T, int r);

}  // namespace spamnet
