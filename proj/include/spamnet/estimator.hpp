#pragma once

#include <Eigen/Dense>
#include <array>
#include <set>
#include <vector>

#include "spamnet/glm.hpp"
#include "spamnet/kernels.hpp"
#include "spamnet/timeseries.hpp"

namespace spamnet {

struct FitConfig {
    double lambda_T = 0.0;
    double lambda_H = 0.0;
    int max_outer = 500;
    int max_inner = 200;
    double tol_rel_obj = 1e-6;
    double admm_rho = 1.0;
    bool center = true;
    Eigen::VectorXd offsets;  // length d, defaults to zeros
    bool intercept_column = false;

    void validate() const;
};

struct NodeFit {
    int node = 0;
    std::vector<Eigen::VectorXd> beta;  // d blocks of length-M coefficients
    double intercept = 0.0;             // fitted when cfg.intercept_column
    Eigen::VectorXd norms_T;            // length d
    Eigen::VectorXd norms_H;            // length d
    std::vector<double> objective_trace;
    bool converged = false;

    std::set<int> support(double support_eps = -1.0) const;
};

struct NetworkFit {
    std::vector<NodeFit> node_fits;
    KernelSpec kernel;
    GlmFamily family;
    FitConfig config;
    Eigen::MatrixXd centering_means;  // d x M, per predictor column

    int dim() const { return static_cast<int>(node_fits.size()); }
};

/// Generic penalized-GLM block problem: minimize over {beta_k}
///   negloglik(base + sum_k Psi_k beta_k, y)
///   + lambda_T sum_k ||R_k beta_k|| + lambda_H sum_k ||beta_k||.
/// Solved by cyclic block coordinate descent; each block subproblem uses
/// consensus splitting with closed-form group-soft-threshold proxes.
/// Blocks with penalty_free set are unpenalized (intercept path).
struct BlockProblem {
    std::vector<const DesignBlock*> blocks;
    Eigen::VectorXd y;
    Eigen::VectorXd base;  // constant offset added to the linear predictor
    GlmFamily family = GlmFamily::gaussian();
    double lambda_T = 0.0;
    double lambda_H = 0.0;
    std::vector<bool> penalty_free;  // empty means all penalized
};

struct BlockSolution {
    std::vector<Eigen::VectorXd> beta;
    std::vector<double> objective_trace;
    bool converged = false;
};

BlockSolution solve_block_problem(const BlockProblem& prob, int max_outer,
                                  int max_inner, double tol_rel_obj, double rho);

/// Objective of the block problem at given coefficients.
double block_objective(const BlockProblem& prob,
                       const std::vector<Eigen::VectorXd>& beta);

NodeFit fit_node(int node, const TimeSeries& data, const KernelSpec& kernel,
                 const GlmFamily& family, const FitConfig& cfg);

NetworkFit fit_network(const TimeSeries& data, const KernelSpec& kernel,
                       const GlmFamily& family, const FitConfig& cfg,
                       int threads = 1);

/// Linear predictors and conditional means at a single state vector.
struct Prediction {
    Eigen::VectorXd eta;
    Eigen::VectorXd mean;
};
Prediction predict(const NetworkFit& fit, const Eigen::VectorXd& x);

/// eq objective for one node of a finished fit (same quantity as the
/// entries of objective_trace).
double objective(const NetworkFit& fit, int node, const TimeSeries& data);

/// (1/n) sum (observed - mean)^2 / mean; means must be positive.
double pearson_chi2(const Eigen::VectorXd& means, const Eigen::VectorXd& observed);

struct CvResult {
    double lambda_T = 0.0;
    double lambda_H = 0.0;
    // One row per grid pair: lambda_T, lambda_H, mean loss across folds.
    std::vector<std::array<double, 3>> table;
};

/// Rolling-back cross-validation: 3 folds, each shifting both the training
/// and validation windows back by `horizon` rows. Loss is mean squared
/// prediction error for gaussian and the Pearson statistic for poisson.
/// Ties prefer larger lambda_T, then larger lambda_H.
CvResult cross_validate(const TimeSeries& data,
                        const std::vector<std::pair<double, double>>& grid,
                        Eigen::Index horizon, const KernelSpec& kernel,
                        const GlmFamily& family, const FitConfig& cfg);

}  // namespace spamnet
