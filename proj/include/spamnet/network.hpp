#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "spamnet/estimator.hpp"

namespace spamnet {

struct ClusterConfig {
    int k = 2;
    double lambda_cov = 0.0;
    std::uint64_t seed = 0;
    int kmeans_restarts = 10;
};

/// A[j,k] = 1 iff max(norm_T, norm_H) of node j's block k exceeds threshold.
Eigen::MatrixXi adjacency(const NetworkFit& fit, double threshold);

/// Normalized-Laplacian spectral clustering of the symmetrized adjacency.
/// Zero-degree nodes are assigned the sentinel label k (their own bucket).
std::vector<int> spectral_cluster(const Eigen::MatrixXi& A, const ClusterConfig& cfg);

/// Covariate-assisted clustering: k-means on the row-normalized top-k
/// eigenvectors (largest eigenvalues) of S + lambda_cov * coords coords^T,
/// S the symmetrized adjacency.
std::vector<int> covariate_cluster(const Eigen::MatrixXi& A,
                                   const Eigen::MatrixXd& coords,
                                   const ClusterConfig& cfg);

/// Seeded Lloyd k-means with restarts; returns labels of the best run.
std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                        int restarts);

}  // namespace spamnet
