#include "spamnet/network.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "spamnet/errors.hpp"

namespace spamnet {

Eigen::MatrixXi adjacency(const NetworkFit& fit, double threshold) {
    if (threshold < 0.0) throw ConfigError("adjacency: threshold must be >= 0");
    const int d = fit.dim();
    Eigen::MatrixXi A = Eigen::MatrixXi::Zero(d, d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            if (std::max(fit.node_fits[j].norms_T[k],
                         fit.node_fits[j].norms_H[k]) > threshold)
                A(j, k) = 1;
    return A;
}

std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                        int restarts) {
    const int n = static_cast<int>(points.rows());
    if (k < 1 || k > n) throw ConfigError("kmeans: k out of range");
    std::mt19937_64 rng(seed);

    std::vector<int> best_labels(n, 0);
    double best_obj = std::numeric_limits<double>::infinity();

    for (int rs = 0; rs < std::max(1, restarts); ++rs) {
        // k-means++ style seeding
        Eigen::MatrixXd centers(k, points.cols());
        std::uniform_int_distribution<int> first(0, n - 1);
        centers.row(0) = points.row(first(rng));
        Eigen::VectorXd d2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
        for (int c = 1; c < k; ++c) {
            const double total = d2.sum();
            int pick = 0;
            if (total > 0.0) {
                std::uniform_real_distribution<double> u(0.0, total);
                double target = u(rng), acc = 0.0;
                for (int i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (acc >= target) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = first(rng);
            }
            centers.row(c) = points.row(pick);
            d2 = d2.cwiseMin(
                (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
        }

        std::vector<int> labels(n, 0);
        double obj = 0.0;
        for (int it = 0; it < 100; ++it) {
            obj = 0.0;
            bool changed = false;
            for (int i = 0; i < n; ++i) {
                int arg = 0;
                double mind = std::numeric_limits<double>::infinity();
                for (int c = 0; c < k; ++c) {
                    const double dd = (points.row(i) - centers.row(c)).squaredNorm();
                    if (dd < mind) {
                        mind = dd;
                        arg = c;
                    }
                }
                if (labels[i] != arg) changed = true;
                labels[i] = arg;
                obj += mind;
            }
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
            Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
            for (int i = 0; i < n; ++i) {
                sums.row(labels[i]) += points.row(i);
                counts[labels[i]] += 1;
            }
            for (int c = 0; c < k; ++c)
                if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
            if (!changed) break;
        }
        if (obj < best_obj) {
            best_obj = obj;
            best_labels = labels;
        }
    }
    return best_labels;
}

namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXi& A) {
    if (A.rows() != A.cols()) throw DataError("adjacency matrix must be square");
    return (A.cast<double>() + A.cast<double>().transpose()) / 2.0;
}

Eigen::MatrixXd row_normalize(const Eigen::MatrixXd& E) {
    Eigen::MatrixXd out = E;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double n = out.row(i).norm();
        if (n > 0.0) out.row(i) /= n;
    }
    return out;
}

}  // namespace

std::vector<int> spectral_cluster(const Eigen::MatrixXi& A, const ClusterConfig& cfg) {
    Eigen::MatrixXd S = symmetrize(A);
    const int d = static_cast<int>(S.rows());
    if (cfg.k < 1) throw ConfigError("spectral_cluster: k must be >= 1");

    Eigen::VectorXd deg = S.rowwise().sum();
    std::vector<int> active;
    for (int i = 0; i < d; ++i)
        if (deg[i] > 0.0) active.push_back(i);
    const int n = static_cast<int>(active.size());
    if (cfg.k > n)
        throw ConfigError("spectral_cluster: k exceeds the number of non-isolated nodes");

    Eigen::MatrixXd Ssub(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) Ssub(a, b) = S(active[a], active[b]);
    Eigen::VectorXd dsub = Ssub.rowwise().sum();
    Eigen::VectorXd dinv = dsub.array().sqrt().inverse();
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n) -
                        dinv.asDiagonal() * Ssub * dinv.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    // k eigenvectors of smallest eigenvalue, rows renormalized
    Eigen::MatrixXd embed = row_normalize(es.eigenvectors().leftCols(cfg.k));
    std::vector<int> sub_labels = kmeans(embed, cfg.k, cfg.seed, cfg.kmeans_restarts);

    std::vector<int> labels(d, cfg.k);  // sentinel for isolated nodes
    for (int a = 0; a < n; ++a) labels[active[a]] = sub_labels[a];
    return labels;
}

std::vector<int> covariate_cluster(const Eigen::MatrixXi& A,
                                   const Eigen::MatrixXd& coords,
                                   const ClusterConfig& cfg) {
    Eigen::MatrixXd S = symmetrize(A);
    const int d = static_cast<int>(S.rows());
    if (coords.rows() != d)
        throw DataError("covariate_cluster: coords rows must match node count");
    if (cfg.lambda_cov < 0.0)
        throw ConfigError("covariate_cluster: lambda_cov must be >= 0");
    if (cfg.k < 1 || cfg.k > d) throw ConfigError("covariate_cluster: k out of range");

    Eigen::MatrixXd Op = S + cfg.lambda_cov * (coords * coords.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Op);
    // top-k eigenvectors (largest eigenvalues): rightmost columns
    Eigen::MatrixXd embed = row_normalize(es.eigenvectors().rightCols(cfg.k));
    return kmeans(embed, cfg.k, cfg.seed, cfg.kmeans_restarts);
}

}  // namespace spamnet
