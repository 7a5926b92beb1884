#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace spamnet {

enum class KernelKind { FiniteRank, EigenDecay, Custom };
enum class BasisId { PolyFactorial, Cosine };

/// A univariate RKHS represented by a truncated Mercer eigen-system
/// K(x,y) = sum_{i=1..M} mu_i Phi_i(x) Phi_i(y).
///
/// Bases: poly_factorial Phi_i(x) = x^i / i! (i >= 1), cosine
/// Phi_i(x) = cos(i*pi*x) on [0,1]. EigenDecay pins mu_i = i^(-2*alpha)
/// and keeps an analytic handle on the infinite tail beyond M.
///
/// Convention note: cos(i pi x) has unit sup-norm but L2([0,1])-norm
/// 1/sqrt(2), and x^i/i! is not orthonormal under any fixed measure; only
/// sup-boundedness enters the rate formulas, so both are used as-is.
class KernelSpec {
public:
    static KernelSpec finite_rank(std::vector<double> mu, BasisId basis);
    static KernelSpec eigen_decay(double alpha, int truncation, BasisId basis);
    // Truncation chooser: smallest M with tail sum <= tail_rel * trace,
    // capped at max_truncation.
    static KernelSpec eigen_decay_auto(double alpha, BasisId basis,
                                       double tail_rel = 1e-8,
                                       int max_truncation = 256);
    static KernelSpec custom(std::vector<double> mu, BasisId basis);

    KernelKind kind() const { return kind_; }
    BasisId basis() const { return basis_; }
    int rank() const { return static_cast<int>(mu_.size()); }
    const std::vector<double>& eigenvalues() const { return mu_; }
    double eigenvalue(int i) const;  // 1-based, valid beyond rank() for EigenDecay
    double decay_alpha() const { return alpha_; }

    // Trace sum_i mu_i including the analytic tail for EigenDecay.
    // Requires alpha > 1/2 for EigenDecay (divergent otherwise).
    double trace() const;

    // Basis function Phi_i, 1-based index.
    double basis_eval(int i, double x) const;

    // sum_{i=1..inf} min(mu_i, s2); infinite tail handled analytically
    // for EigenDecay via the integral bound, zero for finite lists.
    double sum_min_eigs(double s2) const;

    // Split version for the modified complexity: head over i <= m0,
    // tail over i > m0.
    double head_min_eigs(int m0, double s2) const;
    double tail_min_eigs(int m0, double s2) const;

    std::string describe() const;

private:
    KernelSpec(KernelKind kind, BasisId basis, std::vector<double> mu, double alpha);
    void validate() const;

    KernelKind kind_;
    BasisId basis_;
    std::vector<double> mu_;
    double alpha_ = 0.0;  // EigenDecay only
};

/// Per-block design built from one time-series column:
/// Psi[t,i] = sqrt(mu_i) * Phi_i(x_t), optionally column-centered,
/// and R the upper-triangular factor of Psi/sqrt(T) so that the
/// empirical norm obeys ||Psi b||_2 / sqrt(T) = ||R b||_2.
struct DesignBlock {
    Eigen::MatrixXd Psi;              // T x M
    Eigen::VectorXd centering_means;  // length M (zeros when centering off)
    Eigen::MatrixXd R;                // M x M upper triangular
    bool centered = false;
    bool rank_deficient = false;      // T < M, R has rank < M
    double sigma_min_R = 0.0;         // smallest singular value of R
};

double mercer_eval(const KernelSpec& spec, double x, double y);

DesignBlock design_block(const KernelSpec& spec, const Eigen::VectorXd& column,
                         bool center);

Eigen::MatrixXd empirical_kernel_matrix(const KernelSpec& spec,
                                        const Eigen::VectorXd& column);

}  // namespace spamnet
