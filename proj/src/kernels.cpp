#include "spamnet/kernels.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "spamnet/errors.hpp"

namespace spamnet {

namespace {

// sum_{i>k} i^(-2a) via the integral bound k^(1-2a)/(2a-1), k >= 1.
double decay_tail_integral(int k, double alpha) {
    if (alpha <= 0.5)
        throw NumericError("eigenvalue tail diverges for alpha <= 1/2");
    return std::pow(static_cast<double>(k), 1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0);
}

// First index l0 with l0^(-2a) <= s2, i.e. l0 >= s2^(-1/(2a)).
int decay_crossover(double s2, double alpha) {
    if (s2 <= 0.0) return std::numeric_limits<int>::max();
    const double raw = std::pow(s2, -1.0 / (2.0 * alpha));
    if (raw >= 1e9) return std::numeric_limits<int>::max();
    int l0 = std::max(1, static_cast<int>(std::ceil(raw)));
    // Nudge across ties from floating-point roundoff.
    while (std::pow(static_cast<double>(l0), -2.0 * alpha) > s2) ++l0;
    while (l0 > 1 && std::pow(static_cast<double>(l0 - 1), -2.0 * alpha) <= s2) --l0;
    return l0;
}

}  // namespace

KernelSpec::KernelSpec(KernelKind kind, BasisId basis, std::vector<double> mu,
                       double alpha)
    : kind_(kind), basis_(basis), mu_(std::move(mu)), alpha_(alpha) {
    validate();
}

void KernelSpec::validate() const {
    if (mu_.empty()) throw ConfigError("kernel needs at least one eigenvalue");
    for (size_t i = 0; i < mu_.size(); ++i) {
        if (!(mu_[i] > 0.0) || !std::isfinite(mu_[i]))
            throw ConfigError("kernel eigenvalues must be positive and finite");
        if (i > 0 && mu_[i] > mu_[i - 1] * (1.0 + 1e-12))
            throw ConfigError("kernel eigenvalues must be non-increasing");
    }
    if (kind_ == KernelKind::EigenDecay && alpha_ < 0.5)
        throw ConfigError("eigen_decay requires alpha >= 1/2");
}

KernelSpec KernelSpec::finite_rank(std::vector<double> mu, BasisId basis) {
    return KernelSpec(KernelKind::FiniteRank, basis, std::move(mu), 0.0);
}

KernelSpec KernelSpec::custom(std::vector<double> mu, BasisId basis) {
    return KernelSpec(KernelKind::Custom, basis, std::move(mu), 0.0);
}

KernelSpec KernelSpec::eigen_decay(double alpha, int truncation, BasisId basis) {
    if (truncation < 1) throw ConfigError("truncation must be positive");
    std::vector<double> mu(truncation);
    for (int i = 0; i < truncation; ++i)
        mu[i] = std::pow(static_cast<double>(i + 1), -2.0 * alpha);
    return KernelSpec(KernelKind::EigenDecay, basis, std::move(mu), alpha);
}

KernelSpec KernelSpec::eigen_decay_auto(double alpha, BasisId basis,
                                        double tail_rel, int max_truncation) {
    int m = max_truncation;
    if (alpha > 0.5) {
        double trace = 0.0;
        for (int i = 1; i <= 100000; ++i) trace += std::pow(i, -2.0 * alpha);
        trace += decay_tail_integral(100000, alpha);
        // Smallest M with M^(1-2a)/(2a-1) <= tail_rel * trace.
        const double rhs = tail_rel * trace * (2.0 * alpha - 1.0);
        const double need = std::pow(rhs, -1.0 / (2.0 * alpha - 1.0));
        if (need < static_cast<double>(max_truncation))
            m = std::max(1, static_cast<int>(std::ceil(need)));
    }
    return eigen_decay(alpha, m, basis);
}

double KernelSpec::eigenvalue(int i) const {
    if (i < 1) throw ConfigError("eigenvalue index is 1-based");
    if (i <= rank()) return mu_[i - 1];
    if (kind_ == KernelKind::EigenDecay)
        return std::pow(static_cast<double>(i), -2.0 * alpha_);
    return 0.0;
}

double KernelSpec::trace() const {
    double s = 0.0;
    for (double m : mu_) s += m;
    if (kind_ == KernelKind::EigenDecay) s += decay_tail_integral(rank(), alpha_);
    return s;
}

double KernelSpec::basis_eval(int i, double x) const {
    if (basis_ == BasisId::Cosine) return std::cos(i * M_PI * x);
    // poly_factorial: x^i / i!
    double term = 1.0;
    for (int j = 1; j <= i; ++j) term *= x / j;
    return term;
}

double KernelSpec::sum_min_eigs(double s2) const {
    double s = 0.0;
    const int m = rank();
    if (kind_ != KernelKind::EigenDecay) {
        for (double mu : mu_) s += std::min(mu, s2);
        return s;
    }
    const int l0 = decay_crossover(s2, alpha_);
    if (l0 == std::numeric_limits<int>::max())
        return std::numeric_limits<double>::infinity();
    if (l0 > m) {
        // All stored eigenvalues exceed s2; tail beyond rank still mixed.
        s += m * s2;
        s += (l0 - 1 - m) * s2 + decay_tail_integral(l0 - 1, alpha_);
        return s;
    }
    s += (l0 - 1) * s2;
    for (int i = l0; i <= m; ++i) s += mu_[i - 1];
    s += decay_tail_integral(m, alpha_);
    return s;
}

double KernelSpec::head_min_eigs(int m0, double s2) const {
    double s = 0.0;
    const int top = (kind_ == KernelKind::EigenDecay) ? m0 : std::min(m0, rank());
    for (int i = 1; i <= top; ++i) s += std::min(eigenvalue(i), s2);
    return s;
}

double KernelSpec::tail_min_eigs(int m0, double s2) const {
    if (kind_ != KernelKind::EigenDecay) {
        double s = 0.0;
        for (int i = m0 + 1; i <= rank(); ++i) s += std::min(mu_[i - 1], s2);
        return s;
    }
    const int l0 = decay_crossover(s2, alpha_);
    if (l0 <= m0 + 1) {
        // Entire tail is in the mu regime.
        if (m0 >= rank()) return decay_tail_integral(m0, alpha_);
        double s = 0.0;
        for (int i = m0 + 1; i <= rank(); ++i) s += mu_[i - 1];
        return s + decay_tail_integral(rank(), alpha_);
    }
    if (l0 == std::numeric_limits<int>::max())
        return std::numeric_limits<double>::infinity();
    double s = (l0 - 1 - m0) * s2;
    const int hi = std::max(l0 - 1, rank());
    for (int i = l0; i <= hi; ++i) s += eigenvalue(i);
    return s + decay_tail_integral(hi, alpha_);
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case KernelKind::FiniteRank: os << "finite_rank"; break;
        case KernelKind::EigenDecay: os << "eigen_decay(alpha=" << alpha_ << ")"; break;
        case KernelKind::Custom: os << "custom"; break;
    }
    os << " M=" << rank()
       << (basis_ == BasisId::PolyFactorial ? " poly_factorial" : " cosine");
    return os.str();
}

double mercer_eval(const KernelSpec& spec, double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw DataError("mercer_eval: non-finite input");
    double s = 0.0;
    if (spec.basis() == BasisId::PolyFactorial) {
        double tx = 1.0, ty = 1.0;
        const auto& mu = spec.eigenvalues();
        for (int i = 1; i <= spec.rank(); ++i) {
            tx *= x / i;
            ty *= y / i;
            s += mu[i - 1] * (tx * ty);  // grouped so K(x,y) == K(y,x) bitwise
        }
    } else {
        const auto& mu = spec.eigenvalues();
        for (int i = 1; i <= spec.rank(); ++i)
            s += mu[i - 1] * (std::cos(i * M_PI * x) * std::cos(i * M_PI * y));
    }
    return s;
}

DesignBlock design_block(const KernelSpec& spec, const Eigen::VectorXd& column,
                         bool center) {
    const Eigen::Index T = column.size();
    if (T == 0) throw DataError("design_block: empty column");
    if (!column.allFinite()) throw DataError("design_block: non-finite column entry");

    const int M = spec.rank();
    DesignBlock block;
    block.Psi.resize(T, M);
    const auto& mu = spec.eigenvalues();
    if (spec.basis() == BasisId::PolyFactorial) {
        for (Eigen::Index t = 0; t < T; ++t) {
            double term = 1.0;
            const double x = column[t];
            for (int i = 1; i <= M; ++i) {
                term *= x / i;
                block.Psi(t, i - 1) = std::sqrt(mu[i - 1]) * term;
            }
        }
    } else {
        for (Eigen::Index t = 0; t < T; ++t)
            for (int i = 1; i <= M; ++i)
                block.Psi(t, i - 1) = std::sqrt(mu[i - 1]) * std::cos(i * M_PI * column[t]);
    }
    if (!block.Psi.allFinite())
        throw NumericError("design_block: basis evaluation overflowed");

    block.centered = center;
    if (center) {
        block.centering_means = block.Psi.colwise().mean();
        block.Psi.rowwise() -= block.centering_means.transpose();
    } else {
        block.centering_means = Eigen::VectorXd::Zero(M);
    }

    Eigen::MatrixXd scaled = block.Psi / std::sqrt(static_cast<double>(T));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(scaled);
    block.R = Eigen::MatrixXd::Zero(M, M);
    const Eigen::Index rrows = std::min<Eigen::Index>(T, M);
    block.R.topRows(rrows) =
        qr.matrixQR().topRows(rrows).triangularView<Eigen::Upper>();
    block.rank_deficient = (T < M);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(block.R);
    block.sigma_min_R = svd.singularValues()(svd.singularValues().size() - 1);
    return block;
}

Eigen::MatrixXd empirical_kernel_matrix(const KernelSpec& spec,
                                        const Eigen::VectorXd& column) {
    DesignBlock block = design_block(spec, column, /*center=*/false);
    return block.Psi * block.Psi.transpose();
}

}  // namespace spamnet
