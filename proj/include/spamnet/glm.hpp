#pragma once

#include <Eigen/Dense>
#include <string>

namespace spamnet {

enum class FamilyKind { Gaussian, Poisson, Bernoulli };

/// Canonical exponential-family link machinery. The sufficient statistic
/// is the identity for all three families; the base measure is dropped
/// everywhere (constant in the parameter).
class GlmFamily {
public:
    explicit GlmFamily(FamilyKind kind) : kind_(kind) {}
    static GlmFamily gaussian() { return GlmFamily(FamilyKind::Gaussian); }
    static GlmFamily poisson() { return GlmFamily(FamilyKind::Poisson); }
    static GlmFamily bernoulli() { return GlmFamily(FamilyKind::Bernoulli); }

    FamilyKind kind() const { return kind_; }
    std::string name() const;

    double Z(double x) const;        // log-partition
    double Zprime(double x) const;   // conditional mean
    double Zsecond(double x) const;  // variance function

    double phi(double y) const { return y; }

    // Largest |eta| the family accepts before fitting aborts.
    double eta_limit() const;

    // Throws DataError when y is outside the response domain.
    void check_response(double y, Eigen::Index index) const;
    // Throws NumericError when eta is outside the safe range.
    void check_eta(double eta, Eigen::Index index) const;

private:
    FamilyKind kind_;
};

/// Bregman divergence B_Z(x||y) = Z(x) - Z(y) - Z'(y)(x-y); >= 0, and 0 iff x == y.
double bregman(const GlmFamily& fam, double x, double y);

/// Strong-convexity constant of the log-partition over the widened offset
/// interval: gaussian 1, poisson exp(v_min - (16*sqrt(H_mu)+1)*s_max),
/// bernoulli 1/(exp(max(v_max,-v_min) + (16*sqrt(H_mu)+1)*s_max) + 3),
/// capped into (0, 1].
double strong_convexity(const GlmFamily& fam, double v_min, double v_max,
                        int s_max, double trace_mu);

/// (1/(2n)) sum_t (Z(eta_t) - eta_t * phi(y_t)).
double negloglik(const GlmFamily& fam, const Eigen::VectorXd& eta,
                 const Eigen::VectorXd& y);

/// Gradient of negloglik with respect to eta: (1/(2n)) (Z'(eta) - phi(y)).
Eigen::VectorXd negloglik_grad(const GlmFamily& fam, const Eigen::VectorXd& eta,
                               const Eigen::VectorXd& y);

}  // namespace spamnet
