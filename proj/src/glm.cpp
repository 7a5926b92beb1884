#include "spamnet/glm.hpp"

#include <cmath>
#include <sstream>

#include "spamnet/errors.hpp"

namespace spamnet {

std::string GlmFamily::name() const {
    switch (kind_) {
        case FamilyKind::Gaussian: return "gaussian";
        case FamilyKind::Poisson: return "poisson";
        case FamilyKind::Bernoulli: return "bernoulli";
    }
    return "?";
}

double GlmFamily::Z(double x) const {
    switch (kind_) {
        case FamilyKind::Gaussian: return 0.5 * x * x;
        case FamilyKind::Poisson: return std::exp(x);
        case FamilyKind::Bernoulli:
            // softplus, stable on both sides
            return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    }
    return 0.0;
}

double GlmFamily::Zprime(double x) const {
    switch (kind_) {
        case FamilyKind::Gaussian: return x;
        case FamilyKind::Poisson: return std::exp(x);
        case FamilyKind::Bernoulli: return 1.0 / (1.0 + std::exp(-x));
    }
    return 0.0;
}

double GlmFamily::Zsecond(double x) const {
    switch (kind_) {
        case FamilyKind::Gaussian: return 1.0;
        case FamilyKind::Poisson: return std::exp(x);
        case FamilyKind::Bernoulli: {
            const double p = 1.0 / (1.0 + std::exp(-x));
            return p * (1.0 - p);
        }
    }
    return 0.0;
}

double GlmFamily::eta_limit() const {
    switch (kind_) {
        case FamilyKind::Gaussian: return std::numeric_limits<double>::infinity();
        case FamilyKind::Poisson: return 30.0;
        case FamilyKind::Bernoulli: return 700.0;
    }
    return 0.0;
}

void GlmFamily::check_response(double y, Eigen::Index index) const {
    std::ostringstream os;
    if (!std::isfinite(y)) {
        os << "response at index " << index << " is not finite";
        throw DataError(os.str());
    }
    switch (kind_) {
        case FamilyKind::Gaussian:
            return;
        case FamilyKind::Poisson:
            if (y < 0.0 || y != std::floor(y)) {
                os << "poisson response at index " << index << " (" << y
                   << ") must be a nonnegative integer";
                throw DataError(os.str());
            }
            return;
        case FamilyKind::Bernoulli:
            if (y != 0.0 && y != 1.0) {
                os << "bernoulli response at index " << index << " (" << y
                   << ") must be 0 or 1";
                throw DataError(os.str());
            }
            return;
    }
}

void GlmFamily::check_eta(double eta, Eigen::Index index) const {
    if (!std::isfinite(eta)) {
        std::ostringstream os;
        os << "linear predictor at index " << index << " is not finite";
        throw NumericError(os.str());
    }
    if (std::abs(eta) > eta_limit()) {
        std::ostringstream os;
        os << name() << " linear predictor at index " << index << " (" << eta
           << ") exceeds safe range " << eta_limit();
        throw NumericError(os.str());
    }
}

double bregman(const GlmFamily& fam, double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw DataError("bregman: non-finite input");
    if (fam.kind() != FamilyKind::Gaussian &&
        (std::abs(x) > 700.0 || std::abs(y) > 700.0))
        throw NumericError("bregman: exp overflow, keep linear predictors bounded");
    return fam.Z(x) - fam.Z(y) - fam.Zprime(y) * (x - y);
}

double strong_convexity(const GlmFamily& fam, double v_min, double v_max,
                        int s_max, double trace_mu) {
    if (v_min > v_max) throw ConfigError("strong_convexity: v_min > v_max");
    if (s_max < 0) throw ConfigError("strong_convexity: s_max must be >= 0");
    if (!(trace_mu > 0.0)) throw ConfigError("strong_convexity: trace_mu must be > 0");
    const double widen = (16.0 * std::sqrt(trace_mu) + 1.0) * s_max;
    double theta = 1.0;
    switch (fam.kind()) {
        case FamilyKind::Gaussian:
            theta = 1.0;
            break;
        case FamilyKind::Poisson:
            theta = std::exp(v_min - widen);
            break;
        case FamilyKind::Bernoulli:
            theta = 1.0 / (std::exp(std::max(v_max, -v_min) + widen) + 3.0);
            break;
    }
    return std::min(theta, 1.0);
}

double negloglik(const GlmFamily& fam, const Eigen::VectorXd& eta,
                 const Eigen::VectorXd& y) {
    if (eta.size() != y.size()) throw DataError("negloglik: eta/y size mismatch");
    if (eta.size() == 0) throw DataError("negloglik: empty input");
    double s = 0.0;
    for (Eigen::Index t = 0; t < eta.size(); ++t) {
        fam.check_eta(eta[t], t);
        fam.check_response(y[t], t);
        s += fam.Z(eta[t]) - eta[t] * fam.phi(y[t]);
    }
    return s / (2.0 * static_cast<double>(eta.size()));
}

Eigen::VectorXd negloglik_grad(const GlmFamily& fam, const Eigen::VectorXd& eta,
                               const Eigen::VectorXd& y) {
    if (eta.size() != y.size()) throw DataError("negloglik_grad: size mismatch");
    Eigen::VectorXd g(eta.size());
    const double scale = 1.0 / (2.0 * static_cast<double>(eta.size()));
    for (Eigen::Index t = 0; t < eta.size(); ++t) {
        fam.check_eta(eta[t], t);
        g[t] = scale * (fam.Zprime(eta[t]) - fam.phi(y[t]));
    }
    return g;
}

}  // namespace spamnet
