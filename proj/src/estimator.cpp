#include "spamnet/estimator.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "spamnet/errors.hpp"

namespace spamnet {

void FitConfig::validate() const {
    if (lambda_T < 0.0 || lambda_H < 0.0)
        throw ConfigError("penalties must be nonnegative");
    if (max_outer < 1 || max_inner < 1)
        throw ConfigError("iteration caps must be positive");
    if (!(tol_rel_obj > 0.0)) throw ConfigError("tol_rel_obj must be positive");
    if (!(admm_rho > 0.0)) throw ConfigError("admm_rho must be positive");
}

std::set<int> NodeFit::support(double support_eps) const {
    double eps = support_eps;
    if (eps < 0.0) {
        double mx = 0.0;
        for (Eigen::Index k = 0; k < norms_T.size(); ++k)
            mx = std::max(mx, std::max(norms_T[k], norms_H[k]));
        eps = 1e-6 * mx;
    }
    std::set<int> s;
    for (Eigen::Index k = 0; k < norms_T.size(); ++k)
        if (std::max(norms_T[k], norms_H[k]) > eps) s.insert(static_cast<int>(k));
    return s;
}

namespace {

// Group soft threshold: argmin_z  kappa*||z|| + (1/2)||z - v||^2.
Eigen::VectorXd shrink(const Eigen::VectorXd& v, double kappa) {
    const double n = v.norm();
    if (n <= kappa) return Eigen::VectorXd::Zero(v.size());
    return (1.0 - kappa / n) * v;
}

// negloglik that reports +inf instead of throwing on out-of-range eta;
// used inside line searches.
double smooth_eval_safe(const GlmFamily& fam, const Eigen::VectorXd& eta,
                        const Eigen::VectorXd& y) {
    const double lim = fam.eta_limit();
    double s = 0.0;
    for (Eigen::Index t = 0; t < eta.size(); ++t) {
        if (!std::isfinite(eta[t]) || std::abs(eta[t]) > lim)
            return std::numeric_limits<double>::infinity();
        s += fam.Z(eta[t]) - eta[t] * y[t];
    }
    return s / (2.0 * static_cast<double>(eta.size()));
}

struct BlockState {
    Eigen::VectorXd u, w, p, q;  // splitting variables and scaled duals
    Eigen::LLT<Eigen::MatrixXd> gaussian_llt;
    bool llt_ready = false;
};

class BlockSolver {
public:
    BlockSolver(const BlockProblem& prob, int max_inner, double rho)
        : prob_(prob), max_inner_(max_inner), rho_(rho) {
        const size_t d = prob.blocks.size();
        states_.resize(d);
        for (size_t k = 0; k < d; ++k) {
            const int M = static_cast<int>(prob.blocks[k]->Psi.cols());
            states_[k].u = Eigen::VectorXd::Zero(M);
            states_[k].w = Eigen::VectorXd::Zero(M);
            states_[k].p = Eigen::VectorXd::Zero(M);
            states_[k].q = Eigen::VectorXd::Zero(M);
        }
    }

    bool penalized(size_t k) const {
        if (prob_.lambda_T == 0.0 && prob_.lambda_H == 0.0) return false;
        if (prob_.penalty_free.empty()) return true;
        return !prob_.penalty_free[k];
    }

    // Minimize the smooth part plus the two group penalties for block k,
    // holding eta_rest = eta - Psi_k beta_k fixed. Updates beta and eta.
    void update_block(size_t k, std::vector<Eigen::VectorXd>& beta,
                      Eigen::VectorXd& eta) {
        const DesignBlock& blk = *prob_.blocks[k];
        const Eigen::VectorXd eta_rest = eta - blk.Psi * beta[k];

        if (!penalized(k)) {
            smooth_minimize(k, eta_rest, beta[k]);
            eta = eta_rest + blk.Psi * beta[k];
            return;
        }

        // Zero-block shortcut: sufficient optimality of beta_k = 0.
        const double n = static_cast<double>(prob_.y.size());
        Eigen::VectorXd ge(prob_.y.size());
        for (Eigen::Index t = 0; t < prob_.y.size(); ++t)
            ge[t] = (prob_.family.Zprime(eta_rest[t]) - prob_.y[t]) / (2.0 * n);
        const Eigen::VectorXd g0 = blk.Psi.transpose() * ge;
        if (g0.norm() <= prob_.lambda_T * blk.sigma_min_R + prob_.lambda_H) {
            if (beta[k].squaredNorm() > 0.0) {
                beta[k].setZero();
                states_[k].u.setZero();
                states_[k].w.setZero();
                states_[k].p.setZero();
                states_[k].q.setZero();
                eta = eta_rest;
            }
            return;
        }

        const double obj_before = block_piece(k, eta_rest, beta[k]);
        const Eigen::VectorXd beta_before = beta[k];
        BlockState saved = snapshot(k);

        admm(k, eta_rest, beta[k]);

        const double obj_after = block_piece(k, eta_rest, beta[k]);
        if (!(obj_after <= obj_before + 1e-14 * std::max(1.0, std::abs(obj_before)))) {
            beta[k] = beta_before;  // keep the better iterate
            restore(k, saved);
        }
        eta = eta_rest + blk.Psi * beta[k];
    }

    // smooth + this block's penalties at given beta_k
    double block_piece(size_t k, const Eigen::VectorXd& eta_rest,
                       const Eigen::VectorXd& b) const {
        const DesignBlock& blk = *prob_.blocks[k];
        double v = smooth_eval_safe(prob_.family, eta_rest + blk.Psi * b, prob_.y);
        v += prob_.lambda_T * (blk.R * b).norm() + prob_.lambda_H * b.norm();
        return v;
    }

private:
    BlockState snapshot(size_t k) const {
        BlockState s;
        s.u = states_[k].u;
        s.w = states_[k].w;
        s.p = states_[k].p;
        s.q = states_[k].q;
        return s;
    }
    void restore(size_t k, const BlockState& s) {
        states_[k].u = s.u;
        states_[k].w = s.w;
        states_[k].p = s.p;
        states_[k].q = s.q;
    }

    // Unpenalized exact/Newton minimization of the smooth part in block k.
    void smooth_minimize(size_t k, const Eigen::VectorXd& eta_rest,
                         Eigen::VectorXd& b) {
        const DesignBlock& blk = *prob_.blocks[k];
        const double n = static_cast<double>(prob_.y.size());
        if (prob_.family.kind() == FamilyKind::Gaussian) {
            Eigen::MatrixXd G = blk.Psi.transpose() * blk.Psi;
            G.diagonal().array() += 1e-12 * std::max(1.0, G.trace());
            b = G.ldlt().solve(blk.Psi.transpose() * (prob_.y - eta_rest));
            return;
        }
        for (int it = 0; it < 25; ++it) {
            Eigen::VectorXd eta = eta_rest + blk.Psi * b;
            double f0 = smooth_eval_safe(prob_.family, eta, prob_.y);
            Eigen::VectorXd r(eta.size()), wdiag(eta.size());
            for (Eigen::Index t = 0; t < eta.size(); ++t) {
                r[t] = (prob_.family.Zprime(eta[t]) - prob_.y[t]) / (2.0 * n);
                wdiag[t] = prob_.family.Zsecond(eta[t]) / (2.0 * n);
            }
            Eigen::VectorXd grad = blk.Psi.transpose() * r;
            Eigen::MatrixXd H =
                blk.Psi.transpose() * wdiag.asDiagonal() * blk.Psi;
            H.diagonal().array() += 1e-12 * std::max(1.0, H.trace());
            Eigen::VectorXd step = H.ldlt().solve(-grad);
            double t = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                Eigen::VectorXd cand = b + t * step;
                double f1 = smooth_eval_safe(prob_.family,
                                             eta_rest + blk.Psi * cand, prob_.y);
                if (f1 <= f0 - 1e-12 * std::abs(f0) ||
                    (std::isfinite(f1) && f1 < f0)) {
                    b = cand;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if (!moved || grad.norm() < 1e-12) break;
        }
    }

    // Consensus splitting on  smooth(b) + lambda_T||u|| + lambda_H||w||
    // with u = R b and w = b.
    void admm(size_t k, const Eigen::VectorXd& eta_rest, Eigen::VectorXd& b) {
        const DesignBlock& blk = *prob_.blocks[k];
        BlockState& st = states_[k];
        const int M = static_cast<int>(blk.Psi.cols());
        const double n = static_cast<double>(prob_.y.size());

        if (prob_.family.kind() == FamilyKind::Gaussian && !st.llt_ready) {
            Eigen::MatrixXd A = blk.Psi.transpose() * blk.Psi / (2.0 * n);
            A += rho_ * (blk.R.transpose() * blk.R +
                         Eigen::MatrixXd::Identity(M, M));
            st.gaussian_llt.compute(A);
            st.llt_ready = true;
        }

        // Keep the consensus variables consistent with the warm start.
        st.u = blk.R * b;
        st.w = b;

        for (int it = 0; it < max_inner_; ++it) {
            // beta step
            if (prob_.family.kind() == FamilyKind::Gaussian) {
                Eigen::VectorXd rhs =
                    blk.Psi.transpose() * (prob_.y - eta_rest) / (2.0 * n);
                rhs += rho_ * (blk.R.transpose() * (st.u - st.p) + (st.w - st.q));
                b = st.gaussian_llt.solve(rhs);
            } else {
                newton_beta_step(blk, eta_rest, st, b);
            }

            const Eigen::VectorXd Rb = blk.R * b;
            const Eigen::VectorXd u_old = st.u;
            const Eigen::VectorXd w_old = st.w;
            st.u = shrink(Rb + st.p, prob_.lambda_T / rho_);
            st.w = shrink(b + st.q, prob_.lambda_H / rho_);
            st.p += Rb - st.u;
            st.q += b - st.w;

            const double scale = std::max(1.0, std::max(b.norm(), st.u.norm()));
            const double primal =
                std::sqrt((Rb - st.u).squaredNorm() + (b - st.w).squaredNorm());
            const double dual =
                rho_ * std::sqrt((blk.R.transpose() * (st.u - u_old)).squaredNorm() +
                                 (st.w - w_old).squaredNorm());
            if (primal < 1e-8 * scale && dual < 1e-8 * scale) break;
        }
    }

    // Up to 5 damped Newton steps on the rho-augmented smooth objective.
    void newton_beta_step(const DesignBlock& blk, const Eigen::VectorXd& eta_rest,
                          BlockState& st, Eigen::VectorXd& b) {
        const double n = static_cast<double>(prob_.y.size());
        const int M = static_cast<int>(blk.Psi.cols());
        auto aug = [&](const Eigen::VectorXd& bb) {
            double v = smooth_eval_safe(prob_.family, eta_rest + blk.Psi * bb,
                                        prob_.y);
            v += 0.5 * rho_ * (blk.R * bb - st.u + st.p).squaredNorm();
            v += 0.5 * rho_ * (bb - st.w + st.q).squaredNorm();
            return v;
        };
        for (int it = 0; it < 5; ++it) {
            Eigen::VectorXd eta = eta_rest + blk.Psi * b;
            Eigen::VectorXd r(eta.size()), wdiag(eta.size());
            for (Eigen::Index t = 0; t < eta.size(); ++t) {
                const double e = std::clamp(eta[t], -prob_.family.eta_limit(),
                                            prob_.family.eta_limit());
                r[t] = (prob_.family.Zprime(e) - prob_.y[t]) / (2.0 * n);
                wdiag[t] = prob_.family.Zsecond(e) / (2.0 * n);
            }
            Eigen::VectorXd grad = blk.Psi.transpose() * r +
                                   rho_ * (blk.R.transpose() * (blk.R * b - st.u + st.p) +
                                           (b - st.w + st.q));
            Eigen::MatrixXd H = blk.Psi.transpose() * wdiag.asDiagonal() * blk.Psi;
            H += rho_ * (blk.R.transpose() * blk.R +
                         Eigen::MatrixXd::Identity(M, M));
            Eigen::VectorXd step = H.ldlt().solve(-grad);
            const double f0 = aug(b);
            double t = 1.0;
            for (int ls = 0; ls < 60; ++ls) {
                Eigen::VectorXd cand = b + t * step;
                if (aug(cand) < f0) {
                    b = cand;
                    break;
                }
                t *= 0.5;
            }
            if (grad.norm() < 1e-12) break;
        }
    }

    const BlockProblem& prob_;
    int max_inner_;
    double rho_;
    std::vector<BlockState> states_;
};

}  // namespace

double block_objective(const BlockProblem& prob,
                       const std::vector<Eigen::VectorXd>& beta) {
    Eigen::VectorXd eta = prob.base;
    for (size_t k = 0; k < prob.blocks.size(); ++k)
        eta += prob.blocks[k]->Psi * beta[k];
    double obj = negloglik(prob.family, eta, prob.y);
    for (size_t k = 0; k < prob.blocks.size(); ++k) {
        if (!prob.penalty_free.empty() && prob.penalty_free[k]) continue;
        obj += prob.lambda_T * (prob.blocks[k]->R * beta[k]).norm() +
               prob.lambda_H * beta[k].norm();
    }
    return obj;
}

BlockSolution solve_block_problem(const BlockProblem& prob, int max_outer,
                                  int max_inner, double tol_rel_obj, double rho) {
    if (prob.blocks.empty()) throw ConfigError("block problem needs blocks");
    for (const DesignBlock* b : prob.blocks)
        if (b->Psi.rows() != prob.y.size())
            throw DataError("design block rows do not match response length");
    for (Eigen::Index t = 0; t < prob.y.size(); ++t)
        prob.family.check_response(prob.y[t], t);

    BlockSolution sol;
    const size_t d = prob.blocks.size();
    sol.beta.resize(d);
    for (size_t k = 0; k < d; ++k)
        sol.beta[k] = Eigen::VectorXd::Zero(prob.blocks[k]->Psi.cols());

    BlockSolver solver(prob, max_inner, rho);
    Eigen::VectorXd eta = prob.base;
    double obj = block_objective(prob, sol.beta);
    if (!std::isfinite(obj))
        throw NumericError("objective not finite at the zero start");
    sol.objective_trace.push_back(obj);

    for (int cycle = 0; cycle < max_outer; ++cycle) {
        for (size_t k = 0; k < d; ++k) solver.update_block(k, sol.beta, eta);
        const double next = block_objective(prob, sol.beta);
        if (!std::isfinite(next)) {
            std::ostringstream os;
            os << "objective became non-finite at outer cycle " << cycle;
            throw NumericError(os.str());
        }
        sol.objective_trace.push_back(next);
        if (std::abs(obj - next) <= tol_rel_obj * std::max(1.0, std::abs(obj))) {
            sol.converged = true;
            break;
        }
        obj = next;
    }
    return sol;
}

namespace {

struct SharedDesign {
    std::vector<DesignBlock> blocks;     // one per predictor column
    DesignBlock intercept;               // constant-one column, unpenalized
    bool has_intercept = false;
};

SharedDesign build_design(const TimeSeries& data, const KernelSpec& kernel,
                          const FitConfig& cfg) {
    data.validate();
    const Eigen::Index T = data.transitions();
    const Eigen::Index d = data.dim();
    SharedDesign sd;
    sd.blocks.reserve(d);
    for (Eigen::Index k = 0; k < d; ++k)
        sd.blocks.push_back(
            design_block(kernel, data.values.col(k).head(T), cfg.center));
    if (cfg.intercept_column) {
        sd.intercept.Psi = Eigen::MatrixXd::Ones(T, 1);
        sd.intercept.centering_means = Eigen::VectorXd::Zero(1);
        sd.intercept.R = Eigen::MatrixXd::Ones(1, 1);
        sd.intercept.sigma_min_R = 1.0;
        sd.has_intercept = true;
    }
    return sd;
}

BlockProblem make_problem(int node, const TimeSeries& data,
                          const SharedDesign& sd, const GlmFamily& family,
                          const FitConfig& cfg) {
    const Eigen::Index T = data.transitions();
    const Eigen::Index d = data.dim();
    BlockProblem prob;
    prob.family = family;
    prob.lambda_T = cfg.lambda_T;
    prob.lambda_H = cfg.lambda_H;
    prob.y = data.values.col(node).tail(T);
    double v = 0.0;
    if (cfg.offsets.size() > 0) {
        if (cfg.offsets.size() != d)
            throw ConfigError("offset vector length must equal dimension");
        v = cfg.offsets[node];
    }
    prob.base = Eigen::VectorXd::Constant(T, v);
    prob.blocks.reserve(d + 1);
    prob.penalty_free.assign(d + (sd.has_intercept ? 1 : 0), false);
    for (const DesignBlock& b : sd.blocks) prob.blocks.push_back(&b);
    if (sd.has_intercept) {
        prob.blocks.push_back(&sd.intercept);
        prob.penalty_free.back() = true;
    }
    return prob;
}

NodeFit finish_node(int node, const TimeSeries& data, const SharedDesign& sd,
                    const BlockSolution& sol) {
    const Eigen::Index d = data.dim();
    NodeFit fit;
    fit.node = node;
    fit.beta.assign(sol.beta.begin(), sol.beta.begin() + d);
    fit.intercept = sd.has_intercept ? sol.beta.back()[0] : 0.0;
    fit.norms_T.resize(d);
    fit.norms_H.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        fit.norms_H[k] = fit.beta[k].norm();
        fit.norms_T[k] = (sd.blocks[k].R * fit.beta[k]).norm();
    }
    fit.objective_trace = sol.objective_trace;
    fit.converged = sol.converged;
    return fit;
}

}  // namespace

NodeFit fit_node(int node, const TimeSeries& data, const KernelSpec& kernel,
                 const GlmFamily& family, const FitConfig& cfg) {
    cfg.validate();
    if (node < 0 || node >= data.dim()) throw ConfigError("node index out of range");
    SharedDesign sd = build_design(data, kernel, cfg);
    BlockProblem prob = make_problem(node, data, sd, family, cfg);
    BlockSolution sol = solve_block_problem(prob, cfg.max_outer, cfg.max_inner,
                                            cfg.tol_rel_obj, cfg.admm_rho);
    return finish_node(node, data, sd, sol);
}

NetworkFit fit_network(const TimeSeries& data, const KernelSpec& kernel,
                       const GlmFamily& family, const FitConfig& cfg,
                       int threads) {
    cfg.validate();
    SharedDesign sd = build_design(data, kernel, cfg);
    const int d = static_cast<int>(data.dim());

    NetworkFit net{std::vector<NodeFit>(), kernel, family, cfg,
                   Eigen::MatrixXd::Zero(d, kernel.rank())};
    for (int k = 0; k < d; ++k)
        net.centering_means.row(k) = sd.blocks[k].centering_means.transpose();
    net.node_fits.resize(d);

    auto run_one = [&](int j) {
        try {
            BlockProblem prob = make_problem(j, data, sd, family, cfg);
            BlockSolution sol = solve_block_problem(
                prob, cfg.max_outer, cfg.max_inner, cfg.tol_rel_obj, cfg.admm_rho);
            net.node_fits[j] = finish_node(j, data, sd, sol);
        } catch (const DataError& e) {
            throw DataError("node " + std::to_string(j) + ": " + e.what());
        } catch (const std::exception& e) {
            throw NumericError("node " + std::to_string(j) + ": " + e.what());
        }
    };

    if (threads <= 1) {
        for (int j = 0; j < d; ++j) run_one(j);
    } else {
        std::vector<std::future<void>> futs;
        std::atomic<int> next{0};
        const int workers = std::min(threads, d);
        for (int w = 0; w < workers; ++w)
            futs.push_back(std::async(std::launch::async, [&]() {
                for (int j = next.fetch_add(1); j < d; j = next.fetch_add(1))
                    run_one(j);
            }));
        for (auto& f : futs) f.get();
    }
    return net;
}

Prediction predict(const NetworkFit& fit, const Eigen::VectorXd& x) {
    if (!x.allFinite()) throw DataError("predict: non-finite input");
    const int d = fit.dim();
    if (x.size() != d) throw DataError("predict: input length must equal dimension");
    const int M = fit.kernel.rank();
    const auto& mu = fit.kernel.eigenvalues();

    Prediction out;
    out.eta.resize(d);
    out.mean.resize(d);
    // Feature row per predictor column, minus stored centering means.
    Eigen::MatrixXd feat(d, M);
    for (int k = 0; k < d; ++k) {
        for (int i = 1; i <= M; ++i)
            feat(k, i - 1) =
                std::sqrt(mu[i - 1]) * fit.kernel.basis_eval(i, x[k]);
        feat.row(k) -= fit.centering_means.row(k);
    }
    for (int j = 0; j < d; ++j) {
        double v = fit.config.offsets.size() > 0 ? fit.config.offsets[j] : 0.0;
        double eta = v + fit.node_fits[j].intercept;
        for (int k = 0; k < d; ++k) eta += feat.row(k).dot(fit.node_fits[j].beta[k]);
        fit.family.check_eta(eta, j);
        out.eta[j] = eta;
        out.mean[j] = fit.family.Zprime(eta);
    }
    return out;
}

double objective(const NetworkFit& fit, int node, const TimeSeries& data) {
    SharedDesign sd = build_design(data, fit.kernel, fit.config);
    BlockProblem prob = make_problem(node, data, sd, fit.family, fit.config);
    std::vector<Eigen::VectorXd> beta = fit.node_fits[node].beta;
    if (sd.has_intercept)
        beta.push_back(Eigen::VectorXd::Constant(1, fit.node_fits[node].intercept));
    return block_objective(prob, beta);
}

double pearson_chi2(const Eigen::VectorXd& means, const Eigen::VectorXd& observed) {
    if (means.size() != observed.size())
        throw DataError("pearson_chi2: size mismatch");
    if (means.size() == 0) throw DataError("pearson_chi2: empty input");
    double s = 0.0;
    for (Eigen::Index t = 0; t < means.size(); ++t) {
        if (!(means[t] > 0.0)) {
            std::ostringstream os;
            os << "pearson_chi2: nonpositive mean at index " << t;
            throw DataError(os.str());
        }
        const double r = observed[t] - means[t];
        s += r * r / means[t];
    }
    return s / static_cast<double>(means.size());
}

CvResult cross_validate(const TimeSeries& data,
                        const std::vector<std::pair<double, double>>& grid,
                        Eigen::Index horizon, const KernelSpec& kernel,
                        const GlmFamily& family, const FitConfig& cfg) {
    if (grid.empty()) throw ConfigError("cross_validate: empty lambda grid");
    if (horizon < 1) throw ConfigError("cross_validate: horizon must be >= 1");
    data.validate();
    const Eigen::Index N = data.rows();
    const Eigen::Index W = N - 3 * horizon;  // training rows per fold
    if (W < 3) {
        std::ostringstream os;
        os << "cross_validate: needs at least " << 3 * horizon + 3
           << " rows for 3 folds of horizon " << horizon << ", got " << N;
        throw DataError(os.str());
    }

    CvResult res;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [lt, lh] : grid) {
        FitConfig fold_cfg = cfg;
        fold_cfg.lambda_T = lt;
        fold_cfg.lambda_H = lh;
        double loss_sum = 0.0;
        for (int fold = 1; fold <= 3; ++fold) {
            const Eigen::Index v_start = N - fold * horizon;
            TimeSeries train = data.window(v_start - W, W);
            double fold_loss;
            try {
                NetworkFit fit = fit_network(train, kernel, family, fold_cfg);
                double acc = 0.0;
                Eigen::Index cnt = 0;
                for (Eigen::Index t = v_start - 1; t + 1 < v_start + horizon; ++t) {
                    Prediction pr = predict(fit, data.values.row(t).transpose());
                    for (Eigen::Index j = 0; j < data.dim(); ++j) {
                        const double obs = data.values(t + 1, j);
                        if (family.kind() == FamilyKind::Poisson)
                            acc += (obs - pr.mean[j]) * (obs - pr.mean[j]) /
                                   pr.mean[j];
                        else
                            acc += (obs - pr.mean[j]) * (obs - pr.mean[j]);
                        ++cnt;
                    }
                }
                fold_loss = acc / static_cast<double>(cnt);
            } catch (const NumericError&) {
                fold_loss = std::numeric_limits<double>::infinity();
            }
            loss_sum += fold_loss;
        }
        const double mean_loss = loss_sum / 3.0;
        res.table.push_back({lt, lh, mean_loss});
        // Prefer sparser (larger penalties) on ties.
        const bool better =
            mean_loss < best ||
            (mean_loss == best &&
             (lt > res.lambda_T || (lt == res.lambda_T && lh > res.lambda_H)));
        if (better) {
            best = mean_loss;
            res.lambda_T = lt;
            res.lambda_H = lh;
        }
    }
    return res;
}

}  // namespace spamnet
