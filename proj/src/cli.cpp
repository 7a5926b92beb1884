#include "spamnet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "spamnet/errors.hpp"
#include "spamnet/glm.hpp"
#include "spamnet/io.hpp"
#include "spamnet/network.hpp"
#include "spamnet/rates.hpp"
#include "spamnet/simulate.hpp"

namespace spamnet {

namespace {

namespace fs = std::filesystem;

FamilyKind family_from_config(const Config& cfg, const std::string& section) {
    const std::string name = cfg.get_string(section, section == "sim" ? "family" : "kind");
    if (name == "gaussian") return FamilyKind::Gaussian;
    if (name == "poisson") return FamilyKind::Poisson;
    if (name == "bernoulli") return FamilyKind::Bernoulli;
    throw ConfigError("unknown family '" + name + "'");
}

KernelSpec kernel_from_config(const Config& cfg) {
    cfg.require_section("kernel");
    const std::string kind = cfg.get_string("kernel", "kind");
    const std::string basis_name =
        cfg.get_string("kernel", "basis", "poly_factorial");
    BasisId basis;
    if (basis_name == "poly_factorial")
        basis = BasisId::PolyFactorial;
    else if (basis_name == "cosine")
        basis = BasisId::Cosine;
    else
        throw ConfigError("unknown basis '" + basis_name + "'");

    if (kind == "eigen_decay") {
        const double alpha = cfg.get_double("kernel", "alpha");
        if (cfg.has("kernel", "M"))
            return KernelSpec::eigen_decay(
                alpha, static_cast<int>(cfg.get_int("kernel", "M")), basis);
        return KernelSpec::eigen_decay_auto(alpha, basis);
    }
    if (kind == "finite_rank" || kind == "custom") {
        std::vector<double> mu;
        if (cfg.has("kernel", "mu")) {
            mu = cfg.get_double_list("kernel", "mu");
        } else {
            const long M = cfg.get_int("kernel", "M");
            if (M < 1) throw ConfigError("kernel M must be positive");
            mu.assign(M, 1.0);
        }
        return kind == "custom" ? KernelSpec::custom(std::move(mu), basis)
                                : KernelSpec::finite_rank(std::move(mu), basis);
    }
    throw ConfigError("unknown kernel kind '" + kind + "'");
}

MixingSpec mixing_from_config(const Config& cfg) {
    cfg.require_section("mixing");
    MixingSpec mix;
    const std::string kind = cfg.get_string("mixing", "kind");
    if (kind == "beta")
        mix.kind = MixingKind::Beta;
    else if (kind == "phi")
        mix.kind = MixingKind::Phi;
    else
        throw ConfigError("unknown mixing kind '" + kind + "'");
    mix.r = cfg.get_double("mixing", "r");
    mix.c0 = cfg.get_double("mixing", "c0", 1.0);
    mix.validate();
    return mix;
}

FitConfig fit_config_from(const Config& cfg, Eigen::Index d) {
    FitConfig fc;
    fc.center = cfg.get_bool("fit", "center", true);
    fc.intercept_column = cfg.get_bool("fit", "intercept", false);
    fc.max_outer = static_cast<int>(cfg.get_int("fit", "max_outer", 500));
    fc.max_inner = static_cast<int>(cfg.get_int("fit", "max_inner", 200));
    fc.tol_rel_obj = cfg.get_double("fit", "tol_rel_obj", 1e-6);
    fc.admm_rho = cfg.get_double("fit", "rho", 1.0);
    if (cfg.has("fit", "offsets")) {
        const std::vector<double> v = cfg.get_double_list("fit", "offsets");
        if (static_cast<Eigen::Index>(v.size()) == 1)
            fc.offsets = Eigen::VectorXd::Constant(d, v[0]);
        else {
            if (static_cast<Eigen::Index>(v.size()) != d)
                throw ConfigError("offsets list must have length 1 or d");
            fc.offsets = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
        }
    }
    return fc;
}

std::vector<std::pair<double, double>> lambda_grid_from(const Config& cfg) {
    // grid = lt:lh; lt:lh; ...
    const std::string raw = cfg.get_string("lambda", "grid");
    std::vector<std::pair<double, double>> grid;
    std::istringstream in(raw);
    std::string piece;
    while (std::getline(in, piece, ';')) {
        const size_t colon = piece.find(':');
        if (colon == std::string::npos)
            throw ConfigError("lambda grid entries must look like lt:lh");
        try {
            grid.emplace_back(std::stod(piece.substr(0, colon)),
                              std::stod(piece.substr(colon + 1)));
        } catch (const std::exception&) {
            throw ConfigError("malformed lambda grid entry '" + piece + "'");
        }
    }
    if (grid.empty()) throw ConfigError("lambda grid is empty");
    return grid;
}

std::uint64_t effective_seed(const Config& cfg, const CliInvocation& inv,
                             const std::string& section, const std::string& key) {
    if (inv.seed_override >= 0) return static_cast<std::uint64_t>(inv.seed_override);
    if (cfg.has(section, key))
        return static_cast<std::uint64_t>(cfg.get_int(section, key));
    return static_cast<std::uint64_t>(cfg.get_int("run", "seed", 0));
}

void ensure_out(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir);
}

Eigen::MatrixXi adjacency_from_supports(const NetworkFit& fit,
                                        double support_eps = -1.0) {
    const int d = fit.dim();
    Eigen::MatrixXi A = Eigen::MatrixXi::Zero(d, d);
    for (int j = 0; j < d; ++j)
        for (int k : fit.node_fits[j].support(support_eps)) A(j, k) = 1;
    return A;
}

int cmd_simulate(const Config& cfg, const CliInvocation& inv) {
    cfg.require_section("sim");
    SimSpec sp;
    sp.family = family_from_config(cfg, "sim");
    sp.d = static_cast<int>(cfg.get_int("sim", "d"));
    sp.T = static_cast<int>(cfg.get_int("sim", "T"));
    sp.r = static_cast<int>(cfg.get_int("sim", "r", 1));
    sp.s = static_cast<int>(cfg.get_int("sim", "s", 3));
    sp.burn_in = static_cast<int>(cfg.get_int("sim", "burn_in", 200));
    sp.seed = effective_seed(cfg, inv, "sim", "seed");
    sp.validate();

    auto [data, truth] = sp.family == FamilyKind::Gaussian ? gen_gaussian(sp)
                                                           : gen_poisson(sp);
    ensure_out(inv.out_dir);
    save_csv((fs::path(inv.out_dir) / "data.csv").string(), data);
    save_ground_truth((fs::path(inv.out_dir) / "truth.json").string(), truth);
    write_manifest(inv.out_dir, "simulate", cfg.text(), sp.seed);
    std::cout << "wrote " << (fs::path(inv.out_dir) / "data.csv").string() << " ("
              << data.rows() << " rows, " << data.dim() << " columns)\n";
    return 0;
}

int cmd_rates(const Config& cfg, const CliInvocation& inv) {
    KernelSpec kernel = kernel_from_config(cfg);
    MixingSpec mix = mixing_from_config(cfg);
    cfg.require_section("rates");
    const long T = cfg.get_int("rates", "T");
    const long d = cfg.get_int("rates", "d");
    const double c1 = cfg.get_double("rates", "c1", 1.0);
    const double c4 = cfg.get_double("rates", "c4", 1.0);
    const double C = cfg.get_double("rates", "C", 1.0);
    std::vector<long> s_list = {1};
    if (cfg.has("rates", "s")) s_list = cfg.get_int_list("rates", "s");
    const double v_min = cfg.get_double("rates", "v_min", 0.0);
    const double v_max = cfg.get_double("rates", "v_max", 0.0);

    RatesReport rep = tuning(kernel, mix, T, d, c1);
    GlmFamily fam(cfg.has_section("family") ? family_from_config(cfg, "family")
                                            : FamilyKind::Gaussian);
    const int s_max =
        static_cast<int>(*std::max_element(s_list.begin(), s_list.end()));
    const double theta = strong_convexity(fam, v_min, v_max, s_max, kernel.trace());
    for (long s : s_list) {
        rep.delta_mj.push_back(delta_mj(static_cast<int>(s), d, rep.m, rep.epsilon_m, c4));
        rep.bound.push_back(
            error_bound(static_cast<int>(s), theta, d, rep.m, T, rep.epsilon_tilde_m, C));
    }

    ensure_out(inv.out_dir);
    save_rates_report((fs::path(inv.out_dir) / "rates.txt").string(), rep);
    write_manifest(inv.out_dir, "rates", cfg.text(),
                   effective_seed(cfg, inv, "run", "seed"));
    std::cout << "m = " << rep.m << ", epsilon_m = " << rep.epsilon_m
              << ", epsilon_tilde_m = " << rep.epsilon_tilde_m
              << ", lambda_T = " << rep.lambda_T << ", lambda_H = " << rep.lambda_H
              << "\n";
    return 0;
}

std::pair<double, double> resolve_lambda(const Config& cfg, const TimeSeries& data,
                                         const KernelSpec& kernel,
                                         const GlmFamily& family,
                                         const FitConfig& fc) {
    cfg.require_section("lambda");
    const std::string mode = cfg.get_string("lambda", "mode");
    if (mode == "fixed") {
        return {cfg.get_double("lambda", "lambda_t"),
                cfg.get_double("lambda", "lambda_h", 0.0)};
    }
    if (mode == "theory") {
        MixingSpec mix = mixing_from_config(cfg);
        const double c1 = cfg.get_double("rates", "c1", 1.0);
        RatesReport rep = tuning(kernel, mix, data.transitions(), data.dim(), c1);
        return {rep.lambda_T, rep.lambda_H};
    }
    if (mode == "cv") {
        const auto grid = lambda_grid_from(cfg);
        const long horizon = cfg.get_int("lambda", "horizon");
        CvResult cv = cross_validate(data, grid, horizon, kernel, family, fc);
        return {cv.lambda_T, cv.lambda_H};
    }
    throw ConfigError("lambda mode must be theory, fixed or cv");
}

int cmd_fit(const Config& cfg, const CliInvocation& inv) {
    if (inv.data_path.empty()) throw ConfigError("fit requires --data <csv>");
    TimeSeries data = load_csv(inv.data_path);
    KernelSpec kernel = kernel_from_config(cfg);
    cfg.require_section("family");
    GlmFamily family(family_from_config(cfg, "family"));
    FitConfig fc = fit_config_from(cfg, data.dim());
    auto [lt, lh] = resolve_lambda(cfg, data, kernel, family, fc);
    fc.lambda_T = lt;
    fc.lambda_H = lh;
    const int threads = static_cast<int>(cfg.get_int("fit", "threads", 1));

    if (data.transitions() < kernel.rank())
        std::cerr << "warning: T = " << data.transitions() << " < M = "
                  << kernel.rank() << ", designs are rank deficient\n";
    NetworkFit fit = fit_network(data, kernel, family, fc, threads);

    ensure_out(inv.out_dir);
    save_network_fit((fs::path(inv.out_dir) / "fit.json").string(), fit);
    save_adjacency_csv((fs::path(inv.out_dir) / "adjacency.csv").string(),
                       adjacency_from_supports(
                           fit, cfg.get_double("fit", "support_threshold", -1.0)));
    {
        std::ofstream rep(fs::path(inv.out_dir) / "report.txt");
        rep.precision(17);
        rep << "family = " << family.name() << "\nkernel = " << kernel.describe()
            << "\nlambda_T = " << lt << "\nlambda_H = " << lh << "\n";
        for (const NodeFit& nf : fit.node_fits) {
            rep << "node " << nf.node << ": converged = " << nf.converged
                << ", objective = " << nf.objective_trace.back() << ", support =";
            for (int k : nf.support()) rep << ' ' << k;
            rep << "\n";
        }
    }
    write_manifest(inv.out_dir, "fit", cfg.text(),
                   effective_seed(cfg, inv, "run", "seed"),
                   content_hash(std::to_string(data.rows()) + "x" +
                                std::to_string(data.dim())));
    int edges = 0, unconverged = 0;
    for (const NodeFit& nf : fit.node_fits) {
        edges += static_cast<int>(nf.support().size());
        if (!nf.converged) ++unconverged;
    }
    std::cout << "fit " << fit.dim() << " nodes, lambda_T = " << lt
              << ", lambda_H = " << lh << ", " << edges << " edges";
    if (unconverged) std::cout << ", " << unconverged << " nodes not converged";
    std::cout << "\n";
    return 0;
}

int cmd_cv(const Config& cfg, const CliInvocation& inv) {
    if (inv.data_path.empty()) throw ConfigError("cv requires --data <csv>");
    TimeSeries data = load_csv(inv.data_path);
    KernelSpec kernel = kernel_from_config(cfg);
    cfg.require_section("family");
    GlmFamily family(family_from_config(cfg, "family"));
    FitConfig fc = fit_config_from(cfg, data.dim());
    cfg.require_section("lambda");
    const auto grid = lambda_grid_from(cfg);
    const long horizon = cfg.get_int("lambda", "horizon");

    CvResult cv = cross_validate(data, grid, horizon, kernel, family, fc);

    ensure_out(inv.out_dir);
    std::ofstream out(fs::path(inv.out_dir) / "cv.csv");
    if (!out) throw DataError("cannot write cv.csv");
    out << "lambda_T,lambda_H,mean_loss\n";
    out.precision(17);
    for (const auto& row : cv.table)
        out << row[0] << ',' << row[1] << ',' << row[2] << '\n';
    std::ofstream sel(fs::path(inv.out_dir) / "selected_lambda.txt");
    sel.precision(17);
    sel << "lambda_T = " << cv.lambda_T << "\nlambda_H = " << cv.lambda_H << "\n";
    write_manifest(inv.out_dir, "cv", cfg.text(),
                   effective_seed(cfg, inv, "run", "seed"));
    std::cout << "selected lambda_T = " << cv.lambda_T
              << ", lambda_H = " << cv.lambda_H << "\n";
    return 0;
}

int cmd_experiment(const Config& cfg, const CliInvocation& inv) {
    cfg.require_section("experiment");
    GridConfig gc;
    for (const std::string& f : cfg.get_string_list("experiment", "families")) {
        if (f == "gaussian")
            gc.families.push_back(FamilyKind::Gaussian);
        else if (f == "poisson")
            gc.families.push_back(FamilyKind::Poisson);
        else
            throw ConfigError("experiment families must be gaussian or poisson");
    }
    for (long v : cfg.get_int_list("experiment", "d_list"))
        gc.d_list.push_back(static_cast<int>(v));
    for (long v : cfg.get_int_list("experiment", "T_list"))
        gc.T_list.push_back(static_cast<int>(v));
    for (long v : cfg.get_int_list("experiment", "r_list"))
        gc.r_list.push_back(static_cast<int>(v));
    gc.trials = static_cast<int>(cfg.get_int("experiment", "trials", 20));
    gc.s = static_cast<int>(cfg.get_int("experiment", "s", 3));
    gc.threads = static_cast<int>(cfg.get_int("experiment", "threads", 1));
    gc.seed0 = effective_seed(cfg, inv, "experiment", "seed0");

    std::vector<GridRow> rows = run_grid(gc);
    ensure_out(inv.out_dir);
    save_grid_rows((fs::path(inv.out_dir) / "grid.csv").string(), rows);
    save_grid_rows_jsonl((fs::path(inv.out_dir) / "grid.jsonl").string(), rows);

    // Per-(family,d,r): median MSE per T with log coordinates, then the
    // least-squares slope of log(median) on log(T).
    std::ofstream trend(fs::path(inv.out_dir) / "trend.csv");
    trend << "family,d,r,T,median_mse,log_T,log_median_mse\n";
    trend.precision(17);
    std::ofstream slopes(fs::path(inv.out_dir) / "slopes.csv");
    slopes << "family,d,r,slope\n";
    slopes.precision(17);
    for (FamilyKind fam : gc.families) {
        for (int d : gc.d_list) {
            for (int r : gc.r_list) {
                std::vector<double> xs, ys;
                for (int T : gc.T_list) {
                    std::vector<double> vals;
                    for (const GridRow& row : rows)
                        if (row.family == fam && row.d == d && row.r == r &&
                            row.T == T && !row.failed)
                            vals.push_back(row.mse);
                    if (vals.empty()) continue;
                    std::sort(vals.begin(), vals.end());
                    const double med = vals.size() % 2
                                           ? vals[vals.size() / 2]
                                           : 0.5 * (vals[vals.size() / 2 - 1] +
                                                    vals[vals.size() / 2]);
                    trend << GlmFamily(fam).name() << ',' << d << ',' << r << ','
                          << T << ',' << med << ',' << std::log(T) << ','
                          << std::log(med) << '\n';
                    xs.push_back(std::log(T));
                    ys.push_back(std::log(med));
                }
                if (xs.size() >= 2) {
                    double mx = 0, my = 0;
                    for (size_t i = 0; i < xs.size(); ++i) {
                        mx += xs[i];
                        my += ys[i];
                    }
                    mx /= xs.size();
                    my /= ys.size();
                    double num = 0, den = 0;
                    for (size_t i = 0; i < xs.size(); ++i) {
                        num += (xs[i] - mx) * (ys[i] - my);
                        den += (xs[i] - mx) * (xs[i] - mx);
                    }
                    slopes << GlmFamily(fam).name() << ',' << d << ',' << r << ','
                           << num / den << '\n';
                }
            }
        }
    }
    write_manifest(inv.out_dir, "experiment", cfg.text(), gc.seed0);
    std::cout << "wrote " << rows.size() << " grid rows to "
              << (fs::path(inv.out_dir) / "grid.csv").string() << "\n";
    return 0;
}

int cmd_cluster(const Config& cfg, const CliInvocation& inv) {
    cfg.require_section("cluster");
    NetworkFit fit = load_network_fit(cfg.get_string("cluster", "fit"));
    ClusterConfig cc;
    cc.k = static_cast<int>(cfg.get_int("cluster", "k"));
    cc.lambda_cov = cfg.get_double("cluster", "lambda_cov", 0.0);
    cc.kmeans_restarts = static_cast<int>(cfg.get_int("cluster", "restarts", 10));
    cc.seed = effective_seed(cfg, inv, "cluster", "seed");

    Eigen::MatrixXi A = adjacency_from_supports(fit);
    std::vector<int> labels;
    if (cfg.has("cluster", "coords")) {
        Eigen::MatrixXd coords = load_matrix_csv(cfg.get_string("cluster", "coords"));
        labels = covariate_cluster(A, coords, cc);
    } else {
        labels = spectral_cluster(A, cc);
    }
    ensure_out(inv.out_dir);
    save_adjacency_csv((fs::path(inv.out_dir) / "adjacency.csv").string(), A);
    save_labels_csv((fs::path(inv.out_dir) / "labels.csv").string(), labels);
    write_manifest(inv.out_dir, "cluster", cfg.text(), cc.seed);
    std::cout << "wrote labels for " << labels.size() << " nodes\n";
    return 0;
}

int cmd_predict(const Config& cfg, const CliInvocation& inv) {
    cfg.require_section("predict");
    if (inv.data_path.empty()) throw ConfigError("predict requires --data <csv>");
    NetworkFit fit = load_network_fit(cfg.get_string("predict", "fit"));
    TimeSeries data = load_csv(inv.data_path);
    if (data.dim() != fit.dim())
        throw DataError("prediction data dimension does not match the fit");

    ensure_out(inv.out_dir);
    std::ofstream out(fs::path(inv.out_dir) / "predictions.csv");
    if (!out) throw DataError("cannot write predictions.csv");
    for (int j = 0; j < fit.dim(); ++j) out << (j ? "," : "") << "eta_" << j;
    for (int j = 0; j < fit.dim(); ++j) out << ",mean_" << j;
    out << '\n';
    out.precision(17);
    for (Eigen::Index t = 0; t < data.rows(); ++t) {
        Prediction pr = predict(fit, data.values.row(t).transpose());
        for (int j = 0; j < fit.dim(); ++j) out << (j ? "," : "") << pr.eta[j];
        for (int j = 0; j < fit.dim(); ++j) out << ',' << pr.mean[j];
        out << '\n';
    }
    write_manifest(inv.out_dir, "predict", cfg.text(),
                   effective_seed(cfg, inv, "run", "seed"));
    std::cout << "wrote predictions for " << data.rows() << " rows\n";
    return 0;
}

}  // namespace

int run_command(const CliInvocation& inv) {
    static const std::set<std::string> known = {
        "simulate", "fit", "rates", "experiment", "cluster", "cv", "predict"};
    if (!known.count(inv.command))
        throw ConfigError("unknown command '" + inv.command + "'");
    Config cfg = Config::parse_file(inv.config_path);
    if (inv.command == "simulate") return cmd_simulate(cfg, inv);
    if (inv.command == "fit") return cmd_fit(cfg, inv);
    if (inv.command == "rates") return cmd_rates(cfg, inv);
    if (inv.command == "experiment") return cmd_experiment(cfg, inv);
    if (inv.command == "cluster") return cmd_cluster(cfg, inv);
    if (inv.command == "cv") return cmd_cv(cfg, inv);
    if (inv.command == "predict") return cmd_predict(cfg, inv);
    throw ConfigError("unknown command '" + inv.command + "'");
}

int run_cli(int argc, const char* const* argv) {
    const std::string usage =
        "usage: spamnet {simulate|fit|rates|experiment|cluster|cv|predict} "
        "--config <path> [--data <csv>] [--out <dir>] [--seed <int>]";
    try {
        CliInvocation inv;
        if (argc < 2) throw ConfigError(usage);
        inv.command = argv[1];
        if (inv.command == "-h" || inv.command == "--help") {
            std::cout << usage << "\n";
            return 0;
        }
        for (int i = 2; i < argc; ++i) {
            const std::string a = argv[i];
            auto next = [&]() -> std::string {
                if (i + 1 >= argc) throw ConfigError("missing value after " + a);
                return argv[++i];
            };
            if (a == "--config")
                inv.config_path = next();
            else if (a == "--data")
                inv.data_path = next();
            else if (a == "--out")
                inv.out_dir = next();
            else if (a == "--seed") {
                try {
                    inv.seed_override = std::stol(next());
                } catch (const std::exception&) {
                    throw ConfigError("--seed expects an integer");
                }
            } else {
                throw ConfigError("unknown option '" + a + "'\n" + usage);
            }
        }
        if (inv.config_path.empty()) throw ConfigError("--config is required\n" + usage);
        return run_command(inv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace spamnet
