#include "spamnet/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spamnet/errors.hpp"

namespace spamnet {

const char* kVersion = "spamnet 0.1.0";

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

double parse_double_cell(const std::string& cell, long row, long col) {
    const std::string t = trim(cell);
    double v = 0.0;
    const auto* begin = t.data();
    const auto* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        std::ostringstream os;
        os << "non-numeric cell at row " << row << ", column " << col << ": '"
           << t << "'";
        throw DataError(os.str());
    }
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite value at row " << row << ", column " << col;
        throw DataError(os.str());
    }
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Allowed configuration schema; unknown sections/keys are hard errors.
const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"kernel", {"kind", "basis", "M", "alpha", "mu"}},
        {"family", {"kind"}},
        {"mixing", {"kind", "r", "c0"}},
        {"lambda", {"mode", "lambda_t", "lambda_h", "grid", "horizon"}},
        {"fit",
         {"center", "intercept", "max_outer", "max_inner", "tol_rel_obj", "rho",
          "threads", "support_threshold", "offsets"}},
        {"sim", {"family", "d", "T", "r", "s", "seed", "burn_in"}},
        {"experiment",
         {"families", "d_list", "T_list", "r_list", "trials", "seed0", "s",
          "threads"}},
        {"cluster", {"k", "lambda_cov", "restarts", "seed", "fit", "coords"}},
        {"rates", {"T", "d", "s", "c1", "c4", "C", "v_min", "v_max"}},
        {"predict", {"fit"}},
        {"run", {"seed", "out"}},
    };
    return schema;
}

json kernel_to_json(const KernelSpec& k) {
    json j;
    switch (k.kind()) {
        case KernelKind::FiniteRank: j["kind"] = "finite_rank"; break;
        case KernelKind::EigenDecay: j["kind"] = "eigen_decay"; break;
        case KernelKind::Custom: j["kind"] = "custom"; break;
    }
    j["basis"] = k.basis() == BasisId::PolyFactorial ? "poly_factorial" : "cosine";
    j["M"] = k.rank();
    if (k.kind() == KernelKind::EigenDecay) j["alpha"] = k.decay_alpha();
    j["mu"] = k.eigenvalues();
    return j;
}

KernelSpec kernel_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const BasisId basis = j.at("basis").get<std::string>() == "cosine"
                              ? BasisId::Cosine
                              : BasisId::PolyFactorial;
    if (kind == "eigen_decay")
        return KernelSpec::eigen_decay(j.at("alpha").get<double>(),
                                       j.at("M").get<int>(), basis);
    auto mu = j.at("mu").get<std::vector<double>>();
    return kind == "custom" ? KernelSpec::custom(std::move(mu), basis)
                            : KernelSpec::finite_rank(std::move(mu), basis);
}

FamilyKind family_from_name(const std::string& name) {
    if (name == "gaussian") return FamilyKind::Gaussian;
    if (name == "poisson") return FamilyKind::Poisson;
    if (name == "bernoulli") return FamilyKind::Bernoulli;
    throw ConfigError("unknown family: " + name);
}

}  // namespace

TimeSeries load_csv(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty csv: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> names = split(line, ',');
    const size_t d = names.size();
    if (d == 0) throw DataError("csv header has no columns: " + path);

    std::vector<std::vector<double>> rows;
    long rowno = 1;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split(line, ',');
        if (cells.size() != d) {
            std::ostringstream os;
            os << "ragged row " << rowno << " in " << path << ": expected " << d
               << " cells, got " << cells.size();
            throw DataError(os.str());
        }
        std::vector<double> vals(d);
        for (size_t c = 0; c < d; ++c)
            vals[c] = parse_double_cell(cells[c], rowno, static_cast<long>(c));
        rows.push_back(std::move(vals));
        ++rowno;
    }
    if (rows.size() < 1) throw DataError("csv has no data rows: " + path);

    TimeSeries ts;
    ts.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < d; ++c) ts.values(r, c) = rows[r][c];
    for (const std::string& n : names) ts.column_names.push_back(trim(n));
    return ts;
}

void save_csv(const std::string& path, const TimeSeries& ts) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    for (Eigen::Index c = 0; c < ts.values.cols(); ++c) {
        if (c) out << ',';
        out << (c < static_cast<Eigen::Index>(ts.column_names.size())
                    ? ts.column_names[c]
                    : "x" + std::to_string(c));
    }
    out << '\n';
    for (Eigen::Index r = 0; r < ts.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < ts.values.cols(); ++c) {
            if (c) out << ',';
            out << fmt17(ts.values(r, c));
        }
        out << '\n';
    }
}

Config Config::parse_file(const std::string& path) {
    return parse_text(read_file(path), path);
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.text_ = text;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t cpos = line.find_first_of("#;");
        if (cpos != std::string::npos) line = line.substr(0, cpos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": empty section name");
            cfg.sections_[section];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected key = value");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.sections_[section].count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": duplicate key '" + key + "'");
        cfg.sections_[section][key] = val;
    }
    cfg.validate_schema();
    return cfg;
}

void Config::validate_schema() const {
    const auto& schema = config_schema();
    for (const auto& [section, kv] : sections_) {
        auto it = schema.find(section);
        if (it == schema.end())
            throw ConfigError(origin_ + ": unknown section [" + section + "]");
        for (const auto& [key, _] : kv)
            if (!it->second.count(key))
                throw ConfigError(origin_ + ": unknown key '" + key +
                                  "' in section [" + section + "]");
    }
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

bool Config::has_section(const std::string& section) const {
    return sections_.count(section) > 0;
}

void Config::require_section(const std::string& section) const {
    if (!has_section(section))
        throw ConfigError(origin_ + ": missing required section [" + section + "]");
}

std::string Config::get_string(const std::string& section,
                               const std::string& key) const {
    if (!has(section, key))
        throw ConfigError(origin_ + ": missing key '" + key + "' in section [" +
                          section + "]");
    return sections_.at(section).at(key);
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? sections_.at(section).at(key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "' in [" + section +
                          "] is not a number: '" + v + "'");
    }
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    try {
        size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "' in [" + section +
                          "] is not an integer: '" + v + "'");
    }
}

long Config::get_int(const std::string& section, const std::string& key,
                     long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string v = get_string(section, key);
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw ConfigError(origin_ + ": key '" + key + "' in [" + section +
                      "] is not a boolean: '" + v + "'");
}

std::vector<std::string> Config::get_string_list(const std::string& section,
                                                 const std::string& key) const {
    std::vector<std::string> out;
    for (const std::string& piece : split(get_string(section, key), ',')) {
        const std::string t = trim(piece);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key) const {
    std::vector<double> out;
    for (const std::string& piece : get_string_list(section, key)) {
        try {
            out.push_back(std::stod(piece));
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ": list element '" + piece + "' in key '" +
                              key + "' is not a number");
        }
    }
    return out;
}

std::vector<long> Config::get_int_list(const std::string& section,
                                       const std::string& key) const {
    std::vector<long> out;
    for (const std::string& piece : get_string_list(section, key)) {
        try {
            out.push_back(std::stol(piece));
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ": list element '" + piece + "' in key '" +
                              key + "' is not an integer");
        }
    }
    return out;
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void save_network_fit(const std::string& path, const NetworkFit& fit) {
    json j;
    j["version"] = kVersion;
    j["kernel"] = kernel_to_json(fit.kernel);
    j["family"] = fit.family.name();
    json cfg;
    cfg["lambda_T"] = fit.config.lambda_T;
    cfg["lambda_H"] = fit.config.lambda_H;
    cfg["max_outer"] = fit.config.max_outer;
    cfg["max_inner"] = fit.config.max_inner;
    cfg["tol_rel_obj"] = fit.config.tol_rel_obj;
    cfg["admm_rho"] = fit.config.admm_rho;
    cfg["center"] = fit.config.center;
    cfg["intercept_column"] = fit.config.intercept_column;
    cfg["offsets"] = std::vector<double>(
        fit.config.offsets.data(), fit.config.offsets.data() + fit.config.offsets.size());
    j["config"] = cfg;

    std::vector<std::vector<double>> cm;
    for (Eigen::Index k = 0; k < fit.centering_means.rows(); ++k)
        cm.emplace_back(fit.centering_means.row(k).data(),
                        fit.centering_means.row(k).data() + fit.centering_means.cols());
    j["centering_means"] = cm;

    json nodes = json::array();
    for (const NodeFit& nf : fit.node_fits) {
        json n;
        n["node"] = nf.node;
        n["intercept"] = nf.intercept;
        std::vector<std::vector<double>> beta;
        for (const Eigen::VectorXd& b : nf.beta)
            beta.emplace_back(b.data(), b.data() + b.size());
        n["beta"] = beta;
        n["norms_T"] = std::vector<double>(nf.norms_T.data(),
                                           nf.norms_T.data() + nf.norms_T.size());
        n["norms_H"] = std::vector<double>(nf.norms_H.data(),
                                           nf.norms_H.data() + nf.norms_H.size());
        n["objective_trace"] = nf.objective_trace;
        n["converged"] = nf.converged;
        const std::set<int> sup = nf.support();
        n["support"] = std::vector<int>(sup.begin(), sup.end());
        nodes.push_back(std::move(n));
    }
    j["nodes"] = nodes;

    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

NetworkFit load_network_fit(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw DataError("cannot parse fit file " + path + ": " + e.what());
    }
    try {
        KernelSpec kernel = kernel_from_json(j.at("kernel"));
        GlmFamily family(family_from_name(j.at("family").get<std::string>()));
        FitConfig cfg;
        const json& c = j.at("config");
        cfg.lambda_T = c.at("lambda_T").get<double>();
        cfg.lambda_H = c.at("lambda_H").get<double>();
        cfg.max_outer = c.at("max_outer").get<int>();
        cfg.max_inner = c.at("max_inner").get<int>();
        cfg.tol_rel_obj = c.at("tol_rel_obj").get<double>();
        cfg.admm_rho = c.at("admm_rho").get<double>();
        cfg.center = c.at("center").get<bool>();
        cfg.intercept_column = c.at("intercept_column").get<bool>();
        auto off = c.at("offsets").get<std::vector<double>>();
        cfg.offsets = Eigen::Map<Eigen::VectorXd>(off.data(), off.size());

        auto cm = j.at("centering_means").get<std::vector<std::vector<double>>>();
        NetworkFit fit{std::vector<NodeFit>(), kernel, family, cfg,
                       Eigen::MatrixXd::Zero(cm.size(), kernel.rank())};
        for (size_t k = 0; k < cm.size(); ++k)
            fit.centering_means.row(k) =
                Eigen::Map<Eigen::VectorXd>(cm[k].data(), cm[k].size()).transpose();

        for (const json& n : j.at("nodes")) {
            NodeFit nf;
            nf.node = n.at("node").get<int>();
            nf.intercept = n.at("intercept").get<double>();
            for (const auto& b : n.at("beta").get<std::vector<std::vector<double>>>()) {
                Eigen::VectorXd v =
                    Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
                nf.beta.push_back(v);
            }
            auto nt = n.at("norms_T").get<std::vector<double>>();
            auto nh = n.at("norms_H").get<std::vector<double>>();
            nf.norms_T = Eigen::Map<Eigen::VectorXd>(nt.data(), nt.size());
            nf.norms_H = Eigen::Map<Eigen::VectorXd>(nh.data(), nh.size());
            nf.objective_trace = n.at("objective_trace").get<std::vector<double>>();
            nf.converged = n.at("converged").get<bool>();
            fit.node_fits.push_back(std::move(nf));
        }
        return fit;
    } catch (const json::exception& e) {
        throw DataError("malformed fit file " + path + ": " + e.what());
    }
}

void save_ground_truth(const std::string& path, const GroundTruth& truth) {
    json j;
    std::vector<std::vector<double>> A;
    for (Eigen::Index r = 0; r < truth.A_star.rows(); ++r)
        A.emplace_back(truth.A_star.row(r).data(),
                       truth.A_star.row(r).data() + truth.A_star.cols());
    j["A_star"] = A;
    json b = json::array();
    for (const Eigen::MatrixXd& m : truth.b) {
        std::vector<std::vector<double>> rows;
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            rows.emplace_back(m.row(r).data(), m.row(r).data() + m.cols());
        b.push_back(rows);
    }
    j["b"] = b;
    json sup = json::array();
    for (const auto& s : truth.supports)
        sup.push_back(std::vector<int>(s.begin(), s.end()));
    j["supports"] = sup;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

void save_rates_report(const std::string& path, const RatesReport& rep) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "m = " << rep.m << '\n';
    out << "epsilon_m = " << fmt17(rep.epsilon_m) << '\n';
    out << "epsilon_tilde_m = " << fmt17(rep.epsilon_tilde_m) << '\n';
    out << "M0 = " << rep.M0 << '\n';
    out << "gamma_m = " << fmt17(rep.gamma_m) << '\n';
    out << "gamma_tilde_m = " << fmt17(rep.gamma_tilde_m) << '\n';
    out << "lambda_T = " << fmt17(rep.lambda_T) << '\n';
    out << "lambda_H = " << fmt17(rep.lambda_H) << '\n';
    for (size_t i = 0; i < rep.delta_mj.size(); ++i)
        out << "delta_m_" << i << " = " << fmt17(rep.delta_mj[i]) << '\n';
    for (size_t i = 0; i < rep.bound.size(); ++i)
        out << "bound_" << i << " = " << fmt17(rep.bound[i]) << '\n';
}

void save_grid_rows(const std::string& path, const std::vector<GridRow>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "family,d,T,r,trial,mse,precision,recall,seconds\n";
    for (const GridRow& r : rows) {
        out << GlmFamily(r.family).name() << ',' << r.d << ',' << r.T << ',' << r.r
            << ',' << r.trial << ',';
        if (r.failed)
            out << "NA,NA,NA";
        else
            out << fmt17(r.mse) << ',' << fmt17(r.precision) << ','
                << fmt17(r.recall);
        out << ',' << fmt17(r.seconds) << '\n';
    }
}

void save_grid_rows_jsonl(const std::string& path, const std::vector<GridRow>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    for (const GridRow& r : rows) {
        json j;
        j["family"] = GlmFamily(r.family).name();
        j["d"] = r.d;
        j["T"] = r.T;
        j["r"] = r.r;
        j["trial"] = r.trial;
        if (r.failed) {
            j["failed"] = true;
            j["error"] = r.error;
        } else {
            j["mse"] = r.mse;
            j["precision"] = r.precision;
            j["recall"] = r.recall;
        }
        j["seconds"] = r.seconds;
        out << j.dump() << '\n';
    }
}

void save_labels_csv(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "node,label\n";
    for (size_t i = 0; i < labels.size(); ++i)
        out << i << ',' << labels[i] << '\n';
}

void save_adjacency_csv(const std::string& path, const Eigen::MatrixXi& A) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        for (Eigen::Index c = 0; c < A.cols(); ++c) {
            if (c) out << ',';
            out << A(r, c);
        }
        out << '\n';
    }
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    long rowno = 0;
    size_t width = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split(line, ',');
        if (rows.empty()) width = cells.size();
        if (cells.size() != width) {
            std::ostringstream os;
            os << "ragged row " << rowno << " in " << path;
            throw DataError(os.str());
        }
        std::vector<double> vals(width);
        for (size_t c = 0; c < width; ++c)
            vals[c] = parse_double_cell(cells[c], rowno, static_cast<long>(c));
        rows.push_back(std::move(vals));
        ++rowno;
    }
    if (rows.empty()) throw DataError("matrix csv has no rows: " + path);
    Eigen::MatrixXd M(rows.size(), width);
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < width; ++c) M(r, c) = rows[r][c];
    return M;
}

void write_manifest(const std::string& dir, const std::string& command,
                    const std::string& config_text, std::uint64_t seed,
                    const std::string& data_hash) {
    json j;
    j["command"] = command;
    j["config_hash"] = content_hash(config_text);
    j["seed"] = seed;
    j["version"] = kVersion;
    if (!data_hash.empty()) j["data_hash"] = data_hash;
    std::ofstream out(std::filesystem::path(dir) / "manifest.json");
    if (!out) throw DataError("cannot write manifest under " + dir);
    out << j.dump(2) << '\n';
}

}  // namespace spamnet
