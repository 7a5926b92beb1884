#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spamnet/cli.hpp"
#include "spamnet/errors.hpp"
#include "spamnet/io.hpp"
#include "spamnet/rates.hpp"

using namespace spamnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("spamnet_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("csv loading") {
    TempDir tmp;
    SUBCASE("minimal two-row file") {
        write_file(tmp.file("a.csv"), "x\n0\n1\n");
        TimeSeries ts = load_csv(tmp.file("a.csv"));
        CHECK(ts.dim() == 1);
        CHECK(ts.transitions() == 1);
        CHECK(ts.values(0, 0) == 0.0);
        CHECK(ts.values(1, 0) == 1.0);
        CHECK(ts.column_names[0] == "x");
    }
    SUBCASE("NaN cell names the location") {
        write_file(tmp.file("b.csv"), "x,y\n1,2\n3,nan\n");
        try {
            load_csv(tmp.file("b.csv"));
            FAIL("expected DataError");
        } catch (const DataError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("row 2") != std::string::npos);
            CHECK(msg.find("column 1") != std::string::npos);
        }
    }
    SUBCASE("ragged rows are rejected") {
        write_file(tmp.file("c.csv"), "x,y\n1,2\n3\n");
        CHECK_THROWS_AS(load_csv(tmp.file("c.csv")), DataError);
    }
    SUBCASE("non-numeric cell is rejected") {
        write_file(tmp.file("d.csv"), "x\nfoo\n");
        CHECK_THROWS_AS(load_csv(tmp.file("d.csv")), DataError);
    }
    SUBCASE("round trip preserves bits") {
        TimeSeries ts;
        ts.values.resize(3, 2);
        ts.values << 0.1, -1.0 / 3.0, 1e-17, 123456.789012345678, -0.0, 2.5e300;
        ts.column_names = {"a", "b"};
        save_csv(tmp.file("rt.csv"), ts);
        TimeSeries back = load_csv(tmp.file("rt.csv"));
        CHECK(back.values == ts.values);
        CHECK(back.column_names == ts.column_names);
    }
}

TEST_CASE("config parsing and schema") {
    Config cfg = Config::parse_text(
        "# comment\n[kernel]\nkind = finite_rank\nM = 3\n\n[family]\nkind = "
        "gaussian\n[fit]\ncenter = true\n",
        "test");
    CHECK(cfg.get_string("kernel", "kind") == "finite_rank");
    CHECK(cfg.get_int("kernel", "M") == 3);
    CHECK(cfg.get_bool("fit", "center", false));
    CHECK(cfg.get_double("kernel", "alpha", 1.5) == 1.5);

    CHECK_THROWS_AS(Config::parse_text("[kernel]\nbogus = 1\n", "t"), ConfigError);
    CHECK_THROWS_AS(Config::parse_text("[nosuch]\nk = 1\n", "t"), ConfigError);
    CHECK_THROWS_AS(Config::parse_text("[kernel]\nM = 1\nM = 2\n", "t"), ConfigError);
    CHECK_THROWS_AS(Config::parse_text("M = 1\n", "t"), ConfigError);
    CHECK_THROWS_AS(Config::parse_text("[kernel]\nM\n", "t"), ConfigError);
    Config typed = Config::parse_text("[kernel]\nM = xy\n", "t");
    CHECK_THROWS_AS(typed.get_int("kernel", "M"), ConfigError);
}

TEST_CASE("content hash is stable") {
    CHECK(content_hash("abc") == content_hash("abc"));
    CHECK(content_hash("abc") != content_hash("abd"));
    CHECK(content_hash("").size() == 16);
}

TEST_CASE("cli end to end") {
    TempDir tmp;
    const std::string sim_cfg = tmp.file("sim.ini");
    write_file(sim_cfg,
               "[sim]\nfamily = gaussian\nd = 4\nT = 60\nr = 1\ns = 2\nseed = "
               "11\nburn_in = 100\n");

    CliInvocation sim;
    sim.command = "simulate";
    sim.config_path = sim_cfg;
    sim.out_dir = tmp.file("simout");
    REQUIRE(run_command(sim) == 0);
    CHECK(fs::exists(tmp.file("simout") + "/data.csv"));
    CHECK(fs::exists(tmp.file("simout") + "/truth.json"));
    CHECK(fs::exists(tmp.file("simout") + "/manifest.json"));

    // deterministic rerun produces identical bytes
    CliInvocation sim2 = sim;
    sim2.out_dir = tmp.file("simout2");
    REQUIRE(run_command(sim2) == 0);
    CHECK(read_file(tmp.file("simout") + "/data.csv") ==
          read_file(tmp.file("simout2") + "/data.csv"));

    const std::string fit_cfg = tmp.file("fit.ini");
    write_file(fit_cfg,
               "[kernel]\nkind = finite_rank\nM = 1\n[family]\nkind = gaussian\n"
               "[lambda]\nmode = fixed\nlambda_t = 0.15\nlambda_h = 0\n"
               "[fit]\nintercept = true\n");
    CliInvocation fit;
    fit.command = "fit";
    fit.config_path = fit_cfg;
    fit.data_path = tmp.file("simout") + "/data.csv";
    fit.out_dir = tmp.file("fitout");
    REQUIRE(run_command(fit) == 0);
    CHECK(fs::exists(tmp.file("fitout") + "/fit.json"));
    CHECK(fs::exists(tmp.file("fitout") + "/adjacency.csv"));

    // fit artifacts reload to the same coefficients
    NetworkFit loaded = load_network_fit(tmp.file("fitout") + "/fit.json");
    CHECK(loaded.dim() == 4);
    CHECK(loaded.config.lambda_T == 0.15);

    CliInvocation fit2 = fit;
    fit2.out_dir = tmp.file("fitout2");
    REQUIRE(run_command(fit2) == 0);
    CHECK(read_file(tmp.file("fitout") + "/fit.json") ==
          read_file(tmp.file("fitout2") + "/fit.json"));

    // theory-mode lambda resolution
    const std::string theory_cfg = tmp.file("theory.ini");
    write_file(theory_cfg,
               "[kernel]\nkind = finite_rank\nM = 1\n[family]\nkind = gaussian\n"
               "[lambda]\nmode = theory\n[mixing]\nkind = beta\nr = 2\nc0 = 1\n");
    CliInvocation tfit;
    tfit.command = "fit";
    tfit.config_path = theory_cfg;
    tfit.data_path = tmp.file("simout") + "/data.csv";
    tfit.out_dir = tmp.file("theoryout");
    REQUIRE(run_command(tfit) == 0);
    NetworkFit theory_fit = load_network_fit(tmp.file("theoryout") + "/fit.json");
    CHECK(theory_fit.config.lambda_T > 0.0);
    // matches the tuning pipeline for this data geometry (60 transitions, d=4)
    {
        KernelSpec k1 = KernelSpec::finite_rank({1.0}, BasisId::PolyFactorial);
        MixingSpec mix{MixingKind::Beta, 2.0, 1.0};
        RatesReport rep = tuning(k1, mix, 60, 4);
        CHECK(theory_fit.config.lambda_T == doctest::Approx(rep.lambda_T));
        CHECK(theory_fit.config.lambda_H == doctest::Approx(rep.lambda_H));
    }
    // theory penalties are strong at this scale: empty network
    for (const NodeFit& nf : theory_fit.node_fits) CHECK(nf.support().empty());

    // predict on the fitted model
    const std::string pred_cfg = tmp.file("pred.ini");
    write_file(pred_cfg, "[predict]\nfit = " + tmp.file("fitout") + "/fit.json\n");
    CliInvocation pred;
    pred.command = "predict";
    pred.config_path = pred_cfg;
    pred.data_path = tmp.file("simout") + "/data.csv";
    pred.out_dir = tmp.file("predout");
    REQUIRE(run_command(pred) == 0);
    CHECK(fs::exists(tmp.file("predout") + "/predictions.csv"));

    // cluster a denser fitted network
    const std::string dense_cfg = tmp.file("dense.ini");
    write_file(dense_cfg,
               "[kernel]\nkind = finite_rank\nM = 1\n[family]\nkind = gaussian\n"
               "[lambda]\nmode = fixed\nlambda_t = 0.001\nlambda_h = 0\n");
    CliInvocation dense = fit;
    dense.config_path = dense_cfg;
    dense.out_dir = tmp.file("denseout");
    REQUIRE(run_command(dense) == 0);
    const std::string clu_cfg = tmp.file("clu.ini");
    write_file(clu_cfg, "[cluster]\nk = 2\nfit = " + tmp.file("denseout") +
                            "/fit.json\nseed = 5\n");
    CliInvocation clu;
    clu.command = "cluster";
    clu.config_path = clu_cfg;
    clu.out_dir = tmp.file("cluout");
    REQUIRE(run_command(clu) == 0);
    CHECK(fs::exists(tmp.file("cluout") + "/labels.csv"));
    CHECK(fs::exists(tmp.file("cluout") + "/adjacency.csv"));
}

TEST_CASE("grid csv column order is fixed") {
    TempDir tmp;
    GridRow row;
    row.family = FamilyKind::Poisson;
    row.d = 4;
    row.T = 40;
    row.r = 2;
    row.trial = 7;
    row.mse = 0.25;
    row.precision = 0.5;
    row.recall = 1.0;
    row.seconds = 0.125;
    save_grid_rows(tmp.file("g.csv"), {row});
    std::ifstream in(tmp.file("g.csv"));
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(header == "family,d,T,r,trial,mse,precision,recall,seconds");
    CHECK(line == "poisson,4,40,2,7,0.25,0.5,1,0.125");

    GridRow failed = row;
    failed.failed = true;
    failed.error = "boom";
    save_grid_rows_jsonl(tmp.file("g.jsonl"), {row, failed});
    std::ifstream jl(tmp.file("g.jsonl"));
    std::getline(jl, line);
    CHECK(line.find("\"mse\":0.25") != std::string::npos);
    std::getline(jl, line);
    CHECK(line.find("\"failed\":true") != std::string::npos);
}

TEST_CASE("rates command emits a flat report") {
    TempDir tmp;
    const std::string cfg = tmp.file("rates.ini");
    write_file(cfg,
               "[kernel]\nkind = finite_rank\nM = 5\n[mixing]\nkind = beta\nr = "
               "2\nc0 = 1\n[rates]\nT = 10000\nd = 8\ns = 2\n[family]\nkind = "
               "poisson\n");
    CliInvocation inv;
    inv.command = "rates";
    inv.config_path = cfg;
    inv.out_dir = tmp.file("out");
    REQUIRE(run_command(inv) == 0);
    const std::string report = read_file(tmp.file("out") + "/rates.txt");
    CHECK(report.find("m = 100") != std::string::npos);
    CHECK(report.find("epsilon_m = ") != std::string::npos);
    CHECK(report.find("lambda_T = ") != std::string::npos);
    CHECK(report.find("delta_m_0 = ") != std::string::npos);
}

TEST_CASE("cli exit codes") {
    TempDir tmp;
    // 2: config problems
    const char* bad_cmd[] = {"spamnet", "frobnicate", "--config", "x"};
    CHECK(run_cli(4, bad_cmd) == 2);
    const char* no_cfg[] = {"spamnet", "fit"};
    CHECK(run_cli(2, no_cfg) == 2);

    write_file(tmp.file("bad.ini"), "[kernel]\nwhat = 1\n");
    const std::string badpath = tmp.file("bad.ini");
    const char* unknown_key[] = {"spamnet", "rates", "--config", badpath.c_str()};
    CHECK(run_cli(4, unknown_key) == 2);

    // 3: data problems
    write_file(tmp.file("ok.ini"),
               "[kernel]\nkind = finite_rank\nM = 1\n[family]\nkind = gaussian\n"
               "[lambda]\nmode = fixed\nlambda_t = 0.1\n");
    write_file(tmp.file("bad.csv"), "x\nnot_a_number\n");
    const std::string okcfg = tmp.file("ok.ini");
    const std::string badcsv = tmp.file("bad.csv");
    const std::string outdir = tmp.file("o");
    const char* bad_data[] = {"spamnet", "fit",          "--config",
                              okcfg.c_str(), "--data",   badcsv.c_str(),
                              "--out",       outdir.c_str()};
    CHECK(run_cli(8, bad_data) == 3);

    // missing config file is a data problem (cannot open)
    const char* gone[] = {"spamnet", "rates", "--config", "/nonexistent.ini"};
    CHECK(run_cli(4, gone) == 3);
}

TEST_CASE("fit artifact round trip preserves predictions") {
    TempDir tmp;
    const std::string sim_cfg = tmp.file("s.ini");
    write_file(sim_cfg, "[sim]\nfamily = poisson\nd = 3\nT = 50\nr = 1\ns = 1\n"
                        "seed = 2\n");
    CliInvocation sim{"simulate", sim_cfg, "", tmp.file("so"), -1};
    REQUIRE(run_command(sim) == 0);

    const std::string fit_cfg = tmp.file("f.ini");
    write_file(fit_cfg,
               "[kernel]\nkind = finite_rank\nM = 1\n[family]\nkind = poisson\n"
               "[lambda]\nmode = fixed\nlambda_t = 0.02\n[fit]\nintercept = true\n");
    CliInvocation fit{"fit", fit_cfg, tmp.file("so") + "/data.csv", tmp.file("fo"), -1};
    REQUIRE(run_command(fit) == 0);

    NetworkFit loaded = load_network_fit(tmp.file("fo") + "/fit.json");
    TimeSeries data = load_csv(tmp.file("so") + "/data.csv");
    // reload then refit comparison: predictions from the artifact must match
    KernelSpec kernel = KernelSpec::finite_rank({1.0}, BasisId::PolyFactorial);
    NetworkFit direct = fit_network(data, kernel, GlmFamily::poisson(), loaded.config);
    for (Eigen::Index t = 0; t < 5; ++t) {
        Prediction a = predict(loaded, data.values.row(t).transpose());
        Prediction b = predict(direct, data.values.row(t).transpose());
        for (int j = 0; j < 3; ++j)
            CHECK(a.eta[j] == doctest::Approx(b.eta[j]).epsilon(1e-14));
    }
}

TEST_CASE("malformed fit artifacts are data errors") {
    TempDir tmp;
    write_file(tmp.file("bad.json"), "{ not json");
    CHECK_THROWS_AS(load_network_fit(tmp.file("bad.json")), DataError);
    write_file(tmp.file("partial.json"), "{\"version\": \"x\"}");
    CHECK_THROWS_AS(load_network_fit(tmp.file("partial.json")), DataError);
}

TEST_CASE("experiment and cv commands produce their tables") {
    TempDir tmp;
    const std::string exp_cfg = tmp.file("e.ini");
    write_file(exp_cfg,
               "[experiment]\nfamilies = gaussian\nd_list = 4\nT_list = 40,80\n"
               "r_list = 1\ntrials = 2\nseed0 = 3\ns = 2\n");
    CliInvocation exp{"experiment", exp_cfg, "", tmp.file("eo"), -1};
    REQUIRE(run_command(exp) == 0);
    CHECK(fs::exists(tmp.file("eo") + "/grid.csv"));
    CHECK(fs::exists(tmp.file("eo") + "/grid.jsonl"));
    CHECK(fs::exists(tmp.file("eo") + "/trend.csv"));
    CHECK(fs::exists(tmp.file("eo") + "/slopes.csv"));
    const std::string grid = read_file(tmp.file("eo") + "/grid.csv");
    CHECK(grid.rfind("family,d,T,r,trial,mse,precision,recall,seconds\n", 0) == 0);
    // 2 T-values x 2 trials
    CHECK(std::count(grid.begin(), grid.end(), '\n') == 5);

    const std::string sim_cfg = tmp.file("s.ini");
    write_file(sim_cfg, "[sim]\nfamily = gaussian\nd = 3\nT = 80\nr = 1\ns = 1\n"
                        "seed = 4\n");
    CliInvocation sim{"simulate", sim_cfg, "", tmp.file("so"), -1};
    REQUIRE(run_command(sim) == 0);
    const std::string cv_cfg = tmp.file("c.ini");
    write_file(cv_cfg,
               "[kernel]\nkind = finite_rank\nM = 1\n[family]\nkind = gaussian\n"
               "[lambda]\nmode = cv\ngrid = 0.05:0; 1.0:0\nhorizon = 10\n");
    CliInvocation cv{"cv", cv_cfg, tmp.file("so") + "/data.csv", tmp.file("co"), -1};
    REQUIRE(run_command(cv) == 0);
    CHECK(fs::exists(tmp.file("co") + "/cv.csv"));
    CHECK(fs::exists(tmp.file("co") + "/selected_lambda.txt"));
}
