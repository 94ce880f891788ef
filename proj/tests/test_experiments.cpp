#include <qwprobe/cli.hpp>
#include <qwprobe/experiments.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace qwprobe;
namespace fs = std::filesystem;

namespace {

struct cli_result {
    int code;
    std::string out;
    std::string err;
};

cli_result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "qwprobe");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "qwprobe_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(cells);
    }
    return rows;
}

const csv_row& row_at(const scenario_result& r, double sigma, std::size_t t) {
    for (const auto& row : r.rows)
        if (row.sigma && *row.sigma == sigma && row.t == t) return row;
    throw std::runtime_error("row not found");
}

} // namespace

TEST(Config, ParsesKeyValueText) {
    experiment_config cfg;
    apply_config_text(cfg, "# comment\nscenario = enhanced_table\naxis=x\ntheta=pi/4, 2*pi, 0.5\n"
                           "sigma=1,2\nsteps=7\ndim=3\ngamma=-pi\n");
    EXPECT_EQ(cfg.kind, scenario::enhanced_table);
    EXPECT_EQ(cfg.rotation_axis, axis::x);
    ASSERT_EQ(cfg.thetas.size(), 3u);
    EXPECT_DOUBLE_EQ(cfg.thetas[0], std::numbers::pi / 4);
    EXPECT_DOUBLE_EQ(cfg.thetas[1], 2 * std::numbers::pi);
    EXPECT_DOUBLE_EQ(cfg.gamma, -std::numbers::pi);
    EXPECT_EQ(cfg.steps, 7u);
    EXPECT_EQ(cfg.dim, 3u);
}

TEST(Config, ErrorsNameTheField) {
    experiment_config cfg;
    const auto field_of = [&](const std::string& text) {
        try {
            experiment_config c;
            apply_config_text(c, text);
            validate(c);
        } catch (const config_error& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(field_of("steps=-3"), "steps");
    EXPECT_EQ(field_of("sigma=1,abc"), "sigma");
    EXPECT_EQ(field_of("sigma=0"), "sigma");
    EXPECT_EQ(field_of("axis=w"), "axis");
    EXPECT_EQ(field_of("bogus=1"), "bogus");
    EXPECT_EQ(field_of("steps=0"), "steps");
    EXPECT_EQ(field_of("coin=sideways"), "coin");
    EXPECT_EQ(field_of("scenario=enhanced_table\ndim=9"), "dim");
    EXPECT_EQ(field_of("scenario=custom\ngraph=/nonexistent/file.graph"), "graph");
    EXPECT_EQ(field_of("just text"), "line 1");
    EXPECT_THROW(load_config_file("/nonexistent/qwprobe.cfg"), config_error);
}

TEST(Workers, EnvironmentCap) {
    ::setenv("QWPROBE_WORKERS", "2", 1);
    EXPECT_EQ(resolve_workers(8), 2u);
    EXPECT_EQ(resolve_workers(1), 1u);
    ::setenv("QWPROBE_WORKERS", "zero", 1);
    EXPECT_THROW(resolve_workers(4), config_error);
    ::unsetenv("QWPROBE_WORKERS");
    EXPECT_EQ(resolve_workers(3), 3u);
}

TEST(Workers, ParallelMapKeepsOrderAndRethrows) {
    const auto v = parallel_map(50, 4, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], i * i);
    EXPECT_THROW(parallel_map(10, 3,
                              [](std::size_t i) {
                                  if (i == 7) throw invalid_argument("boom");
                                  return i;
                              }),
                 invalid_argument);
}

TEST(LineSweep, DefaultsGiveEightyRows) {
    experiment_config cfg;
    const auto r = run_line_sweep(cfg);
    ASSERT_EQ(r.rows.size(), 80u);
    EXPECT_EQ(r.failures(), 0u);
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        const auto& a = r.rows[i - 1];
        const auto& b = r.rows[i];
        EXPECT_TRUE(*a.sigma < *b.sigma || (*a.sigma == *b.sigma && a.t < b.t));
    }
    for (std::size_t t = 5; t <= 20; ++t) {
        EXPECT_LE(row_at(r, 1, t).qfi, row_at(r, 2, t).qfi);
        EXPECT_LE(row_at(r, 2, t).qfi, row_at(r, 5, t).qfi);
        EXPECT_LE(row_at(r, 5, t).qfi, row_at(r, 10, t).qfi);
    }
}

TEST(LineSweep, NarrowSigmaIsLocalizedProbe) {
    experiment_config cfg;
    cfg.sigmas = {1e-3};
    cfg.steps = 10;
    const auto r = run_line_sweep(cfg);
    const std::size_t n = auto_ring_size(10, 1e-3);
    const auto p = evolve_with_derivative(
        walk_config(shift_from_graph(line_graph(n)), make_coin(axis::y, std::numbers::pi / 2, 2), 10),
        localized_probe(n / 2, basis_coin(0, 2), n));
    EXPECT_NEAR(r.rows.back().qfi, qfi_pure(p), 1e-8);
    EXPECT_NEAR(r.rows.back().fi, position_fi(p), 1e-8);
}

TEST(LineSweep, WideSigmaIsCoinOnly) {
    experiment_config cfg;
    cfg.sigmas = {1e6};
    cfg.steps = 10;
    const auto last = run_line_sweep(cfg).rows.back();
    EXPECT_LE(last.fi, 1e-8);
    EXPECT_NEAR(last.qfi,
                qudit_reference_qfi(axis::y, std::numbers::pi / 2, 10, basis_coin(0, 2), 2), 1e-6);
}

TEST(LineSweep, MatchesDenseOracleGolden) {
    std::ifstream in(std::string(QWPROBE_TEST_DATA) + "/gaussian_sweep_golden.csv");
    ASSERT_TRUE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    const auto golden = parse_csv(buf.str());
    ASSERT_EQ(golden.size(), 81u);

    const auto res = run_cli({"line-sweep", "--config", std::string(QWPROBE_CONFIG_DIR) + "/gaussian_sweep.cfg"});
    ASSERT_EQ(res.code, 0) << res.err;
    const auto got = parse_csv(res.out);
    ASSERT_EQ(got.size(), 81u);
    EXPECT_EQ(got[0][0], "scenario");
    for (std::size_t i = 1; i < golden.size(); ++i) {
        EXPECT_EQ(std::stod(got[i][3]), std::stod(golden[i][0]));
        EXPECT_EQ(std::stoul(got[i][5]), std::stoul(golden[i][1]));
        const double q_ref = std::stod(golden[i][2]), f_ref = std::stod(golden[i][3]);
        EXPECT_NEAR(std::stod(got[i][6]), q_ref, 1e-8 * q_ref + 1e-10) << "row " << i;
        EXPECT_NEAR(std::stod(got[i][7]), f_ref, 1e-8 * f_ref + 1e-10) << "row " << i;
    }
}

TEST(EnhancedTable, SaturationRows) {
    experiment_config cfg;
    cfg.kind = scenario::enhanced_table;
    cfg.rotation_axis = axis::x;
    cfg.steps = 10;
    const auto r = run_enhanced_table(cfg);
    ASSERT_EQ(r.rows.size(), 10u);
    EXPECT_EQ(r.failures(), 0u);
    for (const auto& row : r.rows) {
        const double t2 = static_cast<double>(row.t * row.t);
        EXPECT_NEAR(row.qfi, t2, 1e-8);
        EXPECT_NEAR(row.fi, t2, 1e-8);
    }
    cfg.dim = 3;
    cfg.steps = 5;
    EXPECT_NEAR(run_enhanced_table(cfg).rows.back().qfi, 100.0, 1e-8);
}

TEST(EnhancedTable, ZAxisHasNoPositionInformation) {
    experiment_config cfg;
    cfg.kind = scenario::enhanced_table;
    cfg.rotation_axis = axis::z;
    cfg.steps = 8;
    const auto r = run_enhanced_table(cfg);
    EXPECT_EQ(r.failures(), 0u);
    for (const auto& row : r.rows) {
        EXPECT_LE(row.fi, 1e-12);
        EXPECT_NEAR(row.qfi, static_cast<double>(row.t * row.t), 1e-8);
    }
}

TEST(ClosedFormCheck, PassesAndFlagsFaults) {
    experiment_config cfg;
    cfg.kind = scenario::closed_form_check;
    cfg.steps = 12;
    const auto r = run_closed_form_check(cfg);
    EXPECT_GT(r.rows.size(), 1000u);
    EXPECT_EQ(r.failures(), 0u);
    for (const auto& row : r.rows) {
        ASSERT_TRUE(row.abs_dev().has_value());
        EXPECT_LE(*row.abs_dev(), 1e-9);
    }
    cfg.coin_perturbation = 1e-3;
    EXPECT_GT(run_closed_form_check(cfg).failures(), 0u);
}

TEST(Determinism, CsvIndependentOfWorkerCount) {
    experiment_config cfg;
    cfg.thetas = {0.3, std::numbers::pi / 2, 2.0};
    cfg.steps = 12;
    cfg.workers = 1;
    const auto one = to_csv(run_line_sweep(cfg).rows);
    cfg.workers = 4;
    EXPECT_EQ(to_csv(run_line_sweep(cfg).rows), one);
    cfg.kind = scenario::closed_form_check;
    cfg.thetas.clear();
    cfg.workers = 1;
    const auto check1 = to_csv(run_closed_form_check(cfg).rows);
    cfg.workers = 3;
    EXPECT_EQ(to_csv(run_closed_form_check(cfg).rows), check1);
}

TEST(Csv, SchemaAndFormatting) {
    csv_row r;
    r.scenario_name = "line_sweep";
    r.rotation_axis = axis::y;
    r.sigma = 2.0;
    r.theta = std::numbers::pi / 2;
    r.t = 3;
    r.qfi = 1.0 / 3.0;
    r.fi = -0.0;
    const auto text = to_csv({r});
    EXPECT_EQ(text, std::string(csv_header) +
                        "\nline_sweep,y,2,2,1.57079632679,3,0.333333333333,0,,,\n");
    EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Cli, EnhancedHappyPath) {
    const auto out = scratch("enhanced.csv");
    const auto res = run_cli({"enhanced", "--dim", "2", "--steps", "10", "--axis", "x", "-o", out.string()});
    EXPECT_EQ(res.code, 0) << res.err;
    std::ifstream in(out);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_EQ(parse_csv(buf.str()).size(), 11u);
    EXPECT_NE(res.out.find("0 failed"), std::string::npos) << res.out;
}

TEST(Cli, GraphValidate) {
    const auto bad = scratch("bad.graph");
    write_file(bad, "D=2\n1 -1 2\n1 +1 3\n1 -1 3\n");
    auto res = run_cli({"graph", "validate", bad.string()});
    EXPECT_EQ(res.code, 2);
    EXPECT_NE(res.err.find("line 4"), std::string::npos) << res.err;

    res = run_cli({"graph", "validate", std::string(QWPROBE_CONFIG_DIR) + "/enhanced_d2.graph"});
    EXPECT_EQ(res.code, 0) << res.err;
    EXPECT_NE(res.out.find("kind=enhanced"), std::string::npos);
}

TEST(Cli, CheckExitCodes) {
    EXPECT_EQ(run_cli({"check", "--steps", "6"}).code, 0);
    EXPECT_EQ(run_cli({"check", "--steps", "6", "--coin_perturbation", "0.01"}).code, 1);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"line-sweep", "--no-such-flag", "1"}).code, 2);
    EXPECT_EQ(run_cli({"line-sweep", "--sigma", "-1"}).code, 2);
    EXPECT_EQ(run_cli({"simulate", "--config", "/nonexistent.cfg"}).code, 2);
    const auto v = run_cli({"version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.out.rfind("qwprobe", 0), 0u);
}

TEST(Cli, SimulateCustomGraphAndLine) {
    auto res = run_cli({"simulate", "--graph", std::string(QWPROBE_CONFIG_DIR) + "/enhanced_d2.graph",
                        "--steps", "3", "--axis", "y"});
    EXPECT_EQ(res.code, 0) << res.err;
    EXPECT_EQ(parse_csv(res.out).size(), 4u);
    res = run_cli({"simulate", "--graph", std::string(QWPROBE_CONFIG_DIR) + "/enhanced_d2.graph",
                   "--steps", "4"});
    EXPECT_EQ(res.code, 2);
    EXPECT_NE(res.err.find("final layer"), std::string::npos) << res.err;
    res = run_cli({"simulate", "--topology", "line", "--steps", "5", "--theta", "0.5,1.5"});
    EXPECT_EQ(res.code, 0) << res.err;
    EXPECT_EQ(parse_csv(res.out).size(), 11u);
}
