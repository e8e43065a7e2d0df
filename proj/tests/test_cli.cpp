#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "finsler/cli.hpp"
#include "finsler/errors.hpp"
#include "finsler/report.hpp"

using namespace finsler;
namespace fs = std::filesystem;

namespace {

struct Output {
    int code;
    std::string out, err;
};

Output run_cli(const RunConfig& cfg) {
    std::ostringstream out, err;
    const int code = run(cfg, out, err);
    return {code, out.str(), err.str()};
}

RunConfig config(Command c, const std::string& spec) {
    RunConfig cfg;
    cfg.command = c;
    cfg.spec = spec;
    return cfg;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "finsler_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, ClassifyEuclidean) {
    const auto r = run_cli(config(Command::classify, "euclidean-n2"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["schema_version"], kSchemaVersion);
    EXPECT_EQ(j["aggregate"]["riemannian"]["verdict"], "holds");
    EXPECT_EQ(j["points"].size(), 10u);
}

TEST(Cli, VerifyRanders) {
    const auto r = run_cli(config(Command::verify, "randers-n3"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["passed"].get<bool>());
    int seen = 0;
    for (const auto& id : j["identities"])
        if (id["params"].contains("ratio")) {
            EXPECT_NEAR(id["params"]["ratio"][0].get<double>(), -0.25, 1e-7);
            ++seen;
        }
    EXPECT_EQ(seen, 10);
}

TEST(Cli, DimensionMismatchIsInputError) {
    const auto p = scratch("bad.metric");
    write(p, "dim 2;\nL = sqrt(y1^2 + y3^2)\n");
    const auto r = run_cli(config(Command::classify, p.string()));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("DimensionMismatch at 2:"), std::string::npos) << r.err;
    EXPECT_EQ(r.err.find('\n'), r.err.size() - 1);
}

TEST(Cli, DegenerateDomainIsNumericalError) {
    const auto p = scratch("degenerate.metric");
    write(p, "dim 2; riemannian; a11 = 1; a22 = x1^2\n");
    auto cfg = config(Command::classify, p.string());
    cfg.x_box = parse_box("0:1e-9");
    EXPECT_EQ(run_cli(cfg).code, 3);
}

TEST(Cli, MissingSpecAndBadCount) {
    EXPECT_EQ(run_cli(config(Command::classify, "")).code, 2);
    EXPECT_EQ(run_cli(config(Command::classify, "no-such-metric")).code, 2);
    auto cfg = config(Command::classify, "randers-n3");
    cfg.count = 0;
    EXPECT_EQ(run_cli(cfg).code, 2);
}

TEST(Cli, ByteIdenticalJson) {
    auto cfg = config(Command::classify, "randers-curved-n3");
    cfg.seed = 42;
    EXPECT_EQ(run_cli(cfg).out, run_cli(cfg).out);
    cfg.command = Command::verify;
    EXPECT_EQ(run_cli(cfg).out, run_cli(cfg).out);
}

TEST(Cli, SeedChangesPoints) {
    auto a = config(Command::tensors, "sphere-n2");
    a.count = 2;
    auto b = a;
    b.seed = 99;
    EXPECT_NE(run_cli(a).out, run_cli(b).out);
}

TEST(Cli, TextFormat) {
    auto cfg = config(Command::classify, "sphere-n2");
    cfg.format = Format::text;
    const auto r = run_cli(cfg);
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("h-isotropic"), std::string::npos);
    EXPECT_NE(r.out.find("e+00"), std::string::npos);
    EXPECT_EQ(sci3(0.000123456), "1.23e-04");
    EXPECT_EQ(sci3(-2.0), "-2.00e+00");
}

TEST(Cli, ConfigFileAndOverrides) {
    const auto tolp = scratch("tol.conf");
    write(tolp, "berwald = 1e-9\n");
    RunConfig cfg;
    merge_run_config(cfg,
                     "# run config\nspec = randers-n3\nseed = 5\ncount = 3\nformat = text\n"
                     "tolerances = " + tolp.string() + "\ntol.landsberg = 2e-9\ny_box = 0.2:1.2\n");
    EXPECT_EQ(cfg.spec, "randers-n3");
    EXPECT_EQ(*cfg.seed, 5u);
    EXPECT_EQ(cfg.count, 3);
    EXPECT_EQ(cfg.format, Format::text);
    EXPECT_DOUBLE_EQ(cfg.tolerances.get("berwald"), 1e-9);
    EXPECT_DOUBLE_EQ(cfg.tolerances.get("landsberg"), 2e-9);
    ASSERT_TRUE(cfg.y_box);
    EXPECT_EQ(cfg.y_box->size(), 1u);
    EXPECT_THROW(merge_run_config(cfg, "colour = blue\n"), InputError);
    EXPECT_THROW(merge_run_config(cfg, "format = xml\n"), InputError);

    cfg.format = Format::json;
    cfg.tolerances.set("berwald=1e-8");
    const auto r = run_cli(cfg);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["tolerance"]["overrides"]["berwald"].get<double>(), 1e-8);
    for (const auto& pt : j["points"])
        for (const auto& v : pt["y"]) {
            EXPECT_GE(v.get<double>(), 0.2);
            EXPECT_LE(v.get<double>(), 1.2);
        }
}

TEST(Cli, OutputFile) {
    auto cfg = config(Command::list_metrics, "");
    cfg.out = scratch("metrics.json").string();
    const auto r = run_cli(cfg);
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(cfg.out);
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j["metrics"].size(), builtin_fixtures().size());
}

TEST(Cli, BoxParsing) {
    const auto b = parse_box("-1:1, 0.5:2");
    ASSERT_EQ(b.size(), 2u);
    EXPECT_DOUBLE_EQ(b[1].lo, 0.5);
    EXPECT_THROW(parse_box("1:0"), InputError);
    EXPECT_THROW(parse_box("1"), InputError);
    EXPECT_THROW(parse_command("plot"), InputError);
}

TEST(Fixtures, FilesMatchBuiltins) {
    for (const auto& fx : builtin_fixtures()) {
        const fs::path p = fs::path(FINSLER_SOURCE_DIR) / "fixtures" / (fx.name + ".metric");
        std::ifstream in(p);
        ASSERT_TRUE(in) << p;
        std::ostringstream s;
        s << in.rdbuf();
        EXPECT_EQ(s.str(), fx.text) << fx.name;
    }
}

TEST(Fixtures, EnvironmentDirectoryOverride) {
    const fs::path dir = scratch("fixtures_dir").parent_path() / "fixtures_dir";
    fs::create_directories(dir);
    write(dir / "randers-n3.metric", "dim 3;\nranders;\na = identity\nb1 = 0.25\nb2 = 0\nb3 = 0\n");
    setenv("FINSLER_FIXTURES", dir.c_str(), 1);
    const auto [spec, dom] = load_metric("randers-n3");
    unsetenv("FINSLER_FIXTURES");
    const auto frame = compute_frame(spec, {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}});
    EXPECT_NEAR(frame.length, 1.25, 1e-14);
}
