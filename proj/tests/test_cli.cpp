#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace depthmon::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("depthmon_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write_json(const std::string& name, const json& j) const {
        std::ofstream(path(name)) << j.dump(2);
        return path(name);
    }

    std::string write_values(const std::string& name, const std::vector<double>& values) const {
        std::ofstream out(path(name));
        out << "index,v1\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << i << ',' << values[i] << '\n';
        }
        return path(name);
    }

    static Result run_cli(const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = run(args, out, err);
        return {code, out.str(), err.str()};
    }

    [[nodiscard]] std::vector<std::string> lines(const std::string& name) const {
        std::ifstream in(path(name));
        std::vector<std::string> out;
        for (std::string line; std::getline(in, line);) {
            out.push_back(line);
        }
        return out;
    }

    [[nodiscard]] std::string slurp(const std::string& name) const {
        std::ifstream in(path(name));
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

json small_cde() {
    return {{"y_points", 40}, {"max_conditions", 5}, {"edges", 40}};
}

json two_ar_models() {
    return {{"type", "ar_garch"}, {"c", 0.0}, {"phi", 0.5}, {"alpha", 0.0}, {"beta", 0.0}};
}

TEST_F(CliTest, SimulateWritesTrajectoryAndMetadata) {
    const auto r = run_cli({"simulate", "-n", "1000", "-s", "4", "-o", path("t.csv")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto rows = lines("t.csv");
    ASSERT_EQ(rows.size(), 1001u);
    EXPECT_EQ(rows.front(), "index,value,regime,contaminated");
    const auto meta = json::parse(slurp("t.meta.json"));
    EXPECT_EQ(meta.at("schema"), kSchemaVersion);
    EXPECT_EQ(meta.at("seed"), 4);
    EXPECT_EQ(meta.at("regime_counts"), json::array({1000}));
}

TEST_F(CliTest, SimulateIsReproducible) {
    ASSERT_EQ(run_cli({"simulate", "-n", "500", "-s", "9", "-o", path("a.csv")}).code, kExitOk);
    ASSERT_EQ(run_cli({"simulate", "-n", "500", "-s", "9", "-o", path("b.csv")}).code, kExitOk);
    EXPECT_EQ(slurp("a.csv"), slurp("b.csv"));
}

TEST_F(CliTest, FlagsOverrideConfig) {
    const auto cfg = write_json("sim.json", {{"n", 1000}, {"output", path("t.csv")}});
    ASSERT_EQ(run_cli({"simulate", "-c", cfg, "-n", "50"}).code, kExitOk);
    EXPECT_EQ(lines("t.csv").size(), 51u);
}

TEST_F(CliTest, SimulateScheduleAndContamination) {
    const auto cfg = write_json(
        "sim.json", {{"model", {{"models", {two_ar_models(), two_ar_models()}}, {"transition", {{1.0, 0.0}, {0.0, 1.0}}}}},
                     {"n", 200},
                     {"schedule", {{"t_star", 120}}},
                     {"contamination", {{"fraction", 0.5}}},
                     {"output", path("t.csv")}});
    ASSERT_EQ(run_cli({"simulate", "-c", cfg}).code, kExitOk);
    const auto meta = json::parse(slurp("t.meta.json"));
    EXPECT_EQ(meta.at("regime_counts"), json::array({120, 80}));
    EXPECT_TRUE(meta.at("stationary").is_null());
    const auto rows = lines("t.csv");
    std::size_t flagged = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        flagged += rows[i].back() == '1' ? 1 : 0;
    }
    EXPECT_GT(flagged, 60u);
    EXPECT_LT(flagged, 140u);
}

TEST_F(CliTest, MalformedTransitionIsAConfigError) {
    const auto cfg = write_json(
        "sim.json", {{"model", {{"models", {two_ar_models(), two_ar_models()}}, {"transition", {{0.5, 0.4}, {0.5, 0.5}}}}},
                     {"output", path("t.csv")}});
    const auto r = run_cli({"simulate", "-c", cfg});
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_NE(r.err.find("row 1"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(path("t.csv")));
}

TEST_F(CliTest, UnknownKeyIsAConfigError) {
    const auto cfg = write_json("sim.json", {{"n", 10}, {"lenght", 5}});
    const auto r = run_cli({"simulate", "-c", cfg});
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_NE(r.err.find("lenght"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingInputIsAnIoError) {
    const auto r = run_cli({"depth", "-i", path("nope.csv"), "-o", path("d.csv")});
    EXPECT_EQ(r.code, kExitIo);
}

TEST_F(CliTest, HelpAndBadFlags) {
    EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
    EXPECT_EQ(run_cli({"simulate", "--bogus"}).code, kExitConfig);
    EXPECT_EQ(run_cli({}).code, kExitConfig);
}

TEST_F(CliTest, ShortStreamWarnsAndSucceeds) {
    const auto input = write_values("s.csv", std::vector<double>(30, 1.0));
    const auto r = run_cli({"monitor", "-i", input, "-p", "2", "-w", "100", "--output-csv", path("m.csv"),
                            "--output-jsonl", path("m.jsonl")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.err.find("shorter than"), std::string::npos) << r.err;
    EXPECT_EQ(lines("m.csv").size(), 1u);
    EXPECT_EQ(json::parse(slurp("m.meta.json")).at("reports"), 0);
}

TEST_F(CliTest, RankMonitorFlagsAScaleChange) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    std::vector<double> v;
    for (int i = 0; i < 600; ++i) {
        v.push_back((i < 400 ? 1.0 : 10.0) * z(rng));
    }
    const auto input = write_values("s.csv", v);
    const auto r = run_cli({"monitor", "-i", input, "-p", "2", "-w", "100", "--reference-length", "100", "--stride",
                            "50", "-B", "200", "--output-csv", path("m.csv"), "--output-jsonl", path("m.jsonl")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto jl = lines("m.jsonl");
    ASSERT_EQ(jl.size(), 7u);  // windows ending at 299, 349, ..., 599
    EXPECT_TRUE(json::parse(jl.back()).at("alert").get<bool>());
    EXPECT_EQ(json::parse(jl.front()).at("end_index"), 299);
}

TEST_F(CliTest, DensityMonitorTracksTheRegime) {
    auto model = [](double c) {
        return json{{"model", {{"models", {{{"type", "ar_garch"}, {"c", c}, {"phi", 0.5}, {"alpha", 0.0}, {"beta", 0.0}}}}}}};
    };
    for (int k = 0; k < 2; ++k) {
        auto j = model(k == 0 ? 0.0 : 3.0);
        j["n"] = 1500;
        j["seed"] = 20 + k;
        j["output"] = path("ref" + std::to_string(k) + ".csv");
        ASSERT_EQ(run_cli({"simulate", "-c", write_json("ref.json", j)}).code, kExitOk);
    }
    auto stream = json{{"model",
                        {{"models",
                          {{{"type", "ar_garch"}, {"c", 0.0}, {"phi", 0.5}, {"alpha", 0.0}, {"beta", 0.0}},
                           {{"type", "ar_garch"}, {"c", 3.0}, {"phi", 0.5}, {"alpha", 0.0}, {"beta", 0.0}}}},
                         {"transition", {{1.0, 0.0}, {0.0, 1.0}}}}},
                       {"n", 800},
                       {"seed", 30},
                       {"schedule", {{"t_star", 400}}},
                       {"output", path("stream.csv")}};
    ASSERT_EQ(run_cli({"simulate", "-c", write_json("stream.json", stream)}).code, kExitOk);

    const auto cfg = write_json("mon.json", {{"input", path("stream.csv")},
                                             {"proposal", 1},
                                             {"references", {path("ref0.csv"), path("ref1.csv")}},
                                             {"monitor", {{"window", 200}, {"stride", 200}, {"replicates", 100},
                                                          {"cde", small_cde()}}},
                                             {"output_csv", path("m.csv")},
                                             {"output_jsonl", path("m.jsonl")}});
    const auto r = run_cli({"monitor", "-c", cfg});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto jl = lines("m.jsonl");
    ASSERT_EQ(jl.size(), 4u);  // windows ending at 199, 399, 599, 799
    EXPECT_EQ(json::parse(jl[1]).at("psi"), 0);
    EXPECT_EQ(json::parse(jl[3]).at("psi"), 1);
    const auto meta = json::parse(slurp("m.meta.json"));
    EXPECT_EQ(meta.at("thresholds").size(), 2u);
    EXPECT_EQ(lines("m.csv").front(), "end_index,psi,statistic,threshold,alert,d_0,d_1");
}

TEST_F(CliTest, DepthSingleAndDdPlot) {
    const auto a = write_values("a.csv", {0.0, 1.0, 10.0});
    ASSERT_EQ(run_cli({"depth", "-i", a, "-o", path("d.csv")}).code, kExitOk);
    const auto single = lines("d.csv");
    ASSERT_EQ(single.size(), 4u);
    EXPECT_EQ(single.front(), "index,depth");

    ASSERT_EQ(run_cli({"depth", "-i", a, "--second", a, "-o", path("dd.csv")}).code, kExitOk);
    const auto dd = lines("dd.csv");
    EXPECT_EQ(dd.front(), "sample,index,depth_first,depth_second");
    ASSERT_EQ(dd.size(), 7u);
    for (std::size_t i = 1; i < dd.size(); ++i) {
        std::stringstream row(dd[i]);
        std::string sample, index, first, second;
        std::getline(row, sample, ',');
        std::getline(row, index, ',');
        std::getline(row, first, ',');
        std::getline(row, second, ',');
        EXPECT_EQ(first, second) << dd[i];
    }
}

TEST_F(CliTest, DepthDimensionMismatch) {
    const auto a = write_values("a.csv", {0.0, 1.0});
    {
        std::ofstream out(path("b.csv"));
        out << "index,v1,v2\n0,1,2\n1,3,4\n";
    }
    const auto r = run_cli({"depth", "-i", a, "--second", path("b.csv"), "-o", path("dd.csv")});
    EXPECT_EQ(r.code, kExitConfig) << r.err;
}

json tiny_evaluate() {
    return {{"shares", {0.3}},
            {"contamination", {0.0}},
            {"n", 300},
            {"reps", 1},
            {"pilot_length", 2000},
            {"grid_points", 40},
            {"grid_conditions", 4},
            {"truth", {{"length", 2000}, {"neighbours", 100}}},
            {"cde", small_cde()}};
}

TEST_F(CliTest, TinyEvaluateGivesFiniteDistances) {
    auto j = tiny_evaluate();
    j["output"] = path("e.csv");
    j["replications_output"] = path("r.csv");
    const auto r = run_cli({"evaluate", "-c", write_json("e.json", j), "-j", "2"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto rows = lines("e.csv");
    ASSERT_EQ(rows.size(), 4u) << r.out;
    EXPECT_EQ(rows.front(), "scenario,share,contamination,estimator,reps,mean_dH,sd_dH,mean_seconds");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::stringstream row(rows[i]);
        std::string field;
        for (int k = 0; k < 6; ++k) {
            std::getline(row, field, ',');
        }
        const double d = std::stod(field);
        EXPECT_TRUE(std::isfinite(d));
        EXPECT_GT(d, 0.0);
    }
    EXPECT_EQ(lines("r.csv").size(), 4u);
}

TEST_F(CliTest, EvaluateUnknownEstimator) {
    auto j = tiny_evaluate();
    j["estimators"] = {"prop1", "magic"};
    j["output"] = path("e.csv");
    const auto r = run_cli({"evaluate", "-c", write_json("e.json", j)});
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_NE(r.err.find("magic"), std::string::npos) << r.err;
}

TEST_F(CliTest, DegenerateStreamIsANumericalError) {
    auto j = tiny_evaluate();
    json flat = {{"type", "ar_garch"}, {"innovation", {{"family", "degenerate"}}}};
    j["models"] = {flat, flat};
    j["output"] = path("e.csv");
    const auto r = run_cli({"evaluate", "-c", write_json("e.json", j)});
    EXPECT_EQ(r.code, kExitNumerical) << r.err;
    EXPECT_NE(r.err.find("MAD"), std::string::npos) << r.err;
}

TEST(Replications, IndependentOfThreadCount) {
    auto j = tiny_evaluate();
    j["models"] = {two_ar_models(), {{"type", "ar_garch"}, {"c", 1.0}, {"phi", 0.5}, {"alpha", 0.0}, {"beta", 0.0}}};
    j["reps"] = 2;
    const auto cfg = evaluate_config_from_json(j);
    const auto one = run_replications(cfg, 1);
    const auto three = run_replications(cfg, 3);
    ASSERT_EQ(one.size(), three.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].distance, three[i].distance);
        EXPECT_EQ(one[i].estimator, three[i].estimator);
    }
    const auto rows = summarize(one);
    EXPECT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows.front().reps, 2u);
}

}  // namespace
}  // namespace depthmon::cli
