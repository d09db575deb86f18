#include <regex>

#include <gtest/gtest.h>
#include <json.hpp>

#include "pleat/report.hpp"
#include "support.hpp"

using namespace pleat;

namespace
{

RunConfig config(Kind k, const std::string& word)
{
    RunConfig c;
    c.mode = k;
    c.word = word;
    return c;
}

int count(const std::string& text, const std::string& needle)
{
    int n = 0;
    for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) {
        ++n;
    }
    return n;
}

int tiles(const std::string& svg) { return count(svg, "<polygon points=");  }

}  // namespace

TEST(Report, JsonIsDeterministicAndSorted)
{
    const auto cfg = config(Kind::TorusBundle, "RRLL");
    const std::string a = emit_json(run_pipeline(cfg));
    const std::string b = emit_json(run_pipeline(cfg));
    EXPECT_EQ(a, b);
    const auto j = nlohmann::json::parse(a);
    EXPECT_EQ(j["word"], "R2L2");
    EXPECT_EQ(j["kind"], "torus-bundle");
    EXPECT_TRUE(j["converged"].get<bool>());
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) {
        keys.push_back(it.key());
    }
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
    EXPECT_LT(a.find("\"angles\""), a.find("\"word\""));
}

TEST(Report, FloatsRoundTrip)
{
    const auto r = run_pipeline(config(Kind::TorusBundle, "R3L2"));
    const auto j = nlohmann::json::parse(emit_json(r));
    EXPECT_EQ(j["volume"].get<double>(), r.volume.total_volume);
    for (std::size_t k = 0; k < r.structure.w.size(); ++k) {
        EXPECT_EQ(j["w"][k].get<double>(), r.structure.w[k]);
    }
}

TEST(Report, MatrixInput)
{
    RunConfig cfg;
    cfg.matrix = "2,1,1,1";
    const auto r = run_pipeline(cfg);
    EXPECT_EQ(r.tri.word, "RL");
    cfg.matrix = "1,1,0,1";
    EXPECT_EQ(support::code_of([&] { run_pipeline(cfg); }), ErrorCode::NotAnosov);
    cfg.mode = Kind::TwoBridge;
    EXPECT_EQ(support::code_of([&] { run_pipeline(cfg); }), ErrorCode::Parse);
}

TEST(Report, RNLMNeedsMatchingWord)
{
    auto cfg = config(Kind::TorusBundle, "R5L6");
    cfg.rnlm = {5, 6};
    const auto r = run_pipeline(cfg);
    ASSERT_TRUE(r.rnlm.has_value());
    EXPECT_EQ(r.rnlm_checks.size(), r.fans.size());
    cfg.rnlm = {6, 5};
    EXPECT_EQ(support::code_of([&] { run_pipeline(cfg); }), ErrorCode::Parse);
}

TEST(Report, SvgTileCounts)
{
    const auto rl = run_pipeline(config(Kind::TorusBundle, "RL"));
    EXPECT_EQ(tiles(emit_svg(rl.tri, rl.dev, 1)), 4);
    EXPECT_EQ(tiles(emit_svg(rl.tri, rl.dev, 2)), 16);
    const auto r4 = run_pipeline(config(Kind::TorusBundle, "R4L4"));
    EXPECT_EQ(tiles(emit_svg(r4.tri, r4.dev, 1)), 16);
    const auto br = run_pipeline(config(Kind::TwoBridge, "R3L2R"));
    const auto svg = emit_svg(br.tri, br.dev, 1);
    EXPECT_EQ(tiles(svg), 40);
    EXPECT_EQ(count(svg, "<g id=\"cusp"), 2);
    EXPECT_EQ(count(svg, "class=\"domain\""), 2);
    EXPECT_GT(count(svg, "#bfbfbf"), 0);
}

TEST(Report, SvgHorizontalPeriodIsThousandUnits)
{
    const auto r = run_pipeline(config(Kind::TorusBundle, "R2LRL"));
    const auto svg = emit_svg(r.tri, r.dev, 1);
    const std::regex re("class=\"domain\" points=\"([-0-9.]+),([-0-9.]+) ([-0-9.]+),([-0-9.]+)");
    std::smatch m;
    ASSERT_TRUE(std::regex_search(svg, m, re));
    EXPECT_NEAR(std::stod(m[3]) - std::stod(m[1]), 1000, 1e-3);
    EXPECT_NEAR(std::stod(m[4]) - std::stod(m[2]), 0, 1e-3);
}

TEST(Report, ExitStatus)
{
    EXPECT_EQ(exit_status(ErrorCode::Parse), 2);
    EXPECT_EQ(exit_status(ErrorCode::WordEmpty), 2);
    EXPECT_EQ(exit_status(ErrorCode::NotAnosov), 3);
    EXPECT_EQ(exit_status(ErrorCode::TooFewSyllables), 3);
    EXPECT_EQ(exit_status(ErrorCode::NotConverged), 4);
}

TEST(Report, ErrorJson)
{
    const auto j = nlohmann::json::parse(emit_error_json("RRR", Error(ErrorCode::WordNotMixed, "no L")));
    EXPECT_EQ(j["error"]["code"], "EWordNotMixed");
    EXPECT_EQ(j["input"], "RRR");
}
