#include "doctest.h"

#include <cmath>

#include "smilewing/errors.hpp"
#include "smilewing/harness.hpp"

using namespace smilewing;

namespace {

Config cfg_of(const char* text) { return Config::parse(text); }

}  // namespace

TEST_CASE("config parses sections and overrides") {
    Config c = cfg_of("version = 1\n[model]\nname = nig\nalpha = 3\n[synthetic.right]\nb = -0.25\n");
    CHECK(c.get_string("model.name", "") == "nig");
    CHECK(c.get_double("model.alpha", 0) == 3.0);
    CHECK(c.get_double("synthetic.right.b", 0) == -0.25);
    c.apply_override("model.alpha=4.5");
    CHECK(c.get_double("model.alpha", 0) == 4.5);
    CHECK(c.get_double("model.beta", -7) == -7.0);
}

TEST_CASE("config rejects unknown keys, bad numbers and versions") {
    CHECK_THROWS_AS(cfg_of("[model]\nsigmaa = 0.2\n"), ConfigError);
    CHECK_THROWS_AS(cfg_of("version = 2\n"), ConfigError);
    CHECK_THROWS_AS(cfg_of("[model]\nname = bs\nsigma = abc\n").get_double("model.sigma", 0), ConfigError);
    Config c;
    CHECK_THROWS_AS(c.apply_override("model.sigma"), ConfigError);
    CHECK_THROWS_AS(build_model(cfg_of("[model]\nname = heston\n")), ConfigError);
    CHECK_THROWS_AS(build_model(cfg_of("[model]\nname = bs\nlambda = 1\n")), ConfigError);
}

TEST_CASE("models from config") {
    CHECK(build_model(cfg_of("[model]\nname = merton\nlambda = 0.5\n")).name() == "merton");
    CHECK(build_model(cfg_of("[model]\nname = nig_twin\n")).name() == "synthetic");
    const ModelSpec s = build_model(cfg_of("[model]\nname = symmetric_smile\n[synthetic.right]\nb = -0.5\nc = -2\na = -1.5\n"));
    const auto& p = std::get<SyntheticTailParams>(s.params());
    CHECK(p.left.b == doctest::Approx(-0.5));
    CHECK_THROWS_AS(build_model(cfg_of("[model]\nname = nig_twin\nT = 2\n")), ConfigError);
}

TEST_CASE("default grid: geometric from 0.5, 40 points, up to the reachability limit") {
    const Config c = cfg_of("[model]\nname = bs\n");
    const auto g = build_grid(c, build_model(c), Side::right);
    REQUIRE(g.size() == 40);
    CHECK(g.front() == 0.5);
    CHECK(g[1] / g[0] == doctest::Approx(g[39] / g[38]));
    // log c(k) ~ -k^2/0.08 for sigma = 0.2 reaches -700 near k = 7.5
    CHECK(g.back() > 6.5);
    CHECK(g.back() < 9.0);
    const Config s = cfg_of("[model]\nname = synthetic\n");
    CHECK(build_grid(s, build_model(s), Side::right).back() == 200.0);
}

TEST_CASE("trend classification") {
    CHECK(classify_trend({1.5, 1.3, 1.2, 1.1, 1.05}) == Trend::converging);
    CHECK(classify_trend({1.0, 1.01, 1.02, 1.04}) == Trend::diverging);
    CHECK(classify_trend({1.1, 1.2, 1.1, 1.2, 1.1}) == Trend::flat);
    CHECK(classify_trend({1.3, 1.0, 0.9, 0.95, 0.99}) == Trend::converging);
}

TEST_CASE("bs compare converges with the exact density tail") {
    const Config c = cfg_of("[model]\nname = bs\n[grid]\nk_min = 0.5\nk_max = 7\nk_points = 12\n");
    const ComparisonReport r = run_compare(c);
    REQUIRE(r.rows.size() == 12);
    CHECK(r.variant == WingVariant::iv_doubleprime);
    for (const auto& row : r.rows) {
        CHECK(row.status == "ok");
        CHECK(row.total_vol == doctest::Approx(0.2).epsilon(1e-8));
    }
    CHECK(std::abs(r.summary.final_ratio - 1.0) < 0.02);
    CHECK(r.summary.trend == Trend::converging);
    REQUIRE(r.summary.regvar.has_value());
    CHECK(r.summary.regvar->alpha_hat == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("fmls left wing is refused with a condition error") {
    Config c = cfg_of("[model]\nname = fmls\n");
    c.apply_override("run.side=left");
    CHECK_THROWS_AS(run_compare(c), ConditionError);
    CHECK_THROWS_AS(run_smile(c), ConditionError);
}

TEST_CASE("variant and tail kind mismatches are config errors") {
    Config c = cfg_of("[model]\nname = fmls\n[run]\nvariant = iv''\n");
    CHECK_THROWS_AS(run_asymptote(c), ConfigError);
    c.apply_override("run.variant=iv'");
    CHECK_NOTHROW(run_asymptote(c));
    c.apply_override("run.kind=price");
    CHECK_THROWS_AS(run_asymptote(c), ConfigError);
}

TEST_CASE("reports are deterministic and the csv header is fixed") {
    Config c = cfg_of("[model]\nname = merton\n[grid]\nk_max = 3\nk_points = 6\n[run]\ntail = numeric\n");
    const RunOutput a = run("compare", c);
    c.apply_override("run.threads=1");
    const RunOutput b = run("compare", c);
    CHECK(a.csv == b.csv);
    CHECK(a.json == b.json);
    CHECK(a.csv.rfind(std::string(kSmileCsvHeader) + "\n", 0) == 0);
    CHECK(a.summary_json.find("\"rows\"") == std::string::npos);
    CHECK(a.json.find("\"trend\"") != std::string::npos);
}

TEST_CASE("unreachable strikes are reported, not dropped") {
    const Config c = cfg_of("[model]\nname = bs\n[grid]\nk = 1,12\n");
    const ComparisonReport r = run_smile(c);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].status == "ok");
    CHECK(r.rows[1].status == "unreachable");
    CHECK_FALSE(r.rows[1].reason.empty());
    CHECK(render(r).json.find("\"refusals\"") != std::string::npos);
}

TEST_CASE("termstructure for bs is linear in T") {
    const TermStructureReport r = run_termstructure(cfg_of("[model]\nname = bs\n"));
    REQUIRE(r.rows.size() == 5);
    for (const auto& row : r.rows) CHECK(row.total_variance == doctest::Approx(0.04 * row.T).epsilon(1e-9));
    CHECK(r.variance_nondecreasing);
    CHECK(r.psi_nondecreasing);
    const TermStructureReport one = run_termstructure(cfg_of("[term]\nT_grid = 2\n"));
    CHECK(one.rows.size() == 1);
}

TEST_CASE("regvar: bs density tail has index 2, merton tail index 1") {
    const RegVarReport bs = run_regvar(cfg_of("[model]\nname = bs\n[grid]\nk_min = 2\nk_max = 200\nk_points = 33\n"));
    CHECK(bs.estimate.alpha_hat == doctest::Approx(2.0).epsilon(0.02));
    const RegVarReport mj = run_regvar(cfg_of("[model]\nname = merton\n[grid]\nk_min = 10\nk_max = 1e6\nk_points = 33\n"));
    CHECK(mj.estimate.alpha_hat == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("legendre run: bound above the numeric tail") {
    const LegendreReport r = run_legendre(cfg_of("[model]\nname = merton\n[grid]\nk_min = 0.5\nk_max = 4\nk_points = 6\n"));
    CHECK(r.bound_holds);
    for (const auto& row : r.rows) CHECK(row.log_tail_bound >= row.numeric_log_tail);
}
