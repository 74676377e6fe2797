#include <cmath>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ruin/report.hpp"

using namespace ruin;

namespace {

const HopProbabilities kBase = HopProbabilities::make(0.3, 0.5, 0.2);

}  // namespace

TEST(FormatReal, RoundTrips) {
  for (double v : {0.095, 1.0 / 3.0, 5.642e-7, 0.0, 1e-300}) {
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
}

TEST(PmfTable, AllMethodsAgreeAtSmallTimes) {
  const std::vector<TimeIndex> ts{1, 2, 3, 4, 7, 12};
  const auto exact = pmf_table(1, ts, kBase, Method::closed_form);
  for (Method m : {Method::hypergeometric, Method::dp, Method::integral}) {
    const auto other = pmf_table(1, ts, kBase, m);
    ASSERT_EQ(other.rows.size(), ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      EXPECT_EQ(other.rows[i].t, ts[i]);
      EXPECT_NEAR(other.rows[i].p, exact.rows[i].p, 1e-12);
    }
  }
}

TEST(PmfTable, MonteCarloRowsAreFrequencies) {
  const auto mc = pmf_table(1, {1, 3}, kBase, Method::monte_carlo, MonteCarloOptions{200'000, 3, 100, 1});
  EXPECT_NEAR(mc.rows[0].p, 0.5, 4 * std::sqrt(0.25 / 2e5));
  EXPECT_NEAR(mc.rows[1].p, 0.095, 4 * std::sqrt(0.095 * 0.905 / 2e5));
}

TEST(PmfTable, CsvLayout) {
  std::ostringstream os;
  const auto table = pmf_table(1, {1, 2, 3}, kBase, Method::closed_form);
  EXPECT_NEAR(table.rows[1].p, 0.1, 1e-15);
  EXPECT_NEAR(table.rows[2].p, 0.095, 1e-15);
  write_csv(os, table);
  // log-space sum lands one ulp above 0.1; 17 digits keep that visible
  EXPECT_EQ(os.str(), "t,p\n1,0.5\n2,0.10000000000000002\n3,0.094999999999999973\n");
}

TEST(PmfTable, JsonLayout) {
  std::ostringstream os;
  write_json(os, pmf_table(2, {1, 2}, kBase, Method::dp));
  const auto j = nlohmann::json::parse(os.str());
  EXPECT_EQ(j["method"], "dp");
  EXPECT_EQ(j["x"], 2);
  EXPECT_DOUBLE_EQ(j["params"]["pl"].get<double>(), 0.5);
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["rows"][0]["p"].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(j["rows"][1]["p"].get<double>(), 0.25);
}

TEST(ParseMethod, KnownNames) {
  EXPECT_EQ(parse_method("exact"), Method::closed_form);
  EXPECT_EQ(parse_method("mc"), Method::monte_carlo);
  EXPECT_EQ(parse_method("fourier"), std::nullopt);
}

TEST(Figure2Times, DenseThenGeometric) {
  const auto ts = figure2_times({});
  EXPECT_EQ(ts.front(), 50);
  EXPECT_EQ(ts.back(), 100'000);
  EXPECT_EQ(ts[1950], 2000);
  EXPECT_GT(ts[1951], 2000);
  for (std::size_t i = 1; i < ts.size(); ++i) EXPECT_LT(ts[i - 1], ts[i]);
  const auto uniform = figure2_times({50, 150, 0, 100, 25});
  EXPECT_EQ(uniform, (std::vector<TimeIndex>{50, 75, 100, 125, 150}));
  EXPECT_THROW(figure2_times({0, 10}), Error);
}

TEST(Figure2Curves, SixCurvesUnimodalAndProbabilities) {
  const auto curves = figure2_curves();
  ASSERT_EQ(curves.size(), 6u);
  for (const auto& c : curves) {
    EXPECT_EQ(c.x, 50);
    EXPECT_NEAR(c.params.pl() - c.params.pr(), c.delta_p, 1e-12);
    EXPECT_TRUE(is_unimodal(c.p)) << c.panel << ' ' << c.params.pr();
    CompensatedSum<double> mass;
    for (double v : c.p) {
      EXPECT_GE(v, 0.0);
      mass += v;
    }
    EXPECT_LE(mass.value(), 1.0 + 1e-12);
  }
}

TEST(Figure2Curves, LogLogCsvUsesLogValues) {
  const auto curves = figure2_curves({50, 60, 0, 100, 5});
  std::ostringstream os;
  write_curve_loglog_csv(os, curves[4]);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "ln_t,ln_p");
  std::getline(is, line);
  const double ln_p = std::stod(line.substr(line.find(',') + 1));
  EXPECT_NEAR(ln_p, pmf(50, 50, curves[4].params).log_value, 1e-15);
}

TEST(IsUnimodal, Shapes) {
  EXPECT_TRUE(is_unimodal(std::vector<double>{0, 1, 3, 3, 2, 0}));
  EXPECT_TRUE(is_unimodal(std::vector<double>{}));
  EXPECT_FALSE(is_unimodal(std::vector<double>{0, 2, 1, 2, 0}));
}
