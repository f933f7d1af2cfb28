#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "adrev/data/pipeline.hpp"
#include "adrev/error.hpp"
#include "adrev/log.hpp"
#include "data_fixtures.hpp"

namespace adrev::data {
namespace {

using testing::make_series;
using testing::random_panel;

// Sakamoto's day-of-week, shifted so Monday = 0.
int dow_oracle(int y, int m, int d) {
  static const int t[] = {0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4};
  if (m < 3) y -= 1;
  const int sunday_based = (y + y / 4 - y / 100 + y / 400 + t[m - 1] + d) % 7;
  return (sunday_based + 6) % 7;
}

int doy_oracle(int y, int m, int d) {
  static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  int total = d;
  for (int i = 0; i < m - 1; ++i) total += days[i] + (i == 1 && leap ? 1 : 0);
  return total;
}

class QuietWarnings : public ::testing::Test {
 protected:
  void SetUp() override { set_warnings_enabled(false); }
  void TearDown() override { set_warnings_enabled(true); }
};

// ---------------------------------------------------------------- calendar

TEST(Calendar, FirstMondayOf2018) {
  const auto row = calendar_row(parse_date("2018-01-01"));
  EXPECT_EQ(row.day_of_week, 0);
  EXPECT_EQ(row.day_of_year, 0.0);
  EXPECT_EQ(calendar_row(parse_date("2018-01-08")).day_of_week, 0);
}

TEST(Calendar, LeapDayClampsToOne) {
  EXPECT_EQ(day_of_year(parse_date("2020-12-31")), 366);
  EXPECT_EQ(calendar_row(parse_date("2020-12-31")).day_of_year, 1.0);
  EXPECT_DOUBLE_EQ(calendar_row(parse_date("2019-12-31")).day_of_year, 364.0 / 365.0);
}

TEST(Calendar, MatchesCivilCalendarOracle) {
  Date d = parse_date("2015-01-01");
  for (int i = 0; i < 3000; ++i, d += std::chrono::days(1)) {
    const std::chrono::year_month_day ymd{d};
    const int y = static_cast<int>(ymd.year());
    const int m = static_cast<int>(static_cast<unsigned>(ymd.month()));
    const int dd = static_cast<int>(static_cast<unsigned>(ymd.day()));
    ASSERT_EQ(day_of_week(d), dow_oracle(y, m, dd)) << format_date(d);
    ASSERT_EQ(day_of_year(d), doy_oracle(y, m, dd)) << format_date(d);
    const auto row = calendar_row(d);
    ASSERT_GE(row.day_of_year, 0.0);
    ASSERT_LE(row.day_of_year, 1.0);
  }
}

TEST(Calendar, FeatureMatrixFollowsDates) {
  const auto rows = calendar_features({parse_date("2018-01-01"), parse_date("2018-01-02")});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].day_of_week, 1);
  EXPECT_DOUBLE_EQ(rows[1].day_of_year, 1.0 / 365.0);
}

TEST(Dates, ParseAndFormat) {
  EXPECT_EQ(format_date(parse_date("2019-07-01")), "2019-07-01");
  EXPECT_THROW(parse_date("2019-7-01"), DataError);
  EXPECT_THROW(parse_date("2019-02-30"), DataError);
  EXPECT_THROW(parse_date("yesterday!"), DataError);
}

// ---------------------------------------------------------------- csv

std::string two_publisher_csv(int days) {
  std::ostringstream os;
  os << "date,publisher_id,country,category,revenue,impressions,clicks,page_views,sessions,bounces\n";
  for (const char* id : {"a", "b"})
    for (int t = 0; t < days; ++t) {
      os << format_date(parse_date("2020-03-01") + std::chrono::days(t)) << ',' << id << ",DE,news," << 10.5 + t
         << ',' << 1000 + t << ',' << 20 << ',' << 300 << ',' << 250 << ',' << 40 << '\n';
    }
  return os.str();
}

TEST(Csv, WellFormedFile) {
  std::istringstream in(two_publisher_csv(10));
  const auto panel = read_csv(in);
  ASSERT_EQ(panel.size(), 2u);
  for (const auto& p : panel.publishers) {
    EXPECT_EQ(p.length(), 10u);
    EXPECT_EQ(p.country, "DE");
    EXPECT_EQ(format_date(p.start), "2020-03-01");
  }
  EXPECT_DOUBLE_EQ(panel.find("b").revenue[3], 13.5);
  EXPECT_DOUBLE_EQ(panel.find("a").covariates[kImpressions][9], 1009.0);
  EXPECT_THROW(panel.find("zzz"), LookupError);
}

TEST(Csv, ColumnOrderIsFree) {
  std::istringstream in(
      "publisher_id,date,revenue,country,category,bounces,sessions,page_views,clicks,impressions\n"
      "x,2020-01-01,3,US,games,1,2,3,4,5\n");
  const auto panel = read_csv(in);
  EXPECT_DOUBLE_EQ(panel.publishers[0].revenue[0], 3.0);
  EXPECT_DOUBLE_EQ(panel.publishers[0].covariates[kImpressions][0], 5.0);
  EXPECT_DOUBLE_EQ(panel.publishers[0].covariates[kBounces][0], 1.0);
}

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_csv(in);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(Csv, GapDateRejected) {
  auto text = two_publisher_csv(10);
  const auto pos = text.find("2020-03-05,a");
  text.erase(pos, text.find('\n', pos) - pos + 1);
  EXPECT_NE(error_of(text).find("non-contiguous dates"), std::string::npos) << error_of(text);
}

TEST(Csv, MissingColumnNamed) {
  const auto msg = error_of("date,publisher_id,country,category,revenue,impressions,page_views,sessions,bounces\n");
  EXPECT_NE(msg.find("clicks"), std::string::npos) << msg;
}

TEST(Csv, RowErrorsNameTheRow) {
  const std::string header =
      "date,publisher_id,country,category,revenue,impressions,clicks,page_views,sessions,bounces\n";
  const std::string good = "2020-01-01,a,DE,news,1,2,3,4,5,6\n";
  EXPECT_NE(error_of(header + good + "2020-13-01,a,DE,news,1,2,3,4,5,6\n").find("row 3"), std::string::npos);
  EXPECT_NE(error_of(header + good + "2020-01-02,a,DE,news,-1,2,3,4,5,6\n").find("row 3"), std::string::npos);
  EXPECT_NE(error_of(header + good + "2020-01-02,a,DE,news,1,2,oops,4,5,6\n").find("row 3"), std::string::npos);
  const auto dup = error_of(header + good + "2020-01-02,a,DE,news,1,2,3,4,5,6\n" + good);
  EXPECT_NE(dup.find("row 4"), std::string::npos) << dup;
  EXPECT_NE(dup.find("duplicate"), std::string::npos) << dup;
  EXPECT_NE(error_of(header + good + "2020-01-02,a,FR,news,1,2,3,4,5,6\n").find("row 3"), std::string::npos);
  EXPECT_NE(error_of("").find("header"), std::string::npos);
}

// Rows keyed by (publisher, date) with every field parsed as a number, so
// the comparison ignores ordering and float formatting.
std::map<std::pair<std::string, std::string>, std::vector<std::string>> rows_of(const std::string& text) {
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    std::vector<std::string> rest{fields[2], fields[3]};
    for (std::size_t i = 4; i < fields.size(); ++i) {
      std::ostringstream v;
      v.precision(17);
      v << std::stod(fields[i]);
      rest.push_back(v.str());
    }
    out[{fields[1], fields[0]}] = rest;
  }
  return out;
}

TEST(Csv, ExportRoundTrip) {
  const auto panel = random_panel(7);
  std::ostringstream first;
  write_csv(first, panel);

  // Shuffle the row order before reading it back.
  std::istringstream lines(first.str());
  std::string header, line;
  std::getline(lines, header);
  std::vector<std::string> body;
  while (std::getline(lines, line)) body.push_back(line);
  std::mt19937_64 rng(3);
  std::shuffle(body.begin(), body.end(), rng);
  std::string shuffled = header + "\n";
  for (const auto& l : body) shuffled += l + "\n";

  std::istringstream in(shuffled);
  const auto again = read_csv(in);
  std::ostringstream second;
  write_csv(second, again);
  EXPECT_EQ(rows_of(first.str()), rows_of(second.str()));
  ASSERT_EQ(again.size(), panel.size());
  for (const auto& p : panel.publishers) {
    const auto& q = again.find(p.id);
    EXPECT_EQ(q.revenue, p.revenue);
    EXPECT_EQ(q.covariates, p.covariates);
    EXPECT_EQ(q.start, p.start);
  }
}

// ---------------------------------------------------------------- filter

using FilterTest = QuietWarnings;

std::vector<double> with_zero_run(std::size_t zeros) {
  std::vector<double> v(60, 110.0);
  for (std::size_t i = 0; i < zeros; ++i) v[20 + i] = 0.0;
  return v;
}

TEST_F(FilterTest, ZeroRunBoundary) {
  const Date d = parse_date("2020-01-01");
  SeriesPanel panel;
  panel.publishers.push_back(make_series("eleven", "c", d, with_zero_run(11)));
  panel.publishers.push_back(make_series("ten", "c", d, with_zero_run(10)));
  const auto kept = filter_publishers(panel);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept.publishers[0].id, "ten");
  EXPECT_EQ(longest_zero_run(with_zero_run(11)), 11u);
}

TEST_F(FilterTest, AverageIsStrict) {
  const Date d = parse_date("2020-01-01");
  SeriesPanel panel;
  panel.publishers.push_back(make_series("five", "c", d, std::vector<double>(30, 5.0)));
  panel.publishers.push_back(make_series("above", "c", d, std::vector<double>(30, 5.0 + 1e-9)));
  const auto kept = filter_publishers(panel);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept.publishers[0].id, "above");
}

TEST_F(FilterTest, OrderStableAndIdempotent) {
  auto panel = random_panel(11, 10);
  panel.publishers[2].revenue.assign(panel.publishers[2].length(), 1.0);
  for (std::size_t i = 0; i < 12; ++i) panel.publishers[5].revenue[i] = 0.0;
  const auto once = filter_publishers(panel);
  const auto twice = filter_publishers(once);
  ASSERT_EQ(once.size(), 8u);
  std::vector<std::string> ids, again;
  for (const auto& p : once.publishers) ids.push_back(p.id);
  for (const auto& p : twice.publishers) again.push_back(p.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"p0", "p1", "p3", "p4", "p6", "p7", "p8", "p9"}));
  EXPECT_EQ(ids, again);
}

TEST_F(FilterTest, EmptyResultAllowed) {
  SeriesPanel panel;
  panel.publishers.push_back(make_series("x", "c", parse_date("2020-01-01"), std::vector<double>(5, 1.0)));
  EXPECT_EQ(filter_publishers(panel).size(), 0u);
}

// ---------------------------------------------------------------- scaling

using ScalingTest = QuietWarnings;

TEST_F(ScalingTest, LogStandardizeKnownValues) {
  const double e = std::exp(1.0);
  SeriesPanel panel;
  panel.publishers.push_back(make_series("a", "c", parse_date("2020-01-01"), {0.0, e - 1.0, e * e - 1.0}));
  const auto fit = fit_transform(panel, parse_date("2020-01-04"));
  ASSERT_EQ(fit.panel.series.size(), 1u);
  const auto& z = fit.panel.series[0].target;
  const double k = std::sqrt(1.5);
  EXPECT_NEAR(z[0], -k, 1e-12);
  EXPECT_NEAR(z[1], 0.0, 1e-12);
  EXPECT_NEAR(z[2], k, 1e-12);
  EXPECT_NEAR(z[2], 1.2247, 1e-4);
  EXPECT_NEAR(fit.scalers.at("a").target.mean, 1.0, 1e-12);
}

TEST_F(ScalingTest, StatisticsUseTrainingRangeOnly) {
  std::mt19937_64 rng(4);
  auto revenue = testing::random_revenue(50, rng);
  SeriesPanel a, b;
  a.publishers.push_back(make_series("p", "c", parse_date("2020-01-01"), revenue));
  for (std::size_t t = 30; t < 50; ++t) revenue[t] *= 1000.0;
  b.publishers.push_back(make_series("p", "c", parse_date("2020-01-01"), revenue));
  const Date end = parse_date("2020-01-31");
  const auto sa = fit_transform(a, end).scalers.at("p");
  const auto sb = fit_transform(b, end).scalers.at("p");
  EXPECT_EQ(sa.target.mean, sb.target.mean);
  EXPECT_EQ(sa.target.std, sb.target.std);
}

TEST_F(ScalingTest, ConstantRevenueDropped) {
  SeriesPanel panel;
  panel.publishers.push_back(make_series("flat", "c", parse_date("2020-01-01"), std::vector<double>(20, 42.0)));
  std::mt19937_64 rng(1);
  panel.publishers.push_back(make_series("live", "c", parse_date("2020-01-01"), testing::random_revenue(20, rng)));
  const auto fit = fit_transform(panel, parse_date("2020-01-15"));
  ASSERT_EQ(fit.panel.series.size(), 1u);
  EXPECT_EQ(fit.panel.series[0].id, "live");
  EXPECT_FALSE(fit.scalers.contains("flat"));
}

TEST_F(ScalingTest, TooFewTrainingDays) {
  SeriesPanel panel;
  panel.publishers.push_back(make_series("a", "c", parse_date("2020-01-01"), {1.0, 2.0, 3.0}));
  EXPECT_THROW(fit_transform(panel, parse_date("2020-01-02")), ContractError);
}

TEST_F(ScalingTest, ConstantCovariateKeepsUnitScale) {
  std::mt19937_64 rng(2);
  auto s = make_series("a", "c", parse_date("2020-01-01"), testing::random_revenue(20, rng));
  s.covariates[kBounces].assign(20, 7.0);
  SeriesPanel panel;
  panel.publishers.push_back(s);
  const auto fit = fit_transform(panel, parse_date("2020-01-15"));
  EXPECT_EQ(fit.scalers.at("a").covariates[kBounces].std, 1.0);
  for (double v : fit.panel.series[0].unknown[kBounces]) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST_F(ScalingTest, RoundTripOnTrainingRange) {
  auto panel = random_panel(21);
  panel.publishers[0].revenue[3] = 0.0;
  const Date end = parse_date("2019-03-15");
  const auto fit = fit_transform(panel, end);
  for (const auto& s : fit.panel.series) {
    const auto& raw = panel.find(s.id);
    for (std::size_t t = 0; t < s.length() && s.date_at(t) < end; ++t) {
      const double back = inverse_transform(s.target[t], fit.scalers, s.id);
      ASSERT_NEAR(back, raw.revenue[t], 1e-9 * std::max(1.0, raw.revenue[t])) << s.id << " t=" << t;
    }
  }
}

TEST(Inverse, AnalyticCases) {
  const Scaler s{2.5, 0.7};
  EXPECT_DOUBLE_EQ(inverse_transform(0.0, s), std::exp(2.5) - 1.0);
  EXPECT_EQ(inverse_transform(-1e6, s), 0.0);
  EXPECT_EQ(inverse_transform(-50.0, s), 0.0);
  ScalerMap map;
  EXPECT_THROW(inverse_transform(0.0, map, "nobody"), LookupError);
}

TEST_F(ScalingTest, ApplyTransformUsesGivenScalers) {
  const auto panel = random_panel(5);
  const auto fit = fit_transform(panel, parse_date("2019-03-01"));
  const auto again = apply_transform(panel, fit.scalers);
  for (std::size_t i = 0; i < again.series.size(); ++i) EXPECT_EQ(again.series[i].target, fit.panel.series[i].target);
  ScalerMap partial;
  EXPECT_THROW(apply_transform(panel, partial), LookupError);
}

// ---------------------------------------------------------------- category mean

NormalizedSeries series_with(std::string id, std::string category, Date start, std::vector<double> z) {
  NormalizedSeries s;
  s.id = std::move(id);
  s.category = std::move(category);
  s.start = start;
  s.target = std::move(z);
  return s;
}

TEST(CategoryMean, SinglePublisherCopiesItself) {
  NormalizedPanel panel;
  panel.series.push_back(series_with("a", "solo", parse_date("2020-01-01"), {0.3, -1.0, 2.0}));
  add_category_mean(panel);
  EXPECT_EQ(panel.unknown_names.back(), "category_mean_revenue");
  EXPECT_EQ(panel.series[0].unknown.back(), panel.series[0].target);
}

TEST(CategoryMean, OppositeValuesCancel) {
  NormalizedPanel panel;
  panel.series.push_back(series_with("a", "c", parse_date("2020-01-01"), {1.0}));
  panel.series.push_back(series_with("b", "c", parse_date("2020-01-01"), {-1.0}));
  add_category_mean(panel);
  EXPECT_EQ(panel.series[0].unknown.back()[0], 0.0);
  EXPECT_EQ(panel.series[1].unknown.back()[0], 0.0);
}

TEST(CategoryMean, ExcludeSelf) {
  NormalizedPanel panel;
  panel.series.push_back(series_with("a", "c", parse_date("2020-01-01"), {1.0}));
  panel.series.push_back(series_with("b", "c", parse_date("2020-01-01"), {-1.0}));
  panel.series.push_back(series_with("z", "other", parse_date("2020-01-01"), {4.0}));
  add_category_mean(panel, true);
  EXPECT_EQ(panel.series[0].unknown.back()[0], -1.0);
  EXPECT_EQ(panel.series[1].unknown.back()[0], 1.0);
  EXPECT_EQ(panel.series[2].unknown.back()[0], 0.0);
}

TEST(CategoryMean, MatchesGroupByOracle) {
  set_warnings_enabled(false);
  const auto raw = random_panel(17, 9);
  auto panel = fit_transform(raw, parse_date("2019-03-01")).panel;
  set_warnings_enabled(true);
  add_category_mean(panel);
  for (const auto& s : panel.series) {
    for (std::size_t t = 0; t < s.length(); ++t) {
      const Date d = s.date_at(t);
      double sum = 0.0;
      int n = 0;
      for (const auto& o : panel.series) {
        if (o.category != s.category) continue;
        for (std::size_t u = 0; u < o.length(); ++u)
          if (o.date_at(u) == d) {
            sum += o.target[u];
            ++n;
          }
      }
      ASSERT_EQ(s.unknown.back()[t], sum / n) << s.id << " " << format_date(d);
    }
  }
}

// ---------------------------------------------------------------- windows

TEST(Windows, CountFormula) {
  EXPECT_EQ(window_count(100, 89, 7), 5u);
  EXPECT_EQ(window_count(95, 89, 7), 0u);
  EXPECT_EQ(window_count(96, 89, 7), 1u);
  for (std::size_t T = 0; T < 40; ++T)
    for (std::size_t k = 1; k < 12; ++k)
      for (std::size_t tau = 1; tau < 8; ++tau) {
        const long expected = std::max(0L, static_cast<long>(T) - static_cast<long>(k + tau) + 1);
        ASSERT_EQ(window_count(T, k, tau), static_cast<std::size_t>(expected));
      }
}

NormalizedPanel normalized_random(std::uint64_t seed) {
  set_warnings_enabled(false);
  const auto raw = random_panel(seed);
  auto fit = fit_transform(raw, parse_date("2019-03-01"));
  set_warnings_enabled(true);
  add_category_mean(fit.panel);
  assign_static_codes(fit.panel, Vocabulary::build(raw));
  return fit.panel;
}

TEST(Windows, MatchesSlicingOracle) {
  const auto panel = normalized_random(9);
  const std::size_t k = 13, tau = 5;
  const auto set = make_windows(panel, k, tau);
  std::size_t expected = 0;
  for (const auto& s : panel.series) expected += window_count(s.length(), k, tau);
  ASSERT_EQ(set.size(), expected);

  std::size_t idx = 0;
  for (std::size_t i = 0; i < panel.series.size(); ++i) {
    const auto& s = panel.series[i];
    for (std::size_t w = 0; w < window_count(s.length(), k, tau); ++w, ++idx) {
      const auto& win = set.samples[idx];
      ASSERT_EQ(win.publisher, s.id);
      ASSERT_EQ(win.anchor, s.start + std::chrono::days(static_cast<long>(w + k)));
      ASSERT_EQ(win.statics, s.statics);
      const std::size_t width = 1 + s.unknown.size() + 2;
      ASSERT_EQ(win.encoder.size(), k * width);
      for (std::size_t r = 0; r < k; ++r) {
        const std::size_t t = w + r;
        const Date d = s.start + std::chrono::days(static_cast<long>(t));
        ASSERT_EQ(win.encoder[r * width], s.target[t]);
        for (std::size_t j = 0; j < s.unknown.size(); ++j) ASSERT_EQ(win.encoder[r * width + 1 + j], s.unknown[j][t]);
        ASSERT_EQ(win.encoder[r * width + width - 2], day_of_week(d));
        ASSERT_EQ(win.encoder[r * width + width - 1], std::min(1.0, (day_of_year(d) - 1) / 365.0));
      }
      for (std::size_t h = 0; h < tau; ++h) {
        const std::size_t t = w + k + h;
        const Date d = s.start + std::chrono::days(static_cast<long>(t));
        ASSERT_EQ(win.target[h], s.target[t]);
        ASSERT_EQ(win.decoder[h * 2], day_of_week(d));
        ASSERT_EQ(win.decoder[h * 2 + 1], std::min(1.0, (day_of_year(d) - 1) / 365.0));
      }
    }
  }
}

TEST(Windows, ShortSeriesYieldNothing) {
  NormalizedPanel panel;
  panel.series.push_back(series_with("a", "c", parse_date("2020-01-01"), std::vector<double>(95, 0.1)));
  EXPECT_TRUE(make_windows(panel, 89, 7).empty());
  EXPECT_THROW(make_windows(panel, 0, 7), ContractError);
}

TEST(Schema, RolesAreExclusive) {
  const auto schema = FeatureSchema::build(
      {"impressions", "clicks", "page_views", "sessions", "bounces", "category_mean_revenue"}, {10, 2, 3});
  EXPECT_EQ(schema.past_width(), 9u);
  EXPECT_EQ(schema.known_width(), 2u);
  const auto cols = schema.past_columns();
  EXPECT_EQ(cols.front().name, "revenue");
  EXPECT_EQ(cols[7].name, "day_of_week");
  EXPECT_EQ(cols[7].cardinality, 7);
  EXPECT_EQ(cols[8].name, "day_of_year");
  EXPECT_THROW(FeatureSchema::build({"clicks", "day_of_week"}, {1, 1, 1}), ConfigError);
  EXPECT_THROW(FeatureSchema::build({"revenue"}, {1, 1, 1}), ConfigError);
}

// ---------------------------------------------------------------- splitting

using SplitTest = QuietWarnings;

TEST_F(SplitTest, Boundaries) {
  NormalizedPanel panel;
  panel.series.push_back(series_with("a", "c", parse_date("2020-01-01"), std::vector<double>(60, 0.0)));
  const std::size_t tau = 3;
  const auto set = make_windows(panel, 4, tau);
  const Date val = parse_date("2020-01-20");
  const Date test = parse_date("2020-02-01");
  const auto splits = chrono_split(set, val, test);
  bool saw_edge = false, saw_test_anchor = false;
  for (const auto& w : splits.train.samples) {
    if (w.anchor + std::chrono::days(tau - 1) == val - std::chrono::days(1)) saw_edge = true;
  }
  for (const auto& w : splits.test.samples)
    if (w.anchor == test) saw_test_anchor = true;
  EXPECT_TRUE(saw_edge);
  EXPECT_TRUE(saw_test_anchor);
  // Straddlers: anchors val-2 and val-1 (train side), test-2 and test-1 (val side).
  EXPECT_EQ(splits.train.size() + splits.val.size() + splits.test.size() + 4, set.size());
  EXPECT_THROW(chrono_split(set, test, val), ContractError);
}

TEST_F(SplitTest, TargetDatesNeverShared) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto panel = normalized_random(seed);
    const std::size_t tau = 7;
    const auto set = make_windows(panel, 10, tau);
    const auto splits = chrono_split(set, parse_date("2019-03-10"), parse_date("2019-04-02"));
    std::array<std::set<std::pair<std::string, long>>, 3> dates;
    const std::array<const WindowSet*, 3> parts{&splits.train, &splits.val, &splits.test};
    for (std::size_t p = 0; p < 3; ++p) {
      EXPECT_FALSE(parts[p]->empty());
      for (const auto& w : parts[p]->samples)
        for (std::size_t h = 0; h < tau; ++h)
          dates[p].insert({w.publisher, (w.anchor + std::chrono::days(h)).time_since_epoch().count()});
    }
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b)
        for (const auto& d : dates[a]) ASSERT_EQ(dates[b].count(d), 0u);
    // Calendar-level disjointness as well: every train target precedes every val target.
    long max_train = 0, min_val = 1L << 40;
    for (const auto& d : dates[0]) max_train = std::max(max_train, d.second);
    for (const auto& d : dates[1]) min_val = std::min(min_val, d.second);
    EXPECT_LT(max_train, min_val);
  }
}

// ---------------------------------------------------------------- batching

TEST(Collate, TimeMajorLayout) {
  const auto panel = normalized_random(4);
  const auto set = make_windows(panel, 6, 3);
  const auto batch = collate(set, 10, 4);
  const std::size_t width = set.samples[0].encoder.size() / 6;
  ASSERT_EQ(batch.encoder.shape(), (Shape{24, width}));
  ASSERT_EQ(batch.decoder.shape(), (Shape{12, 2}));
  ASSERT_EQ(batch.target.shape(), (Shape{4, 3}));
  ASSERT_EQ(batch.statics.shape(), (Shape{4, 3}));
  for (std::size_t b = 0; b < 4; ++b) {
    const auto& s = set.samples[10 + b];
    for (std::size_t t = 0; t < 6; ++t)
      for (std::size_t f = 0; f < width; ++f)
        ASSERT_EQ(batch.encoder.data()[(t * 4 + b) * width + f], s.encoder[t * width + f]);
    for (std::size_t t = 0; t < 3; ++t) {
      ASSERT_EQ(batch.target.data()[b * 3 + t], s.target[t]);
      ASSERT_EQ(batch.decoder.data()[(t * 4 + b) * 2], s.decoder[t * 2]);
    }
    ASSERT_EQ(batch.statics.data()[b * 3], s.statics[0]);
  }
  EXPECT_THROW(collate(set, set.size() - 1, 2), ContractError);
}

// ---------------------------------------------------------------- pipeline

using PipelineTest = QuietWarnings;

TEST_F(PipelineTest, DefaultSplitDatesFollowSpan) {
  SeriesPanel panel;
  std::mt19937_64 rng(6);
  panel.publishers.push_back(make_series("a", "c", parse_date("2020-01-01"), testing::random_revenue(80, rng)));
  const auto [val, test] = resolve_split_dates(panel, {});
  EXPECT_EQ(val, parse_date("2020-01-01") + std::chrono::days(60));
  EXPECT_EQ(test, parse_date("2020-01-01") + std::chrono::days(70));
}

TEST_F(PipelineTest, PrepareAndReuse) {
  const auto panel = random_panel(8, 6);
  PipelineConfig cfg;
  cfg.lookback = 14;
  cfg.horizon = 7;
  cfg.val_start = parse_date("2019-03-01");
  cfg.test_start = parse_date("2019-04-01");
  const auto prepared = prepare(panel, cfg);
  EXPECT_EQ(prepared.schema.unknown.back(), "category_mean_revenue");
  EXPECT_EQ(prepared.schema.past_width(), 9u);
  EXPECT_FALSE(prepared.splits.train.empty());
  const auto& w = prepared.splits.train.samples[0];
  EXPECT_EQ(w.encoder.size(), 14 * prepared.schema.past_width());

  const auto reused = prepare_with(panel, cfg, prepared.scalers, prepared.vocab);
  ASSERT_EQ(reused.splits.test.size(), prepared.splits.test.size());
  for (std::size_t i = 0; i < reused.splits.test.size(); ++i)
    EXPECT_EQ(reused.splits.test.samples[i].encoder, prepared.splits.test.samples[i].encoder);

  cfg.category_mean = false;
  EXPECT_EQ(prepare(panel, cfg).schema.past_width(), 8u);
}

}  // namespace
}  // namespace adrev::data
