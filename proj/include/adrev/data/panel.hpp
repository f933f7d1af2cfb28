#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "adrev/data/date.hpp"

namespace adrev::data {

inline constexpr std::size_t kCovariateCount = 5;
inline constexpr std::array<std::string_view, kCovariateCount> kCovariateNames = {
    "impressions", "clicks", "page_views", "sessions", "bounces"};

enum Covariate : std::size_t { kImpressions = 0, kClicks, kPageViews, kSessions, kBounces };

/// One publisher's contiguous daily history.
struct PublisherSeries {
  std::string id;
  std::string country;
  std::string category;
  Date start{};
  std::vector<double> revenue;
  std::array<std::vector<double>, kCovariateCount> covariates;

  std::size_t length() const { return revenue.size(); }
  Date date_at(std::size_t t) const { return start + std::chrono::days(static_cast<long>(t)); }
  Date end() const { return date_at(length()); }  // exclusive
};

struct SeriesPanel {
  std::vector<PublisherSeries> publishers;

  std::size_t size() const { return publishers.size(); }
  const PublisherSeries& find(std::string_view id) const;
};

SeriesPanel read_csv(std::istream& in);
SeriesPanel ingest_csv(const std::filesystem::path& path);

/// Rows grouped by publisher in panel order, dates ascending.
void write_csv(std::ostream& out, const SeriesPanel& panel);
void export_csv(const std::filesystem::path& path, const SeriesPanel& panel);

std::size_t longest_zero_run(const std::vector<double>& values);

/// Keeps publishers whose longest zero-revenue run is at most `max_zero_run`
/// and whose mean daily revenue strictly exceeds `min_avg_revenue`.
SeriesPanel filter_publishers(const SeriesPanel& panel, std::size_t max_zero_run = 10,
                              double min_avg_revenue = 5.0);

}  // namespace adrev::data
