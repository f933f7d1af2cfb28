#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adrev/data/panel.hpp"

namespace adrev::data {

struct Scaler {
  double mean = 0.0;
  double std = 1.0;
};

struct PublisherScaler {
  Scaler target;
  std::array<Scaler, kCovariateCount> covariates;
};

/// Per-publisher statistics of log1p values over the training range.
struct ScalerMap {
  std::map<std::string, PublisherScaler, std::less<>> by_publisher;

  const PublisherScaler& at(std::string_view publisher) const;
  bool contains(std::string_view publisher) const { return by_publisher.find(publisher) != by_publisher.end(); }
};

/// A publisher's series on the normalized scale. `unknown` holds the scaled
/// covariates in kCovariateNames order, followed by any derived columns.
struct NormalizedSeries {
  std::string id;
  std::string country;
  std::string category;
  Date start{};
  std::vector<double> target;
  std::vector<double> revenue;  // original currency values
  std::vector<std::vector<double>> unknown;
  std::array<int, 3> statics{};  // vocabulary codes for id, country, category

  std::size_t length() const { return target.size(); }
  Date date_at(std::size_t t) const { return start + std::chrono::days(static_cast<long>(t)); }
};

struct NormalizedPanel {
  std::vector<NormalizedSeries> series;
  std::vector<std::string> unknown_names;
};

struct FitResult {
  NormalizedPanel panel;
  ScalerMap scalers;
};

/// log1p then standardize each publisher with statistics from dates before
/// `train_end`. Publishers with zero revenue variance there are dropped.
FitResult fit_transform(const SeriesPanel& panel, Date train_end);

/// Applies existing scalers; publishers without one raise LookupError.
NormalizedPanel apply_transform(const SeriesPanel& panel, const ScalerMap& scalers);

double inverse_transform(double z, const Scaler& scaler);
double inverse_transform(double z, const ScalerMap& scalers, std::string_view publisher);

/// Appends `category_mean_revenue`: the mean normalized revenue of the
/// publisher's category on each date.
void add_category_mean(NormalizedPanel& panel, bool exclude_self = false);

struct CalendarRow {
  int day_of_week = 0;
  double day_of_year = 0.0;
};

std::vector<CalendarRow> calendar_features(const std::vector<Date>& dates);
CalendarRow calendar_row(Date date);

/// Sorted distinct values for each static field.
struct Vocabulary {
  std::vector<std::string> publishers;
  std::vector<std::string> countries;
  std::vector<std::string> categories;

  static Vocabulary build(const SeriesPanel& panel);
  std::array<int, 3> encode(std::string_view id, std::string_view country, std::string_view category) const;
  std::array<int, 3> cardinalities() const;
};

void assign_static_codes(NormalizedPanel& panel, const Vocabulary& vocab);

}  // namespace adrev::data
