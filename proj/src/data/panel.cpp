#include "adrev/data/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "adrev/error.hpp"
#include "adrev/log.hpp"
#include "adrev/text.hpp"

namespace adrev::data {

namespace {

constexpr std::array<std::string_view, 10> kColumns = {"date",    "publisher_id", "country",    "category",
                                                       "revenue", "impressions",  "clicks",     "page_views",
                                                       "sessions", "bounces"};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const auto comma = line.find(',', begin);
    out.push_back(line.substr(begin, comma == std::string_view::npos ? std::string_view::npos : comma - begin));
    if (comma == std::string_view::npos) break;
    begin = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

std::string at_row(std::size_t row) { return "row " + std::to_string(row) + ": "; }

double parse_value(std::string_view text, std::string_view column, std::size_t row) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw DataError(at_row(row) + "unparseable " + std::string(column) + " '" + std::string(text) + "'");
  }
  if (value < 0.0) throw DataError(at_row(row) + "negative " + std::string(column) + " " + std::string(text));
  return value;
}

struct Row {
  Date date;
  std::size_t line;
  double revenue;
  std::array<double, kCovariateCount> covariates;
};

}  // namespace

const PublisherSeries& SeriesPanel::find(std::string_view id) const {
  for (const auto& p : publishers)
    if (p.id == id) return p;
  throw LookupError("unknown publisher '" + std::string(id) + "'");
}

SeriesPanel read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: header row required");
  const auto header = split(trim(line));
  std::array<std::size_t, kColumns.size()> index{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    const auto it = std::find_if(header.begin(), header.end(), [&](auto h) { return trim(h) == kColumns[c]; });
    if (it == header.end()) throw DataError("missing column '" + std::string(kColumns[c]) + "'");
    index[c] = static_cast<std::size_t>(it - header.begin());
  }

  struct Group {
    std::string country;
    std::string category;
    std::vector<Row> rows;
  };
  std::vector<std::string> order;
  std::map<std::string, Group, std::less<>> groups;

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = split(text);
    if (fields.size() != header.size()) {
      throw DataError(at_row(row) + "expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    auto field = [&](std::size_t c) { return trim(fields[index[c]]); };

    Row r{};
    r.line = row;
    try {
      r.date = parse_date(field(0));
    } catch (const DataError& e) {
      throw DataError(at_row(row) + e.what());
    }
    const std::string id(field(1));
    if (id.empty()) throw DataError(at_row(row) + "empty publisher_id");
    r.revenue = parse_value(field(4), kColumns[4], row);
    for (std::size_t j = 0; j < kCovariateCount; ++j) r.covariates[j] = parse_value(field(5 + j), kColumns[5 + j], row);

    auto [it, inserted] = groups.try_emplace(id);
    if (inserted) {
      order.push_back(id);
      it->second.country = std::string(field(2));
      it->second.category = std::string(field(3));
    } else if (it->second.country != field(2) || it->second.category != field(3)) {
      throw DataError(at_row(row) + "publisher '" + id + "' changes country or category");
    }
    it->second.rows.push_back(r);
  }

  SeriesPanel panel;
  for (const auto& id : order) {
    auto& g = groups.find(id)->second;
    std::stable_sort(g.rows.begin(), g.rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    PublisherSeries s;
    s.id = id;
    s.country = g.country;
    s.category = g.category;
    s.start = g.rows.front().date;
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
      const auto& r = g.rows[i];
      if (i > 0) {
        const auto step = (r.date - g.rows[i - 1].date).count();
        if (step == 0) {
          throw DataError(at_row(r.line) + "duplicate row for publisher '" + id + "' on " + format_date(r.date));
        }
        if (step > 1) {
          throw DataError(at_row(r.line) + "non-contiguous dates for publisher '" + id + "': " +
                          format_date(g.rows[i - 1].date) + " is followed by " + format_date(r.date));
        }
      }
      s.revenue.push_back(r.revenue);
      for (std::size_t j = 0; j < kCovariateCount; ++j) s.covariates[j].push_back(r.covariates[j]);
    }
    panel.publishers.push_back(std::move(s));
  }
  return panel;
}

SeriesPanel ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const SeriesPanel& panel) {
  for (std::size_t c = 0; c < kColumns.size(); ++c) out << (c ? "," : "") << kColumns[c];
  out << '\n';
  for (const auto& p : panel.publishers) {
    for (std::size_t t = 0; t < p.length(); ++t) {
      out << format_date(p.date_at(t)) << ',' << p.id << ',' << p.country << ',' << p.category << ','
          << format_double(p.revenue[t]);
      for (const auto& cov : p.covariates) out << ',' << format_double(cov[t]);
      out << '\n';
    }
  }
}

void export_csv(const std::filesystem::path& path, const SeriesPanel& panel) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_csv(out, panel);
}

std::size_t longest_zero_run(const std::vector<double>& values) {
  std::size_t best = 0;
  std::size_t run = 0;
  for (double v : values) {
    run = v == 0.0 ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

SeriesPanel filter_publishers(const SeriesPanel& panel, std::size_t max_zero_run, double min_avg_revenue) {
  SeriesPanel out;
  for (const auto& p : panel.publishers) {
    if (p.revenue.empty()) continue;
    const double avg = std::accumulate(p.revenue.begin(), p.revenue.end(), 0.0) / static_cast<double>(p.length());
    if (longest_zero_run(p.revenue) <= max_zero_run && avg > min_avg_revenue) out.publishers.push_back(p);
  }
  if (out.publishers.empty() && !panel.publishers.empty()) warn("publisher filter removed every series");
  return out;
}

}  // namespace adrev::data
