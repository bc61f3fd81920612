#include "flowregime/trades.hpp"

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "flowregime/math_util.hpp"

namespace flowregime {

namespace {

bool parse_double(std::string_view field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [p, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && p == end;
}

bool parse_int(std::string_view field, std::int64_t& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [p, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && p == end;
}

}  // namespace

std::vector<TradeRecord> parse_messages(std::istream& stream, const MessageConfig& config) {
  std::vector<TradeRecord> trades;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::string_view rest(line);
    std::string_view fields[6];
    std::size_t nf = 0;
    while (nf < 6) {
      const std::size_t comma = rest.find(',');
      if (comma == std::string_view::npos) {
        fields[nf++] = rest;
        rest = {};
        break;
      }
      fields[nf++] = rest.substr(0, comma);
      rest = rest.substr(comma + 1);
    }
    if (nf < 6)
      throw ParseError("line " + std::to_string(line_no) + ": expected 6 columns, got " +
                       std::to_string(nf));

    std::int64_t event_type = 0;
    if (!parse_int(fields[1], event_type))
      throw ParseError("line " + std::to_string(line_no) + ": bad event type '" +
                       std::string(fields[1]) + "'");
    if (event_type != 4 && event_type != 5) continue;

    TradeRecord rec;
    std::int64_t direction = 0;
    double raw_price = 0.0;
    if (!parse_double(fields[0], rec.time) || !parse_int(fields[3], rec.size) ||
        !parse_double(fields[4], raw_price) || !parse_int(fields[5], direction))
      throw ParseError("line " + std::to_string(line_no) + ": malformed execution row");
    if (rec.size <= 0)
      throw ParseError("line " + std::to_string(line_no) + ": non-positive size");
    if (direction != 1 && direction != -1)
      throw ParseError("line " + std::to_string(line_no) + ": direction must be +1 or -1");

    rec.price = raw_price * config.price_scale;
    if (!(rec.price > 0.0))
      throw ParseError("line " + std::to_string(line_no) + ": non-positive price");
    rec.initiator_sign = config.flip_direction ? static_cast<int>(-direction)
                                               : static_cast<int>(direction);
    trades.push_back(rec);
  }
  return trades;
}

FlowSeries aggregate(const std::vector<TradeRecord>& trades, std::int64_t n_per_interval) {
  if (n_per_interval <= 0) throw ConfigError("aggregate: N must be positive");
  const std::size_t n = static_cast<std::size_t>(n_per_interval);
  if (trades.size() < n)
    throw ConfigError("aggregate: fewer trades (" + std::to_string(trades.size()) +
                      ") than interval size N=" + std::to_string(n));

  const std::size_t t_count = trades.size() / n;
  FlowSeries series;
  series.x.reserve(t_count);
  series.logp.reserve(t_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    KahanSum sum;
    for (std::size_t j = 0; j < n; ++j) {
      const TradeRecord& tr = trades[t * n + j];
      sum.add(static_cast<double>(tr.initiator_sign) * static_cast<double>(tr.size));
    }
    series.x.push_back(sum.value());
    series.logp.push_back(std::log(trades[t * n + n - 1].price));
  }
  return series;
}

FlowSeries aggregate_days(const std::vector<std::vector<TradeRecord>>& days,
                          std::int64_t n_per_interval) {
  FlowSeries all;
  all.day_starts.clear();
  for (const auto& day : days) {
    FlowSeries one = aggregate(day, n_per_interval);
    all.day_starts.push_back(all.x.size());
    all.x.insert(all.x.end(), one.x.begin(), one.x.end());
    all.logp.insert(all.logp.end(), one.logp.begin(), one.logp.end());
  }
  if (all.day_starts.empty()) all.day_starts.push_back(0);
  return all;
}

}  // namespace flowregime
