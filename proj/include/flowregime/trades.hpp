#pragma once

#include <cstdint>
#include <istream>
#include <vector>

#include "flowregime/errors.hpp"

namespace flowregime {

// One execution, sign taken from the trade initiator's side.
struct TradeRecord {
  double time = 0.0;        // seconds since midnight
  std::int64_t size = 0;    // shares
  double price = 0.0;       // currency units
  int initiator_sign = 0;   // +1 buyer initiated, -1 seller initiated
};

struct MessageConfig {
  // LOBSTER prices are integers in units of 1e-4 currency.
  double price_scale = 1e-4;
  // The direction column labels the standing limit order; the initiator is
  // its counterparty, hence the sign flip. Configurable for other feeds.
  bool flip_direction = true;
};

// Message stream -> executions. Columns: time, event type, order id, size,
// price, direction. Event types 4 (visible execution) and 5 (hidden
// execution) are kept; every other type is skipped.
std::vector<TradeRecord> parse_messages(std::istream& stream, const MessageConfig& config = {});

// Aggregated series consumed by the detectors. day_starts marks the first
// interval of each input day (0-based), so downstream price lookups can
// honor overnight boundaries.
struct FlowSeries {
  std::vector<double> x;     // signed volume per interval
  std::vector<double> logp;  // log-price of the last execution per interval
  std::vector<std::size_t> day_starts{0};

  std::size_t size() const { return x.size(); }

  bool is_day_start(std::size_t i) const {
    for (std::size_t d : day_starts)
      if (d == i) return true;
    return false;
  }

  // 0-based index of the price preceding interval i, or -1 when none exists
  // (start of series, or start of day unless carrying overnight).
  std::ptrdiff_t prev_price_index(std::size_t i, bool carry_overnight) const {
    if (i == 0) return -1;
    if (!carry_overnight && is_day_start(i)) return -1;
    return static_cast<std::ptrdiff_t>(i) - 1;
  }
};

// x_t sums N consecutive signed volumes; the log-price is the last execution
// of the block; a trailing partial block is discarded.
FlowSeries aggregate(const std::vector<TradeRecord>& trades, std::int64_t n_per_interval);

// Per-day aggregation, concatenated with day boundaries recorded.
FlowSeries aggregate_days(const std::vector<std::vector<TradeRecord>>& days,
                          std::int64_t n_per_interval);

}  // namespace flowregime
