#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace aevt {

struct PriceRecord {
  std::string label;
  int year = 0;
  int month = 0;
  int day = 0;
  double price = 0.0;
  std::string unit;
};

struct PriceData {
  std::vector<PriceRecord> records;
  std::vector<double> prices() const;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& file, int line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message) {}
};

// CSV with header and columns label, date (ISO yyyy-mm-dd), price[, unit].
// Fewer than 3 data rows, non-numeric prices, or malformed dates raise
// ParseError with the offending line number.
PriceData parse_prices_csv(const std::filesystem::path& path);

// year -> annual inflation rate (fraction, e.g. 0.0288)
using InflationTable = std::map<int, double>;
InflationTable parse_rates_csv(const std::filesystem::path& path);

// price * prod_{t in [year, base)} (1 + rate_t); deflates symmetrically when
// year > base.  A year missing from the table raises std::invalid_argument
// naming the gap.
double adjust_price(double price, int year, int base_year, const InflationTable& rates);
std::vector<double> adjust_inflation(const PriceData& data, int base_year,
                                     const InflationTable& rates);

}  // namespace aevt
