#include "auctionevt/data.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace aevt {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\"");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\"");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  const auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

bool parse_iso_date(const std::string& s, int& y, int& m, int& d) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  auto num = [](const std::string& t, int pos, int len, int& v) {
    v = 0;
    for (int i = pos; i < pos + len; ++i) {
      if (t[static_cast<std::size_t>(i)] < '0' || t[static_cast<std::size_t>(i)] > '9')
        return false;
      v = v * 10 + (t[static_cast<std::size_t>(i)] - '0');
    }
    return true;
  };
  if (!num(s, 0, 4, y) || !num(s, 5, 2, m) || !num(s, 8, 2, d)) return false;
  return m >= 1 && m <= 12 && d >= 1 && d <= 31;
}

}  // namespace

std::vector<double> PriceData::prices() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.price);
  return out;
}

PriceData parse_prices_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  const std::string fname = path.string();
  if (!is) throw std::runtime_error("cannot open input file: " + fname);
  PriceData data;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;  // first non-empty line is the header
      continue;
    }
    const std::vector<std::string> f = split_csv(line);
    if (f.size() < 3)
      throw ParseError(fname, lineno, "expected columns label,date,price[,unit]");
    PriceRecord rec;
    rec.label = f[0];
    if (!parse_iso_date(f[1], rec.year, rec.month, rec.day))
      throw ParseError(fname, lineno, "malformed date '" + f[1] + "' (want yyyy-mm-dd)");
    if (!parse_double(f[2], rec.price))
      throw ParseError(fname, lineno, "non-numeric price '" + f[2] + "'");
    if (f.size() > 3) rec.unit = f[3];
    data.records.push_back(std::move(rec));
  }
  if (!header_seen) throw ParseError(fname, lineno == 0 ? 1 : lineno, "empty input file");
  if (data.records.empty()) throw ParseError(fname, lineno, "no data rows after the header");
  if (data.records.size() < 3)
    throw ParseError(fname, lineno,
                     "need at least 3 auctions, got " + std::to_string(data.records.size()));
  return data;
}

InflationTable parse_rates_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  const std::string fname = path.string();
  if (!is) throw std::runtime_error("cannot open rates file: " + fname);
  InflationTable table;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const std::vector<std::string> f = split_csv(line);
    if (f.size() < 2) throw ParseError(fname, lineno, "expected columns year,rate");
    double yr = 0, rate = 0;
    if (!parse_double(f[0], yr) || yr != static_cast<int>(yr))
      throw ParseError(fname, lineno, "bad year '" + f[0] + "'");
    if (!parse_double(f[1], rate)) throw ParseError(fname, lineno, "bad rate '" + f[1] + "'");
    table[static_cast<int>(yr)] = rate;
  }
  return table;
}

double adjust_price(double price, int year, int base_year, const InflationTable& rates) {
  auto rate_for = [&](int y) {
    const auto it = rates.find(y);
    if (it == rates.end())
      throw std::invalid_argument("inflation table is missing year " + std::to_string(y));
    return it->second;
  };
  double out = price;
  for (int y = year; y < base_year; ++y) out *= 1.0 + rate_for(y);
  for (int y = base_year; y < year; ++y) out /= 1.0 + rate_for(y);
  return out;
}

std::vector<double> adjust_inflation(const PriceData& data, int base_year,
                                     const InflationTable& rates) {
  std::vector<double> out;
  out.reserve(data.records.size());
  for (const auto& r : data.records)
    out.push_back(adjust_price(r.price, r.year, base_year, rates));
  return out;
}

}  // namespace aevt
