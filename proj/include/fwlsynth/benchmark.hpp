#pragma once

// Line-oriented `key = value` benchmark files with `#` comments.
//
//   name              = cruise-control
//   domain            = z              # or s
//   num               = 0.0264         # descending powers, spaces or commas
//   den               = 1 -0.9998
//   sample_time       = 0.2            # required for domain = s
//   delta             = 0 0 0          # per z-domain coefficient, num then den
//   controller_format = 4,16
//   controller_orders = 2,2
//   plant_format      = 16,24
//   controller_num    = ...            # optional, used by verify
//   controller_den    = ...
//
// Numbers are decimals parsed exactly. s-domain plants are ZOH-discretized
// on load; `delta` then refers to the discretized coefficients.

#include "fwlsynth/discretize.hpp"
#include "fwlsynth/family.hpp"
#include "fwlsynth/fixed_point.hpp"
#include "fwlsynth/rational.hpp"
#include "fwlsynth/transfer.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace fwlsynth {

class FileParseError : public ParseError {
public:
  FileParseError(const std::string& source, int line, int column, const std::string& what)
      : ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

enum class PlantDomain { S, Z };

struct BenchmarkSpec {
  std::string name;
  PlantDomain domain = PlantDomain::Z;
  /// Plant as written in the file (s or z).
  Poly<Rational> source_num{Rational{0}};
  Poly<Rational> source_den{Rational{1}};
  std::optional<Rational> sample_time;
  /// z-domain plant after discretization.
  TransferFunction plant{Poly<Rational>{Rational{0}}, Poly<Rational>{Rational{1}}};
  std::vector<Rational> delta;
  FixedPointFormat controller_format{4, 16};
  ControllerOrders orders{2, 2};
  FixedPointFormat plant_format{16, 24};
  std::optional<std::vector<Rational>> controller_num;
  std::optional<std::vector<Rational>> controller_den;
  std::vector<std::string> warnings;

  PlantFamily family() const { return PlantFamily(plant, delta, plant_format); }
  bool has_controller() const { return controller_num.has_value() && controller_den.has_value(); }
  Controller controller(Rounding mode) const {
    if (!has_controller()) throw ValidationError("benchmark has no controller_num/controller_den");
    return Controller::quantized(*controller_num, *controller_den, controller_format, mode);
  }
};

namespace detail {

struct Entry {
  std::string value;
  int line = 0;
  int value_column = 0;
};

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class Reader {
public:
  Reader(std::string source, std::map<std::string, Entry> entries)
      : source_(std::move(source)), entries_(std::move(entries)) {}

  const Entry* find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  [[noreturn]] void fail(const Entry& e, int offset, const std::string& what) const {
    throw FileParseError(source_, e.line, e.value_column + offset, what);
  }

  std::vector<Rational> decimals(const std::string& key) const {
    const Entry* e = find(key);
    std::vector<Rational> out;
    const std::string& v = e->value;
    std::size_t i = 0;
    while (i < v.size()) {
      if (v[i] == ' ' || v[i] == '\t' || v[i] == ',') {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < v.size() && v[j] != ' ' && v[j] != '\t' && v[j] != ',') ++j;
      try {
        out.push_back(parse_decimal(std::string_view(v).substr(i, j - i)));
      } catch (const ParseError& err) {
        fail(*e, static_cast<int>(i), err.what());
      }
      i = j;
    }
    if (out.empty()) fail(*e, 0, key + " needs at least one number");
    return out;
  }

  std::pair<int, int> pair(const std::string& key) const {
    const Entry* e = find(key);
    const auto comma = e->value.find(',');
    if (comma == std::string::npos) fail(*e, 0, key + " must be two integers 'a,b'");
    const auto to_int = [&](std::string_view text, int offset) {
      text = trim(text);
      int v = 0;
      std::size_t used = 0;
      try {
        v = std::stoi(std::string(text), &used);
      } catch (const std::exception&) {
        fail(*e, offset, "expected an integer in " + key);
      }
      if (used != text.size()) fail(*e, offset, "expected an integer in " + key);
      return v;
    };
    const std::string_view v = e->value;
    return {to_int(v.substr(0, comma), 0), to_int(v.substr(comma + 1), static_cast<int>(comma) + 1)};
  }

  FixedPointFormat format(const std::string& key) const {
    const auto [i, f] = pair(key);
    try {
      return FixedPointFormat{i, f};
    } catch (const std::exception& err) {
      throw ValidationError(key + ": " + err.what());
    }
  }

private:
  std::string source_;
  std::map<std::string, Entry> entries_;
};

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{"name",          "domain",       "num",
                                             "den",           "sample_time",  "delta",
                                             "controller_format", "controller_orders", "plant_format",
                                             "controller_num", "controller_den"};
  return keys;
}

}  // namespace detail

inline BenchmarkSpec parse_benchmark(std::istream& in, const std::string& source = "<input>") {
  std::map<std::string, detail::Entry> entries;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = std::string_view(raw).substr(0, raw.find('#'));
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    const auto key_start = line.find_first_not_of(" \t");
    if (eq == std::string_view::npos) {
      throw FileParseError(source, line_no, static_cast<int>(key_start) + 1, "expected 'key = value'");
    }
    const std::string key{detail::trim(line.substr(0, eq))};
    if (key.empty()) throw FileParseError(source, line_no, static_cast<int>(eq) + 1, "missing key before '='");
    const auto& known = detail::known_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw FileParseError(source, line_no, static_cast<int>(key_start) + 1, "unknown key '" + key + "'");
    }
    if (entries.count(key)) {
      throw FileParseError(source, line_no, static_cast<int>(key_start) + 1, "duplicate key '" + key + "'");
    }
    const std::string_view rest = line.substr(eq + 1);
    const std::string_view value = detail::trim(rest);
    const auto value_start = value.empty() ? 0 : rest.find(value.front());
    const int column = static_cast<int>(eq + 1 + value_start) + 1;
    if (value.empty()) throw FileParseError(source, line_no, column, "empty value for '" + key + "'");
    entries[key] = detail::Entry{std::string(value), line_no, column};
  }

  const detail::Reader r(source, entries);
  BenchmarkSpec spec;
  for (const char* required : {"num", "den"}) {
    if (!r.find(required)) throw ValidationError(std::string("missing required key '") + required + "'");
  }
  if (const auto* e = r.find("name")) spec.name = e->value;
  if (const auto* e = r.find("domain")) {
    if (e->value == "s") spec.domain = PlantDomain::S;
    else if (e->value == "z") spec.domain = PlantDomain::Z;
    else r.fail(*e, 0, "domain must be 's' or 'z'");
  }
  spec.source_num = Poly<Rational>(r.decimals("num"));
  spec.source_den = Poly<Rational>(r.decimals("den"));
  if (r.find("sample_time")) {
    const auto t = r.decimals("sample_time");
    if (t.size() != 1) r.fail(*r.find("sample_time"), 0, "sample_time takes one number");
    spec.sample_time = t.front();
    if (*spec.sample_time <= 0) throw ValidationError("sample_time must be positive");
  }
  if (r.find("controller_format")) spec.controller_format = r.format("controller_format");
  if (r.find("plant_format")) spec.plant_format = r.format("plant_format");
  if (r.find("controller_orders")) {
    const auto [m, n] = r.pair("controller_orders");
    if (m < 0 || n < 0) throw ValidationError("controller orders must be nonnegative");
    if (m > n) throw ValidationError("controller must be proper: numerator order exceeds denominator order");
    spec.orders = {m, n};
  }
  if (r.find("controller_num") || r.find("controller_den")) {
    if (!r.find("controller_num") || !r.find("controller_den")) {
      throw ValidationError("controller_num and controller_den must be given together");
    }
    spec.controller_num = r.decimals("controller_num");
    spec.controller_den = r.decimals("controller_den");
    if (spec.controller_num->size() > spec.controller_den->size()) {
      throw ValidationError("controller must be proper: numerator order exceeds denominator order");
    }
    if (r.find("controller_orders") &&
        (spec.controller_num->size() != static_cast<std::size_t>(spec.orders.numerator) + 1 ||
         spec.controller_den->size() != static_cast<std::size_t>(spec.orders.denominator) + 1)) {
      throw ValidationError("controller coefficient counts do not match controller_orders");
    }
  }

  if (spec.source_den.leading() == 0) throw ValidationError("plant denominator leading coefficient is zero");
  if (spec.domain == PlantDomain::S) {
    if (!spec.sample_time) throw ValidationError("sample_time is required for domain = s");
    try {
      const TransferFunction z = zoh_discretize({spec.source_num, spec.source_den, *spec.sample_time},
                                                &spec.warnings);
      spec.plant = TransferFunction{normalize(z.num()), z.den()};
    } catch (const ImproperTransferFunction& err) {
      throw ValidationError(err.what());
    }
  } else {
    spec.plant = TransferFunction{spec.source_num, spec.source_den};
  }

  const std::size_t count = spec.plant.num().size() + spec.plant.den().size();
  if (r.find("delta")) {
    spec.delta = r.decimals("delta");
  } else {
    spec.delta.assign(count, Rational{0});
  }
  spec.family();  // validates properness, delta length and sign
  return spec;
}

inline BenchmarkSpec parse_benchmark(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_benchmark(in, path);
}

inline BenchmarkSpec parse_benchmark_text(const std::string& text) {
  std::istringstream in(text);
  return parse_benchmark(in);
}

}  // namespace fwlsynth
