// Copyright 2026 The mdvrp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "mdvrp/instance.h"

namespace mdvrp {

namespace {

constexpr std::string_view kMagic = "MDVRP-INSTANCE 1";

struct Field {
  std::string value;
  int line = 0;
};

std::vector<std::string> SplitWords(const std::string& line) {
  std::vector<std::string> words;
  std::istringstream stream(line);
  std::string word;
  while (stream >> word) words.push_back(word);
  return words;
}

double ParseNumber(const std::string& text, int line, const std::string& field) {
  try {
    return ParseDouble(text);
  } catch (const std::invalid_argument&) {
    throw ParseError(line, field, "not a number: '" + text + "'");
  }
}

bool ParseBool(const std::string& text, int line, const std::string& field) {
  if (text == "0") return false;
  if (text == "1") return true;
  throw ParseError(line, field, "expected 0 or 1, got '" + text + "'");
}

}  // namespace

ParseError::ParseError(int line, std::string field, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + what),
      line_(line),
      field_(std::move(field)) {}

std::string FormatDouble(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("FormatDouble: conversion failed");
  return std::string(buffer, end);
}

double ParseDouble(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

void WriteInstance(const Instance& inst, std::ostream& out) {
  const VariantFlags& f = inst.flags;
  out << kMagic << '\n';
  out << "[HEADER]\n";
  out << "variant " << f.Name() << '\n';
  out << "customers " << inst.num_customers() << '\n';
  out << "depots " << inst.num_depots() << '\n';
  out << "capacity " << FormatDouble(inst.capacity) << '\n';
  out << "seed " << inst.seed << '\n';
  if (f.limit) out << "route_limit " << FormatDouble(inst.route_limit) << '\n';
  if (f.time_window) out << "depot_close " << FormatDouble(inst.depot_close) << '\n';
  out << "[FLAGS]\n";
  out << "open " << int{f.open} << '\n';
  out << "backhaul " << int{f.backhaul} << '\n';
  out << "backhaul_mode " << ToString(f.backhaul_mode) << '\n';
  out << "limit " << int{f.limit} << '\n';
  out << "time_window " << int{f.time_window} << '\n';
  out << "inter_depot " << int{f.inter_depot} << '\n';
  out << "[DEPOTS]\n";
  for (const Point& p : inst.depots) out << FormatDouble(p.x) << ' ' << FormatDouble(p.y) << '\n';
  out << "[CUSTOMERS]\n";
  for (int i = 0; i < inst.num_customers(); ++i) {
    const Point& p = inst.customers[i];
    out << FormatDouble(p.x) << ' ' << FormatDouble(p.y) << ' ' << FormatDouble(inst.demand[i]);
    if (f.time_window) {
      out << ' ' << FormatDouble(inst.tw_early[i]) << ' ' << FormatDouble(inst.tw_late[i]) << ' '
          << FormatDouble(inst.service_time[i]);
    }
    out << '\n';
  }
}

std::string WriteInstanceToString(const Instance& instance) {
  std::ostringstream out;
  WriteInstance(instance, out);
  return out.str();
}

Instance ReadInstance(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::string section;
  std::map<std::string, Field> header;
  std::map<std::string, Field> flags;
  std::vector<std::pair<int, std::vector<std::string>>> depot_rows;
  std::vector<std::pair<int, std::vector<std::string>>> customer_rows;
  bool saw_magic = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_magic) {
      if (line != kMagic) throw ParseError(line_no, "magic", "expected '" + std::string(kMagic) + "'");
      saw_magic = true;
      continue;
    }
    if (line.front() == '[') {
      if (line != "[HEADER]" && line != "[FLAGS]" && line != "[DEPOTS]" && line != "[CUSTOMERS]") {
        throw ParseError(line_no, "section", "unknown section " + line);
      }
      section = line;
      continue;
    }
    std::vector<std::string> words = SplitWords(line);
    if (words.empty()) continue;
    if (section == "[HEADER]" || section == "[FLAGS]") {
      if (words.size() != 2) throw ParseError(line_no, words[0], "expected 'key value'");
      auto& target = section == "[HEADER]" ? header : flags;
      if (target.count(words[0])) throw ParseError(line_no, words[0], "duplicate key");
      target[words[0]] = Field{words[1], line_no};
    } else if (section == "[DEPOTS]") {
      depot_rows.emplace_back(line_no, std::move(words));
    } else if (section == "[CUSTOMERS]") {
      customer_rows.emplace_back(line_no, std::move(words));
    } else {
      throw ParseError(line_no, "section", "data before any section");
    }
  }
  if (!saw_magic) throw ParseError(line_no, "magic", "empty input");

  auto require = [&](std::map<std::string, Field>& map, const std::string& key) -> Field& {
    auto it = map.find(key);
    if (it == map.end()) throw ParseError(line_no, key, "missing required field");
    return it->second;
  };

  static const std::vector<std::string> kHeaderKeys = {"variant", "customers", "depots", "capacity",
                                                       "seed", "route_limit", "depot_close"};
  static const std::vector<std::string> kFlagKeys = {"open", "backhaul", "backhaul_mode",
                                                     "limit", "time_window", "inter_depot"};
  for (const auto& [key, field] : header) {
    if (std::find(kHeaderKeys.begin(), kHeaderKeys.end(), key) == kHeaderKeys.end()) {
      throw ParseError(field.line, key, "unknown header key");
    }
  }
  for (const auto& [key, field] : flags) {
    if (std::find(kFlagKeys.begin(), kFlagKeys.end(), key) == kFlagKeys.end()) {
      throw ParseError(field.line, key, "unknown flag key");
    }
  }

  Instance inst;
  VariantFlags& f = inst.flags;
  {
    Field& fl = require(flags, "open");
    f.open = ParseBool(fl.value, fl.line, "open");
  }
  {
    Field& fl = require(flags, "backhaul");
    f.backhaul = ParseBool(fl.value, fl.line, "backhaul");
  }
  {
    Field& fl = require(flags, "backhaul_mode");
    try {
      f.backhaul_mode = ParseBackhaulMode(fl.value);
    } catch (const std::invalid_argument& e) {
      throw ParseError(fl.line, "backhaul_mode", e.what());
    }
  }
  {
    Field& fl = require(flags, "limit");
    f.limit = ParseBool(fl.value, fl.line, "limit");
  }
  {
    Field& fl = require(flags, "time_window");
    f.time_window = ParseBool(fl.value, fl.line, "time_window");
  }
  {
    Field& fl = require(flags, "inter_depot");
    f.inter_depot = ParseBool(fl.value, fl.line, "inter_depot");
  }
  if (!f.Valid()) throw ParseError(line_no, "inter_depot", "open and inter_depot are mutually exclusive");
  if (auto it = header.find("variant"); it != header.end() && it->second.value != f.Name()) {
    throw ParseError(it->second.line, "variant", "token disagrees with [FLAGS]: " + it->second.value);
  }

  auto parse_count = [&](const std::string& key) {
    Field& fl = require(header, key);
    int value = 0;
    auto [ptr, ec] = std::from_chars(fl.value.data(), fl.value.data() + fl.value.size(), value);
    if (ec != std::errc() || ptr != fl.value.data() + fl.value.size() || value < 1) {
      throw ParseError(fl.line, key, "expected a positive integer");
    }
    return value;
  };
  const int n = parse_count("customers");
  const int m = parse_count("depots");
  {
    Field& fl = require(header, "capacity");
    inst.capacity = ParseNumber(fl.value, fl.line, "capacity");
  }
  {
    Field& fl = require(header, "seed");
    auto [ptr, ec] = std::from_chars(fl.value.data(), fl.value.data() + fl.value.size(), inst.seed);
    if (ec != std::errc() || ptr != fl.value.data() + fl.value.size()) {
      throw ParseError(fl.line, "seed", "expected an unsigned 64-bit integer");
    }
  }
  if (f.limit) {
    Field& fl = require(header, "route_limit");
    inst.route_limit = ParseNumber(fl.value, fl.line, "route_limit");
  } else if (header.count("route_limit")) {
    throw ParseError(header["route_limit"].line, "route_limit", "present without limit flag");
  }
  if (f.time_window) {
    Field& fl = require(header, "depot_close");
    inst.depot_close = ParseNumber(fl.value, fl.line, "depot_close");
  } else if (header.count("depot_close")) {
    throw ParseError(header["depot_close"].line, "depot_close", "present without time_window flag");
  }

  if (static_cast<int>(depot_rows.size()) != m) {
    throw ParseError(line_no, "depots", "expected " + std::to_string(m) + " depot rows, found " +
                                            std::to_string(depot_rows.size()));
  }
  for (const auto& [row_line, words] : depot_rows) {
    if (words.size() != 2) throw ParseError(row_line, "depot", "expected 'x y'");
    inst.depots.push_back({ParseNumber(words[0], row_line, "depot.x"),
                           ParseNumber(words[1], row_line, "depot.y")});
  }
  if (static_cast<int>(customer_rows.size()) != n) {
    throw ParseError(line_no, "customers", "expected " + std::to_string(n) + " customer rows, found " +
                                               std::to_string(customer_rows.size()));
  }
  const std::size_t columns = f.time_window ? 6 : 3;
  for (const auto& [row_line, words] : customer_rows) {
    if (words.size() != columns) {
      throw ParseError(row_line, "customer", "expected " + std::to_string(columns) + " columns");
    }
    inst.customers.push_back({ParseNumber(words[0], row_line, "customer.x"),
                              ParseNumber(words[1], row_line, "customer.y")});
    inst.demand.push_back(ParseNumber(words[2], row_line, "customer.demand"));
    if (f.time_window) {
      inst.tw_early.push_back(ParseNumber(words[3], row_line, "customer.tw_early"));
      inst.tw_late.push_back(ParseNumber(words[4], row_line, "customer.tw_late"));
      inst.service_time.push_back(ParseNumber(words[5], row_line, "customer.service_time"));
    }
  }
  return inst;
}

Instance ReadInstanceFromString(const std::string& text) {
  std::istringstream in(text);
  return ReadInstance(in);
}

Instance ReadInstanceFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  return ReadInstance(in);
}

void WriteInstanceFile(const Instance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  WriteInstance(instance, out);
}

}  // namespace mdvrp
