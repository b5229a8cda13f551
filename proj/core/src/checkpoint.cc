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

#include "mdvrp/checkpoint.h"

#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

namespace mdvrp {

namespace {

constexpr std::string_view kMagic = "MDVRP-CHECKPOINT 1";

std::vector<std::string> SplitWords(const std::string& line) {
  std::vector<std::string> words;
  std::istringstream stream(line);
  std::string word;
  while (stream >> word) words.push_back(word);
  return words;
}

int ParseInt(const std::string& text, int line, const std::string& field) {
  try {
    std::size_t used = 0;
    const int value = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ParseError(line, field, "not an integer: '" + text + "'");
  }
}

double ParseNumber(const std::string& text, int line, const std::string& field) {
  try {
    return ParseDouble(text);
  } catch (const std::invalid_argument&) {
    throw ParseError(line, field, "not a number: '" + text + "'");
  }
}

PolicyConfig ParseConfig(const std::vector<std::string>& words, int line) {
  if (words.empty() || words[0] != "config" || words.size() % 2 != 1) {
    throw ParseError(line, "config", "expected 'config' followed by key/value pairs");
  }
  PolicyConfig cfg;
  std::vector<std::string> seen;
  for (std::size_t i = 1; i < words.size(); i += 2) {
    const std::string& key = words[i];
    const std::string& value = words[i + 1];
    for (const std::string& s : seen) {
      if (s == key) throw ParseError(line, key, "duplicate key");
    }
    seen.push_back(key);
    if (key == "dim") {
      cfg.dim = ParseInt(value, line, key);
    } else if (key == "heads") {
      cfg.heads = ParseInt(value, line, key);
    } else if (key == "layers") {
      cfg.layers = ParseInt(value, line, key);
    } else if (key == "ff_hidden") {
      cfg.ff_hidden = ParseInt(value, line, key);
    } else if (key == "clip") {
      cfg.clip = ParseNumber(value, line, key);
    } else if (key == "film") {
      cfg.film = ParseInt(value, line, key) != 0;
    } else if (key == "normalize_context") {
      cfg.normalize_context = ParseInt(value, line, key) != 0;
    } else {
      throw ParseError(line, key, "unknown config key");
    }
  }
  if (seen.size() != 7) throw ParseError(line, "config", "missing config keys");
  try {
    cfg.Validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, "config", e.what());
  }
  return cfg;
}

}  // namespace

std::string DescribeConfig(const PolicyConfig& c) {
  std::ostringstream out;
  out << "dim " << c.dim << " heads " << c.heads << " layers " << c.layers << " ff_hidden " << c.ff_hidden
      << " clip " << FormatDouble(c.clip) << " film " << int{c.film} << " normalize_context "
      << int{c.normalize_context};
  return out.str();
}

void WriteCheckpoint(const PolicyParams& params, std::ostream& out) {
  out << kMagic << '\n';
  out << "config " << DescribeConfig(params.config()) << '\n';
  for (std::size_t i = 0; i < params.size(); ++i) {
    const ad::Matrix& t = params.tensor(i);
    out << "tensor " << params.name(i) << ' ' << t.rows() << ' ' << t.cols() << '\n';
    for (int r = 0; r < t.rows(); ++r) {
      for (int c = 0; c < t.cols(); ++c) {
        if (c > 0) out << ' ';
        out << FormatDouble(t(r, c));
      }
      out << '\n';
    }
  }
  out << "end\n";
}

std::string WriteCheckpointToString(const PolicyParams& params) {
  std::ostringstream out;
  WriteCheckpoint(params, out);
  return out.str();
}

void WriteCheckpointFile(const PolicyParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  WriteCheckpoint(params, out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

PolicyParams ReadCheckpoint(std::istream& in, const std::optional<PolicyConfig>& expected) {
  std::string line;
  int line_no = 0;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw ParseError(line_no + 1, what, "unexpected end of file");
    ++line_no;
  };
  next("magic");
  if (line != kMagic) throw ParseError(line_no, "magic", "expected '" + std::string(kMagic) + "'");
  next("config");
  const PolicyConfig cfg = ParseConfig(SplitWords(line), line_no);
  if (expected && !(*expected == cfg)) {
    throw ParseError(line_no, "config",
                     "checkpoint has '" + DescribeConfig(cfg) + "' but '" + DescribeConfig(*expected) +
                         "' was requested");
  }
  PolicyParams params(cfg);
  for (std::size_t i = 0; i < params.size(); ++i) {
    next("tensor");
    const std::vector<std::string> head = SplitWords(line);
    if (head.size() != 4 || head[0] != "tensor") {
      throw ParseError(line_no, "tensor", "expected 'tensor <name> <rows> <cols>'");
    }
    if (head[1] != params.name(i)) {
      throw ParseError(line_no, "tensor", "expected tensor '" + params.name(i) + "', found '" + head[1] + "'");
    }
    ad::Matrix& t = params.tensor(i);
    const int rows = ParseInt(head[2], line_no, head[1]);
    const int cols = ParseInt(head[3], line_no, head[1]);
    if (rows != t.rows() || cols != t.cols()) {
      throw ParseError(line_no, head[1],
                       "shape " + head[2] + "x" + head[3] + " does not match " + std::to_string(t.rows()) + "x" +
                           std::to_string(t.cols()));
    }
    for (int r = 0; r < rows; ++r) {
      next(params.name(i).c_str());
      const std::vector<std::string> values = SplitWords(line);
      if (static_cast<int>(values.size()) != cols) {
        throw ParseError(line_no, head[1], "expected " + std::to_string(cols) + " values");
      }
      for (int c = 0; c < cols; ++c) t(r, c) = ParseNumber(values[c], line_no, head[1]);
    }
  }
  next("end");
  if (line != "end") throw ParseError(line_no, "end", "expected 'end' after the last tensor");
  return params;
}

PolicyParams ReadCheckpointFile(const std::string& path, const std::optional<PolicyConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  return ReadCheckpoint(in, expected);
}

}  // namespace mdvrp
