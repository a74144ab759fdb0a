// Copyright 2026 The fpgatris Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line-based instance and schedule documents.
//
//   fpgatris 1
//   N <width> M <module-count>
//   module <i> <ell_i> <r_1> ... <r_ell>
//
//   schedule 1
//   module <i> base <s> starts <t_1> ... <t_ell>
//
// Blank lines are ignored. Module lines may appear in any order but every
// index 1..M must appear exactly once.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpgatris/core.hpp"

namespace fpgatris {

class FormatError : public std::runtime_error {
 public:
  FormatError(int line, const std::string& reason)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + reason
                                    : reason),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

struct Line {
  int number;
  std::vector<std::string_view> tokens;
};

inline std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) ++i;
      std::size_t j = i;
      while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' && raw[j] != '\r') ++j;
      if (j > i) line.tokens.push_back(raw.substr(i, j - i));
      i = j;
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

inline std::int64_t to_int(std::string_view tok, int line) {
  std::int64_t v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw FormatError(line, "expected an integer, got '" + std::string(tok) + "'");
  }
  return v;
}

inline int to_int32(std::string_view tok, int line) {
  const std::int64_t v = to_int(tok, line);
  if (v < -(std::int64_t{1} << 30) || v > (std::int64_t{1} << 30)) {
    throw FormatError(line, "integer out of range: " + std::string(tok));
  }
  return static_cast<int>(v);
}

inline void expect(const Line& line, std::size_t idx, std::string_view word) {
  if (idx >= line.tokens.size() || line.tokens[idx] != word) {
    throw FormatError(line.number, "expected '" + std::string(word) + "'");
  }
}

inline void expect_version(const std::vector<Line>& lines, std::string_view magic) {
  if (lines.empty()) throw FormatError(0, "empty document");
  const Line& head = lines.front();
  if (head.tokens.size() != 2 || head.tokens[0] != magic) {
    throw FormatError(head.number, "expected header '" + std::string(magic) + " 1'");
  }
  if (head.tokens[1] != "1") {
    throw FormatError(head.number,
                      "unsupported version " + std::string(head.tokens[1]));
  }
}

}  // namespace detail

inline Instance parse_instance(std::string_view text) {
  using detail::Line;
  const std::vector<Line> lines = detail::tokenize(text);
  detail::expect_version(lines, "fpgatris");
  if (lines.size() < 2) throw FormatError(0, "missing 'N <width> M <count>' line");
  const Line& dims = lines[1];
  if (dims.tokens.size() != 4) {
    throw FormatError(dims.number, "expected 'N <width> M <module-count>'");
  }
  detail::expect(dims, 0, "N");
  detail::expect(dims, 2, "M");
  const int width = detail::to_int32(dims.tokens[1], dims.number);
  const int count = detail::to_int32(dims.tokens[3], dims.number);
  if (width < 1) throw FormatError(dims.number, "width must be >= 1");
  if (count < 0) throw FormatError(dims.number, "module count must be >= 0");
  if (static_cast<int>(lines.size()) - 2 != count) {
    throw FormatError(dims.number, "declared " + std::to_string(count) +
                                       " modules, found " +
                                       std::to_string(lines.size() - 2));
  }

  std::vector<ModuleSpec> modules(static_cast<std::size_t>(count));
  std::vector<bool> seen(static_cast<std::size_t>(count), false);
  for (std::size_t k = 2; k < lines.size(); ++k) {
    const Line& line = lines[k];
    detail::expect(line, 0, "module");
    if (line.tokens.size() < 3) throw FormatError(line.number, "truncated module line");
    const int index = detail::to_int32(line.tokens[1], line.number);
    const int ell = detail::to_int32(line.tokens[2], line.number);
    if (index < 1 || index > count) {
      throw FormatError(line.number, "module index out of range");
    }
    if (seen[static_cast<std::size_t>(index - 1)]) {
      throw FormatError(line.number, "duplicate module " + std::to_string(index));
    }
    seen[static_cast<std::size_t>(index - 1)] = true;
    if (ell < 1) throw FormatError(line.number, "module needs at least one request");
    if (static_cast<int>(line.tokens.size()) - 3 != ell) {
      throw FormatError(line.number, "declared " + std::to_string(ell) +
                                         " requests, found " +
                                         std::to_string(line.tokens.size() - 3));
    }
    ModuleSpec& m = modules[static_cast<std::size_t>(index - 1)];
    for (int j = 0; j < ell; ++j) {
      const int size = detail::to_int32(line.tokens[static_cast<std::size_t>(3 + j)],
                                        line.number);
      if (size == 0) throw FormatError(line.number, "request size must be nonzero");
      if (std::abs(size) > width) {
        throw FormatError(line.number, "request wider than the strip");
      }
      m.requests.emplace_back(size);
    }
    if (m.base_range(width).empty()) {
      throw FormatError(line.number, "module has no base slot within bounds");
    }
  }
  return Instance(width, std::move(modules));
}

inline std::string write_instance(const Instance& instance) {
  std::ostringstream out;
  out << "fpgatris 1\n";
  out << "N " << instance.width() << " M " << instance.module_count() << "\n";
  for (int i = 0; i < instance.module_count(); ++i) {
    const ModuleSpec& m = instance.module(i);
    out << "module " << (i + 1) << ' ' << m.length();
    for (const Request& r : m.requests) out << ' ' << r.size();
    out << "\n";
  }
  return out.str();
}

// Parses a schedule without an instance: module indices must cover 1..k
// exactly once, start counts are unchecked.
inline Schedule parse_schedule(std::string_view text) {
  using detail::Line;
  const std::vector<Line> lines = detail::tokenize(text);
  detail::expect_version(lines, "schedule");
  const std::size_t count = lines.size() - 1;
  Schedule schedule;
  schedule.placements.resize(count);
  std::vector<bool> seen(count, false);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& line = lines[k];
    detail::expect(line, 0, "module");
    detail::expect(line, 2, "base");
    detail::expect(line, 4, "starts");
    const int index = detail::to_int32(line.tokens[1], line.number);
    if (index < 1 || static_cast<std::size_t>(index) > count) {
      throw FormatError(line.number, "module index out of range");
    }
    if (seen[static_cast<std::size_t>(index - 1)]) {
      throw FormatError(line.number, "duplicate module " + std::to_string(index));
    }
    seen[static_cast<std::size_t>(index - 1)] = true;
    if (line.tokens.size() < 6) throw FormatError(line.number, "no start times");
    Placement& p = schedule.placements[static_cast<std::size_t>(index - 1)];
    p.base_slot = detail::to_int32(line.tokens[3], line.number);
    for (std::size_t t = 5; t < line.tokens.size(); ++t) {
      p.start_times.push_back(detail::to_int32(line.tokens[t], line.number));
    }
  }
  return schedule;
}

// Parses a schedule and checks its shape against `instance`.
inline Schedule parse_schedule(std::string_view text, const Instance& instance) {
  Schedule schedule = parse_schedule(text);
  if (static_cast<int>(schedule.placements.size()) != instance.module_count()) {
    throw FormatError(0, "schedule lists " +
                             std::to_string(schedule.placements.size()) +
                             " modules, instance has " +
                             std::to_string(instance.module_count()));
  }
  for (int i = 0; i < instance.module_count(); ++i) {
    const Placement& p = schedule.placements[static_cast<std::size_t>(i)];
    if (static_cast<int>(p.start_times.size()) != instance.module(i).length()) {
      throw FormatError(0, "module " + std::to_string(i + 1) + " lists " +
                               std::to_string(p.start_times.size()) +
                               " starts for " +
                               std::to_string(instance.module(i).length()) +
                               " requests");
    }
  }
  return schedule;
}

inline std::string write_schedule(const Schedule& schedule) {
  std::ostringstream out;
  out << "schedule 1\n";
  for (std::size_t i = 0; i < schedule.placements.size(); ++i) {
    const Placement& p = schedule.placements[i];
    out << "module " << (i + 1) << " base " << p.base_slot << " starts";
    for (int t : p.start_times) out << ' ' << t;
    out << "\n";
  }
  return out.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace fpgatris
