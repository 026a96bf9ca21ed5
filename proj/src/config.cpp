// Copyright 2026 The chainbreak Authors.
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

#include "chainbreak/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "chainbreak/error.hpp"

namespace chainbreak::config {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

// Strips a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '\\' && in_string) {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

bool parse_number(std::string_view s, Value& out) {
  std::string clean;
  for (char c : s)
    if (c != '_') clean.push_back(c);
  if (clean.empty()) return false;
  const char* first = clean.data();
  const char* last = first + clean.size();
  if (*first == '+') ++first;
  const bool looks_float =
      clean.find_first_of(".eE") != std::string::npos ||
      clean.find("inf") != std::string::npos ||
      clean.find("nan") != std::string::npos;
  if (!looks_float) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc() && ptr == last) {
      out = v;
      return true;
    }
    return false;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc() && ptr == last) {
    out = v;
    return true;
  }
  return false;
}

std::string parse_string(std::string_view s) {
  // s includes the surrounding quotes.
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (c == '\\') {
      if (i + 2 >= s.size()) throw ConfigError("dangling escape in string");
      const char e = s[++i];
      switch (e) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        case '"': c = '"'; break;
        case '\\': c = '\\'; break;
        default:
          throw ConfigError(std::string("unsupported escape \\") + e);
      }
    } else if (c == '"') {
      throw ConfigError("unescaped quote inside string");
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

Value parse_value(std::string_view raw, bool allow_bare_string) {
  const std::string_view s = trim(raw);
  if (s.empty()) throw ConfigError("missing value");
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw ConfigError("unterminated string: " + std::string(s));
    return parse_string(s);
  }
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError("unterminated array");
    std::vector<double> values;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const std::string_view item = trim(body.substr(0, comma));
      if (!item.empty()) {
        Value v;
        if (!parse_number(item, v))
          throw ConfigError("arrays may only hold numbers: " +
                            std::string(item));
        values.push_back(std::holds_alternative<std::int64_t>(v)
                             ? static_cast<double>(std::get<std::int64_t>(v))
                             : std::get<double>(v));
      }
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
    }
    return values;
  }
  Value v;
  if (parse_number(s, v)) return v;
  if (allow_bare_string) return std::string(s);
  throw ConfigError("cannot parse value: " + std::string(s));
}

Table parse_flat_toml(std::string_view text) {
  Table table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[')
      throw ConfigError(where + "tables are not supported (flat keys only)");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(where + "expected key = value");
    std::string key(trim(line.substr(0, eq)));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"')
      key = key.substr(1, key.size() - 2);
    if (key.empty()) throw ConfigError(where + "empty key");
    for (char c : key)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
            c == '-'))
        throw ConfigError(where + "invalid key '" + key + "'");
    if (table.count(key)) throw ConfigError(where + "duplicate key " + key);
    try {
      table.emplace(key, parse_value(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return table;
}

double as_double(const Value& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v))
    return static_cast<double>(*i);
  throw ConfigError("key '" + key + "' must be a number");
}

std::int64_t as_int(const Value& v, const std::string& key) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* d = std::get_if<double>(&v)) {
    if (std::nearbyint(*d) == *d && std::abs(*d) < 9.0e15)
      return static_cast<std::int64_t>(*d);
  }
  throw ConfigError("key '" + key + "' must be an integer");
}

bool as_bool(const Value& v, const std::string& key) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw ConfigError("key '" + key + "' must be true or false");
}

std::string as_string(const Value& v, const std::string& key) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError("key '" + key + "' must be a string");
}

std::vector<double> as_doubles(const Value& v, const std::string& key) {
  if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
  if (std::holds_alternative<double>(v) ||
      std::holds_alternative<std::int64_t>(v))
    return {as_double(v, key)};
  throw ConfigError("key '" + key + "' must be an array of numbers");
}

}  // namespace chainbreak::config
