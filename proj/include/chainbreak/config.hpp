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

#ifndef CHAINBREAK_CONFIG_HPP_
#define CHAINBREAK_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace chainbreak::config {

// Values of the flat TOML subset used for experiment files: top-level
// `key = value` pairs with booleans, integers, floats, basic strings and
// arrays of numbers. Tables are rejected.
using Value =
    std::variant<bool, std::int64_t, double, std::string, std::vector<double>>;
using Table = std::map<std::string, Value>;

Table parse_flat_toml(std::string_view text);

// Parses a single right-hand side, e.g. from a `--set key=value` flag.
// Bare words that are not numbers or booleans are read as strings.
Value parse_value(std::string_view raw, bool allow_bare_string = false);

double as_double(const Value& v, const std::string& key);
std::int64_t as_int(const Value& v, const std::string& key);
bool as_bool(const Value& v, const std::string& key);
std::string as_string(const Value& v, const std::string& key);
std::vector<double> as_doubles(const Value& v, const std::string& key);

}  // namespace chainbreak::config

#endif  // CHAINBREAK_CONFIG_HPP_
