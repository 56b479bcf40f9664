// Copyright 2026  The subfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Shared helpers for reading and writing the JSON documents.

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "subfuse/error.hpp"

namespace subfuse::json_io {

using Json = nlohmann::ordered_json;

inline Json parse(std::string_view document) {
  try {
    return Json::parse(document.begin(), document.end());
  } catch (const Json::parse_error& e) {
    fail_parse("malformed JSON at byte offset " + std::to_string(e.byte) +
               ": " + e.what());
  }
}

inline const Json& field(const Json& obj, const char* key,
                         const std::string& where) {
  if (!obj.is_object()) fail_validation(where + ": expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail_validation(where + ": missing field \"" + key + "\"");
  }
  return *it;
}

inline int64_t get_int(const Json& obj, const char* key,
                       const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_number_integer()) {
    fail_validation(where + ": field \"" + key + "\" must be an integer");
  }
  return v.get<int64_t>();
}

inline double get_number(const Json& v, const std::string& where) {
  if (!v.is_number()) fail_validation(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail_validation(where + ": number is not finite");
  return x;
}

inline double get_number(const Json& obj, const char* key,
                         const std::string& where) {
  return get_number(field(obj, key, where),
                    where + ": field \"" + std::string(key) + "\"");
}

inline std::string get_string(const Json& obj, const char* key,
                              const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_string()) {
    fail_validation(where + ": field \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

inline const Json& get_array(const Json& obj, const char* key,
                             const std::string& where) {
  const Json& v = field(obj, key, where);
  if (!v.is_array()) {
    fail_validation(where + ": field \"" + key + "\" must be an array");
  }
  return v;
}

// Compact, deterministic serialization (keys sorted, shortest round-trip
// numbers). Invalid UTF-8 never reaches here because inputs are decoded.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace subfuse::json_io
