// schema_check.h

// Copyright 2026 The convbss Authors
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

// A small JSON Schema validator covering the keywords the published report
// schemas use: type (string or list), enum, required, properties,
// additionalProperties (boolean), items, minimum, maximum.

#ifndef CONVBSS_TESTS_SCHEMA_CHECK_H_
#define CONVBSS_TESTS_SCHEMA_CHECK_H_

#include <string>
#include <vector>

#include "json.hpp"

namespace convbss::testing {

inline bool MatchesType(const nlohmann::json &value, const std::string &type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  return false;
}

/// Appends one message per violation to `errors`; empty means valid.
inline void Validate(const nlohmann::json &schema, const nlohmann::json &value,
                     const std::string &where, std::vector<std::string> &errors) {
  if (schema.contains("type")) {
    const nlohmann::json &t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = MatchesType(value, t.get<std::string>());
    } else {
      for (const auto &one : t) ok = ok || MatchesType(value, one.get<std::string>());
    }
    if (!ok) {
      errors.push_back(where + ": expected type " + t.dump() + ", got " + value.dump());
      return;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto &option : schema["enum"]) found = found || option == value;
    if (!found) errors.push_back(where + ": " + value.dump() + " not in enum");
  }
  if (value.is_number()) {
    const double v = value.get<double>();
    if (schema.contains("minimum") && v < schema["minimum"].get<double>())
      errors.push_back(where + ": below minimum");
    if (schema.contains("maximum") && v > schema["maximum"].get<double>())
      errors.push_back(where + ": above maximum");
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto &key : schema["required"])
        if (!value.contains(key.get<std::string>()))
          errors.push_back(where + ": missing " + key.get<std::string>());
    const nlohmann::json props = schema.value("properties", nlohmann::json::object());
    for (const auto &[key, child] : value.items()) {
      if (props.contains(key))
        Validate(props[key], child, where + "." + key, errors);
      else if (schema.contains("additionalProperties") && !schema["additionalProperties"].get<bool>())
        errors.push_back(where + ": unexpected key " + key);
    }
  }
  if (value.is_array() && schema.contains("items"))
    for (std::size_t i = 0; i < value.size(); ++i)
      Validate(schema["items"], value[i], where + "[" + std::to_string(i) + "]", errors);
}

inline std::vector<std::string> Validate(const nlohmann::json &schema,
                                         const nlohmann::json &value) {
  std::vector<std::string> errors;
  Validate(schema, value, "$", errors);
  return errors;
}

}  // namespace convbss::testing

#endif  // CONVBSS_TESTS_SCHEMA_CHECK_H_
