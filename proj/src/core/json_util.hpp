#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"

#include "sdnlab/error.hpp"

namespace sdnlab::detail {

using nlohmann::json;

inline void require_object(const json& j, std::string_view where) {
  if (!j.is_object()) throw Error(ErrorKind::Validation, std::string(where) + ": expected an object");
}

/// Rejects fields outside `allowed` and reports missing `required` ones.
inline void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> required,
                       std::initializer_list<std::string_view> optional = {}) {
  require_object(j, where);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (auto k : required) known = known || it.key() == k;
    for (auto k : optional) known = known || it.key() == k;
    if (!known) throw Error(ErrorKind::Validation, std::string(where) + ": unknown field '" + it.key() + "'");
  }
  for (auto k : required) {
    if (!j.contains(k)) throw Error(ErrorKind::Validation, std::string(where) + ": missing field '" + std::string(k) + "'");
  }
}

inline std::string get_string(const json& j, std::string_view key, std::string_view where) {
  const auto& v = j.at(std::string(key));
  if (!v.is_string()) {
    throw Error(ErrorKind::Validation, std::string(where) + "." + std::string(key) + ": expected a string");
  }
  return v.get<std::string>();
}

inline double get_number(const json& j, std::string_view key, std::string_view where) {
  const auto& v = j.at(std::string(key));
  if (!v.is_number()) {
    throw Error(ErrorKind::Validation, std::string(where) + "." + std::string(key) + ": expected a number");
  }
  return v.get<double>();
}

inline long long get_int(const json& j, std::string_view key, std::string_view where) {
  const auto& v = j.at(std::string(key));
  if (!v.is_number_integer()) {
    throw Error(ErrorKind::Validation, std::string(where) + "." + std::string(key) + ": expected an integer");
  }
  return v.get<long long>();
}

inline const json& get_array(const json& j, std::string_view key, std::string_view where) {
  const auto& v = j.at(std::string(key));
  if (!v.is_array()) {
    throw Error(ErrorKind::Validation, std::string(where) + "." + std::string(key) + ": expected an array");
  }
  return v;
}

/// Parses JSON text, turning nlohmann's byte offset into line:column.
inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    std::size_t limit = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::Parse, std::string(what) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                      ": parse error: " + e.what());
  }
}

}  // namespace sdnlab::detail
