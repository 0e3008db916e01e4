// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0
//
// Internal JSON helpers shared by the config loaders. Not installed.

#ifndef ENERTEST_SRC_JSON_UTIL_HPP
#define ENERTEST_SRC_JSON_UTIL_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "enertest/error.hpp"
#include "json.hpp"

namespace enertest::internal {

inline std::string slurp_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io, "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline nlohmann::json parse_json_text(const std::string& text,
                                      const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, what + ": " + e.what());
  }
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& into) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, std::string("field ") + key + ": " + e.what());
  }
}

}  // namespace enertest::internal

#endif  // ENERTEST_SRC_JSON_UTIL_HPP
