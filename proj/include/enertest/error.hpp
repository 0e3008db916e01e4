// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ENERTEST_ERROR_HPP
#define ENERTEST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace enertest {

/// Error categories surfaced through the library and mapped 1:1 onto the
/// C API status codes.
enum class Errc {
  io,                    // file could not be opened/read/written
  parse,                 // malformed trace/EFG/config text
  config,                // semantically invalid configuration
  bounds,                // stage marker outside the trace extent
  order,                 // stage markers out of canonical order
  stage_missing,         // requested stage not present in the trace
  degenerate_baseline,   // baseline mean power is zero or negative
  insufficient_corpus,   // fewer cases than MinPts in a category
  path,                  // input sequence is not a walk in the app EFG
  index,                 // context index out of range
  invalid_argument,
};

const char* errc_name(Errc c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace enertest

#endif  // ENERTEST_ERROR_HPP
