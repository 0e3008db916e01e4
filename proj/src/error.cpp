// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#include "enertest/error.hpp"

namespace enertest {

const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::io: return "io";
    case Errc::parse: return "parse";
    case Errc::config: return "config";
    case Errc::bounds: return "bounds";
    case Errc::order: return "order";
    case Errc::stage_missing: return "stage_missing";
    case Errc::degenerate_baseline: return "degenerate_baseline";
    case Errc::insufficient_corpus: return "insufficient_corpus";
    case Errc::path: return "path";
    case Errc::index: return "index";
    case Errc::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace enertest
