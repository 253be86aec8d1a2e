// Copyright 2026 The fracsample Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace fracsample {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPartial = 3;

// Entry point shared by the binary and tests. JSON results go to `out`,
// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracsample
