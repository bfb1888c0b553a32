// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ordrm {

inline constexpr const char* kVersion = "0.1.0";

// Exit-code mapping for the CLI: UsageError -> 2, SchemaError -> 3,
// NumericError -> 4.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ordrm
