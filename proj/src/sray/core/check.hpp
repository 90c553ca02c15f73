// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace sray {

// Caller broke an API precondition (bad shape, unsorted input, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

// Non-finite value produced by a numeric kernel.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid user-supplied data (scene files, configs, checkpoints).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {
[[noreturn]] inline void check_failed(const char* expr, const char* file, int line,
                                      const std::string& msg) {
  std::ostringstream os;
  os << "contract violation: " << expr;
  if (!msg.empty()) os << " (" << msg << ")";
  os << " at " << file << ":" << line;
  throw ContractViolation(os.str());
}
}  // namespace detail

}  // namespace sray

#define SRAY_CHECK(cond, msg)                                             \
  do {                                                                    \
    if (!(cond)) ::sray::detail::check_failed(#cond, __FILE__, __LINE__, (msg)); \
  } while (0)
