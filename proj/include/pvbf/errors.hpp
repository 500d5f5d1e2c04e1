// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace pvbf {

/// Invalid experiment configuration or network/data shape mismatch.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite value produced inside a computation.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int layer_id)
      : std::runtime_error(what), layer_id_(layer_id) {}
  int layer_id() const noexcept { return layer_id_; }

 private:
  int layer_id_;
};

/// Malformed input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two inputs that must agree do not (e.g. image vs label counts).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal state no longer satisfies its invariants.
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pvbf
