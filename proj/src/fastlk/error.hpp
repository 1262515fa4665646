// Copyright 2026 The fastlk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fastlk {

/// Base class for all fastlk errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Precondition violation (bad parameter, out-of-range coordinate, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// File could not be read, written, or parsed. Message names the file.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Inputs that must agree in shape do not (frame size, level count, ...).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fastlk
