// Copyright 2026 The gritnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace gritnet {

enum class ErrorKind {
  kArgument,
  kConfig,
  kData,
  kNumeric,
  kUndefinedMetric,
};

/// Base of every exception thrown by the library. The kind decides the CLI
/// exit code (see exit_code()).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what)
      : Error(ErrorKind::kArgument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

/// Malformed input files, schema mismatches, corrupt checkpoints.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what)
      : Error(ErrorKind::kData, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::kNumeric, what) {}
};

/// AUC with one class present, ARR with a vanishing denominator.
class UndefinedMetricError : public Error {
 public:
  explicit UndefinedMetricError(const std::string& what)
      : Error(ErrorKind::kUndefinedMetric, what) {}
};

/// 0 success, 2 config/argument error, 3 data error, 4 numeric failure.
int exit_code(ErrorKind kind) noexcept;

}  // namespace gritnet
