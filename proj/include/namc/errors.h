/*
 * Copyright 2026 The namc Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NAMC_ERRORS_H_
#define NAMC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace namc {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model or dataset file. The message starts with the JSON path or
// CSV location of the offending element.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatchError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class NonFiniteError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class UnsupportedVersionError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A bounded procedure (branch-and-bound, piecewise-linear propagation, sort
// refinement) ran out of budget. Never to be read as a verdict.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

// Budget failure while refining a specific feature.
class FeatureBudgetError : public BudgetExceededError {
 public:
  FeatureBudgetError(int feature, const std::string& what)
      : BudgetExceededError("feature " + std::to_string(feature) + ": " + what),
        feature_(feature) {}
  int feature() const { return feature_; }

 private:
  int feature_;
};

class TimeoutError : public Error {
 public:
  using Error::Error;
};

// Broken algorithmic invariant (e.g. importance intervals that neither
// separate nor converge). Indicates a bug, not bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace namc

#endif  // NAMC_ERRORS_H_
