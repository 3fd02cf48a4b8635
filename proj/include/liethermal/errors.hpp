// Copyright 2026 The liethermal Authors
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

namespace liethermal {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands built for different site counts or vector lengths.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Site count outside the supported range of an operation.
class UnsupportedSize : public Error {
 public:
  using Error::Error;
};

/// A generator that is not an element of the basis.
class UnknownGenerator : public Error {
 public:
  using Error::Error;
};

/// Control amplitudes that do not match the channel layout.
class LayoutError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a numerical method that failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Arguments violating a precondition (zero norms, bad spins, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Cached sweeps that no longer match the protocol they came from.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Dense or enumerated objects above the configured size cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Every restart converged onto an anti-aligned operator.
class InfeasibleAlignment : public Error {
 public:
  using Error::Error;
};

/// Target spectrum whose lowest gap is below numerical resolution.
class DegenerateGap : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected before any computation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, parsed or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace liethermal
