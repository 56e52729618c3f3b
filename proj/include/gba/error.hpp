// Copyright 2026 The gbatlas Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace gba {

// Base of every error raised by the library. The CLI maps ValidationError
// subclasses to exit code 1 and IoError to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class InvalidGeometry : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidGrid : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidCoordinate : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SemanticMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class GridMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class CrsMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingInput : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gba
