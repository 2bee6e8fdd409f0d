// Copyright 2026 The kbqa Authors.
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

#ifndef KBQA_ERRORS_H_
#define KBQA_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kbqa {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Errors caused by bad input data. The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string &source, std::size_t line_no,
             const std::string &what);
  ParseError(std::size_t line_no, const std::string &what)
      : ParseError("", line_no, what) {}

  std::size_t line_no() const { return line_no_; }
  const std::string &source() const { return source_; }

 private:
  std::string source_;
  std::size_t line_no_;
};

class MalformedId : public DataError {
 public:
  using DataError::DataError;
};

class SnapshotError : public DataError {
 public:
  using DataError::DataError;
};

class LabelFailure : public DataError {
 public:
  using DataError::DataError;
};

class EmptyTrainingSet : public DataError {
 public:
  EmptyTrainingSet() : DataError("empty training set") {}
};

class EmptyEvalSet : public DataError {
 public:
  EmptyEvalSet() : DataError("empty evaluation set") {}
};

// Prediction-time failures. Not fatal for batch runs.
class NoCandidates : public Error {
 public:
  NoCandidates() : Error("no entity candidates") {}
};

class NoRelation : public Error {
 public:
  NoRelation() : Error("no relation candidates") {}
};

class EmptySequence : public Error {
 public:
  EmptySequence() : Error("empty token sequence") {}
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace kbqa

#endif  // KBQA_ERRORS_H_
