// Copyright 2026 The clawsat Authors
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

#ifndef CLAWSAT_ERROR_HPP
#define CLAWSAT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace clawsat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CLAWSAT_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

// corpus
CLAWSAT_DEFINE_ERROR(MalformedSource);
CLAWSAT_DEFINE_ERROR(EmptyCorpus);
CLAWSAT_DEFINE_ERROR(DuplicateId);

/// JSONL parse failure; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// transform
CLAWSAT_DEFINE_ERROR(IllegalPayload);
CLAWSAT_DEFINE_ERROR(StaleSite);
CLAWSAT_DEFINE_ERROR(NoSites);
CLAWSAT_DEFINE_ERROR(ExecutionTimeout);

// model
CLAWSAT_DEFINE_ERROR(IdOutOfRange);
CLAWSAT_DEFINE_ERROR(NonFiniteLoss);
CLAWSAT_DEFINE_ERROR(CheckpointError);

// contrastive
CLAWSAT_DEFINE_ERROR(DegenerateBatch);
CLAWSAT_DEFINE_ERROR(ZeroVector);

// train
CLAWSAT_DEFINE_ERROR(VocabMismatch);
CLAWSAT_DEFINE_ERROR(EmptyHistory);
CLAWSAT_DEFINE_ERROR(ConfigError);

// analyze
CLAWSAT_DEFINE_ERROR(EmptyGold);
CLAWSAT_DEFINE_ERROR(ShapeMismatch);
CLAWSAT_DEFINE_ERROR(EmptyTrainSet);

// io
CLAWSAT_DEFINE_ERROR(IoError);

#undef CLAWSAT_DEFINE_ERROR

}  // namespace clawsat

#endif  // CLAWSAT_ERROR_HPP
