// Copyright 2026 The hmmqec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HMMQEC_ERRORS_HPP
#define HMMQEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hmmqec {

// Malformed or inconsistent input: bad dimensions, non-Hermitian operators,
// parse failures. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation left its numerical domain (negative probabilities beyond
// tolerance, vanishing likelihoods). The CLI maps this to exit code 3.
class NumericalFault : public std::runtime_error {
 public:
  explicit NumericalFault(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hmmqec

#endif  // HMMQEC_ERRORS_HPP
