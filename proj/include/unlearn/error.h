//
// Copyright 2026 The Unlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef UNLEARN_ERROR_H_
#define UNLEARN_ERROR_H_

#include <stdexcept>
#include <string>

namespace unlearn {

// Raised for every precondition violation and malformed input in the library.
// The message is meant to be shown to the user as-is.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace unlearn

#endif  // UNLEARN_ERROR_H_
