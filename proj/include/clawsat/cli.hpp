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

#ifndef CLAWSAT_CLI_HPP
#define CLAWSAT_CLI_HPP

#include <ostream>

namespace clawsat {

/// Entry point of the `clawsat` tool. Returns 0 on success, 2 on usage
/// errors (nothing is written) and 1 on runtime failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace clawsat

#endif  // CLAWSAT_CLI_HPP
