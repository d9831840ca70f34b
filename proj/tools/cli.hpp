// cli.hpp

// Copyright 2026 The PSDA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PSDA_TOOLS_CLI_HPP_
#define PSDA_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace psda::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNumericError = 3,
};

/// Runs the command line args[0] args[1] ... and returns the exit status.
/// Normal output goes to out, diagnostics to err.
int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace psda::cli

#endif  // PSDA_TOOLS_CLI_HPP_
