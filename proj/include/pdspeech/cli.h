// include/pdspeech/cli.h

// Copyright 2026  pdspeech authors
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

#ifndef PDSPEECH_CLI_H_
#define PDSPEECH_CLI_H_

namespace pdspeech {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the pdspeech tool. Subcommands: synth, segment, features,
// train, finetune, evaluate, experiment-matrix, report.
int cli_main(int argc, char** argv);

}  // namespace pdspeech

#endif  // PDSPEECH_CLI_H_
