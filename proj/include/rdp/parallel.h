//
// Copyright 2026 The RDP Authors
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

#ifndef RDP_PARALLEL_H_
#define RDP_PARALLEL_H_

namespace rdp {

// Environment variable holding the OpenMP worker count for the CLI.
inline constexpr const char* kWorkersEnv = "RDP_WORKERS";

// Applies RDP_WORKERS if set to a positive integer. Returns the worker
// count in effect afterwards.
int ApplyWorkerCountFromEnv();

int WorkerCount();
void SetWorkerCount(int n);

}  // namespace rdp

#endif  // RDP_PARALLEL_H_
