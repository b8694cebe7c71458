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

#include "rdp/parallel.h"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "rdp/error.h"

namespace rdp {

int ApplyWorkerCountFromEnv() {
  const char* raw = std::getenv(kWorkersEnv);
  if (raw == nullptr || *raw == '\0') return WorkerCount();
  char* end = nullptr;
  const long n = std::strtol(raw, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw Error(ErrorCode::kConfig,
                std::string(kWorkersEnv) + " must be a positive integer, got " +
                    raw);
  }
  SetWorkerCount(static_cast<int>(n));
  return WorkerCount();
}

int WorkerCount() { return omp_get_max_threads(); }

void SetWorkerCount(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "worker count < 1");
  omp_set_num_threads(n);
}

}  // namespace rdp
