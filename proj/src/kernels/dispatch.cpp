// Copyright 2026 The Lactose Authors.
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

#include <atomic>
#include <cstdlib>
#include <string>

#include "lactose/error.hpp"
#include "lactose/kernels.hpp"

namespace lactose::kernels {
namespace {

const KernelTable* available(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return &scalar_kernels();
    case Backend::kAvx2:
      return avx2_kernels();
    case Backend::kNeon:
      return neon_kernels();
  }
  return nullptr;
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("LACTOSE_KERNELS")) {
    const std::string want(env);
    for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
      if (want == backend_name(b)) {
        if (const KernelTable* t = available(b)) return t;
      }
    }
    // Unknown or unsupported request: fall through to autodetection.
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  if (const KernelTable* t = neon_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{pick_default()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_backend(Backend backend) {
  const KernelTable* t = available(backend);
  if (t == nullptr) {
    throw ValidationError("kernel backend '" +
                          std::string(backend_name(backend)) +
                          "' is not available on this machine");
  }
  slot().store(t, std::memory_order_release);
}

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "unknown";
}

}  // namespace lactose::kernels
