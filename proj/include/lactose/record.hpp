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

#pragma once

#include <vector>

namespace lactose {

// One training sample. Batch size is always one.
struct TrainRecord {
  std::vector<double> x;
  std::vector<double> y;

  friend bool operator==(const TrainRecord&, const TrainRecord&) = default;
};

using Dataset = std::vector<TrainRecord>;

}  // namespace lactose
