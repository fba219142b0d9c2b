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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lactose/record.hpp"

namespace lactose {

struct ConstantPiece {
  double value = 0.0;
};
struct LinearPiece {
  double slope = 0.0;
  double intercept = 0.0;
};
// amplitude * sin(frequency * x + phase)
struct SinePiece {
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
};

using PieceFunction = std::variant<ConstantPiece, LinearPiece, SinePiece>;

struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  PieceFunction function;
};

// A 1-D piecewise target. Segments are [lo, hi) except the last, which also
// contains its upper end, matching the router's boundary convention.
struct PiecewiseSpec {
  std::vector<Segment> segments;
  double x_min = 0.0;
  double x_max = 0.0;
  double noise_sigma = 0.0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;

  // Throws ValidationError for gaps, overlaps, a range not covered by the
  // segments, negative sigma, or non-finite numbers.
  void validate() const;
};

// Noise-free target at x. Throws ValidationError when x is outside the range.
double piecewise_value(const PiecewiseSpec& spec, double x);

// sample_count records with x ~ U[x_min, x_max) and
// y = f(x) + noise_sigma * N(0, 1). Each sample draws x, then one Box-Muller
// normal, from SplitMix64(seed); the normal is drawn even when sigma is 0 so
// x values do not depend on sigma.
Dataset generate(const PiecewiseSpec& spec);

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

// CSV with header x0,...,xk,y0,...,ym. Blank lines are ignored.
// Throws FormatError with the line number for malformed rows or headers and
// NumericError for non-finite cells. A header-only file yields an empty
// dataset.
Dataset read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, std::span<const TrainRecord> data);

// Header x0..xk,y_true0..y_truem,y_pred0..y_predm,branch.
void write_predictions(const std::filesystem::path& path,
                       std::span<const TrainRecord> records,
                       std::span<const std::vector<double>> predictions,
                       std::span<const std::size_t> branches);

// Throws FormatError if the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lactose
