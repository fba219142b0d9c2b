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

#include "lactose/dataio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "lactose/error.hpp"
#include "lactose/rng.hpp"

namespace lactose {
namespace {

double eval_piece(const PieceFunction& f, double x) {
  return std::visit(
      [x](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ConstantPiece>) {
          return p.value;
        } else if constexpr (std::is_same_v<P, LinearPiece>) {
          return p.slope * x + p.intercept;
        } else {
          return p.amplitude * std::sin(p.frequency * x + p.phase);
        }
      },
      f);
}

bool piece_finite(const PieceFunction& f) {
  return std::visit(
      [](const auto& p) -> bool {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ConstantPiece>) {
          return std::isfinite(p.value);
        } else if constexpr (std::is_same_v<P, LinearPiece>) {
          return std::isfinite(p.slope) && std::isfinite(p.intercept);
        } else {
          return std::isfinite(p.amplitude) && std::isfinite(p.frequency) &&
                 std::isfinite(p.phase);
        }
      },
      f);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

// "x3" -> 3 for prefix "x"; npos when the name does not match.
std::size_t column_index(std::string_view name, std::string_view prefix) {
  if (name.substr(0, prefix.size()) != prefix || name.size() == prefix.size())
    return std::string::npos;
  std::size_t v = 0;
  const auto* first = name.data() + prefix.size();
  const auto* last = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::string::npos;
  return v;
}

}  // namespace

void PiecewiseSpec::validate() const {
  if (segments.empty()) throw ValidationError("generator.segments: empty");
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
    throw ValidationError("generator.x_range: need finite x_min < x_max");
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0)
    throw ValidationError("generator.noise_sigma: must be finite and >= 0");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    const std::string at = "generator.segments[" + std::to_string(i) + "]";
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi) || !(s.lo < s.hi))
      throw ValidationError(at + ": need finite lo < hi");
    if (!piece_finite(s.function))
      throw ValidationError(at + ": non-finite coefficient");
    if (i > 0) {
      const double prev = segments[i - 1].hi;
      if (s.lo > prev) throw ValidationError(at + ": gap after previous segment");
      if (s.lo < prev) throw ValidationError(at + ": overlaps previous segment");
    }
  }
  if (segments.front().lo != x_min || segments.back().hi != x_max)
    throw ValidationError("generator.segments: must cover exactly [x_min, x_max]");
}

double piecewise_value(const PiecewiseSpec& spec, double x) {
  if (!(x >= spec.segments.front().lo && x <= spec.segments.back().hi)) {
    throw ValidationError("x = " + format_double(x) +
                          " lies outside the generator range");
  }
  for (const Segment& s : spec.segments)
    if (x < s.hi) return eval_piece(s.function, x);
  return eval_piece(spec.segments.back().function, x);
}

Dataset generate(const PiecewiseSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  Dataset out;
  out.reserve(spec.sample_count);
  for (std::size_t i = 0; i < spec.sample_count; ++i) {
    const double x = rng.uniform(spec.x_min, spec.x_max);
    const double noise = rng.normal();
    double y = piecewise_value(spec, x);
    if (spec.noise_sigma > 0.0) y = y + spec.noise_sigma * noise;
    out.push_back({{x}, {y}});
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open '" + path.string() + "' for writing");
  f << text;
  f.close();
  if (!f) throw FormatError("failed writing '" + path.string() + "'");
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open dataset '" + path.string() + "'");
  const std::string where = path.string();

  std::string line;
  std::size_t line_no = 0;
  std::size_t x_cols = 0;
  std::size_t y_cols = 0;
  bool have_header = false;
  Dataset data;
  while (std::getline(f, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    const std::string at = where + ":" + std::to_string(line_no);
    if (!have_header) {
      for (auto name : cells) {
        if (column_index(name, "x") == x_cols && y_cols == 0) {
          ++x_cols;
        } else if (column_index(name, "y") == y_cols) {
          ++y_cols;
        } else {
          throw FormatError(at + ": bad header cell '" + std::string(name) +
                            "' (expected x0..xk,y0..ym)");
        }
      }
      if (x_cols == 0 || y_cols == 0)
        throw FormatError(at + ": header needs at least one x and one y column");
      have_header = true;
      continue;
    }
    if (cells.size() != x_cols + y_cols) {
      throw FormatError(at + ": expected " + std::to_string(x_cols + y_cols) +
                        " cells, got " + std::to_string(cells.size()));
    }
    TrainRecord r;
    r.x.reserve(x_cols);
    r.y.reserve(y_cols);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      const auto cell = cells[c];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        throw FormatError(at + ": column " + std::to_string(c + 1) +
                          " is not a number: '" + std::string(cell) + "'");
      }
      if (!std::isfinite(v)) {
        throw NumericError(at + ": column " + std::to_string(c + 1) +
                           " is not finite");
      }
      (c < x_cols ? r.x : r.y).push_back(v);
    }
    data.push_back(std::move(r));
  }
  if (!have_header) throw FormatError(where + ": missing header");
  return data;
}

void write_dataset(const std::filesystem::path& path,
                   std::span<const TrainRecord> data) {
  if (data.empty()) throw ValidationError("dataset: nothing to write");
  const std::size_t xw = data.front().x.size();
  const std::size_t yw = data.front().y.size();
  std::string out;
  for (std::size_t i = 0; i < xw; ++i) out += (i ? ",x" : "x") + std::to_string(i);
  for (std::size_t i = 0; i < yw; ++i) out += ",y" + std::to_string(i);
  out += '\n';
  for (const TrainRecord& r : data) {
    if (r.x.size() != xw || r.y.size() != yw)
      throw ShapeError("dataset records have inconsistent widths");
    for (std::size_t i = 0; i < xw; ++i) out += (i ? "," : "") + format_double(r.x[i]);
    for (double v : r.y) out += "," + format_double(v);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_predictions(const std::filesystem::path& path,
                       std::span<const TrainRecord> records,
                       std::span<const std::vector<double>> predictions,
                       std::span<const std::size_t> branches) {
  if (records.size() != predictions.size() || records.size() != branches.size())
    throw ShapeError("predictions do not line up with records");
  if (records.empty()) throw ValidationError("predictions: nothing to write");
  const std::size_t xw = records.front().x.size();
  const std::size_t yw = records.front().y.size();
  std::string out;
  for (std::size_t i = 0; i < xw; ++i) out += (i ? ",x" : "x") + std::to_string(i);
  for (std::size_t i = 0; i < yw; ++i) out += ",y_true" + std::to_string(i);
  for (std::size_t i = 0; i < yw; ++i) out += ",y_pred" + std::to_string(i);
  out += ",branch\n";
  for (std::size_t k = 0; k < records.size(); ++k) {
    const TrainRecord& r = records[k];
    if (r.x.size() != xw || r.y.size() != yw || predictions[k].size() != yw)
      throw ShapeError("prediction row " + std::to_string(k) + " has the wrong width");
    for (std::size_t i = 0; i < xw; ++i) out += (i ? "," : "") + format_double(r.x[i]);
    for (double v : r.y) out += "," + format_double(v);
    for (double v : predictions[k]) out += "," + format_double(v);
    out += "," + std::to_string(branches[k]) + "\n";
  }
  write_text_file(path, out);
}

}  // namespace lactose
