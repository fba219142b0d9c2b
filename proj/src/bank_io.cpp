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

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <system_error>

#include "json_codec.hpp"
#include "lactose/bank.hpp"
#include "lactose/error.hpp"

namespace lactose {
namespace {

using detail::json;

constexpr std::array<char, 4> kMagic{'L', 'A', 'C', 'T'};
constexpr std::size_t kHeaderBytes = kMagic.size() + 1;
constexpr std::size_t kTrailerBytes = sizeof(std::uint64_t);

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

void put_doubles(std::string& out, std::span<const double> values) {
  for (double d : values) put_u64(out, std::bit_cast<std::uint64_t>(d));
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot open '" + path.string() + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  f.close();
  if (!f) throw FormatError("failed writing '" + path.string() + "'");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::size_t expected_values(const ModelLayout& layout, std::size_t branches,
                            OptimizerKind kind) {
  const std::size_t per = layout.parameter_count();
  return branches * per * (kind == OptimizerKind::kAdam ? 3 : 1);
}

}  // namespace

std::filesystem::path manifest_path(const std::filesystem::path& blob) {
  auto p = blob;
  p += ".json";
  return p;
}

void save_bank(const ParameterBank& bank, const std::filesystem::path& path,
               const ConditionArray* conditions) {
  const std::size_t n = bank.branch_count();
  const OptimizerConfig& opt = bank.optimizer_state({0}).config;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(bank.optimizer_state({i}).config == opt))
      throw FormatError("branches use different optimizer settings");
  }
  if (conditions != nullptr && conditions->branch_count() != n) {
    throw FormatError("conditions define " +
                      std::to_string(conditions->branch_count()) +
                      " branches but the bank has " + std::to_string(n));
  }

  std::string blob(kMagic.begin(), kMagic.end());
  blob.push_back(static_cast<char>(kBankFormatVersion));
  for (std::size_t i = 0; i < n; ++i) put_doubles(blob, bank.params({i}).values);
  if (opt.kind == OptimizerKind::kAdam) {
    for (std::size_t i = 0; i < n; ++i) {
      put_doubles(blob, bank.optimizer_state({i}).first_moment);
      put_doubles(blob, bank.optimizer_state({i}).second_moment);
    }
  }
  const std::size_t count = (blob.size() - kHeaderBytes) / sizeof(double);
  put_u64(blob, count);

  json steps = json::array();
  for (std::size_t i = 0; i < n; ++i)
    steps.push_back(bank.optimizer_state({i}).step_count);
  json manifest = {
      {"format", "lactose-bank"},
      {"format_version", kBankFormatVersion},
      {"blob", path.filename().string()},
      {"value_count", count},
      {"branch_count", n},
      {"layout", detail::layout_to_json(bank.layout())},
      {"conditions",
       conditions ? detail::conditions_to_json(*conditions) : json(nullptr)},
      {"optimizer", detail::optimizer_to_json(opt)},
      {"step_counts", steps},
      {"init",
       {{"mode", std::string(to_string(bank.init_mode()))},
        {"seed", bank.init_seed()}}},
  };

  const auto manifest_file = manifest_path(path);
  auto blob_tmp = path;
  blob_tmp += ".tmp";
  auto manifest_tmp = manifest_file;
  manifest_tmp += ".tmp";
  write_file(blob_tmp, blob);
  write_file(manifest_tmp, manifest.dump(2) + "\n");
  std::error_code ec;
  std::filesystem::rename(blob_tmp, path, ec);
  if (!ec) std::filesystem::rename(manifest_tmp, manifest_file, ec);
  if (ec) throw FormatError("cannot move bank into place: " + ec.message());
}

BankFile load_bank_file(const std::filesystem::path& path) {
  const auto manifest_file = manifest_path(path);
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_file));
  } catch (const json::exception& e) {
    throw FormatError("bank manifest '" + manifest_file.string() +
                      "' is not valid JSON: " + e.what());
  }

  const std::string blob = read_file(path);
  const std::string where = "bank '" + path.string() + "'";
  if (blob.size() < kMagic.size() ||
      std::memcmp(blob.data(), kMagic.data(), kMagic.size()) != 0) {
    if (blob.size() < kMagic.size() &&
        std::memcmp(blob.data(), kMagic.data(), blob.size()) == 0) {
      throw FormatError(where + " is truncated (no header)");
    }
    throw FormatError(where + " has bad magic bytes (expected \"LACT\")");
  }
  if (blob.size() < kHeaderBytes)
    throw FormatError(where + " is truncated (no version byte)");
  const auto version = static_cast<std::uint8_t>(blob[kMagic.size()]);
  if (version != kBankFormatVersion) {
    throw FormatError(where + " has unsupported format version " +
                      std::to_string(version) + " (supported: " +
                      std::to_string(kBankFormatVersion) + ")");
  }
  const std::size_t body = blob.size() - kHeaderBytes;
  if (body < kTrailerBytes || (body - kTrailerBytes) % sizeof(double) != 0)
    throw FormatError(where + " is truncated");
  const std::size_t count = (body - kTrailerBytes) / sizeof(double);
  if (get_u64(blob.data() + blob.size() - kTrailerBytes) != count)
    throw FormatError(where + " is truncated (length check failed)");

  try {
    if (detail::require<std::string>(manifest, "format", "manifest") !=
        "lactose-bank") {
      throw FormatError("manifest.format: not a lactose bank manifest");
    }
    if (detail::require<std::size_t>(manifest, "format_version", "manifest") !=
        version) {
      throw FormatError("manifest.format_version: disagrees with " + where);
    }
    const ModelLayout layout =
        detail::layout_from_json(manifest.at("layout"), "manifest.layout");
    const auto branches =
        detail::require<std::size_t>(manifest, "branch_count", "manifest");
    const OptimizerConfig opt =
        detail::optimizer_from_json(manifest.at("optimizer"), "manifest.optimizer");
    const auto steps = manifest.at("step_counts").get<std::vector<std::uint64_t>>();
    if (branches == 0 || steps.size() != branches)
      throw FormatError("manifest.step_counts: expected one entry per branch");
    const std::size_t want = expected_values(layout, branches, opt.kind);
    if (count != want ||
        detail::require<std::size_t>(manifest, "value_count", "manifest") != want) {
      throw FormatError(where + " holds " + std::to_string(count) +
                        " values but the manifest describes " +
                        std::to_string(want));
    }

    std::size_t cursor = kHeaderBytes;
    auto take = [&](std::size_t k) {
      std::vector<double> out(k);
      for (double& d : out) {
        d = std::bit_cast<double>(get_u64(blob.data() + cursor));
        cursor += sizeof(double);
      }
      return out;
    };
    const std::size_t per = layout.parameter_count();
    std::vector<FlatParams> params;
    for (std::size_t i = 0; i < branches; ++i) params.push_back({layout, take(per)});
    std::vector<OptimizerState> states;
    for (std::size_t i = 0; i < branches; ++i) {
      OptimizerState s{opt, steps[i], {}, {}};
      if (opt.kind == OptimizerKind::kAdam) {
        s.first_moment = take(per);
        s.second_moment = take(per);
      }
      states.push_back(std::move(s));
    }

    const json& init = manifest.at("init");
    ParameterBank bank(layout, std::move(params), std::move(states),
                       parse_init_mode(detail::require<std::string>(init, "mode", "manifest.init")),
                       init.at("seed").get<std::uint64_t>());
    std::optional<ConditionArray> conditions;
    if (manifest.contains("conditions") && !manifest.at("conditions").is_null()) {
      conditions = detail::conditions_from_json(manifest.at("conditions"),
                                                "manifest.conditions", true);
      if (conditions->branch_count() != branches)
        throw FormatError("manifest.conditions: branch count disagrees with bank");
    }
    return {std::move(bank), std::move(conditions)};
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError("invalid bank manifest: " + std::string(e.what()));
  } catch (const json::exception& e) {
    throw FormatError("invalid bank manifest: " + std::string(e.what()));
  }
}

ParameterBank load_bank(const std::filesystem::path& path) {
  return load_bank_file(path).bank;
}

}  // namespace lactose
