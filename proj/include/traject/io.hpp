// Copyright (c) 2026, The traject Authors
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

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "traject/error.hpp"
#include "traject/parallel.hpp"
#include "traject/projection.hpp"
#include "traject/types.hpp"

// Binary layouts (all integers and floats little-endian):
//
//   TRJB  "TRJB" u16:version u32:S u32:L u32:D  then S*L*D float32, row-major
//   RACT  "RACT" u16:version u32:L u32:T u32:D u32:K_h
//         then L*T*D float32 hidden states, L*K_h*T float32 attention rows,
//         then u32:n followed by n bytes of UTF-8 sample id
//
// A manifest is JSON Lines, one {"sample_id": ..., "path": ...} object per
// line. Relative paths resolve against the manifest's directory.

namespace traject::io {

static_assert(std::numeric_limits<float>::is_iec559, "float32 payloads require IEEE-754 floats");

inline constexpr std::array<char, 4> kTrajectoryMagic{'T', 'R', 'J', 'B'};
inline constexpr std::array<char, 4> kActivationMagic{'R', 'A', 'C', 'T'};
inline constexpr std::uint16_t kFormatVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void magic(const std::array<char, 4>& m) {
    for (char c : m) bytes_.push_back(static_cast<std::uint8_t>(c));
  }
  void u16(std::uint16_t v) {
    bytes_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) bytes_.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
  }
  void f32(double v) {
    const auto f = static_cast<float>(v);
    require(std::isfinite(f), ErrorKind::data, "value " + std::to_string(v) + " is not representable as float32");
    u32(std::bit_cast<std::uint32_t>(f));
  }
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  [[noreturn]] void error(const std::string& what, std::size_t at) const {
    fail(ErrorKind::format, source_ + ": " + what + " at byte offset " + std::to_string(at));
  }

  void expect_magic(const std::array<char, 4>& m) {
    if (remaining() < 4 || std::memcmp(bytes_.data(), m.data(), 4) != 0)
      error("bad magic number, expected '" + std::string(m.begin(), m.end()) + "'", 0);
    pos_ = 4;
  }
  std::uint16_t u16(std::string_view field) {
    need(2, field);
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(std::string_view field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f32_unchecked() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return static_cast<double>(std::bit_cast<float>(v));
  }

  // Reads rows * cols float32 values, reporting truncation in whole rows.
  std::vector<double> f32_block(std::size_t rows, std::size_t cols, std::string_view what) {
    const std::size_t row_bytes = cols * 4;
    if (remaining() < rows * row_bytes) {
      error("truncated " + std::string(what) + ": expected " + std::to_string(rows) + " rows of " +
                std::to_string(cols) + " float32, found " + std::to_string(remaining() / row_bytes),
            pos_ + (remaining() / row_bytes) * row_bytes);
    }
    std::vector<double> out(rows * cols);
    for (auto& v : out) {
      v = f32_unchecked();
      if (!std::isfinite(v)) {
        fail(ErrorKind::data, source_ + ": non-finite float in " + std::string(what) + " at byte offset " +
                                  std::to_string(pos_ - 4));
      }
    }
    return out;
  }
  std::string utf8(std::size_t n, std::string_view field) {
    need(n, field);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void expect_end() const {
    if (remaining() != 0)
      error("shape-header inconsistency: " + std::to_string(remaining()) + " trailing byte(s) after payload", pos_);
  }

 private:
  void need(std::size_t n, std::string_view field) const {
    if (remaining() < n) error("truncated while reading " + std::string(field), pos_);
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::string source_;
};

inline std::uint32_t checked_u32(std::size_t v, std::string_view field) {
  require(v <= std::numeric_limits<std::uint32_t>::max(), ErrorKind::usage,
          std::string(field) + " exceeds the u32 range of the file header");
  return static_cast<std::uint32_t>(v);
}

inline void check_version(ByteReader& in) {
  const std::size_t at = in.offset();
  const auto version = in.u16("format version");
  if (version != kFormatVersion) in.error("unsupported format version " + std::to_string(version), at);
}

}  // namespace detail

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::io, "write to '" + path.string() + "' failed");
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

// ---- TRJB ------------------------------------------------------------------

inline std::vector<std::uint8_t> encode_trajectories(std::span<const Trajectory> trajectories) {
  require(!trajectories.empty(), ErrorKind::usage, "cannot encode an empty trajectory bundle");
  const std::size_t L = trajectories.front().size();
  const std::size_t D = trajectories.front().dim();
  for (const auto& t : trajectories)
    require(t.size() == L && t.dim() == D, ErrorKind::usage, "all trajectories in a bundle must share L and D");

  detail::ByteWriter out;
  out.magic(kTrajectoryMagic);
  out.u16(kFormatVersion);
  out.u32(detail::checked_u32(trajectories.size(), "S"));
  out.u32(detail::checked_u32(L, "L"));
  out.u32(detail::checked_u32(D, "D"));
  for (const auto& t : trajectories)
    for (double v : t.coords()) out.f32(v);
  return out.bytes();
}

inline std::vector<Trajectory> decode_trajectories(std::span<const std::uint8_t> bytes, const std::string& source) {
  detail::ByteReader in(bytes, source);
  in.expect_magic(kTrajectoryMagic);
  detail::check_version(in);
  const std::size_t header_at = in.offset();
  const std::size_t S = in.u32("header S");
  const std::size_t L = in.u32("header L");
  const std::size_t D = in.u32("header D");
  if (S == 0 || L < 2 || D == 0) {
    in.error("invalid header {S=" + std::to_string(S) + ", L=" + std::to_string(L) + ", D=" + std::to_string(D) +
                 "}; need S>=1, L>=2, D>=1",
             header_at);
  }
  auto values = in.f32_block(S * L, D, "trajectory payload");
  in.expect_end();

  std::vector<Trajectory> out;
  out.reserve(S);
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<double> coords(values.begin() + static_cast<std::ptrdiff_t>(s * L * D),
                               values.begin() + static_cast<std::ptrdiff_t>((s + 1) * L * D));
    out.emplace_back(L, D, std::move(coords), "sample_" + std::to_string(s));
  }
  return out;
}

inline void save_trajectories(std::span<const Trajectory> trajectories, const std::filesystem::path& path) {
  write_file(path, encode_trajectories(trajectories));
}

inline void save_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  save_trajectories(std::span(&trajectory, 1), path);
}

inline std::vector<Trajectory> load_trajectories(const std::filesystem::path& path) {
  return decode_trajectories(read_file(path), path.string());
}

// ---- RACT ------------------------------------------------------------------

inline std::vector<std::uint8_t> encode_bundle(const RawActivationBundle& bundle) {
  detail::ByteWriter out;
  out.magic(kActivationMagic);
  out.u16(kFormatVersion);
  out.u32(detail::checked_u32(bundle.num_layers(), "L"));
  out.u32(detail::checked_u32(bundle.num_tokens(), "T"));
  out.u32(detail::checked_u32(bundle.dim(), "D"));
  out.u32(detail::checked_u32(bundle.num_heads(), "K_h"));
  for (double v : bundle.hidden_block()) out.f32(v);
  for (double v : bundle.attention_block()) out.f32(v);
  out.u32(detail::checked_u32(bundle.sample_id().size(), "sample id length"));
  out.raw(bundle.sample_id());
  return out.bytes();
}

inline RawActivationBundle decode_bundle(std::span<const std::uint8_t> bytes, const std::string& source) {
  detail::ByteReader in(bytes, source);
  in.expect_magic(kActivationMagic);
  detail::check_version(in);
  const std::size_t header_at = in.offset();
  const std::size_t L = in.u32("header L");
  const std::size_t T = in.u32("header T");
  const std::size_t D = in.u32("header D");
  const std::size_t K = in.u32("header K_h");
  if (L == 0 || T == 0 || D == 0 || K == 0) {
    in.error("invalid header {L=" + std::to_string(L) + ", T=" + std::to_string(T) + ", D=" + std::to_string(D) +
                 ", K_h=" + std::to_string(K) + "}; all must be >= 1",
             header_at);
  }
  auto hidden = in.f32_block(L * T, D, "hidden block");
  auto attn = in.f32_block(L * K, T, "attention block");
  const std::size_t id_len = in.u32("sample id length");
  auto sample_id = in.utf8(id_len, "sample id");
  in.expect_end();
  try {
    return RawActivationBundle(L, T, D, K, std::move(hidden), std::move(attn), std::move(sample_id));
  } catch (const Error& e) {
    fail(e.kind(), source + ": " + e.what());
  }
}

inline void save_bundle(const RawActivationBundle& bundle, const std::filesystem::path& path) {
  write_file(path, encode_bundle(bundle));
}

inline RawActivationBundle load_bundle(const std::filesystem::path& path) {
  return decode_bundle(read_file(path), path.string());
}

// ---- Manifest and ensembles -------------------------------------------------

struct ManifestEntry {
  std::string sample_id;
  std::filesystem::path path;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  /// Lines that carried an extractor error/warning record instead of a path.
  std::vector<std::string> skipped;
};

inline Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                               const std::string& source) {
  Manifest manifest;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where = source + " line " + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::format, where + ": " + e.what());
    }
    require(obj.is_object(), ErrorKind::format, where + ": expected a JSON object");
    if (!obj.contains("path")) {
      require(obj.contains("error") || obj.contains("warning"), ErrorKind::format,
              where + ": entry has neither \"path\" nor an error record");
      manifest.skipped.push_back(where + ": " + obj.dump());
      continue;
    }
    require(obj["path"].is_string(), ErrorKind::format, where + ": \"path\" must be a string");
    ManifestEntry entry;
    entry.path = obj["path"].get<std::string>();
    if (entry.path.is_relative()) entry.path = base_dir / entry.path;
    if (obj.contains("sample_id")) {
      require(obj["sample_id"].is_string(), ErrorKind::format, where + ": \"sample_id\" must be a string");
      entry.sample_id = obj["sample_id"].get<std::string>();
    } else {
      entry.sample_id = entry.path.stem().string();
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_manifest({reinterpret_cast<const char*>(bytes.data()), bytes.size()}, path.parent_path(),
                        path.string());
}

inline bool has_magic(std::span<const std::uint8_t> bytes, const std::array<char, 4>& magic) {
  return bytes.size() >= 4 && std::memcmp(bytes.data(), magic.data(), 4) == 0;
}

/// Loads the trajectories behind one file: a TRJB bundle yields its S
/// trajectories, a RACT file yields its attention-weighted projection.
inline std::vector<Trajectory> load_trajectories_any(const std::filesystem::path& path,
                                                     const std::string& sample_id = {}) {
  const auto bytes = read_file(path);
  if (has_magic(bytes, kTrajectoryMagic)) return decode_trajectories(bytes, path.string());
  if (has_magic(bytes, kActivationMagic)) {
    auto bundle = decode_bundle(bytes, path.string());
    std::vector<Trajectory> out;
    try {
      auto t = project_attention_weighted(bundle);
      out.emplace_back(t.size(), t.dim(), std::vector<double>(t.coords().begin(), t.coords().end()),
                       sample_id.empty() ? bundle.sample_id() : sample_id);
    } catch (const Error& e) {
      fail(e.kind(), path.string() + ": " + e.what());
    }
    return out;
  }
  fail(ErrorKind::format, path.string() + ": bad magic number, expected 'TRJB' or 'RACT' at byte offset 0");
}

/// Builds an ensemble from any mix of TRJB bundles, RACT files and JSONL
/// manifests of those. Files are decoded (and RACT files projected) in
/// parallel; a sample whose L or D disagrees with the first is reported with
/// both file names.
inline TrajectoryEnsemble load_ensemble(std::span<const std::filesystem::path> inputs) {
  require(!inputs.empty(), ErrorKind::usage, "no input files given");
  std::vector<ManifestEntry> sources;
  for (const auto& input : inputs) {
    const auto head = read_file(input);
    if (has_magic(head, kTrajectoryMagic) || has_magic(head, kActivationMagic)) {
      sources.push_back({{}, input});
      continue;
    }
    const auto manifest = parse_manifest({reinterpret_cast<const char*>(head.data()), head.size()},
                                         input.parent_path(), input.string());
    require(!manifest.entries.empty(), ErrorKind::format, input.string() + ": manifest lists no samples");
    sources.insert(sources.end(), manifest.entries.begin(), manifest.entries.end());
  }

  std::vector<std::vector<Trajectory>> loaded(sources.size());
  parallel_for(sources.size(),
               [&](std::size_t i) { loaded[i] = load_trajectories_any(sources[i].path, sources[i].sample_id); });

  std::vector<Trajectory> all;
  const Trajectory& ref = loaded.front().front();
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    for (auto& t : loaded[i]) {
      if (t.size() != ref.size() || t.dim() != ref.dim()) {
        fail(ErrorKind::format, "dimension agreement violated: '" + sources[i].path.string() + "' has L=" +
                                    std::to_string(t.size()) + " D=" + std::to_string(t.dim()) + ", expected L=" +
                                    std::to_string(ref.size()) + " D=" + std::to_string(ref.dim()) + " as in '" +
                                    sources[0].path.string() + "'");
      }
      all.push_back(std::move(t));
    }
  }
  return TrajectoryEnsemble(std::move(all));
}

inline TrajectoryEnsemble load_ensemble(const std::filesystem::path& path) {
  return load_ensemble(std::span(&path, 1));
}

}  // namespace traject::io
