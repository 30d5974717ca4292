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

// Writes the synthetic fixtures used by the test suites:
//
//   bend_bundle.trjb        S=8, L=36, D=16: straight tails, curved middle
//   ract/*.ract             6 activation samples, L=12 T=5 D=8 K_h=2, plus manifest.jsonl
//   single_token.ract       T=1 sample (projection must return the hidden states)
//   mixed_d/manifest.jsonl  two samples with different D
//
// Usage: make_fixtures <tests/data directory>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "traject/io.hpp"
#include "traject/types.hpp"

namespace fs = std::filesystem;
using namespace traject;

namespace {

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 rng_;
};

// Rounded to float32 so the checked-in files hold exactly these values.
double f32(double v) { return static_cast<double>(static_cast<float>(v)); }

Trajectory bend_sample(std::size_t s, Uniform& u) {
  constexpr std::size_t L = 36, D = 16;
  std::vector<double> coords(L * D);
  for (std::size_t l = 0; l < L; ++l) {
    double* z = coords.data() + l * D;
    z[0] = static_cast<double>(l);
    if (l >= 8 && l <= 28) {
      const double phase = static_cast<double>(l - 8) / 20.0;
      z[1] = 5.0 * std::sin(std::numbers::pi * phase);
      z[2] = 2.5 * std::sin(2.0 * std::numbers::pi * phase);
      z[3] = 1.5 * (1.0 - std::cos(2.0 * std::numbers::pi * phase));
    }
    for (std::size_t d = 0; d < D; ++d) z[d] = f32(z[d] + u(-0.05, 0.05));
  }
  return Trajectory(L, D, std::move(coords), "bend_" + std::to_string(s));
}

RawActivationBundle activation_sample(const std::string& id, std::size_t L, std::size_t T, std::size_t D,
                                      std::size_t K, Uniform& u) {
  std::vector<double> hidden(L * T * D);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t d = 0; d < D; ++d) {
        const double drift = d == 0 ? static_cast<double>(l) : (d == 1 ? std::sin(0.6 * static_cast<double>(l)) : 0.0);
        hidden[(l * T + t) * D + d] = f32(drift + u(-0.5, 0.5));
      }
  std::vector<double> attn(L * K * T);
  for (std::size_t row = 0; row < L * K; ++row) {
    double sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) sum += attn[row * T + t] = u(0.05, 1.0);
    for (std::size_t t = 0; t < T; ++t) attn[row * T + t] = f32(attn[row * T + t] / sum);
  }
  return RawActivationBundle(L, T, D, K, std::move(hidden), std::move(attn), id);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <output dir>\n";
    return 2;
  }
  const fs::path root = argv[1];
  Uniform u(20260115);

  std::vector<Trajectory> bend;
  for (std::size_t s = 0; s < 8; ++s) bend.push_back(bend_sample(s, u));
  io::save_trajectories(bend, root / "bend_bundle.trjb");

  std::string manifest;
  for (int s = 0; s < 6; ++s) {
    const std::string id = "sample_" + std::to_string(s);
    io::save_bundle(activation_sample(id, 12, 5, 8, 2, u), root / "ract" / (id + ".ract"));
    manifest += "{\"sample_id\": \"" + id + "\", \"path\": \"" + id + ".ract\"}\n";
  }
  manifest += "{\"sample_id\": \"sample_6\", \"error\": \"empty prompt, skipped\"}\n";
  io::write_text(root / "ract" / "manifest.jsonl", manifest);

  io::save_bundle(activation_sample("single", 4, 1, 6, 3, u), root / "single_token.ract");

  io::save_bundle(activation_sample("d8", 12, 5, 8, 2, u), root / "mixed_d" / "d8.ract");
  io::save_bundle(activation_sample("d6", 12, 5, 6, 2, u), root / "mixed_d" / "d6.ract");
  io::write_text(root / "mixed_d" / "manifest.jsonl",
                 "{\"sample_id\": \"d8\", \"path\": \"d8.ract\"}\n{\"sample_id\": \"d6\", \"path\": \"d6.ract\"}\n");

  std::cout << "fixtures written to " << root.string() << "\n";
  return 0;
}
