// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ordrm::rng {

// Algorithm identifier recorded in dataset metadata. Datasets are
// reproducible from (seed, purpose, index) alone.
inline constexpr const char* kAlgorithmId = "philox4x32-10/polar-gauss";

// One block of the Philox4x32-10 counter-based generator (Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Independent stream domains so the same (seed, index) never produces
// correlated draws across uses.
enum class Purpose : std::uint64_t {
  kFeatures = 1,
  kNoise = 2,
  kInit = 3,
  kShuffle = 4,
  kGeneric = 5,
};

// A deterministic random stream keyed by (seed, purpose, index). The key
// holds the seed; the counter holds the stream id and a block index, so
// per-example streams can be drawn in any order (and in parallel) while
// producing output independent of thread count.
class Stream {
 public:
  Stream(std::uint64_t seed, Purpose purpose, std::uint64_t index);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double next_unit();
  // Standard normal via the Marsaglia polar method.
  double next_gauss();
  // Uniform integer in [0, n), rejection-sampled (n >= 1).
  std::uint64_t next_below(std::uint64_t n);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool has_spare_gauss_ = false;
  double spare_gauss_ = 0.0;
};

// Fisher-Yates shuffle driven by an explicit stream.
template <typename T>
void shuffle(std::vector<T>& values, Stream& stream) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(stream.next_below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace ordrm::rng
