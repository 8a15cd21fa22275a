// SPDX-License-Identifier: Apache-2.0
#include "oplearn/rng.hpp"

#include <vector>

namespace oplearn {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::span<const std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (key.size() + 2));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  // Key length is mixed in so (s, [0]) and (s, [0, 0]) differ.
  push(key.size());
  for (auto k : key) push(k);
  return std::seed_seq(words.begin(), words.end());
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::span<const std::uint64_t> stream_key) {
  auto seq = make_seed_seq(seed, stream_key);
  engine_.seed(seq);
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t key[] = {stream};
  return Rng(seed, key);
}

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream_key) {
  return Rng(seed, std::span<const std::uint64_t>(stream_key.begin(), stream_key.size()));
}

}  // namespace oplearn
