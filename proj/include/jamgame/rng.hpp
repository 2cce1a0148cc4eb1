#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace jamgame {

// Seedable, splittable generator. Substreams are derived from the parent
// seed and a name, so adding a consumer never shifts another one's draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }
  Rng substream(std::string_view name) const;
  Rng substream(std::uint64_t id) const;

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Index drawn from a probability vector by inverse CDF.
  std::size_t sample(std::span<const double> probs);

  std::mt19937_64& engine() { return engine_; }

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace jamgame
