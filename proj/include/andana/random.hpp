#ifndef ANDANA_RANDOM_HPP
#define ANDANA_RANDOM_HPP

#include "andana/common.hpp"

#include <array>
#include <limits>

namespace andana {

/// Source of random bytes injected into every operation that needs randomness.
class RandomSource
{
public:
  using result_type = std::uint64_t;

  virtual ~RandomSource() = default;

  virtual void
  fill(std::span<std::uint8_t> out) = 0;

  Bytes
  bytes(std::size_t n)
  {
    Bytes b(n);
    fill(b);
    return b;
  }

  std::uint64_t
  nextU64();

  /// Uniform in [0, bound). `bound` must be nonzero.
  std::uint64_t
  uniform(std::uint64_t bound);

  // UniformRandomBitGenerator
  static constexpr result_type
  min()
  {
    return 0;
  }

  static constexpr result_type
  max()
  {
    return std::numeric_limits<result_type>::max();
  }

  result_type
  operator()()
  {
    return nextU64();
  }
};

/// ChaCha20 keystream keyed by SHA-256 of the seed. Same seed, same stream.
class DeterministicRng final : public RandomSource
{
public:
  explicit
  DeterministicRng(std::uint64_t seed);

  DeterministicRng(std::uint64_t seed, std::string_view label);

  void
  fill(std::span<std::uint8_t> out) override;

  /// Independent child stream, e.g. one per simulated node.
  DeterministicRng
  fork(std::string_view label);

private:
  void
  refill();

private:
  std::array<std::uint8_t, 32> m_key{};
  std::uint64_t m_counter = 0;
  std::array<std::uint8_t, 1024> m_block{};
  std::size_t m_used = 1024;
};

/// Operating-system entropy via OpenSSL.
class SystemRng final : public RandomSource
{
public:
  void
  fill(std::span<std::uint8_t> out) override;
};

} // namespace andana

#endif // ANDANA_RANDOM_HPP
