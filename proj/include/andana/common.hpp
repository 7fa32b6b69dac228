#ifndef ANDANA_COMMON_HPP
#define ANDANA_COMMON_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace andana {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Simulated time in microseconds.
using SimTime = std::int64_t;

constexpr SimTime kMicrosPerMilli = 1000;

constexpr SimTime
millis(std::int64_t ms)
{
  return ms * kMicrosPerMilli;
}

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or topology.
class ConfigError : public Error
{
public:
  using Error::Error;
};

inline Bytes
toBytes(std::string_view s)
{
  return Bytes(s.begin(), s.end());
}

inline void
append(Bytes& out, ByteView in)
{
  out.insert(out.end(), in.begin(), in.end());
}

inline void
appendU64(Bytes& out, std::uint64_t v)
{
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

inline std::uint64_t
readU64(ByteView in)
{
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    v = (v << 8) | in[i];
  }
  return v;
}

std::string
toHex(ByteView in);

} // namespace andana

#endif // ANDANA_COMMON_HPP
