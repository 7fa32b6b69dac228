#ifndef ANDANA_ONION_HPP
#define ANDANA_ONION_HPP

#include "andana/packets.hpp"

namespace andana::onion {

/// Layer plaintexts are zero-padded to a multiple of this many bytes.
constexpr std::size_t kPadClass = 256;
constexpr std::size_t kSidSize = 16;
constexpr std::string_view kCreateSession = "createsession";

/// A layer that points at a further encrypted layer held by another AR.
struct Relay
{
  Name next; // includes the next AR's cleartext sid for session legs
  Bytes ciphertext;

  friend bool
  operator==(const Relay&, const Relay&) = default;
};

/**
 * @brief Decrypted content of one onion layer.
 *
 * Wire form: (NAME ‖ CIPHERTEXT | INTEREST) ‖ KEY(16) ‖ TIMESTAMP(8, BE ms) ‖ zero PAD.
 * An innermost layer carries the original interest; the first TLV type tells the two apart.
 */
struct Layer
{
  std::variant<Relay, Interest> next;
  crypto::SymmetricKey key;
  std::uint64_t timestampMs = 0;

  bool
  isInnermost() const
  {
    return std::holds_alternative<Interest>(next);
  }

  friend bool
  operator==(const Layer&, const Layer&) = default;
};

Bytes
encodeLayer(const Layer& layer);

/// Throws MalformedPacket.
Layer
decodeLayer(ByteView plaintext);

/// Name of the interest an AR forwards for a relay layer.
Name
relayName(const Relay& r);

inline std::uint64_t
toMillis(SimTime t)
{
  return static_cast<std::uint64_t>(t / kMicrosPerMilli);
}

} // namespace andana::onion

#endif // ANDANA_ONION_HPP
