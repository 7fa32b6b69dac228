#ifndef ANDANA_PACKETS_HPP
#define ANDANA_PACKETS_HPP

#include "andana/crypto.hpp"
#include "andana/name.hpp"

#include <optional>
#include <variant>

namespace andana {

class MalformedPacket : public Error
{
public:
  using Error::Error;
};

/// Interest packet. All four fields go on the wire; nothing else does.
struct Interest
{
  Name name;
  std::optional<std::uint8_t> scope;
  std::optional<Bytes> exclusionFilter;
  std::optional<Bytes> nonce;

  Interest() = default;

  explicit
  Interest(Name n)
    : name(std::move(n))
  {
  }

  friend bool
  operator==(const Interest&, const Interest&) = default;
};

constexpr std::uint64_t kDefaultFreshnessMs = 4000;

struct DataMetadata
{
  Name keyLocator;
  std::uint64_t freshnessMs = kDefaultFreshnessMs;
};

/// Content packet; the signature covers name, payload, signer, key locator and freshness.
struct Data
{
  Name name;
  Bytes payload;
  crypto::Digest signerId{};
  Name keyLocator;
  std::uint64_t freshnessMs = kDefaultFreshnessMs;
  Bytes signature;

  /// The exact bytes the signature is computed over.
  Bytes
  signedPortion() const;

  friend bool
  operator==(const Data&, const Data&) = default;
};

Bytes
encodeInterest(const Interest& interest);

/// Throws MalformedPacket, including on trailing bytes.
Interest
decodeInterest(ByteView wire);

Bytes
encodeData(const Data& data);

Data
decodeData(ByteView wire);

using Packet = std::variant<Interest, Data>;

Bytes
encodePacket(const Packet& pkt);

Packet
decodePacket(ByteView wire);

std::size_t
wireSize(const Packet& pkt);

const Name&
packetName(const Packet& pkt);

Data
signData(Name name, Bytes payload, const DataMetadata& meta, const crypto::PrivateKey& signingKey,
         RandomSource& rng);

bool
verifyData(const Data& data, const crypto::PublicKey& pk);

/// Data named X' satisfies an Interest for X iff X is a prefix of X'.
inline bool
satisfies(const Data& data, const Interest& interest)
{
  return interest.name.isPrefixOf(data.name);
}

} // namespace andana

#endif // ANDANA_PACKETS_HPP
