#ifndef ANDANA_DIRECTORY_HPP
#define ANDANA_DIRECTORY_HPP

#include "andana/packets.hpp"

#include <map>

namespace andana {

class InvalidDescriptor : public Error
{
public:
  using Error::Error;
};

class UnknownAR : public Error
{
public:
  using Error::Error;
};

/// Short-lived encryption key certified by an AR's long-lived signing key.
struct EncryptionCertificate
{
  crypto::PublicKey pk;
  SimTime notAfter = 0;
  Bytes signature;

  /// Bytes covered by the signature: PUBLICKEY TLV ‖ NOTAFTER TLV.
  Bytes
  signedPortion() const;

  bool
  isLive(SimTime now) const
  {
    return now < notAfter;
  }

  friend bool
  operator==(const EncryptionCertificate&, const EncryptionCertificate&) = default;
};

EncryptionCertificate
certifyEncryptionKey(const crypto::PrivateKey& signingKey, const crypto::PublicKey& encryptionKey,
                     SimTime notAfter, RandomSource& rng);

bool
verifyCertificate(const EncryptionCertificate& cert, const crypto::PublicKey& signingKey);

/// What an AR advertises: identity, keys and load statistics.
struct ARDescriptor
{
  Name ns;
  std::string organization;
  crypto::PublicKey signingKey;
  crypto::Digest signingFingerprint{};
  std::vector<EncryptionCertificate> certificates;
  std::uint64_t bandwidth = 0; // bytes/s
  double avgLoad = 0.0;        // 0..1, carried in parts per million on the wire
  SimTime uptime = 0;

  /// Live certificate with the latest expiry, or nullptr.
  const EncryptionCertificate*
  currentCertificate(SimTime now) const;

  /// Throws InvalidDescriptor if the fingerprint or any certificate does not check out.
  void
  validate() const;

  Bytes
  encode() const;

  static ARDescriptor
  decode(ByteView wire);

  friend bool
  operator==(const ARDescriptor&, const ARDescriptor&) = default;
};

/// Prefix of the names under which a directory serves its snapshot.
Name
directoryPrefix();

/**
 * @brief Centralized registry of AR descriptors.
 *
 * Listings drop expired encryption certificates and omit ARs left with none.
 */
class Directory
{
public:
  /// Adds or replaces the descriptor for `desc.ns`. Throws InvalidDescriptor.
  void
  registerAr(ARDescriptor desc);

  std::vector<ARDescriptor>
  listArs(SimTime now) const;

  /// Throws UnknownAR.
  ARDescriptor
  lookup(const Name& ns, SimTime now) const;

  std::size_t
  size() const
  {
    return m_ars.size();
  }

  /// Snapshot file: concatenated DESCRIPTOR TLVs.
  Bytes
  encodeSnapshot() const;

  static Directory
  decodeSnapshot(ByteView wire);

  /// Signed Data packet carrying the live listing, named /andana/directory/snapshot/<version>.
  Data
  publish(const crypto::PrivateKey& signingKey, std::uint64_t version, SimTime now, RandomSource& rng) const;

  /// Parses a published listing after checking its signature. Throws InvalidDescriptor.
  static std::vector<ARDescriptor>
  parsePublished(const Data& data, const crypto::PublicKey& directoryKey);

private:
  static ARDescriptor
  filtered(const ARDescriptor& d, SimTime now);

private:
  std::map<Name, ARDescriptor> m_ars;
};

} // namespace andana

#endif // ANDANA_DIRECTORY_HPP
