#ifndef ANDANA_ROUTER_HPP
#define ANDANA_ROUTER_HPP

#include "andana/consumer.hpp"
#include "andana/forwarder.hpp"
#include "andana/random.hpp"

#include <map>

namespace andana {

enum class RejectReason : std::uint8_t {
  BadDecryption,
  StaleTimestamp,
  UnknownSession,
  ExitPolicy,
};

std::string_view
toString(RejectReason r);

struct Forward
{
  Interest inner;
};

struct Reject
{
  RejectReason reason;
};

using InterestVerdict = std::variant<Forward, Reject>;

struct RouterConfig
{
  Name ns;
  std::string organization;
  /// Accepted half-width around the current time for layer timestamps.
  SimTime window = millis(2000);
  SimTime keyLifetime = millis(3'600'000);
  SimTime gracePeriod = millis(10'000);
  SimTime sessionLifetime = kDefaultSessionLifetime;
  /// Pending tuples older than this are dropped, matching the PIT lifetime.
  SimTime pendingTimeout = kDefaultPitLifetime;
  /// Content rate the AR expects to relay (bytes/s) and the cache bytes set aside for replays.
  std::uint64_t expectedRate = 0;
  std::uint64_t cacheReservation = 0;
  /// Name prefixes the AR refuses to fetch when acting as exit.
  std::vector<Name> exitDenyList;
  std::size_t keyBits = 1024;
  std::uint64_t bandwidth = 125'000'000;
  double avgLoad = 0.0;
};

/// Per-tuple state kept between an inner interest going out and its content coming back.
struct PendingTuple
{
  Interest outer;
  Interest inner;
  crypto::SymmetricKey key;
  bool innerEncrypted = false; // entry role: the returning content is wrapped by the next AR
  SimTime createdAt = 0;
};

/// Counts of the work done, so a simulator can charge CPU time for it.
struct RouterStats
{
  std::uint64_t forwarded = 0;
  std::uint64_t rejected = 0;
  std::uint64_t pkeDecryptions = 0;
  std::uint64_t symDecryptedBytes = 0;
  std::uint64_t symEncryptedBytes = 0;
  std::uint64_t signatures = 0;
  std::uint64_t dhAgreements = 0;
  std::uint64_t sessionsCreated = 0;
  std::uint64_t contentWrapped = 0;
  std::uint64_t contentDropped = 0;
};

/**
 * @brief Anonymizing router state machine.
 *
 * Sits behind its node's forwarder as an application registered for the AR
 * namespace. The forwarder's PIT and content store absorb duplicates and replays.
 */
class AnonymizingRouter
{
public:
  /// Generates the signing key and the first encryption key from `seed`.
  /// Throws ConfigError if the cache reservation is below rate × window.
  AnonymizingRouter(RouterConfig config, std::uint64_t seed, SimTime now);

  const RouterConfig&
  config() const
  {
    return m_config;
  }

  const Name&
  ns() const
  {
    return m_config.ns;
  }

  const crypto::PublicKey&
  signingKey() const
  {
    return m_signing.pk;
  }

  /// Descriptor advertising every non-retired encryption key.
  ARDescriptor
  descriptor(SimTime now) const;

  bool
  isCreateSession(const Name& name) const;

  InterestVerdict
  handleEncryptedInterest(const Interest& eint, SimTime now);

  /// Wraps content for every pending tuple it answers. Empty if none (dropped).
  std::vector<Data>
  handleReturningContent(const Data& data, SimTime now);

  EncryptionCertificate
  rotateEncryptionKey(SimTime now);

  Data
  handleCreateSession(const Interest& interest, SimTime now);

  /// Decrypts without touching state; what an adversary holding this AR's keys can read.
  std::optional<onion::Layer>
  peel(const Name& name, SimTime now) const;

  void
  expirePending(SimTime now);

  std::size_t
  pendingCount() const
  {
    return m_pending.size();
  }

  const std::map<Name, PendingTuple>&
  pending() const
  {
    return m_pending;
  }

  std::size_t
  sessionCount() const
  {
    return m_sessions.size();
  }

  std::size_t
  encryptionKeyCount() const
  {
    return m_keys.size();
  }

  const RouterStats&
  stats() const
  {
    return m_stats;
  }

private:
  struct EncryptionKey
  {
    crypto::KeyPair pair;
    EncryptionCertificate cert;
    SimTime usableUntil = 0; // notAfter + grace, or rotation time + grace once retired
    bool retired = false;
  };

  struct Session
  {
    crypto::SymmetricKey key;
    SimTime expiresAt = 0;
  };

  void
  purgeKeys(SimTime now);

  std::optional<Bytes>
  pkeDecryptAny(ByteView ct, SimTime now) const;

  Data
  handshakeError(const Name& name);

  Data
  signedResponse(const Name& name, Bytes payload);

  void
  addKey(SimTime now);

private:
  RouterConfig m_config;
  DeterministicRng m_rng;
  crypto::KeyPair m_signing;
  std::vector<EncryptionKey> m_keys;
  std::map<Bytes, Session> m_sessions;
  std::map<Name, PendingTuple> m_pending;
  std::multimap<Name, Name> m_byInner;
  RouterStats m_stats;
  SimTime m_startedAt;
};

} // namespace andana

#endif // ANDANA_ROUTER_HPP
