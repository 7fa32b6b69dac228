#ifndef ANDANA_CONSUMER_HPP
#define ANDANA_CONSUMER_HPP

#include "andana/directory.hpp"
#include "andana/onion.hpp"

namespace andana {

class NoEligiblePair : public Error
{
public:
  using Error::Error;
};

class InteriorTooLarge : public Error
{
public:
  using Error::Error;
};

class SessionExpired : public Error
{
public:
  using Error::Error;
};

class HandshakeFailed : public Error
{
public:
  using Error::Error;
};

class ProducerSignatureInvalid : public Error
{
public:
  using Error::Error;
};

class CircuitExhausted : public Error
{
public:
  using Error::Error;
};

class UnexpectedContent : public Error
{
public:
  using Error::Error;
};

enum class LegMode : std::uint8_t {
  Asymmetric,
  Session,
};

constexpr SimTime kDefaultSessionLifetime = millis(600'000);
constexpr unsigned kMaxInterestsPerCircuit = 4;

struct SessionState
{
  Bytes sid;
  crypto::SymmetricKey sharedKey;
  ARDescriptor ar;
  SimTime establishedAt = 0;
  SimTime expiresAt = 0;

  bool
  isLive(SimTime now) const
  {
    return now < expiresAt;
  }
};

/// Ordered (entry, exit) pair with the two return-path keys.
struct EphemeralCircuit
{
  ARDescriptor entry;
  ARDescriptor exit;
  crypto::SymmetricKey k1; // entry layer
  crypto::SymmetricKey k2; // exit layer
  SimTime createdAt = 0;
  LegMode entryMode = LegMode::Asymmetric;
  LegMode exitMode = LegMode::Asymmetric;
  unsigned usedCount = 0;
  unsigned maxInterests = 1;
  /// Outer names of the encrypted interests issued on this circuit.
  std::vector<Name> issued;

  bool
  exhausted() const
  {
    return usedCount >= maxInterests;
  }
};

/// Distinct ARs, distinct organizations, and neither namespace a prefix of the other.
bool
eligiblePair(const ARDescriptor& a, const ARDescriptor& b);

/// Every eligible ordered (entry, exit) index pair among ARs with a live key at `now`.
std::vector<std::pair<std::size_t, std::size_t>>
eligiblePairs(std::span<const ARDescriptor> ars, SimTime now);

/// Uniform over eligible ordered pairs; draws fresh k1, k2. Throws NoEligiblePair.
EphemeralCircuit
selectCircuit(std::span<const ARDescriptor> ars, RandomSource& rng, SimTime now, unsigned maxInterests = 1);

/// Both legs under the ARs' public encryption keys.
Interest
encryptInterestAsymmetric(EphemeralCircuit& circuit, const Interest& interest, SimTime now,
                          SimTime rttEstimate, RandomSource& rng);

/// Both legs under session keys, each prefixed by its cleartext sid. Throws SessionExpired.
Interest
encryptInterestSession(EphemeralCircuit& circuit, const SessionState& entry, const SessionState& exit,
                       const Interest& interest, SimTime now, SimTime rttEstimate, RandomSource& rng);

/**
 * General form: a null session pointer means that leg uses the AR's public key.
 * Inner timestamp is the outer one plus half the RTT estimate.
 */
Interest
encryptInterest(EphemeralCircuit& circuit, const SessionState* entrySession, const SessionState* exitSession,
                const Interest& interest, SimTime now, SimTime rttEstimate, RandomSource& rng);

/// Peels k1 then k2 and checks the producer signature.
Data
decapsulateContent(const EphemeralCircuit& circuit, const Data& fromEntry, const crypto::PublicKey& producerPk);

enum class HandshakeMode : std::uint8_t {
  Error = 0x00, // only in AR responses
  Dh = 0x01,
  Wrap = 0x02,
};

struct PendingHandshake
{
  ARDescriptor ar;
  HandshakeMode mode = HandshakeMode::Dh;
  Interest interest;
  std::optional<crypto::DhKeyPair> dh;
  std::optional<crypto::SymmetricKey> wrapped;
};

/// Builds the createsession interest: ns/createsession/<MODE ‖ CLIENT_VALUE [‖ WRAPPED_KEY] [‖ SESSION_ID]>.
PendingHandshake
beginSession(const ARDescriptor& ar, HandshakeMode mode, SimTime now, RandomSource& rng,
             std::optional<Bytes> proposedSid = std::nullopt);

/// Verifies the AR's signed response and derives the session key. Throws HandshakeFailed.
SessionState
completeSession(const PendingHandshake& pending, const Data& response, SimTime now,
                SimTime lifetime = kDefaultSessionLifetime);

/// Exponentially weighted RTT estimate.
class RttEstimator
{
public:
  static constexpr double kAlpha = 0.125;
  static constexpr SimTime kInitial = millis(200);

  SimTime
  estimate() const
  {
    return m_estimate;
  }

  void
  addSample(SimTime rtt)
  {
    m_estimate = static_cast<SimTime>((1.0 - kAlpha) * static_cast<double>(m_estimate) +
                                      kAlpha * static_cast<double>(rtt));
  }

private:
  SimTime m_estimate = kInitial;
};

} // namespace andana

#endif // ANDANA_CONSUMER_HPP
