#include "andana/consumer.hpp"
#include "andana/tlv.hpp"

#include <algorithm>

namespace andana {

namespace {

const crypto::PublicKey&
liveKey(const ARDescriptor& ar, SimTime now)
{
  const auto* cert = ar.currentCertificate(now);
  if (cert == nullptr) {
    throw NoEligiblePair("AR " + ar.ns.toUri() + " has no live encryption key");
  }
  return cert->pk;
}

// Encrypts one layer for `ar` and returns the name the layer travels under.
Name
wrapLayer(const ARDescriptor& ar, const SessionState* session, const onion::Layer& layer, SimTime now,
          RandomSource& rng)
{
  Bytes pt = onion::encodeLayer(layer);
  Name base = ar.ns;
  Bytes ct;
  if (session != nullptr) {
    if (!session->isLive(now)) {
      throw SessionExpired("session with " + ar.ns.toUri() + " has expired");
    }
    if (session->ar.ns != ar.ns) {
      throw SessionExpired("session belongs to " + session->ar.ns.toUri() + ", not " + ar.ns.toUri());
    }
    ct = crypto::symEncrypt(session->sharedKey, pt, rng);
    base = base.append(ByteView(session->sid));
  }
  else {
    if (pt.size() > crypto::kMaxPkePlaintext) {
      throw InteriorTooLarge("layer plaintext exceeds the encryption bound");
    }
    ct = crypto::pkeEncrypt(liveKey(ar, now), pt, rng);
  }
  if (ct.size() > Name::kMaxComponentSize) {
    throw InteriorTooLarge("encrypted layer does not fit in a name component");
  }
  return base.append(ByteView(ct));
}

Bytes
handshakePayload(HandshakeMode mode, ByteView clientValue, const Bytes* wrappedKey, const Bytes* sid)
{
  Bytes out;
  Bytes m{static_cast<std::uint8_t>(mode)};
  tlv::writeElement(out, tlv::HandshakeMode, m);
  tlv::writeElement(out, tlv::ClientValue, clientValue);
  if (wrappedKey != nullptr) {
    tlv::writeElement(out, tlv::WrappedKey, *wrappedKey);
  }
  if (sid != nullptr) {
    tlv::writeElement(out, tlv::SessionId, *sid);
  }
  return out;
}

} // namespace

bool
eligiblePair(const ARDescriptor& a, const ARDescriptor& b)
{
  return a.ns != b.ns && a.organization != b.organization && !a.ns.isPrefixOf(b.ns) && !b.ns.isPrefixOf(a.ns);
}

std::vector<std::pair<std::size_t, std::size_t>>
eligiblePairs(std::span<const ARDescriptor> ars, SimTime now)
{
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < ars.size(); ++i) {
    for (std::size_t j = 0; j < ars.size(); ++j) {
      if (i != j && ars[i].currentCertificate(now) && ars[j].currentCertificate(now) &&
          eligiblePair(ars[i], ars[j])) {
        out.emplace_back(i, j);
      }
    }
  }
  return out;
}

EphemeralCircuit
selectCircuit(std::span<const ARDescriptor> ars, RandomSource& rng, SimTime now, unsigned maxInterests)
{
  if (maxInterests < 1 || maxInterests > kMaxInterestsPerCircuit) {
    throw Error("max interests per circuit must be in 1..4");
  }
  if (eligiblePairs(ars, now).empty()) {
    throw NoEligiblePair("no two ARs satisfy the circuit constraints");
  }
  // Draw both ends independently and start over on a violation.
  std::size_t i = 0, j = 0;
  do {
    i = rng.uniform(ars.size());
    j = rng.uniform(ars.size());
  } while (i == j || !ars[i].currentCertificate(now) || !ars[j].currentCertificate(now) ||
           !eligiblePair(ars[i], ars[j]));

  EphemeralCircuit c;
  c.entry = ars[i];
  c.exit = ars[j];
  c.k1 = crypto::SymmetricKey::generate(rng);
  c.k2 = crypto::SymmetricKey::generate(rng);
  c.createdAt = now;
  c.maxInterests = maxInterests;
  return c;
}

Interest
encryptInterest(EphemeralCircuit& circuit, const SessionState* entrySession, const SessionState* exitSession,
                const Interest& interest, SimTime now, SimTime rttEstimate, RandomSource& rng)
{
  if (circuit.exhausted()) {
    throw CircuitExhausted("circuit already carried its interests");
  }
  auto ts = onion::toMillis(now);

  onion::Layer inner{interest, circuit.k2, ts + onion::toMillis(rttEstimate) / 2};
  Name innerName = wrapLayer(circuit.exit, exitSession, inner, now, rng);

  // The exit layer's name splits into the routable prefix and the trailing ciphertext.
  onion::Relay relay{innerName.getPrefix(innerName.size() - 1), innerName.back()};
  onion::Layer outer{std::move(relay), circuit.k1, ts};
  Name outerName = wrapLayer(circuit.entry, entrySession, outer, now, rng);

  circuit.entryMode = entrySession ? LegMode::Session : LegMode::Asymmetric;
  circuit.exitMode = exitSession ? LegMode::Session : LegMode::Asymmetric;
  ++circuit.usedCount;
  circuit.issued.push_back(outerName);
  return Interest(std::move(outerName));
}

Interest
encryptInterestAsymmetric(EphemeralCircuit& circuit, const Interest& interest, SimTime now,
                          SimTime rttEstimate, RandomSource& rng)
{
  return encryptInterest(circuit, nullptr, nullptr, interest, now, rttEstimate, rng);
}

Interest
encryptInterestSession(EphemeralCircuit& circuit, const SessionState& entry, const SessionState& exit,
                       const Interest& interest, SimTime now, SimTime rttEstimate, RandomSource& rng)
{
  return encryptInterest(circuit, &entry, &exit, interest, now, rttEstimate, rng);
}

Data
decapsulateContent(const EphemeralCircuit& circuit, const Data& fromEntry, const crypto::PublicKey& producerPk)
{
  if (std::find(circuit.issued.begin(), circuit.issued.end(), fromEntry.name) == circuit.issued.end()) {
    throw UnexpectedContent("content does not answer an interest issued on this circuit");
  }
  // The entry AR's signature is discarded unchecked.
  Bytes exitCt = crypto::symDecrypt(circuit.k1, fromEntry.payload);
  Bytes wire = crypto::symDecrypt(circuit.k2, exitCt);
  Data original;
  try {
    original = decodeData(wire);
  }
  catch (const MalformedPacket&) {
    throw crypto::DecryptionFailed();
  }
  if (!verifyData(original, producerPk)) {
    throw ProducerSignatureInvalid("producer signature does not verify for " + original.name.toUri());
  }
  return original;
}

PendingHandshake
beginSession(const ARDescriptor& ar, HandshakeMode mode, SimTime now, RandomSource& rng,
             std::optional<Bytes> proposedSid)
{
  PendingHandshake p;
  p.ar = ar;
  p.mode = mode;
  const Bytes* sid = proposedSid ? &*proposedSid : nullptr;
  Bytes payload;
  if (mode == HandshakeMode::Dh) {
    p.dh = crypto::dhKeygen(rng);
    payload = handshakePayload(mode, p.dh->publicValue, nullptr, sid);
  }
  else if (mode == HandshakeMode::Wrap) {
    p.wrapped = crypto::SymmetricKey::generate(rng);
    Bytes wrapped = crypto::pkeEncrypt(liveKey(ar, now), p.wrapped->bytes(), rng);
    Bytes nonce = rng.bytes(16);
    payload = handshakePayload(mode, nonce, &wrapped, sid);
  }
  else {
    throw Error("invalid handshake mode");
  }
  p.interest = Interest(ar.ns.append(onion::kCreateSession).append(ByteView(payload)));
  return p;
}

SessionState
completeSession(const PendingHandshake& pending, const Data& response, SimTime now, SimTime lifetime)
{
  if (response.name != pending.interest.name) {
    throw HandshakeFailed("response name does not match the createsession interest");
  }
  if (!verifyData(response, pending.ar.signingKey)) {
    throw HandshakeFailed("createsession response not signed by " + pending.ar.ns.toUri());
  }
  SessionState s;
  s.ar = pending.ar;
  s.establishedAt = now;
  s.expiresAt = now + lifetime;
  try {
    tlv::Reader r(response.payload);
    if (auto mode = r.readOptional(tlv::HandshakeMode)) {
      throw HandshakeFailed("AR rejected the handshake");
    }
    auto sid = r.expect(tlv::SessionId).value;
    if (sid.size() != onion::kSidSize) {
      throw HandshakeFailed("session identifier has the wrong length");
    }
    s.sid.assign(sid.begin(), sid.end());
    if (pending.mode == HandshakeMode::Dh) {
      s.sharedKey = crypto::dhAgree(pending.dh->secret, r.expect(tlv::ServerValue).value);
    }
    else {
      s.sharedKey = *pending.wrapped;
    }
    if (!r.atEnd()) {
      throw HandshakeFailed("trailing bytes in createsession response");
    }
  }
  catch (const tlv::DecodeError& e) {
    throw HandshakeFailed(std::string("malformed createsession response: ") + e.what());
  }
  catch (const crypto::InvalidPublicValue& e) {
    throw HandshakeFailed(std::string("bad server value: ") + e.what());
  }
  return s;
}

} // namespace andana
