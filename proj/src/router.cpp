#include "andana/router.hpp"
#include "andana/tlv.hpp"

namespace andana {

std::string_view
toString(RejectReason r)
{
  switch (r) {
  case RejectReason::BadDecryption: return "bad-decryption";
  case RejectReason::StaleTimestamp: return "stale-timestamp";
  case RejectReason::UnknownSession: return "unknown-session";
  case RejectReason::ExitPolicy: return "exit-policy";
  }
  return "?";
}

AnonymizingRouter::AnonymizingRouter(RouterConfig config, std::uint64_t seed, SimTime now)
  : m_config(std::move(config))
  , m_rng(seed, "ar" + m_config.ns.toUri())
  , m_startedAt(now)
{
  if (m_config.ns.empty()) {
    throw ConfigError("AR namespace must not be the root");
  }
  if (m_config.window <= 0) {
    throw ConfigError("timestamp window must be positive");
  }
  // rate (bytes/s) × window (µs), rounded up.
  auto needed = (static_cast<unsigned __int128>(m_config.expectedRate) * m_config.window + 999'999) / 1'000'000;
  if (m_config.cacheReservation < needed) {
    throw ConfigError("cache reservation " + std::to_string(m_config.cacheReservation) +
                      " bytes is below rate x window = " + std::to_string(static_cast<std::uint64_t>(needed)));
  }
  m_signing = crypto::generateKeyPair(crypto::KeyRole::Signing, m_rng, m_config.keyBits);
  addKey(now);
}

void
AnonymizingRouter::addKey(SimTime now)
{
  EncryptionKey k;
  SimTime notAfter = now + m_config.keyLifetime;
  k.pair = crypto::generateKeyPair(crypto::KeyRole::Encryption, m_rng, m_config.keyBits, notAfter);
  k.cert = certifyEncryptionKey(m_signing.sk, k.pair.pk, notAfter, m_rng);
  k.usableUntil = notAfter + m_config.gracePeriod;
  m_keys.push_back(std::move(k));
}

ARDescriptor
AnonymizingRouter::descriptor(SimTime now) const
{
  ARDescriptor d;
  d.ns = m_config.ns;
  d.organization = m_config.organization;
  d.signingKey = m_signing.pk;
  d.signingFingerprint = crypto::fingerprint(m_signing.pk);
  for (const auto& k : m_keys) {
    if (!k.retired) {
      d.certificates.push_back(k.cert);
    }
  }
  d.bandwidth = m_config.bandwidth;
  d.avgLoad = m_config.avgLoad;
  d.uptime = now - m_startedAt;
  return d;
}

bool
AnonymizingRouter::isCreateSession(const Name& name) const
{
  auto n = m_config.ns.size();
  return name.size() == n + 2 && m_config.ns.isPrefixOf(name) &&
         name[n] == toBytes(onion::kCreateSession);
}

void
AnonymizingRouter::purgeKeys(SimTime now)
{
  std::erase_if(m_keys, [now] (const EncryptionKey& k) { return now > k.usableUntil; });
}

std::optional<Bytes>
AnonymizingRouter::pkeDecryptAny(ByteView ct, SimTime now) const
{
  // Newest key first; retired keys still decrypt until their grace runs out.
  for (auto it = m_keys.rbegin(); it != m_keys.rend(); ++it) {
    if (now > it->usableUntil) {
      continue;
    }
    try {
      return crypto::pkeDecrypt(it->pair.sk, ct);
    }
    catch (const crypto::DecryptionFailed&) {
    }
  }
  return std::nullopt;
}

std::optional<onion::Layer>
AnonymizingRouter::peel(const Name& name, SimTime now) const
{
  auto n = m_config.ns.size();
  if (!m_config.ns.isPrefixOf(name) || isCreateSession(name)) {
    return std::nullopt;
  }
  std::optional<Bytes> pt;
  if (name.size() == n + 1) {
    pt = pkeDecryptAny(name.back(), now);
  }
  else if (name.size() == n + 2) {
    auto s = m_sessions.find(name[n]);
    if (s == m_sessions.end() || now >= s->second.expiresAt) {
      return std::nullopt;
    }
    try {
      pt = crypto::symDecrypt(s->second.key, name.back());
    }
    catch (const crypto::DecryptionFailed&) {
    }
  }
  if (!pt) {
    return std::nullopt;
  }
  try {
    return onion::decodeLayer(*pt);
  }
  catch (const MalformedPacket&) {
    return std::nullopt;
  }
}

InterestVerdict
AnonymizingRouter::handleEncryptedInterest(const Interest& eint, SimTime now)
{
  purgeKeys(now);
  auto reject = [this] (RejectReason r) {
    ++m_stats.rejected;
    return InterestVerdict{Reject{r}};
  };

  const Name& name = eint.name;
  auto n = m_config.ns.size();
  if (!m_config.ns.isPrefixOf(name) || isCreateSession(name)) {
    return reject(RejectReason::BadDecryption);
  }

  std::optional<Bytes> pt;
  if (name.size() == n + 1) {
    ++m_stats.pkeDecryptions;
    pt = pkeDecryptAny(name.back(), now);
  }
  else if (name.size() == n + 2) {
    auto s = m_sessions.find(name[n]);
    if (s != m_sessions.end() && now >= s->second.expiresAt) {
      m_sessions.erase(s);
      s = m_sessions.end();
    }
    if (s == m_sessions.end()) {
      return reject(RejectReason::UnknownSession);
    }
    m_stats.symDecryptedBytes += name.back().size();
    try {
      pt = crypto::symDecrypt(s->second.key, name.back());
    }
    catch (const crypto::DecryptionFailed&) {
    }
  }
  if (!pt) {
    return reject(RejectReason::BadDecryption);
  }

  onion::Layer layer;
  try {
    layer = onion::decodeLayer(*pt);
  }
  catch (const MalformedPacket&) {
    return reject(RejectReason::BadDecryption);
  }

  auto nowMs = static_cast<std::int64_t>(onion::toMillis(now));
  auto ts = static_cast<std::int64_t>(layer.timestampMs);
  if (ts - nowMs > m_config.window / kMicrosPerMilli || nowMs - ts > m_config.window / kMicrosPerMilli) {
    return reject(RejectReason::StaleTimestamp);
  }

  PendingTuple tuple;
  tuple.outer = eint;
  tuple.key = layer.key;
  tuple.createdAt = now;
  if (auto* relay = std::get_if<onion::Relay>(&layer.next)) {
    tuple.inner = Interest(onion::relayName(*relay));
    tuple.innerEncrypted = true;
  }
  else {
    tuple.inner = std::get<Interest>(layer.next);
    for (const auto& denied : m_config.exitDenyList) {
      if (denied.isPrefixOf(tuple.inner.name)) {
        return reject(RejectReason::ExitPolicy);
      }
    }
  }

  if (auto old = m_pending.find(name); old != m_pending.end()) {
    auto [lo, hi] = m_byInner.equal_range(old->second.inner.name);
    for (auto it = lo; it != hi; ++it) {
      if (it->second == name) {
        m_byInner.erase(it);
        break;
      }
    }
  }
  m_byInner.emplace(tuple.inner.name, name);
  Interest inner = tuple.inner;
  m_pending.insert_or_assign(name, std::move(tuple));
  ++m_stats.forwarded;
  return Forward{std::move(inner)};
}

std::vector<Data>
AnonymizingRouter::handleReturningContent(const Data& data, SimTime now)
{
  expirePending(now);
  std::vector<Name> outers;
  for (std::size_t len = 0; len <= data.name.size(); ++len) {
    auto [lo, hi] = m_byInner.equal_range(data.name.getPrefix(len));
    for (auto it = lo; it != hi; ++it) {
      outers.push_back(it->second);
    }
    m_byInner.erase(lo, hi);
  }
  if (outers.empty()) {
    ++m_stats.contentDropped;
    return {};
  }

  std::vector<Data> out;
  for (const auto& outerName : outers) {
    auto node = m_pending.extract(outerName);
    const PendingTuple& t = node.mapped();
    // Entry role strips the next AR's name and signature; exit role keeps the producer's Data whole.
    Bytes body = t.innerEncrypted ? data.payload : encodeData(data);
    m_stats.symEncryptedBytes += body.size();
    Bytes payload = crypto::symEncrypt(t.key, body, m_rng);
    ++m_stats.signatures;
    ++m_stats.contentWrapped;
    out.push_back(signData(t.outer.name, std::move(payload), {m_config.ns.append("KEY")}, m_signing.sk, m_rng));
  }
  return out;
}

void
AnonymizingRouter::expirePending(SimTime now)
{
  for (auto it = m_pending.begin(); it != m_pending.end();) {
    if (now - it->second.createdAt >= m_config.pendingTimeout) {
      auto [lo, hi] = m_byInner.equal_range(it->second.inner.name);
      for (auto j = lo; j != hi; ++j) {
        if (j->second == it->first) {
          m_byInner.erase(j);
          break;
        }
      }
      it = m_pending.erase(it);
    }
    else {
      ++it;
    }
  }
}

EncryptionCertificate
AnonymizingRouter::rotateEncryptionKey(SimTime now)
{
  purgeKeys(now);
  for (auto& k : m_keys) {
    if (!k.retired) {
      k.retired = true;
      k.usableUntil = std::min(k.usableUntil, now + m_config.gracePeriod);
    }
  }
  addKey(now);
  return m_keys.back().cert;
}

Data
AnonymizingRouter::signedResponse(const Name& name, Bytes payload)
{
  ++m_stats.signatures;
  // Short freshness: a cached response must not hand the same sid to a second consumer.
  return signData(name, std::move(payload), {m_config.ns.append("KEY"), 0}, m_signing.sk, m_rng);
}

Data
AnonymizingRouter::handshakeError(const Name& name)
{
  Bytes payload;
  Bytes m{static_cast<std::uint8_t>(HandshakeMode::Error)};
  tlv::writeElement(payload, tlv::HandshakeMode, m);
  return signedResponse(name, std::move(payload));
}

Data
AnonymizingRouter::handleCreateSession(const Interest& interest, SimTime now)
{
  purgeKeys(now);
  if (!isCreateSession(interest.name)) {
    return handshakeError(interest.name);
  }

  HandshakeMode mode;
  Bytes clientValue;
  std::optional<Bytes> wrapped;
  std::optional<Bytes> proposed;
  try {
    tlv::Reader r(interest.name.back());
    auto m = r.expect(tlv::HandshakeMode).value;
    if (m.size() != 1 || (m[0] != 0x01 && m[0] != 0x02)) {
      return handshakeError(interest.name);
    }
    mode = static_cast<HandshakeMode>(m[0]);
    auto cv = r.expect(tlv::ClientValue).value;
    clientValue.assign(cv.begin(), cv.end());
    if (auto w = r.readOptional(tlv::WrappedKey)) {
      wrapped.emplace(w->begin(), w->end());
    }
    if (auto s = r.readOptional(tlv::SessionId)) {
      proposed.emplace(s->begin(), s->end());
    }
    if (!r.atEnd()) {
      return handshakeError(interest.name);
    }
  }
  catch (const tlv::DecodeError&) {
    return handshakeError(interest.name);
  }

  crypto::SymmetricKey key;
  Bytes serverValue;
  if (mode == HandshakeMode::Dh) {
    if (wrapped) {
      return handshakeError(interest.name);
    }
    auto dh = crypto::dhKeygen(m_rng);
    try {
      ++m_stats.dhAgreements;
      key = crypto::dhAgree(dh.secret, clientValue);
    }
    catch (const crypto::InvalidPublicValue&) {
      return handshakeError(interest.name);
    }
    serverValue.assign(dh.publicValue.begin(), dh.publicValue.end());
  }
  else {
    if (!wrapped) {
      return handshakeError(interest.name);
    }
    ++m_stats.pkeDecryptions;
    auto k = pkeDecryptAny(*wrapped, now);
    if (!k || k->size() != crypto::kSymKeySize) {
      return handshakeError(interest.name);
    }
    key = crypto::SymmetricKey(*k);
  }

  std::erase_if(m_sessions, [now] (const auto& s) { return now >= s.second.expiresAt; });
  Bytes sid;
  if (proposed && proposed->size() == onion::kSidSize && !m_sessions.contains(*proposed)) {
    sid = *proposed;
  }
  else {
    do {
      sid = m_rng.bytes(onion::kSidSize);
    } while (m_sessions.contains(sid));
  }
  m_sessions[sid] = Session{key, now + m_config.sessionLifetime};
  ++m_stats.sessionsCreated;

  Bytes payload;
  tlv::writeElement(payload, tlv::SessionId, sid);
  if (mode == HandshakeMode::Dh) {
    tlv::writeElement(payload, tlv::ServerValue, serverValue);
  }
  return signedResponse(interest.name, std::move(payload));
}

} // namespace andana
