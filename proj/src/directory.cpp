#include "andana/directory.hpp"
#include "andana/tlv.hpp"

#include <algorithm>
#include <cmath>

namespace andana {

namespace {

crypto::Digest
toDigest(ByteView v)
{
  if (v.size() != crypto::kDigestSize) {
    throw tlv::DecodeError("fingerprint must be 32 bytes");
  }
  crypto::Digest d;
  std::copy(v.begin(), v.end(), d.begin());
  return d;
}

ARDescriptor
decodeDescriptorValue(ByteView value)
{
  tlv::Reader r(value);
  ARDescriptor d;
  d.ns = Name::decodeValue(r.expect(tlv::NameType).value);
  auto org = r.expect(tlv::Organization).value;
  d.organization.assign(org.begin(), org.end());
  d.signingKey = crypto::PublicKey::decode(r.expect(tlv::SigningKey).value);
  d.signingFingerprint = toDigest(r.expect(tlv::Signer).value);
  while (r.peekType() == tlv::Certificate) {
    tlv::Reader c(r.read().value);
    EncryptionCertificate cert;
    cert.pk = crypto::PublicKey::decode(c.expect(tlv::PublicKey).value);
    cert.notAfter = static_cast<SimTime>(tlv::readNumber(c.expect(tlv::NotAfter).value));
    auto sig = c.expect(tlv::Signature).value;
    cert.signature.assign(sig.begin(), sig.end());
    if (!c.atEnd()) {
      throw tlv::DecodeError("trailing bytes in certificate");
    }
    d.certificates.push_back(std::move(cert));
  }
  d.bandwidth = tlv::readNumber(r.expect(tlv::Bandwidth).value);
  d.avgLoad = static_cast<double>(tlv::readNumber(r.expect(tlv::AvgLoad).value)) / 1e6;
  d.uptime = static_cast<SimTime>(tlv::readNumber(r.expect(tlv::Uptime).value));
  if (!r.atEnd()) {
    throw tlv::DecodeError("trailing bytes in descriptor");
  }
  return d;
}

} // namespace

Bytes
EncryptionCertificate::signedPortion() const
{
  Bytes out;
  tlv::writeElement(out, tlv::PublicKey, pk.encode());
  tlv::writeNumber(out, tlv::NotAfter, static_cast<std::uint64_t>(notAfter));
  return out;
}

EncryptionCertificate
certifyEncryptionKey(const crypto::PrivateKey& signingKey, const crypto::PublicKey& encryptionKey,
                     SimTime notAfter, RandomSource& rng)
{
  EncryptionCertificate cert{encryptionKey, notAfter, {}};
  cert.signature = crypto::sign(signingKey, cert.signedPortion(), rng);
  return cert;
}

bool
verifyCertificate(const EncryptionCertificate& cert, const crypto::PublicKey& signingKey)
{
  return cert.pk.role == crypto::KeyRole::Encryption &&
         crypto::verify(signingKey, cert.signedPortion(), cert.signature);
}

const EncryptionCertificate*
ARDescriptor::currentCertificate(SimTime now) const
{
  const EncryptionCertificate* best = nullptr;
  for (const auto& c : certificates) {
    if (c.isLive(now) && (best == nullptr || c.notAfter > best->notAfter)) {
      best = &c;
    }
  }
  return best;
}

void
ARDescriptor::validate() const
{
  if (signingKey.role != crypto::KeyRole::Signing) {
    throw InvalidDescriptor("descriptor signing key has the wrong role");
  }
  if (crypto::fingerprint(signingKey) != signingFingerprint) {
    throw InvalidDescriptor("signing fingerprint mismatch for " + ns.toUri());
  }
  if (certificates.empty()) {
    throw InvalidDescriptor("descriptor carries no encryption certificate");
  }
  for (const auto& c : certificates) {
    if (!verifyCertificate(c, signingKey)) {
      throw InvalidDescriptor("encryption certificate does not verify for " + ns.toUri());
    }
  }
}

Bytes
ARDescriptor::encode() const
{
  Bytes v;
  ns.encodeTo(v);
  tlv::writeElement(v, tlv::Organization, toBytes(organization));
  tlv::writeElement(v, tlv::SigningKey, signingKey.encode());
  tlv::writeElement(v, tlv::Signer, signingFingerprint);
  for (const auto& c : certificates) {
    Bytes cv = c.signedPortion();
    tlv::writeElement(cv, tlv::Signature, c.signature);
    tlv::writeElement(v, tlv::Certificate, cv);
  }
  tlv::writeNumber(v, tlv::Bandwidth, bandwidth);
  tlv::writeNumber(v, tlv::AvgLoad, static_cast<std::uint64_t>(std::llround(avgLoad * 1e6)));
  tlv::writeNumber(v, tlv::Uptime, static_cast<std::uint64_t>(uptime));
  Bytes out;
  tlv::writeElement(out, tlv::Descriptor, v);
  return out;
}

ARDescriptor
ARDescriptor::decode(ByteView wire)
{
  tlv::Reader r(wire);
  auto e = r.expect(tlv::Descriptor);
  if (!r.atEnd()) {
    throw tlv::DecodeError("trailing bytes after descriptor");
  }
  return decodeDescriptorValue(e.value);
}

Name
directoryPrefix()
{
  return Name::parse("/andana/directory");
}

void
Directory::registerAr(ARDescriptor desc)
{
  desc.validate();
  auto ns = desc.ns;
  m_ars.insert_or_assign(std::move(ns), std::move(desc));
}

ARDescriptor
Directory::filtered(const ARDescriptor& d, SimTime now)
{
  ARDescriptor out = d;
  std::erase_if(out.certificates, [now] (const auto& c) { return !c.isLive(now); });
  return out;
}

std::vector<ARDescriptor>
Directory::listArs(SimTime now) const
{
  std::vector<ARDescriptor> out;
  for (const auto& [ns, d] : m_ars) {
    auto f = filtered(d, now);
    if (!f.certificates.empty()) {
      out.push_back(std::move(f));
    }
  }
  return out;
}

ARDescriptor
Directory::lookup(const Name& ns, SimTime now) const
{
  auto it = m_ars.find(ns);
  if (it == m_ars.end()) {
    throw UnknownAR("no AR registered under " + ns.toUri());
  }
  auto f = filtered(it->second, now);
  if (f.certificates.empty()) {
    throw UnknownAR("AR " + ns.toUri() + " has no live encryption key");
  }
  return f;
}

Bytes
Directory::encodeSnapshot() const
{
  Bytes out;
  for (const auto& [ns, d] : m_ars) {
    append(out, d.encode());
  }
  return out;
}

Directory
Directory::decodeSnapshot(ByteView wire)
{
  Directory dir;
  tlv::Reader r(wire);
  try {
    while (!r.atEnd()) {
      auto e = r.expect(tlv::Descriptor);
      dir.registerAr(decodeDescriptorValue(e.value));
    }
  }
  catch (const tlv::DecodeError& e) {
    throw InvalidDescriptor(std::string("malformed directory snapshot: ") + e.what());
  }
  return dir;
}

Data
Directory::publish(const crypto::PrivateKey& signingKey, std::uint64_t version, SimTime now,
                   RandomSource& rng) const
{
  Bytes payload;
  for (const auto& d : listArs(now)) {
    append(payload, d.encode());
  }
  Bytes ver;
  appendU64(ver, version);
  auto name = directoryPrefix().append("snapshot").append(ByteView(ver));
  return signData(std::move(name), std::move(payload), {directoryPrefix().append("KEY")}, signingKey, rng);
}

std::vector<ARDescriptor>
Directory::parsePublished(const Data& data, const crypto::PublicKey& directoryKey)
{
  if (!verifyData(data, directoryKey)) {
    throw InvalidDescriptor("directory listing signature invalid");
  }
  std::vector<ARDescriptor> out;
  try {
    tlv::Reader r(data.payload);
    while (!r.atEnd()) {
      auto d = decodeDescriptorValue(r.expect(tlv::Descriptor).value);
      d.validate();
      out.push_back(std::move(d));
    }
  }
  catch (const tlv::DecodeError& e) {
    throw InvalidDescriptor(std::string("malformed directory listing: ") + e.what());
  }
  return out;
}

} // namespace andana
