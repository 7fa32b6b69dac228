#include "andana/packets.hpp"
#include "andana/tlv.hpp"

#include <algorithm>

namespace andana {

namespace {

template<typename Fn>
auto
rethrowAsMalformed(Fn&& fn)
{
  try {
    return fn();
  }
  catch (const tlv::DecodeError& e) {
    throw MalformedPacket(e.what());
  }
  catch (const NameTooLong& e) {
    throw MalformedPacket(e.what());
  }
}

void
encodeSignedFields(const Data& d, Bytes& out)
{
  d.name.encodeTo(out);
  tlv::writeElement(out, tlv::Payload, d.payload);
  tlv::writeElement(out, tlv::Signer, d.signerId);
  Bytes loc;
  d.keyLocator.encodeTo(loc);
  tlv::writeElement(out, tlv::KeyLocator, loc);
  tlv::writeNumber(out, tlv::Freshness, d.freshnessMs);
}

Interest
decodeInterestValue(ByteView value)
{
  tlv::Reader r(value);
  Interest i(Name::decodeValue(r.expect(tlv::NameType).value));
  if (auto s = r.readOptional(tlv::Scope)) {
    if (s->size() != 1) {
      throw MalformedPacket("scope must be one byte");
    }
    i.scope = (*s)[0];
  }
  if (auto x = r.readOptional(tlv::Exclude)) {
    i.exclusionFilter = Bytes(x->begin(), x->end());
  }
  if (auto n = r.readOptional(tlv::Nonce)) {
    i.nonce = Bytes(n->begin(), n->end());
  }
  if (!r.atEnd()) {
    throw MalformedPacket("unexpected element in Interest");
  }
  return i;
}

Data
decodeDataValue(ByteView value)
{
  tlv::Reader r(value);
  Data d;
  d.name = Name::decodeValue(r.expect(tlv::NameType).value);
  auto payload = r.expect(tlv::Payload).value;
  d.payload.assign(payload.begin(), payload.end());
  auto signer = r.expect(tlv::Signer).value;
  if (signer.size() != d.signerId.size()) {
    throw MalformedPacket("signer id must be 32 bytes");
  }
  std::copy(signer.begin(), signer.end(), d.signerId.begin());
  d.keyLocator = Name::decode(r.expect(tlv::KeyLocator).value);
  d.freshnessMs = tlv::readNumber(r.expect(tlv::Freshness).value);
  auto sig = r.expect(tlv::Signature).value;
  d.signature.assign(sig.begin(), sig.end());
  if (!r.atEnd()) {
    throw MalformedPacket("unexpected element in Data");
  }
  return d;
}

} // namespace

Bytes
Data::signedPortion() const
{
  Bytes out;
  encodeSignedFields(*this, out);
  return out;
}

Bytes
encodeInterest(const Interest& interest)
{
  Bytes value;
  interest.name.encodeTo(value);
  if (interest.scope) {
    std::uint8_t s = *interest.scope;
    tlv::writeElement(value, tlv::Scope, ByteView(&s, 1));
  }
  if (interest.exclusionFilter) {
    tlv::writeElement(value, tlv::Exclude, *interest.exclusionFilter);
  }
  if (interest.nonce) {
    tlv::writeElement(value, tlv::Nonce, *interest.nonce);
  }
  Bytes out;
  tlv::writeElement(out, tlv::Interest, value);
  return out;
}

Interest
decodeInterest(ByteView wire)
{
  return rethrowAsMalformed([&] {
    tlv::Reader outer(wire);
    auto e = outer.expect(tlv::Interest);
    if (!outer.atEnd()) {
      throw MalformedPacket("trailing bytes after Interest");
    }
    return decodeInterestValue(e.value);
  });
}

Bytes
encodeData(const Data& data)
{
  Bytes value;
  encodeSignedFields(data, value);
  tlv::writeElement(value, tlv::Signature, data.signature);
  Bytes out;
  tlv::writeElement(out, tlv::Data, value);
  return out;
}

Data
decodeData(ByteView wire)
{
  return rethrowAsMalformed([&] {
    tlv::Reader outer(wire);
    auto e = outer.expect(tlv::Data);
    if (!outer.atEnd()) {
      throw MalformedPacket("trailing bytes after Data");
    }
    return decodeDataValue(e.value);
  });
}

Bytes
encodePacket(const Packet& pkt)
{
  return std::visit([] (const auto& p) {
    if constexpr (std::is_same_v<std::decay_t<decltype(p)>, Interest>) {
      return encodeInterest(p);
    }
    else {
      return encodeData(p);
    }
  }, pkt);
}

Packet
decodePacket(ByteView wire)
{
  tlv::Reader r(wire);
  auto type = r.peekType();
  if (type == tlv::Interest) {
    return decodeInterest(wire);
  }
  if (type == tlv::Data) {
    return decodeData(wire);
  }
  throw MalformedPacket("not an Interest or Data packet");
}

std::size_t
wireSize(const Packet& pkt)
{
  return encodePacket(pkt).size();
}

const Name&
packetName(const Packet& pkt)
{
  return std::visit([] (const auto& p) -> const Name& { return p.name; }, pkt);
}

Data
signData(Name name, Bytes payload, const DataMetadata& meta, const crypto::PrivateKey& signingKey,
         RandomSource& rng)
{
  Data d;
  d.name = std::move(name);
  d.payload = std::move(payload);
  d.signerId = crypto::fingerprint(signingKey.pub);
  d.keyLocator = meta.keyLocator;
  d.freshnessMs = meta.freshnessMs;
  d.signature = crypto::sign(signingKey, d.signedPortion(), rng);
  return d;
}

bool
verifyData(const Data& data, const crypto::PublicKey& pk)
{
  return crypto::verify(pk, data.signedPortion(), data.signature);
}

} // namespace andana
