#include "andana/onion.hpp"
#include "andana/tlv.hpp"

#include <algorithm>

namespace andana::onion {

Bytes
encodeLayer(const Layer& layer)
{
  Bytes out;
  if (const auto* relay = std::get_if<Relay>(&layer.next)) {
    relay->next.encodeTo(out);
    tlv::writeElement(out, tlv::Ciphertext, relay->ciphertext);
  }
  else {
    append(out, encodeInterest(std::get<Interest>(layer.next)));
  }
  append(out, layer.key.bytes());
  appendU64(out, layer.timestampMs);
  out.resize((out.size() + kPadClass - 1) / kPadClass * kPadClass, 0);
  return out;
}

Layer
decodeLayer(ByteView plaintext)
{
  constexpr std::size_t kTrailer = crypto::kSymKeySize + 8;
  try {
    tlv::Reader r(plaintext);
    Layer layer;
    auto type = r.peekType();
    if (type == tlv::NameType) {
      Relay relay;
      relay.next = Name::decodeValue(r.read().value);
      auto ct = r.expect(tlv::Ciphertext).value;
      relay.ciphertext.assign(ct.begin(), ct.end());
      layer.next = std::move(relay);
    }
    else if (type == tlv::Interest) {
      auto start = r.position();
      auto e = r.read();
      layer.next = decodeInterest(plaintext.subspan(start, e.wireSize));
    }
    else {
      throw MalformedPacket("layer starts with neither a name nor an interest");
    }
    auto rest = r.rest();
    if (rest.size() < kTrailer) {
      throw MalformedPacket("layer trailer truncated");
    }
    layer.key = crypto::SymmetricKey(rest.first(crypto::kSymKeySize));
    layer.timestampMs = readU64(rest.subspan(crypto::kSymKeySize, 8));
    auto pad = rest.subspan(kTrailer);
    if (!std::all_of(pad.begin(), pad.end(), [] (std::uint8_t b) { return b == 0; })) {
      throw MalformedPacket("non-zero layer padding");
    }
    return layer;
  }
  catch (const tlv::DecodeError& e) {
    throw MalformedPacket(std::string("malformed layer: ") + e.what());
  }
  catch (const NameTooLong& e) {
    throw MalformedPacket(std::string("malformed layer: ") + e.what());
  }
}

Name
relayName(const Relay& r)
{
  return r.next.append(ByteView(r.ciphertext));
}

} // namespace andana::onion
