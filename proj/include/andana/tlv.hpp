#ifndef ANDANA_TLV_HPP
#define ANDANA_TLV_HPP

#include "andana/common.hpp"

#include <optional>

namespace andana::tlv {

/// Wire type codes. Every element is T(2 bytes BE) LEN VALUE.
enum Type : std::uint16_t {
  NameType = 0x0001,
  Component = 0x0002,
  Interest = 0x0010,
  Data = 0x0011,
  Scope = 0x0012,
  Exclude = 0x0013,
  Nonce = 0x0014,
  Payload = 0x0020,
  Signature = 0x0021,
  Signer = 0x0022,
  KeyLocator = 0x0023,
  Freshness = 0x0024,
  // onion layers and handshakes
  Ciphertext = 0x0030,
  HandshakeMode = 0x0040,
  ClientValue = 0x0041,
  WrappedKey = 0x0042,
  SessionId = 0x0043,
  ServerValue = 0x0044,
  // directory descriptors
  Descriptor = 0x0050,
  Organization = 0x0051,
  SigningKey = 0x0052,
  Certificate = 0x0053,
  PublicKey = 0x0054,
  NotAfter = 0x0055,
  Bandwidth = 0x0056,
  AvgLoad = 0x0057,
  Uptime = 0x0058,
};

class DecodeError : public Error
{
public:
  using Error::Error;
};

/// LEN: one byte if < 253; 253 + 2-byte BE; 254 + 4-byte BE.
void
writeLength(Bytes& out, std::size_t len);

void
writeElement(Bytes& out, std::uint16_t type, ByteView value);

void
writeNumber(Bytes& out, std::uint16_t type, std::uint64_t value);

/// One decoded element; `value` points into the buffer being parsed.
struct Element
{
  std::uint16_t type = 0;
  ByteView value;
  std::size_t wireSize = 0;
};

/// Sequential reader over a buffer of concatenated TLV elements.
class Reader
{
public:
  explicit
  Reader(ByteView buf)
    : m_buf(buf)
  {
  }

  bool
  atEnd() const
  {
    return m_pos == m_buf.size();
  }

  std::size_t
  position() const
  {
    return m_pos;
  }

  ByteView
  rest() const
  {
    return m_buf.subspan(m_pos);
  }

  /// Type of the next element without consuming it, or nullopt at end.
  std::optional<std::uint16_t>
  peekType() const;

  /// Throws DecodeError on truncation or a length running past the buffer.
  Element
  read();

  /// Reads an element and requires the given type.
  Element
  expect(std::uint16_t type);

  /// Consumes and returns the value if the next element has `type`.
  std::optional<ByteView>
  readOptional(std::uint16_t type);

private:
  ByteView m_buf;
  std::size_t m_pos = 0;
};

std::uint64_t
readNumber(ByteView value);

} // namespace andana::tlv

#endif // ANDANA_TLV_HPP
