#include "andana/tlv.hpp"

#include <cstdio>

namespace andana {

std::string
toHex(ByteView in)
{
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(in.size() * 2);
  for (auto b : in) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

namespace tlv {

void
writeLength(Bytes& out, std::size_t len)
{
  if (len < 253) {
    out.push_back(static_cast<std::uint8_t>(len));
  }
  else if (len <= 0xffff) {
    out.push_back(253);
    out.push_back(static_cast<std::uint8_t>(len >> 8));
    out.push_back(static_cast<std::uint8_t>(len));
  }
  else if (len <= 0xffffffffu) {
    out.push_back(254);
    for (int shift = 24; shift >= 0; shift -= 8) {
      out.push_back(static_cast<std::uint8_t>(len >> shift));
    }
  }
  else {
    throw Error("TLV length exceeds 32 bits");
  }
}

void
writeElement(Bytes& out, std::uint16_t type, ByteView value)
{
  out.push_back(static_cast<std::uint8_t>(type >> 8));
  out.push_back(static_cast<std::uint8_t>(type));
  writeLength(out, value.size());
  append(out, value);
}

void
writeNumber(Bytes& out, std::uint16_t type, std::uint64_t value)
{
  Bytes v;
  appendU64(v, value);
  writeElement(out, type, v);
}

std::uint64_t
readNumber(ByteView value)
{
  if (value.size() != 8) {
    throw DecodeError("number element must be 8 bytes");
  }
  return readU64(value);
}

std::optional<std::uint16_t>
Reader::peekType() const
{
  if (m_buf.size() - m_pos < 2) {
    return std::nullopt;
  }
  return static_cast<std::uint16_t>((m_buf[m_pos] << 8) | m_buf[m_pos + 1]);
}

Element
Reader::read()
{
  std::size_t pos = m_pos;
  auto need = [&] (std::size_t n) {
    if (m_buf.size() - pos < n) {
      throw DecodeError("truncated TLV");
    }
  };

  need(3);
  Element e;
  e.type = static_cast<std::uint16_t>((m_buf[pos] << 8) | m_buf[pos + 1]);
  pos += 2;
  std::size_t len = m_buf[pos++];
  if (len == 253) {
    need(2);
    len = (std::size_t{m_buf[pos]} << 8) | m_buf[pos + 1];
    pos += 2;
  }
  else if (len == 254) {
    need(4);
    len = 0;
    for (int i = 0; i < 4; ++i) {
      len = (len << 8) | m_buf[pos + i];
    }
    pos += 4;
  }
  else if (len == 255) {
    throw DecodeError("reserved TLV length marker");
  }
  need(len);
  e.value = m_buf.subspan(pos, len);
  pos += len;
  e.wireSize = pos - m_pos;
  m_pos = pos;
  return e;
}

Element
Reader::expect(std::uint16_t type)
{
  auto e = read();
  if (e.type != type) {
    char msg[64];
    std::snprintf(msg, sizeof(msg), "expected TLV type 0x%04x, got 0x%04x", type, e.type);
    throw DecodeError(msg);
  }
  return e;
}

std::optional<ByteView>
Reader::readOptional(std::uint16_t type)
{
  if (peekType() != type) {
    return std::nullopt;
  }
  return read().value;
}

} // namespace tlv
} // namespace andana
