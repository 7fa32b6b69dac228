#include "andana/name.hpp"
#include "andana/tlv.hpp"

#include <algorithm>

namespace andana {

namespace {

bool
isUnreserved(std::uint8_t c)
{
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '-' || c == '.' || c == '_' || c == '~';
}

int
hexValue(char c)
{
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void
checkComponents(const std::vector<Name::Component>& comps)
{
  if (comps.size() > Name::kMaxComponents) {
    throw NameTooLong("name exceeds " + std::to_string(Name::kMaxComponents) + " components");
  }
  for (const auto& c : comps) {
    if (c.size() > Name::kMaxComponentSize) {
      throw NameTooLong("name component exceeds 65535 bytes");
    }
  }
}

} // namespace

Name::Name(std::vector<Component> components)
  : m_components(std::move(components))
{
  checkComponents(m_components);
}

Name
Name::parse(std::string_view text)
{
  if (text.empty() || text.front() != '/') {
    throw MalformedName("name must begin with '/': '" + std::string(text) + "'");
  }
  text.remove_prefix(1);
  std::vector<Component> comps;
  if (text.empty()) {
    return Name{};
  }

  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('/', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    auto seg = text.substr(start, end - start);
    if (seg.empty()) {
      throw MalformedName("empty name segment");
    }

    Component comp;
    for (std::size_t i = 0; i < seg.size(); ++i) {
      if (seg[i] == '%') {
        if (i + 2 >= seg.size()) {
          throw MalformedName("truncated percent escape");
        }
        int hi = hexValue(seg[i + 1]);
        int lo = hexValue(seg[i + 2]);
        if (hi < 0 || lo < 0) {
          throw MalformedName("bad percent escape");
        }
        comp.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
        i += 2;
      }
      else {
        comp.push_back(static_cast<std::uint8_t>(seg[i]));
      }
    }

    if (std::all_of(seg.begin(), seg.end(), [] (char c) { return c == '.'; })) {
      if (seg.size() < 3) {
        throw MalformedName("'.' and '..' are not valid name segments");
      }
      comp.resize(seg.size() - 3);
    }
    comps.push_back(std::move(comp));
    start = end + 1;
    if (end == text.size()) {
      break;
    }
  }
  return Name(std::move(comps));
}

void
Name::encodeTo(Bytes& out) const
{
  Bytes value;
  for (const auto& c : m_components) {
    tlv::writeElement(value, tlv::Component, c);
  }
  tlv::writeElement(out, tlv::NameType, value);
}

Bytes
Name::encode() const
{
  Bytes out;
  encodeTo(out);
  return out;
}

Name
Name::decodeValue(ByteView value)
{
  tlv::Reader r(value);
  std::vector<Component> comps;
  while (!r.atEnd()) {
    auto e = r.expect(tlv::Component);
    comps.emplace_back(e.value.begin(), e.value.end());
    if (comps.size() > kMaxComponents) {
      throw tlv::DecodeError("too many name components");
    }
  }
  return Name(std::move(comps));
}

Name
Name::decode(ByteView wire)
{
  tlv::Reader r(wire);
  auto e = r.expect(tlv::NameType);
  if (!r.atEnd()) {
    throw tlv::DecodeError("trailing bytes after name");
  }
  return decodeValue(e.value);
}

std::string
Name::toUri() const
{
  if (m_components.empty()) {
    return "/";
  }
  static constexpr char digits[] = "0123456789ABCDEF";
  std::string out;
  for (const auto& c : m_components) {
    out.push_back('/');
    if (std::all_of(c.begin(), c.end(), [] (std::uint8_t b) { return b == '.'; })) {
      out.append(c.size() + 3, '.');
      continue;
    }
    for (auto b : c) {
      if (isUnreserved(b)) {
        out.push_back(static_cast<char>(b));
      }
      else {
        out.push_back('%');
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
      }
    }
  }
  return out;
}

bool
Name::isPrefixOf(const Name& other) const
{
  if (size() > other.size()) {
    return false;
  }
  return std::equal(m_components.begin(), m_components.end(), other.m_components.begin());
}

Name
Name::append(ByteView component) const
{
  if (size() + 1 > kMaxComponents) {
    throw NameTooLong("cannot append beyond " + std::to_string(kMaxComponents) + " components");
  }
  if (component.size() > kMaxComponentSize) {
    throw NameTooLong("name component exceeds 65535 bytes");
  }
  Name n = *this;
  n.m_components.emplace_back(component.begin(), component.end());
  return n;
}

Name
Name::getPrefix(std::size_t n) const
{
  n = std::min(n, size());
  return Name(std::vector<Component>(m_components.begin(), m_components.begin() + n));
}

Name
Name::getSuffix(std::size_t from) const
{
  from = std::min(from, size());
  return Name(std::vector<Component>(m_components.begin() + from, m_components.end()));
}

std::ostream&
operator<<(std::ostream& os, const Name& name)
{
  return os << name.toUri();
}

} // namespace andana

std::size_t
std::hash<andana::Name>::operator()(const andana::Name& n) const noexcept
{
  // FNV-1a over components with a separator byte folded in.
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& c : n.components()) {
    for (auto b : c) {
      h = (h ^ b) * 1099511628211ull;
    }
    h = (h ^ 0x100) * 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}
