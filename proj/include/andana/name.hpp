#ifndef ANDANA_NAME_HPP
#define ANDANA_NAME_HPP

#include "andana/common.hpp"

#include <compare>
#include <functional>
#include <ostream>
#include <string_view>

namespace andana {

class MalformedName : public Error
{
public:
  using Error::Error;
};

class NameTooLong : public Error
{
public:
  using Error::Error;
};

/**
 * @brief Hierarchical content name: an ordered sequence of opaque byte-string components.
 *
 * Components may hold arbitrary bytes, including '/' and 0x00. The text form
 * percent-encodes everything outside [A-Za-z0-9-._~]; a component made only of
 * periods (including the empty component) is written with three extra periods.
 */
class Name
{
public:
  using Component = Bytes;

  static constexpr std::size_t kMaxComponents = 64;
  static constexpr std::size_t kMaxComponentSize = 65535;

  Name() = default;

  explicit
  Name(std::vector<Component> components);

  /// Parses "/a/b/c". Throws MalformedName.
  static Name
  parse(std::string_view text);

  /// Decodes a NAME TLV that must span all of `wire`.
  static Name
  decode(ByteView wire);

  /// Decodes the value part of a NAME element.
  static Name
  decodeValue(ByteView value);

  Bytes
  encode() const;

  void
  encodeTo(Bytes& out) const;

  std::string
  toUri() const;

  std::size_t
  size() const
  {
    return m_components.size();
  }

  bool
  empty() const
  {
    return m_components.empty();
  }

  const Component&
  operator[](std::size_t i) const
  {
    return m_components[i];
  }

  const Component&
  back() const
  {
    return m_components.back();
  }

  const std::vector<Component>&
  components() const
  {
    return m_components;
  }

  /// Component-wise leading-subsequence test.
  bool
  isPrefixOf(const Name& other) const;

  /// Returns a copy with `component` appended. Throws NameTooLong.
  Name
  append(ByteView component) const;

  Name
  append(std::string_view component) const
  {
    auto b = toBytes(component);
    return append(ByteView(b));
  }

  /// First `n` components.
  Name
  getPrefix(std::size_t n) const;

  /// Components from index `from` on.
  Name
  getSuffix(std::size_t from) const;

  friend bool
  operator==(const Name&, const Name&) = default;

  friend std::strong_ordering
  operator<=>(const Name& a, const Name& b)
  {
    return a.m_components <=> b.m_components;
  }

private:
  std::vector<Component> m_components;
};

std::ostream&
operator<<(std::ostream& os, const Name& name);

inline bool
isPrefixOf(const Name& a, const Name& b)
{
  return a.isPrefixOf(b);
}

} // namespace andana

template<>
struct std::hash<andana::Name>
{
  std::size_t
  operator()(const andana::Name& n) const noexcept;
};

#endif // ANDANA_NAME_HPP
