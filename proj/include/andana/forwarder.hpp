#ifndef ANDANA_FORWARDER_HPP
#define ANDANA_FORWARDER_HPP

#include "andana/packets.hpp"

#include <list>
#include <map>
#include <set>
#include <unordered_map>

namespace andana {

/// Interface (face) identifier, unique within one node.
using FaceId = std::uint32_t;

/// PIT entries live this long; at least the ANDaNA timestamp window.
constexpr SimTime kDefaultPitLifetime = millis(4000);

/// Name-prefix routing table with longest-prefix-match lookup.
class Fib
{
public:
  /// Adds `face` to the ordered next-hop set of `prefix`.
  void
  addRoute(const Name& prefix, FaceId face);

  void
  removeRoute(const Name& prefix);

  /// Next hops of the longest prefix of `name` that has an entry, or nullptr.
  const std::vector<FaceId>*
  longestPrefixMatch(const Name& name) const;

  std::size_t
  size() const
  {
    return m_entries.size();
  }

  const std::map<Name, std::vector<FaceId>>&
  entries() const
  {
    return m_entries;
  }

private:
  std::map<Name, std::vector<FaceId>> m_entries;
};

struct PitEntry
{
  Name name;
  std::set<FaceId> downstream;
  SimTime createdAt = 0;
  SimTime expiry = 0;
};

/// Byte-bounded cache; LRU among live entries, stale entries go first.
class ContentStore
{
public:
  explicit
  ContentStore(std::size_t capacityBytes)
    : m_capacity(capacityBytes)
  {
  }

  /// Inserts (or refreshes) `data`, then evicts down to capacity.
  std::vector<Name>
  insert(const Data& data, SimTime now);

  /// Fresh Data whose name has `prefix` as a prefix; marks it recently used.
  const Data*
  find(const Name& prefix, SimTime now);

  std::vector<Name>
  evict(SimTime now);

  bool
  contains(const Name& name) const
  {
    return m_index.count(name) > 0;
  }

  std::size_t
  size() const
  {
    return m_index.size();
  }

  std::size_t
  usedBytes() const
  {
    return m_used;
  }

  std::size_t
  capacity() const
  {
    return m_capacity;
  }

private:
  struct Entry
  {
    Data data;
    SimTime insertedAt = 0;
    std::size_t bytes = 0;
    std::list<Name>::iterator lru;

    bool
    isFresh(SimTime now) const
    {
      return now < insertedAt + millis(static_cast<std::int64_t>(data.freshnessMs));
    }
  };

  void
  erase(std::map<Name, Entry>::iterator it);

private:
  std::size_t m_capacity;
  std::size_t m_used = 0;
  std::map<Name, Entry> m_index;
  std::list<Name> m_lru; // front = most recently used
};

/// One packet a node sends as the result of processing an arrival.
struct Emission
{
  FaceId face;
  Packet packet;
};

struct ForwarderCounters
{
  std::uint64_t interestsReceived = 0;
  std::uint64_t interestsForwarded = 0;
  std::uint64_t interestsCollapsed = 0;
  std::uint64_t interestsDropped = 0;
  std::uint64_t cacheHits = 0;
  std::uint64_t dataReceived = 0;
  std::uint64_t dataForwarded = 0;
  std::uint64_t dataUnsolicited = 0;
};

/**
 * @brief NDN forwarding pipeline: content store, pending interest table, FIB.
 *
 * PIT entries are keyed by exact interest name; returning Data satisfies every
 * entry whose name is a prefix of the Data name. Collapsed interests do not
 * extend the expiry of the existing entry. The nonce plays no part in collapsing.
 */
class Forwarder
{
public:
  explicit
  Forwarder(std::size_t csCapacityBytes, SimTime pitLifetime = kDefaultPitLifetime);

  Fib&
  fib()
  {
    return m_fib;
  }

  const Fib&
  fib() const
  {
    return m_fib;
  }

  ContentStore&
  contentStore()
  {
    return m_cs;
  }

  std::vector<Emission>
  onInterest(const Interest& interest, FaceId inFace, SimTime now);

  std::vector<Emission>
  onData(const Data& data, FaceId inFace, SimTime now);

  /// Evicts the content store back to capacity.
  std::vector<Name>
  csEvict(SimTime now)
  {
    return m_cs.evict(now);
  }

  /// Live PIT entry for exactly `name`, if any.
  const PitEntry*
  findPit(const Name& name, SimTime now) const;

  std::size_t
  pitSize(SimTime now) const;

  const ForwarderCounters&
  counters() const
  {
    return m_counters;
  }

private:
  Fib m_fib;
  ContentStore m_cs;
  SimTime m_pitLifetime;
  std::unordered_map<Name, PitEntry> m_pit;
  ForwarderCounters m_counters;
};

} // namespace andana

#endif // ANDANA_FORWARDER_HPP
