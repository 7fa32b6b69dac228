#include "andana/forwarder.hpp"

#include <algorithm>

namespace andana {

void
Fib::addRoute(const Name& prefix, FaceId face)
{
  auto& hops = m_entries[prefix];
  if (std::find(hops.begin(), hops.end(), face) == hops.end()) {
    hops.push_back(face);
  }
}

void
Fib::removeRoute(const Name& prefix)
{
  m_entries.erase(prefix);
}

const std::vector<FaceId>*
Fib::longestPrefixMatch(const Name& name) const
{
  for (std::size_t len = name.size() + 1; len-- > 0;) {
    auto it = m_entries.find(len == name.size() ? name : name.getPrefix(len));
    if (it != m_entries.end() && !it->second.empty()) {
      return &it->second;
    }
  }
  return nullptr;
}

void
ContentStore::erase(std::map<Name, Entry>::iterator it)
{
  m_used -= it->second.bytes;
  m_lru.erase(it->second.lru);
  m_index.erase(it);
}

std::vector<Name>
ContentStore::insert(const Data& data, SimTime now)
{
  if (auto it = m_index.find(data.name); it != m_index.end()) {
    erase(it);
  }
  m_lru.push_front(data.name);
  Entry e{data, now, encodeData(data).size(), m_lru.begin()};
  m_used += e.bytes;
  m_index.emplace(data.name, std::move(e));
  return evict(now);
}

const Data*
ContentStore::find(const Name& prefix, SimTime now)
{
  // Names extending `prefix` form a contiguous run starting at lower_bound.
  for (auto it = m_index.lower_bound(prefix); it != m_index.end() && prefix.isPrefixOf(it->first); ++it) {
    if (it->second.isFresh(now)) {
      m_lru.splice(m_lru.begin(), m_lru, it->second.lru);
      return &it->second.data;
    }
  }
  return nullptr;
}

std::vector<Name>
ContentStore::evict(SimTime now)
{
  std::vector<Name> evicted;
  while (m_used > m_capacity && !m_index.empty()) {
    auto victim = m_index.end();
    for (auto lit = m_lru.rbegin(); lit != m_lru.rend(); ++lit) {
      auto it = m_index.find(*lit);
      if (!it->second.isFresh(now)) {
        victim = it;
        break;
      }
    }
    if (victim == m_index.end()) {
      victim = m_index.find(m_lru.back());
    }
    evicted.push_back(victim->first);
    erase(victim);
  }
  return evicted;
}

Forwarder::Forwarder(std::size_t csCapacityBytes, SimTime pitLifetime)
  : m_cs(csCapacityBytes)
  , m_pitLifetime(pitLifetime)
{
}

std::vector<Emission>
Forwarder::onInterest(const Interest& interest, FaceId inFace, SimTime now)
{
  ++m_counters.interestsReceived;

  if (const Data* cached = m_cs.find(interest.name, now)) {
    ++m_counters.cacheHits;
    return {Emission{inFace, *cached}};
  }

  auto pit = m_pit.find(interest.name);
  if (pit != m_pit.end() && pit->second.expiry <= now) {
    m_pit.erase(pit);
    pit = m_pit.end();
  }
  if (pit != m_pit.end()) {
    ++m_counters.interestsCollapsed;
    pit->second.downstream.insert(inFace);
    return {};
  }

  const auto* hops = m_fib.longestPrefixMatch(interest.name);
  if (hops == nullptr || hops->front() == inFace) {
    ++m_counters.interestsDropped;
    return {};
  }

  PitEntry entry{interest.name, {inFace}, now, now + m_pitLifetime};
  m_pit.emplace(interest.name, std::move(entry));
  ++m_counters.interestsForwarded;
  return {Emission{hops->front(), interest}};
}

std::vector<Emission>
Forwarder::onData(const Data& data, FaceId /*inFace*/, SimTime now)
{
  ++m_counters.dataReceived;

  std::set<FaceId> faces;
  bool matched = false;
  for (std::size_t len = 0; len <= data.name.size(); ++len) {
    auto it = m_pit.find(data.name.getPrefix(len));
    if (it == m_pit.end()) {
      continue;
    }
    if (it->second.expiry > now) {
      matched = true;
      faces.insert(it->second.downstream.begin(), it->second.downstream.end());
    }
    m_pit.erase(it);
  }

  if (!matched) {
    ++m_counters.dataUnsolicited;
    return {};
  }

  m_cs.insert(data, now);
  std::vector<Emission> out;
  for (auto f : faces) {
    out.push_back(Emission{f, data});
    ++m_counters.dataForwarded;
  }
  return out;
}

const PitEntry*
Forwarder::findPit(const Name& name, SimTime now) const
{
  auto it = m_pit.find(name);
  if (it == m_pit.end() || it->second.expiry <= now) {
    return nullptr;
  }
  return &it->second;
}

std::size_t
Forwarder::pitSize(SimTime now) const
{
  return static_cast<std::size_t>(std::count_if(m_pit.begin(), m_pit.end(),
                                                [now] (const auto& kv) { return kv.second.expiry > now; }));
}

} // namespace andana
