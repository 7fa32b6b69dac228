#include "andana/forwarder.hpp"

#include <gtest/gtest.h>

using namespace andana;

namespace {

constexpr FaceId kUpstream = 100;

Data
makeData(const std::string& name, std::uint64_t freshnessMs = kDefaultFreshnessMs, std::size_t payload = 10)
{
  // Forwarding never verifies signatures, so an unsigned packet is enough here.
  Data d;
  d.name = Name::parse(name);
  d.payload = Bytes(payload, 0xab);
  d.freshnessMs = freshnessMs;
  d.signature = Bytes(128, 0x01);
  return d;
}

std::size_t
dataSize(const Data& d)
{
  return encodeData(d).size();
}

Forwarder
makeForwarder(std::size_t cs = 1 << 20)
{
  Forwarder fw(cs);
  fw.fib().addRoute(Name::parse("/prod"), kUpstream);
  return fw;
}

} // namespace

TEST(Fib, LongestPrefixMatch)
{
  Fib fib;
  fib.addRoute(Name::parse("/"), 1);
  fib.addRoute(Name::parse("/a"), 2);
  fib.addRoute(Name::parse("/a/b"), 3);
  EXPECT_EQ(fib.longestPrefixMatch(Name::parse("/a/b/c"))->front(), 3u);
  EXPECT_EQ(fib.longestPrefixMatch(Name::parse("/a/x"))->front(), 2u);
  EXPECT_EQ(fib.longestPrefixMatch(Name::parse("/z"))->front(), 1u);
  fib.addRoute(Name::parse("/a"), 2);
  EXPECT_EQ(fib.longestPrefixMatch(Name::parse("/a"))->size(), 1u);

  Fib empty;
  EXPECT_EQ(empty.longestPrefixMatch(Name::parse("/a")), nullptr);
}

TEST(Forwarder, CollapsesInterestsForSameName)
{
  auto fw = makeForwarder();
  Interest i(Name::parse("/prod/x"));
  auto a = fw.onInterest(i, 1, 0);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].face, kUpstream);
  EXPECT_TRUE(fw.onInterest(i, 2, 10).empty());
  EXPECT_EQ(fw.findPit(i.name, 10)->downstream.size(), 2u);
  EXPECT_EQ(fw.counters().interestsForwarded, 1u);
}

TEST(Forwarder, CollapsingFanOut)
{
  for (FaceId n : {2u, 5u, 10u}) {
    auto fw = makeForwarder();
    Interest i(Name::parse("/prod/item"));
    std::size_t upstream = 0;
    for (FaceId f = 0; f < n; ++f) {
      upstream += fw.onInterest(i, f, 0).size();
    }
    EXPECT_EQ(upstream, 1u);
    auto out = fw.onData(makeData("/prod/item"), kUpstream, 5);
    EXPECT_EQ(out.size(), n);
    EXPECT_EQ(fw.findPit(i.name, 5), nullptr);
  }
}

TEST(Forwarder, CacheHitSatisfiesByPrefix)
{
  auto fw = makeForwarder();
  fw.onInterest(Interest(Name::parse("/prod/x/seg1")), 1, 0);
  fw.onData(makeData("/prod/x/seg1"), kUpstream, 1);

  auto out = fw.onInterest(Interest(Name::parse("/prod/x")), 2, 2);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].face, 2u);
  EXPECT_EQ(packetName(out[0].packet), Name::parse("/prod/x/seg1"));
  EXPECT_EQ(fw.counters().interestsForwarded, 1u);
  EXPECT_EQ(fw.pitSize(2), 0u);
}

TEST(Forwarder, StaleContentNotServed)
{
  auto fw = makeForwarder();
  fw.onInterest(Interest(Name::parse("/prod/x")), 1, 0);
  fw.onData(makeData("/prod/x", 100), kUpstream, 0);
  EXPECT_EQ(fw.onInterest(Interest(Name::parse("/prod/x")), 2, millis(99)).size(), 1u);
  auto out = fw.onInterest(Interest(Name::parse("/prod/x")), 2, millis(100));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].face, kUpstream); // forwarded, not served
}

TEST(Forwarder, NoRouteDrops)
{
  auto fw = makeForwarder();
  EXPECT_TRUE(fw.onInterest(Interest(Name::parse("/other/x")), 1, 0).empty());
  EXPECT_EQ(fw.pitSize(0), 0u);
  EXPECT_EQ(fw.counters().interestsDropped, 1u);
}

TEST(Forwarder, DataFlushesPit)
{
  auto fw = makeForwarder();
  Interest i(Name::parse("/prod/y"));
  for (FaceId f : {1u, 2u, 3u}) {
    fw.onInterest(i, f, 0);
  }
  auto out = fw.onData(makeData("/prod/y"), kUpstream, 1);
  EXPECT_EQ(out.size(), 3u);
  EXPECT_EQ(fw.pitSize(1), 0u);
  EXPECT_TRUE(fw.onData(makeData("/prod/y"), kUpstream, 2).empty());
}

TEST(Forwarder, UnsolicitedDataDropped)
{
  auto fw = makeForwarder();
  EXPECT_TRUE(fw.onData(makeData("/prod/z"), kUpstream, 0).empty());
  EXPECT_EQ(fw.contentStore().size(), 0u);
  EXPECT_EQ(fw.counters().dataUnsolicited, 1u);
}

TEST(Forwarder, PitExpiryIsNotExtendedByCollapsing)
{
  Forwarder fw(1 << 20, millis(100));
  fw.fib().addRoute(Name::parse("/prod"), kUpstream);
  Interest i(Name::parse("/prod/q"));
  fw.onInterest(i, 1, 0);
  fw.onInterest(i, 2, millis(90));
  EXPECT_EQ(fw.findPit(i.name, millis(99))->expiry, millis(100));
  EXPECT_EQ(fw.findPit(i.name, millis(100)), nullptr);
  EXPECT_TRUE(fw.onData(makeData("/prod/q"), kUpstream, millis(101)).empty());
  EXPECT_EQ(fw.onInterest(i, 3, millis(102)).size(), 1u);
}

TEST(ContentStore, LruEviction)
{
  auto a = makeData("/a");
  ContentStore cs(2 * dataSize(a));
  cs.insert(a, 0);
  cs.insert(makeData("/b"), 1);
  ASSERT_NE(cs.find(Name::parse("/a"), 2), nullptr); // touch /a
  auto ev = cs.insert(makeData("/c"), 3);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0], Name::parse("/b"));
  EXPECT_LE(cs.usedBytes(), cs.capacity());
}

TEST(ContentStore, ExpiredEvictedBeforeLiveLru)
{
  auto a = makeData("/a");
  ContentStore cs(2 * dataSize(a));
  cs.insert(a, 0);                       // oldest but fresh
  cs.insert(makeData("/b", 1), 0);       // newer but stale after 1 ms
  auto ev = cs.insert(makeData("/c"), millis(5));
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0], Name::parse("/b"));
  EXPECT_TRUE(cs.contains(Name::parse("/a")));
}

TEST(ContentStore, ZeroCapacity)
{
  ContentStore cs(0);
  auto ev = cs.insert(makeData("/a"), 0);
  EXPECT_EQ(ev.size(), 1u);
  EXPECT_EQ(cs.size(), 0u);
  EXPECT_EQ(cs.find(Name::parse("/a"), 0), nullptr);
}

TEST(Forwarder, FlowBalanceProperty)
{
  // Random interleavings of interests and data on a handful of names: on every
  // downstream face, data emitted for X never exceeds interests received for prefixes of X.
  DeterministicRng rng(3);
  std::vector<Name> names = {Name::parse("/prod/a"), Name::parse("/prod/a/1"), Name::parse("/prod/b")};
  for (int trial = 0; trial < 200; ++trial) {
    auto fw = makeForwarder(rng.uniform(2) ? 0 : 1 << 20);
    std::map<std::pair<FaceId, Name>, int> interestsIn;
    std::map<std::pair<FaceId, Name>, int> dataOut;
    SimTime now = 0;
    for (int step = 0; step < 50; ++step) {
      now += static_cast<SimTime>(rng.uniform(millis(50)));
      const auto& n = names[rng.uniform(names.size())];
      if (rng.uniform(2)) {
        FaceId f = static_cast<FaceId>(rng.uniform(4));
        interestsIn[{f, n}]++;
        for (auto& e : fw.onInterest(Interest(n), f, now)) {
          if (std::holds_alternative<Data>(e.packet)) {
            dataOut[{e.face, packetName(e.packet)}]++;
          }
        }
      }
      else {
        for (auto& e : fw.onData(makeData(n.toUri()), kUpstream, now)) {
          dataOut[{e.face, packetName(e.packet)}]++;
        }
      }
    }
    for (const auto& [key, count] : dataOut) {
      int allowed = 0;
      for (const auto& [ikey, icount] : interestsIn) {
        if (ikey.first == key.first && ikey.second.isPrefixOf(key.second)) {
          allowed += icount;
        }
      }
      EXPECT_LE(count, allowed);
    }
  }
}
