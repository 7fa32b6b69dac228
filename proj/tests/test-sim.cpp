#include "andana/sim.hpp"

#include <gtest/gtest.h>

using namespace andana;
using namespace andana::sim;

namespace {

Topology
star(std::size_t consumers)
{
  Topology t;
  t.nodes.push_back({"r", Role::Router, {}, ""});
  t.nodes.push_back({"p", Role::Producer, Name::parse("/prod"), "p"});
  t.links.push_back({"r", 1, "p", 1, 1.0, 125'000'000});
  for (std::size_t i = 0; i < consumers; ++i) {
    auto id = "c" + std::to_string(i);
    t.nodes.push_back({id, Role::Consumer, {}, id});
    t.links.push_back({id, 1, "r", static_cast<FaceId>(2 + i), 0.5, 125'000'000});
  }
  t.validate();
  t.computeRoutes();
  return t;
}

std::string
runTrace(std::uint64_t seed, Mode mode)
{
  SimConfig cfg;
  cfg.seed = seed;
  Simulator s(Topology::lineFour(), cfg);
  s.fetch("c", Name::parse("/prod/obj"), 40'000, mode, 0);
  s.run();
  return s.trace().text();
}

TEST(Simulator, Deterministic)
{
  for (auto m : {Mode::Plain, Mode::AndanaA, Mode::AndanaS}) {
    auto a = runTrace(5, m);
    EXPECT_EQ(a, runTrace(5, m));
    if (m != Mode::Plain) {
      EXPECT_NE(a, runTrace(6, m));
    }
  }
}

TEST(Simulator, EmptyWorkload)
{
  Simulator s(Topology::lineFour());
  s.run();
  EXPECT_EQ(s.trace().lines().size(), 4u);
  EXPECT_EQ(s.trace().count("node-up"), 4u);
  EXPECT_EQ(s.bytesOnWire(), 0u);
}

TEST(Simulator, PlainInterestCrossesEachLinkOnce)
{
  Simulator s(Topology::lineFour());
  auto id = s.request("c", Interest(Name::parse("/prod/a")), Mode::Plain, 0);
  s.run();
  const auto& j = s.job(id);
  ASSERT_TRUE(j.complete);
  EXPECT_EQ(s.trace().count("tx-interest"), 3u);
  EXPECT_EQ(s.trace().count("tx-data"), 3u);
  EXPECT_EQ(s.producerInterests("p"), 1u);
  ASSERT_TRUE(j.delivered[0].has_value());
  EXPECT_EQ(encodeData(*j.delivered[0]), encodeData(*s.produced("p", Name::parse("/prod/a"))));
}

TEST(Simulator, AnonymousInterestTraversesBothArs)
{
  for (auto m : {Mode::AndanaA, Mode::AndanaS}) {
    Simulator s(Topology::lineFour());
    auto id = s.request("c", Interest(Name::parse("/prod/a")), m, 0);
    s.run();
    const auto& j = s.job(id);
    ASSERT_TRUE(j.complete) << toString(m);
    EXPECT_EQ(s.trace().count("ar-forward", "ar1"), 1u);
    EXPECT_EQ(s.trace().count("ar-forward", "ar2"), 1u);
    EXPECT_EQ(s.trace().count("ar-wrap"), 2u);
    EXPECT_EQ(encodeData(*j.delivered[0]), encodeData(*s.produced("p", Name::parse("/prod/a"))));
    EXPECT_TRUE(verifyData(*j.delivered[0], s.producerKey("p")));
    EXPECT_EQ(s.ar("ar1").pendingCount(), 0u);
    if (m == Mode::AndanaS) {
      EXPECT_EQ(s.trace().count("session-up", "c"), 2u);
      EXPECT_GT(j.setupTime(), 0);
    }
    else {
      EXPECT_EQ(j.setupTime(), 0);
    }
  }
}

TEST(Simulator, SegmentedFetchReassembles)
{
  for (auto m : {Mode::Plain, Mode::AndanaA, Mode::AndanaS}) {
    Simulator s(Topology::lineFour());
    auto id = s.fetch("c", Name::parse("/prod/file"), 10'000, m, millis(3));
    s.run();
    const auto& j = s.job(id);
    ASSERT_TRUE(j.complete);
    ASSERT_EQ(j.interests.size(), 3u);
    std::size_t total = 0;
    for (const auto& d : j.delivered) {
      total += d->payload.size();
    }
    EXPECT_EQ(total, 10'000u);
    EXPECT_GE(j.finishedAt, j.setupDone);
    EXPECT_GE(j.setupDone, j.requestedAt);
  }
}

TEST(Simulator, CollapsesSimultaneousInterests)
{
  for (std::size_t n : {2u, 5u, 10u}) {
    Simulator s(star(n));
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back(s.request("c" + std::to_string(i), Interest(Name::parse("/prod/shared")), Mode::Plain, 0));
    }
    s.run();
    EXPECT_EQ(s.producerInterests("p"), 1u);
    for (auto id : ids) {
      EXPECT_TRUE(s.job(id).complete);
    }
    EXPECT_EQ(s.trace().count("collapse", "r"), n - 1);
  }
}

TEST(Simulator, TraceTimesNeverDecrease)
{
  SimConfig cfg;
  Simulator s(Topology::lineFour(), cfg, AdversarySpec{{}, {}, {"ar2"}, {{"c", 1}}});
  s.fetch("c", Name::parse("/prod/f"), 30'000, Mode::AndanaA, 0);
  s.run();
  SimTime last = 0;
  for (const auto& l : s.trace().lines()) {
    auto field = l.starts_with("view|") ? l.substr(5) : l;
    auto t = std::stoll(field.substr(0, field.find('|')));
    EXPECT_GE(t, last) << l;
    last = t;
  }
}

TEST(Simulator, CompromiseTooSoon)
{
  Simulator s(Topology::lineFour());
  auto d = s.minCompromiseDelay();
  EXPECT_EQ(d, 10 * s.topology().maxRoundTrip());
  EXPECT_THROW(s.compromise("ar1", d - 1), TooSoon);
  EXPECT_NO_THROW(s.compromise("ar1", d));
  EXPECT_FALSE(s.isCompromised("ar1", d - 1));
  EXPECT_TRUE(s.isCompromised("ar1", d));
  EXPECT_THROW(s.compromise("nobody", d), ConfigError);
}

TEST(Simulator, TappingEveryInterfaceCompromisesRouter)
{
  Simulator s(Topology::lineFour());
  s.tap({"ar1", 1}, 0);
  EXPECT_FALSE(s.isCompromised("ar1", 0));
  s.tap({"ar1", 2}, millis(5));
  EXPECT_FALSE(s.isCompromised("ar1", millis(4)));
  EXPECT_TRUE(s.isCompromised("ar1", millis(5)));
  // Consumers are not auto-compromised.
  s.tap({"c", 1}, 0);
  EXPECT_FALSE(s.isCompromised("c", 0));
}

// Entry AR of the single circuit a fresh seed-1 simulator builds for one interest.
std::string
entryOfFirstCircuit(Mode mode)
{
  Simulator s(Topology::lineFour());
  s.request("c", Interest(Name::parse("/prod/secret")), mode, 0);
  s.run();
  for (const auto& l : s.trace().lines()) {
    if (l.find("|ar-forward|") != std::string::npos) {
      return l.substr(l.find('|') + 1, 3);
    }
  }
  return {};
}

// What a passive observer next to the consumer, or a single compromised AR, can read.
TEST(Simulator, ViewRevealsOnlyWhatKeysAllow)
{
  auto plainOf = [] (const Simulator& s, const std::string& node, bool interest, bool inbound) {
    std::vector<std::string> out;
    for (const auto& o : s.view()) {
      if (o.at.node == node && std::holds_alternative<Interest>(o.packet) == interest && o.inbound == inbound) {
        out.push_back(o.plain);
      }
    }
    return out;
  };
  auto contains = [] (const std::vector<std::string>& v, const std::string& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };

  {
    Simulator s(Topology::lineFour(), {}, AdversarySpec{{}, {}, {}, {{"c", 1}}});
    s.request("c", Interest(Name::parse("/prod/secret")), Mode::AndanaA, 0);
    s.run();
    for (const auto& o : s.view()) {
      EXPECT_EQ(o.plain, "-");
      EXPECT_FALSE(Name::parse("/prod").isPrefixOf(packetName(o.packet)));
    }
    EXPECT_EQ(s.view().size(), 2u);
  }

  auto entry = entryOfFirstCircuit(Mode::AndanaA);
  ASSERT_TRUE(entry == "ar1" || entry == "ar2");
  auto exit = entry == "ar1" ? "ar2" : "ar1";
  auto exitNs = entry == "ar1" ? "/orgB/ar2/" : "/orgA/ar1/";
  {
    Simulator s(Topology::lineFour(), {}, AdversarySpec{{}, {}, {entry}, {}});
    s.request("c", Interest(Name::parse("/prod/secret")), Mode::AndanaA, 0);
    s.run();
    auto in = plainOf(s, entry, true, true);
    bool sawRelay = false;
    for (const auto& p : in) {
      EXPECT_NE(p, "interest:/prod/secret");
      sawRelay = sawRelay || p.starts_with(std::string("relay:") + exitNs);
    }
    EXPECT_TRUE(sawRelay);
    for (const auto& p : plainOf(s, entry, false, true)) {
      EXPECT_FALSE(p.starts_with("data:")) << p;
    }
    for (const auto& p : plainOf(s, entry, false, false)) {
      EXPECT_FALSE(p.starts_with("data:")) << p;
    }
  }
  {
    Simulator s(Topology::lineFour(), {}, AdversarySpec{{}, {}, {exit}, {}});
    s.request("c", Interest(Name::parse("/prod/secret")), Mode::AndanaA, 0);
    s.run();
    EXPECT_TRUE(contains(plainOf(s, exit, true, true), "interest:/prod/secret"));
    EXPECT_TRUE(contains(plainOf(s, exit, false, false), "data:/prod/secret"));
  }
  {
    Simulator s(Topology::lineFour(), {}, AdversarySpec{{}, {"c"}, {}, {}});
    s.request("c", Interest(Name::parse("/prod/secret")), Mode::AndanaS, 0);
    s.run();
    EXPECT_TRUE(contains(plainOf(s, "c", true, false), "interest:/prod/secret"));
    EXPECT_TRUE(contains(plainOf(s, "c", false, true), "data:/prod/secret"));
  }
}

TEST(Simulator, ReplayRequiresObservation)
{
  Simulator s(Topology::lineFour(), {}, AdversarySpec{{}, {}, {}, {{"c", 1}}});
  s.request("c", Interest(Name::parse("/prod/x")), Mode::AndanaA, 0);
  s.run();
  EXPECT_THROW(s.replay(Interest(Name::parse("/orgA/ar1/zz")), {"c", 1}, s.now() + 1), NotObserved);
  const auto& captured = s.view().front().packet;
  EXPECT_THROW(s.replay(captured, {"ar2", 2}, s.now() + 1), ConfigError);
}

TEST(Simulator, ReplayIsCachedThenRejected)
{
  Simulator s(Topology::lineFour(), {}, AdversarySpec{{}, {}, {}, {{"c", 1}}});
  s.request("c", Interest(Name::parse("/prod/x")), Mode::AndanaA, 0);
  s.run();
  ASSERT_EQ(s.trace().count("ar-forward", "ar1"), 1u);
  Packet captured = s.view().front().packet;
  auto sentAt = s.view().front().time;

  // Inside the Data freshness the entry AR's content store answers.
  s.replay(captured, {"c", 1}, sentAt + millis(1000));
  s.run();
  EXPECT_EQ(s.trace().count("cache-hit", "ar1"), 1u);
  EXPECT_EQ(s.trace().count("ar-forward", "ar1"), 1u);

  // Once the cached copy is stale and the window has passed, the AR drops it without a reply.
  auto dataBefore = s.trace().count("tx-data", "ar1");
  s.replay(captured, {"c", 1}, sentAt + millis(6000));
  s.run();
  EXPECT_EQ(s.trace().count("ar-reject-stale-timestamp", "ar1"), 1u);
  EXPECT_EQ(s.trace().count("ar-forward", "ar1"), 1u);
  EXPECT_EQ(s.trace().count("tx-data", "ar1"), dataBefore);
}

TEST(Simulator, KeyringOnlyAfterCompromise)
{
  Simulator s(Topology::lineFour());
  auto when = s.minCompromiseDelay() + millis(100);
  s.compromise("ar1", when);
  s.compromise("ar2", when);
  s.request("c", Interest(Name::parse("/prod/early")), Mode::AndanaA, 0);
  s.request("c", Interest(Name::parse("/prod/late")), Mode::AndanaA, when + millis(1));
  s.run();
  // One tuple per AR for the late interest, nothing for the early one.
  ASSERT_EQ(s.keyring().size(), 2u);
  std::size_t revealing = 0;
  for (const auto& [outer, k] : s.keyring()) {
    EXPECT_EQ(k.interestPlain.find("early"), std::string::npos);
    revealing += k.interestPlain == "interest:/prod/late";
  }
  EXPECT_EQ(revealing, 1u);
}

TEST(Simulator, RejectsUnknownEntities)
{
  Simulator s(Topology::lineFour());
  EXPECT_THROW(s.fetch("ar1", Name::parse("/prod/a"), 1, Mode::Plain, 0), ConfigError);
  EXPECT_THROW(s.ar("c"), ConfigError);
  EXPECT_THROW(Simulator(Topology::lineFour(), {}, AdversarySpec{{"ghost"}, {}, {}, {}}), ConfigError);
  EXPECT_THROW(Simulator(Topology::lineFour(), {}, AdversarySpec{{}, {}, {}, {{"c", 9}}}), ConfigError);
  EXPECT_THROW(parseMode("tor"), ConfigError);
  EXPECT_EQ(parseMode("andana-s"), Mode::AndanaS);
}

TEST(Simulator, UnreachableNameTimesOut)
{
  SimConfig cfg;
  cfg.maxRetries = 1;
  Simulator s(Topology::lineFour(), cfg);
  auto id = s.request("c", Interest(Name::parse("/nowhere/x")), Mode::Plain, 0);
  s.run();
  EXPECT_TRUE(s.job(id).failed);
  EXPECT_FALSE(s.job(id).complete);
  EXPECT_EQ(s.job(id).retransmissions, 1u);
}

TEST(TraceName, ShortensLongComponents)
{
  auto n = Name::parse("/a").append(Bytes(100, 7));
  auto t = traceName(n);
  EXPECT_EQ(t.size(), 3u + 17u);
  EXPECT_EQ(t.substr(0, 4), "/a/~");
  EXPECT_EQ(traceName(Name::parse("/a/b")), "/a/b");
  EXPECT_NE(traceName(Name::parse("/a").append(Bytes(100, 8))), t);
}

} // namespace
