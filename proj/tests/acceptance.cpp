// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "andana/analyzer.hpp"
#include "andana/consumer.hpp"
#include "andana/harness.hpp"
#include "andana/router.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

using namespace andana;
using namespace andana::sim;
namespace an = andana::analysis;
using andana::testing::build;
using andana::testing::NodeDecl;

namespace {

struct Outcome
{
  bool pass = true;
  std::string detail;

  void
  fail(const std::string& why)
  {
    if (pass) {
      detail = why;
    }
    pass = false;
  }
};

double
secondsSince(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string
format(const char* fmt, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// 1. Random interests over random circuits come back byte-identical and verifiable.
Outcome
endToEnd()
{
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  DeterministicRng gen(2024, "acceptance-1");
  std::size_t ok = 0, total = 0;
  for (auto mode : {Mode::AndanaA, Mode::AndanaS}) {
    SimConfig cfg;
    cfg.seed = gen.uniform(1u << 30);
    Simulator s(Topology::lineFour(), cfg);
    std::vector<std::pair<std::size_t, Name>> jobs;
    for (int i = 0; i < 100; ++i) {
      std::vector<Name::Component> comps{toBytes("prod")};
      for (std::uint64_t k = 0, n = 1 + gen.uniform(4); k < n; ++k) {
        comps.push_back(gen.bytes(1 + gen.uniform(24)));
      }
      Name name(comps);
      SimTime at = static_cast<SimTime>(gen.uniform(2'000'000));
      jobs.emplace_back(s.request("c", Interest(name), mode, at), name);
    }
    s.run();
    for (const auto& [id, name] : jobs) {
      ++total;
      const auto& job = s.job(id);
      const Data* original = s.produced("p", name);
      if (!job.complete || job.delivered.empty() || !job.delivered[0] || !original) {
        o.fail("interest " + name.toUri() + " not satisfied");
        continue;
      }
      const Data& got = *job.delivered[0];
      if (encodeData(got) != encodeData(*original) || !verifyData(got, s.producerKey("p"))) {
        o.fail("Data for " + name.toUri() + " differs or fails verification");
        continue;
      }
      ++ok;
    }
  }
  double secs = secondsSince(t0);
  if (secs >= 10.0) {
    o.fail(format("took %.2f s", secs));
  }
  o.detail = format("%zu/%zu byte-identical and verified, %.2f s", ok, total, secs) +
             (o.pass ? "" : "; " + o.detail);
  return o;
}

// 2. Overhead ordering at 1 MB over five seeds.
Outcome
overhead()
{
  Outcome o;
  double minA = 1e9, maxA = 0, worstSetupGap = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    harness::FetchOptions f;
    f.size = 1 << 20;
    f.seed = seed;
    f.includeSetup = true;
    double plain = harness::fetch(Topology::lineFour(), f).totalMs;
    f.mode = Mode::AndanaA;
    double a = harness::fetch(Topology::lineFour(), f).totalMs / plain;
    f.mode = Mode::AndanaS;
    auto sm = harness::fetch(Topology::lineFour(), f);
    double sIncluded = sm.totalMs / plain;
    double sExcluded = (sm.totalMs - sm.setupMs) / plain;
    // Sessions are set up once per AR, then carry every segment.
    if (sm.segments < 16) {
      o.fail("fewer than 16 interests per session");
    }
    minA = std::min(minA, a);
    maxA = std::max(maxA, a);
    double gap = std::abs(sIncluded - sExcluded) / sIncluded;
    worstSetupGap = std::max(worstSetupGap, gap);
    if (a < 1.2 || a > 3.0) {
      o.fail(format("seed %llu: A/plain %.3f", static_cast<unsigned long long>(seed), a));
    }
    if (sIncluded > a) {
      o.fail(format("seed %llu: S/plain %.3f above A/plain %.3f", static_cast<unsigned long long>(seed),
                    sIncluded, a));
    }
    if (gap > 0.02) {
      o.fail(format("seed %llu: setup changes the S ratio by %.2f%%", static_cast<unsigned long long>(seed),
                    100 * gap));
    }
  }
  std::string why = o.pass ? "" : "; " + o.detail;
  o.detail = format("A/plain in [%.3f, %.3f], S <= A, setup gap %.3f%%", minA, maxA, 100 * worstSetupGap) + why;
  return o;
}

Topology
star(std::size_t consumers)
{
  std::vector<NodeDecl> nodes{{"r", Role::Router}, {"prod", Role::Producer}};
  std::vector<std::pair<std::string, std::string>> edges{{"r", "prod"}};
  for (std::size_t i = 0; i < consumers; ++i) {
    nodes.push_back({"c" + std::to_string(i), Role::Consumer});
    edges.emplace_back("c" + std::to_string(i), "r");
  }
  return build(nodes, edges);
}

// 3. Simultaneous interests for one name collapse in the PIT.
Outcome
collapsing()
{
  Outcome o;
  std::string summary;
  for (std::size_t n : {2u, 5u, 10u}) {
    Simulator s(star(n));
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back(s.request("c" + std::to_string(i), Interest(Name::parse("/prod/shared")), Mode::Plain, 0));
    }
    s.run();
    auto upstream = s.producerInterests("prod");
    std::size_t delivered = 0;
    for (auto id : ids) {
      const auto& j = s.job(id);
      delivered += j.complete && !j.delivered.empty() && j.delivered[0].has_value();
    }
    summary += format("N=%zu: %llu upstream, %zu delivered; ", n, static_cast<unsigned long long>(upstream), delivered);
    if (upstream != 1 || delivered != n) {
      o.fail(format("N=%zu gave %llu producer-side interests and %zu deliveries", n,
                    static_cast<unsigned long long>(upstream), delivered));
    }
  }
  summary.resize(summary.size() - 2);
  o.detail = summary + (o.pass ? "" : "; " + o.detail);
  return o;
}

// 4. Replays: the timestamp window at the AR, then the cache and the window together in the network.
Outcome
replay()
{
  Outcome o;
  const std::int64_t w = 2000;
  DeterministicRng rng(4, "acceptance-4");
  RouterConfig c1, c2;
  c1.ns = Name::parse("/orgA/ar1");
  c1.organization = "A";
  c2.ns = Name::parse("/orgB/ar2");
  c2.organization = "B";
  AnonymizingRouter ar1(c1, 1, 0), ar2(c2, 2, 0);
  std::vector<ARDescriptor> ars{ar1.descriptor(0), ar2.descriptor(0)};
  const SimTime arNow = millis(100'000);
  for (std::int64_t off : {-w - 1, -w, std::int64_t{0}, w, w + 1}) {
    auto circuit = selectCircuit(ars, rng, 0);
    auto eint = encryptInterestAsymmetric(circuit, Interest(Name::parse("/prod/w")), arNow + millis(off), 0, rng);
    auto& entry = circuit.entry.ns == ar1.ns() ? ar1 : ar2;
    auto before = entry.pendingCount();
    auto v = entry.handleEncryptedInterest(eint, arNow);
    bool inside = off >= -w && off <= w;
    bool forwarded = std::holds_alternative<Forward>(v);
    if (forwarded != inside) {
      o.fail(format("skew %lld ms: %s", static_cast<long long>(off), forwarded ? "accepted" : "rejected"));
    }
    if (!forwarded && (std::get<Reject>(v).reason != RejectReason::StaleTimestamp || entry.pendingCount() != before)) {
      o.fail(format("skew %lld ms: reject is not a silent stale-timestamp drop", static_cast<long long>(off)));
    }
  }

  // In the network a replay arrives 0, w or w+1 ms after the original: the entry AR's content store
  // answers and nothing goes upstream. Once the cached copy has expired the AR drops it unanswered.
  const SimTime freshness = millis(static_cast<std::int64_t>(kDefaultFreshnessMs));
  std::size_t cacheHits = 0, silent = 0;
  std::vector<std::pair<SimTime, bool>> delays{{0, true}, {millis(w), true}, {millis(w + 1), true},
                                               {freshness + millis(w + 1), false}};
  for (const auto& [delay, cached] : delays) {
    Simulator s(Topology::lineFour(), {}, AdversarySpec{{}, {}, {}, {{"c", 1}}});
    s.request("c", Interest(Name::parse("/prod/replayed")), Mode::AndanaA, 0);
    s.run();
    Packet captured = s.view().front().packet;
    SimTime sentAt = s.view().front().time;
    auto forwards = s.trace().count("ar-forward", "ar1") + s.trace().count("ar-forward", "ar2");
    auto upstream = s.trace().count("tx-interest", "ar1");
    auto data = s.trace().count("tx-data", "ar1");
    auto hits = s.trace().count("cache-hit", "ar1");
    s.replay(captured, {"c", 1}, sentAt + delay);
    s.run();
    bool noForward = s.trace().count("ar-forward", "ar1") + s.trace().count("ar-forward", "ar2") == forwards &&
                     s.trace().count("tx-interest", "ar1") == upstream;
    if (!noForward) {
      o.fail(format("replay after %lld us was forwarded upstream", static_cast<long long>(delay)));
    }
    if (cached) {
      bool hit = s.trace().count("cache-hit", "ar1") == hits + 1;
      cacheHits += hit;
      if (!hit) {
        o.fail(format("replay after %lld us missed the cache", static_cast<long long>(delay)));
      }
    }
    else {
      bool dropped = s.trace().count("ar-reject-stale-timestamp", "ar1") == 1 && s.trace().count("tx-data", "ar1") == data;
      silent += dropped;
      if (!dropped) {
        o.fail("expired replay was not silently rejected");
      }
    }
  }
  std::string why = o.pass ? "" : "; " + o.detail;
  o.detail = format("window boundaries exact at 5 offsets; %zu/3 in-window replays cached, %zu/1 expired replay "
                    "silently rejected, 0 upstream forwards",
                    cacheHits, silent) +
             why;
  return o;
}

// 5. Chosen-ciphertext contract on both ciphers.
Outcome
cca()
{
  Outcome o;
  DeterministicRng rng(5, "acceptance-5");
  auto kp = crypto::generateKeyPair(crypto::KeyRole::Encryption, rng);
  auto sym = crypto::SymmetricKey::generate(rng);
  Interest interest(Name::parse("/prod/secret/page"));
  interest.nonce = Bytes{1, 2, 3, 4};
  auto plain = encodeInterest(interest);
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    for (int which = 0; which < 2; ++which) {
      Bytes ct = which == 0 ? crypto::pkeEncrypt(kp.pk, plain, rng) : crypto::symEncrypt(sym, plain, rng);
      ct[rng.uniform(ct.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
      try {
        if (which == 0) {
          crypto::pkeDecrypt(kp.sk, ct);
        }
        else {
          crypto::symDecrypt(sym, ct);
        }
        o.fail("a tampered ciphertext decrypted");
      }
      catch (const crypto::DecryptionFailed&) {
        ++failures;
      }
    }
  }

  RouterConfig c1, c2;
  c1.ns = Name::parse("/orgA/ar1");
  c1.organization = "A";
  c2.ns = Name::parse("/orgB/ar2");
  c2.organization = "B";
  AnonymizingRouter ar1(c1, 1, 0), ar2(c2, 2, 0);
  std::vector<ARDescriptor> ars{ar1.descriptor(0), ar2.descriptor(0)};
  auto circuit = selectCircuit(ars, rng, 0);
  std::set<Bytes> seen;
  for (int i = 0; i < 500; ++i) {
    auto copy = circuit;
    seen.insert(encodeInterest(encryptInterestAsymmetric(copy, interest, 0, millis(100), rng)));
    seen.insert(crypto::pkeEncrypt(kp.pk, plain, rng));
  }
  if (seen.size() != 1000) {
    o.fail(format("only %zu distinct encryptions out of 1000", seen.size()));
  }
  std::string why = o.pass ? "" : "; " + o.detail;
  o.detail = format("%zu/2000 tampers raised DecryptionFailed, %zu/1000 duplicate encryptions distinct", failures,
                    seen.size()) +
             why;
  return o;
}

// 6. Encryption key rotation with a grace period.
Outcome
rotation()
{
  Outcome o;
  DeterministicRng rng(6, "acceptance-6");
  RouterConfig c1, c2;
  c1.ns = Name::parse("/orgA/ar1");
  c1.organization = "A";
  c2.ns = Name::parse("/orgB/ar2");
  c2.organization = "B";
  AnonymizingRouter ar1(c1, 1, 0), ar2(c2, 2, 0);
  std::vector<ARDescriptor> oldList{ar1.descriptor(0), ar2.descriptor(0)};
  const SimTime grace = ar1.config().gracePeriod;
  const SimTime rotatedAt = millis(1000);

  auto cert = ar1.rotateEncryptionKey(rotatedAt);
  if (!verifyCertificate(cert, ar1.signingKey())) {
    o.fail("rotated certificate does not verify");
  }
  auto entryAr1 = [&] (const std::vector<ARDescriptor>& list, SimTime now) {
    auto c = selectCircuit(list, rng, now);
    while (c.entry.ns != ar1.ns()) {
      c = selectCircuit(list, rng, now);
    }
    return c;
  };
  Interest interest(Name::parse("/prod/rot"));
  for (SimTime t : {rotatedAt, rotatedAt + grace / 2, rotatedAt + grace}) {
    auto c = entryAr1(oldList, 0);
    auto v = ar1.handleEncryptedInterest(encryptInterestAsymmetric(c, interest, t, 0, rng), t);
    if (!std::holds_alternative<Forward>(v)) {
      o.fail(format("old key refused %lld us into the grace period", static_cast<long long>(t - rotatedAt)));
    }
  }
  for (SimTime t : {rotatedAt + grace + 1000, rotatedAt + 2 * grace}) {
    auto c = entryAr1(oldList, 0);
    auto v = ar1.handleEncryptedInterest(encryptInterestAsymmetric(c, interest, t, 0, rng), t);
    if (!std::holds_alternative<Reject>(v) || std::get<Reject>(v).reason != RejectReason::BadDecryption) {
      o.fail("old key still decrypts after the grace period");
    }
  }
  SimTime after = rotatedAt + 2 * grace;
  std::vector<ARDescriptor> newList{ar1.descriptor(after), ar2.descriptor(after)};
  auto c = entryAr1(newList, after);
  if (!std::holds_alternative<Forward>(
        ar1.handleEncryptedInterest(encryptInterestAsymmetric(c, interest, after, 0, rng), after))) {
    o.fail("the rotated key does not decrypt");
  }
  std::size_t verified = 1;
  for (int i = 1; i <= 5; ++i) {
    auto next = ar2.rotateEncryptionKey(millis(i * 500));
    if (verifyCertificate(next, ar2.signingKey()) && !verifyCertificate(next, ar1.signingKey())) {
      ++verified;
    }
    else {
      o.fail("a rotated certificate fails verification or verifies under the wrong key");
    }
  }
  std::string why = o.pass ? "" : "; " + o.detail;
  o.detail = format("old key accepted through the grace period and refused after; %zu/6 rotated certificates "
                    "verify",
                    verified) +
             why;
  return o;
}

struct Shape
{
  std::string kind;
  std::size_t consumers, ars, producers;
};

Topology
shapeTopology(const Shape& s)
{
  std::vector<NodeDecl> nodes;
  std::vector<std::string> order;
  for (std::size_t i = s.consumers; i >= 1; --i) {
    order.push_back("c" + std::to_string(i));
    nodes.push_back({order.back(), Role::Consumer});
  }
  for (std::size_t i = 1; i <= s.ars; ++i) {
    order.push_back("ar" + std::to_string(i));
    nodes.push_back({order.back(), Role::Ar});
  }
  for (std::size_t i = 1; i <= s.producers; ++i) {
    order.push_back("p" + std::to_string(i));
    nodes.push_back({order.back(), Role::Producer});
  }
  std::vector<std::pair<std::string, std::string>> edges;
  if (s.kind == "line") {
    for (std::size_t i = 1; i < order.size(); ++i) {
      edges.emplace_back(order[i - 1], order[i]);
    }
  }
  else {
    nodes.push_back({"hub", Role::Router});
    for (const auto& id : order) {
      edges.emplace_back("hub", id);
    }
  }
  return build(nodes, edges);
}

// 7. Every positive analyzer verdict has an oracle-confirmed witness.
Outcome
analyzerVersusOracle()
{
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  DeterministicRng rng(7, "acceptance-7");
  std::size_t cases = 0, positives = 0, confirmed = 0, oracleOnly = 0;
  for (const std::string kind : {"line", "star"}) {
    for (std::size_t nc = 1; nc <= 3; ++nc) {
      for (std::size_t na = 2; na <= 3; ++na) {
        for (std::size_t np = 1; np <= 2; ++np) {
          Shape shape{kind, nc, na, np};
          auto t = shapeTopology(shape);
          std::vector<InterfaceRef> ifaces;
          for (const auto& n : t.nodes) {
            for (auto f : t.interfaces(n.id)) {
              ifaces.push_back({n.id, f});
            }
          }
          an::Configuration config;
          for (std::size_t i = 1; i <= nc; ++i) {
            auto r1 = 1 + rng.uniform(na);
            auto r2 = 1 + (r1 + rng.uniform(na - 1)) % na;
            config["c" + std::to_string(i)].push_back({"ar" + std::to_string(r1), "ar" + std::to_string(r2),
                                                       "p" + std::to_string(1 + rng.uniform(np)),
                                                       "x" + std::to_string(rng.uniform(2))});
          }
          // Every tap subset of size at most 3; every third one also has an AR compromised.
          std::vector<std::vector<std::size_t>> subsets{{}};
          for (std::size_t a = 0; a < ifaces.size(); ++a) {
            subsets.push_back({a});
            for (std::size_t b = a + 1; b < ifaces.size(); ++b) {
              subsets.push_back({a, b});
              for (std::size_t c = b + 1; c < ifaces.size(); ++c) {
                subsets.push_back({a, b, c});
              }
            }
          }
          for (std::size_t k = 0; k < subsets.size(); ++k) {
            an::Adversary adv;
            for (auto i : subsets[k]) {
              adv.taps.insert(ifaces[i]);
            }
            if (k % 3 == 1) {
              adv.routers.insert("ar" + std::to_string(1 + k / 3 % na));
            }
            ++cases;
            for (const auto& [u, actions] : config) {
              auto cv = an::checkConsumerAnonymity(config, t, adv, u, 0);
              auto cw = an::findConsumerWitness(config, t, adv, u, 0);
              if (cv.anonymous) {
                ++positives;
                if (cw && an::oracleIndistinguishable(config, cv.witnessConfig, t, adv)) {
                  ++confirmed;
                }
                else {
                  o.fail(kind + " instance: consumer anonymity of " + u + " without a witness");
                }
              }
              else if (cw) {
                ++oracleOnly;
              }
              const auto& p = actions[0].producer;
              auto pv = an::checkProducerAnonymity(config, t, adv, u, p);
              auto uv = an::checkUnlinkability(config, t, adv, u, p);
              auto pw = (pv.anonymous || uv.unlinkable()) ? an::findProducerWitness(config, t, adv, u, 0)
                                                          : std::optional<an::Configuration>{};
              if (pv.anonymous) {
                ++positives;
                if (pw && an::oracleIndistinguishable(config, pv.witnessConfig, t, adv)) {
                  ++confirmed;
                }
                else {
                  o.fail(kind + " instance: producer anonymity of " + u + " without a witness");
                }
              }
              if (uv.unlinkable()) {
                ++positives;
                auto w = an::findUnlinkabilityWitness(config, t, adv, u, 0);
                if (w && an::oracleIndistinguishable(config, uv.witnessConfig, t, adv)) {
                  ++confirmed;
                }
                else {
                  o.fail(kind + " instance: unlinkability of " + u + " without a witness");
                }
              }
            }
          }
        }
      }
    }
  }
  double secs = secondsSince(t0);
  if (secs >= 60.0) {
    o.fail(format("took %.1f s", secs));
  }
  if (cases < 2000) {
    o.fail("family too small");
  }
  std::string why = o.pass ? "" : "; " + o.detail;
  o.detail = format("%zu instances, %zu positive verdicts, %zu confirmed, %zu false positives, %zu consumer "
                    "witnesses the conditions miss, %.1f s",
                    cases, positives, confirmed, positives - confirmed, oracleOnly, secs) +
             why;
  return o;
}

// 8. Interface anonymity sets against sender enumeration on every connected graph of at most 6 nodes.
Outcome
anonymitySets()
{
  Outcome o;
  std::size_t graphs = 0, checks = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        pairs.emplace_back(a, b);
      }
    }
    // Roles by label: the last node produces, the one before it is an AR when n > 2, node 0 is a
    // consumer and the rest are plain routers. Every labeled graph is enumerated, so every placement
    // of these roles on every unlabeled graph appears.
    std::vector<NodeDecl> nodes;
    for (std::size_t i = 0; i < n; ++i) {
      Role r = i + 1 == n ? Role::Producer : (i + 2 == n && n > 2) ? Role::Ar : i == 0 ? Role::Consumer : Role::Router;
      nodes.push_back({"n" + std::to_string(i), r});
    }
    for (std::uint32_t mask = 1; mask < (1u << pairs.size()); ++mask) {
      std::vector<std::pair<std::string, std::string>> edges;
      std::vector<std::size_t> parent(n);
      for (std::size_t i = 0; i < n; ++i) {
        parent[i] = i;
      }
      std::function<std::size_t(std::size_t)> find = [&] (std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
      };
      std::size_t components = n;
      for (std::size_t e = 0; e < pairs.size(); ++e) {
        if (mask >> e & 1u) {
          edges.emplace_back(nodes[pairs[e].first].id, nodes[pairs[e].second].id);
          auto ra = find(pairs[e].first), rb = find(pairs[e].second);
          if (ra != rb) {
            parent[ra] = rb;
            --components;
          }
        }
      }
      if (components != 1) {
        continue;
      }
      ++graphs;
      auto t = build(nodes, edges);
      auto brute = andana::testing::bruteForceSenders(t);
      for (const auto& node : t.nodes) {
        for (auto f : t.interfaces(node.id)) {
          InterfaceRef at{node.id, f};
          std::set<std::string> all;
          for (const auto& [dest, senders] : brute[at]) {
            all.insert(senders.begin(), senders.end());
          }
          ++checks;
          if (an::interfaceAnonymitySet(t, at) != all) {
            o.fail(format("%zu-node graph %u: mismatch at %s:%u", n, mask, node.id.c_str(), f));
          }
          for (const auto& d : t.nodes) {
            if (d.prefix.empty()) {
              continue;
            }
            ++checks;
            if (an::interfaceAnonymitySet(t, at, d.prefix) != brute[at][d.prefix]) {
              o.fail(format("%zu-node graph %u: mismatch at %s:%u for %s", n, mask, node.id.c_str(), f,
                            d.prefix.toUri().c_str()));
            }
          }
        }
      }
    }
  }
  std::string why = o.pass ? "" : "; " + o.detail;
  o.detail = format("%zu connected graphs, %zu interface sets equal to enumeration", graphs, checks) + why;
  return o;
}

// 9. Equal seeds give byte-identical benchmark output.
Outcome
determinism()
{
  Outcome o;
  harness::BenchOptions b;
  b.seed = 42;
  auto first = harness::bench(Topology::lineFour(), b);
  auto second = harness::bench(Topology::lineFour(), b);
  if (first.csv != second.csv) {
    o.fail("CSV differs");
  }
  if (first.traces != second.traces) {
    o.fail("TraceLogs differ");
  }
  std::string why = o.pass ? "" : "; " + o.detail;
  o.detail = format("desk grid twice: CSV %zu bytes, TraceLogs %zu bytes, identical", first.csv.size(),
                    first.traces.size()) +
             why;
  return o;
}

} // namespace

int
main()
{
  struct Criterion
  {
    const char* title;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
    {"end-to-end correctness", endToEnd},
    {"overhead ratios", overhead},
    {"interest collapsing", collapsing},
    {"replay defense", replay},
    {"CCA contract", cca},
    {"key rotation", rotation},
    {"analyzer vs. oracle", analyzerVersusOracle},
    {"anonymity sets", anonymitySets},
    {"determinism", determinism},
  };
  int failed = 0;
  int index = 1;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    }
    catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", index++, c.title, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
