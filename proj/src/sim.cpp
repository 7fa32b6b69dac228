#include "andana/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace andana::sim {

namespace {

constexpr std::uint64_t kStartBit = 1ull << 63;

std::string
faceString(FaceId f)
{
  return f == kAppFace ? "app" : std::to_string(f);
}

std::uint64_t
fnv1a(ByteView b)
{
  std::uint64_t h = 1469598103934665603ull;
  for (auto c : b) {
    h = (h ^ c) * 1099511628211ull;
  }
  return h;
}

} // namespace

std::string_view
toString(Mode m)
{
  switch (m) {
  case Mode::Plain: return "plain";
  case Mode::AndanaA: return "andana-a";
  case Mode::AndanaS: return "andana-s";
  }
  return "?";
}

Mode
parseMode(std::string_view s)
{
  for (auto m : {Mode::Plain, Mode::AndanaA, Mode::AndanaS}) {
    if (toString(m) == s) {
      return m;
    }
  }
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

std::string
traceName(const Name& name)
{
  std::vector<Name::Component> comps;
  comps.reserve(name.size());
  for (const auto& c : name.components()) {
    if (c.size() > 32) {
      char buf[18];
      std::snprintf(buf, sizeof(buf), "~%016llx", static_cast<unsigned long long>(fnv1a(c)));
      comps.push_back(toBytes(buf));
    }
    else {
      comps.push_back(c);
    }
  }
  return Name(std::move(comps)).toUri();
}

void
TraceLog::add(SimTime t, std::string_view node, std::string_view event, std::string_view name,
              std::string_view iface)
{
  if (!enabled) {
    return;
  }
  std::string line = std::to_string(t);
  line.append("|").append(node).append("|").append(event).append("|").append(name).append("|").append(iface);
  m_lines.push_back(std::move(line));
}

void
TraceLog::addView(const Observation& o)
{
  if (!enabled) {
    return;
  }
  bool interest = std::holds_alternative<Interest>(o.packet);
  std::string line = "view|" + std::to_string(o.time) + "|" + o.at.node + "|" + faceString(o.at.iface) + "|" +
                     (o.inbound ? "in" : "out") + "|" + (interest ? "interest" : "data") + "|" +
                     traceName(packetName(o.packet)) + "|" + o.plain;
  m_lines.push_back(std::move(line));
}

std::string
TraceLog::text() const
{
  std::string out;
  for (const auto& l : m_lines) {
    out.append(l).push_back('\n');
  }
  return out;
}

std::size_t
TraceLog::count(std::string_view event, std::string_view node) const
{
  std::size_t n = 0;
  for (const auto& l : m_lines) {
    if (l.starts_with("view|")) {
      continue;
    }
    auto p1 = l.find('|');
    auto p2 = l.find('|', p1 + 1);
    auto p3 = l.find('|', p2 + 1);
    std::string_view v(l);
    if (v.substr(p2 + 1, p3 - p2 - 1) == event && (node.empty() || v.substr(p1 + 1, p2 - p1 - 1) == node)) {
      ++n;
    }
  }
  return n;
}

RandomSource&
AppContext::rng()
{
  return *m_sim.node(m_node).rng;
}

const SimConfig&
AppContext::config() const
{
  return m_sim.m_config;
}

void
AppContext::trace(std::string_view event, const Name& name)
{
  m_sim.m_trace.add(m_now, m_node, event, traceName(name), "app");
}

// ---------------------------------------------------------------------------

class ProducerApp : public App
{
public:
  ProducerApp(Name prefix, crypto::KeyPair key, std::uint64_t seed)
    : m_prefix(std::move(prefix))
    , m_key(std::move(key))
    , m_seed(seed)
  {
  }

  void
  publish(const Name& object, std::uint64_t size)
  {
    m_objects[object] = size;
  }

  void
  onInterest(const Interest& i, AppContext& ctx) override
  {
    ++m_interests;
    if (!m_prefix.isPrefixOf(i.name)) {
      return;
    }
    // Repository semantics: a name is signed once and served identically afterwards.
    auto it = m_store.find(i.name);
    if (it == m_store.end()) {
      Bytes payload = content(i.name, ctx.config().segmentSize);
      auto d = signData(i.name, std::move(payload), {m_prefix.append("KEY")}, m_key.sk, ctx.rng());
      ctx.charge(ctx.config().costs.sign);
      ctx.trace("produce", i.name);
      it = m_store.emplace(i.name, std::move(d)).first;
    }
    ctx.send(it->second);
  }

  std::uint64_t
  interests() const
  {
    return m_interests;
  }

  const Data*
  produced(const Name& n) const
  {
    auto it = m_store.find(n);
    return it == m_store.end() ? nullptr : &it->second;
  }

  const crypto::PublicKey&
  key() const
  {
    return m_key.pk;
  }

private:
  Bytes
  content(const Name& name, std::size_t segmentSize) const
  {
    std::size_t len = 256;
    if (!name.empty()) {
      auto obj = m_objects.find(name.getPrefix(name.size() - 1));
      const auto& last = name.back();
      bool numeric = !last.empty() && last.size() < 12 &&
                     std::all_of(last.begin(), last.end(), [] (std::uint8_t c) { return c >= '0' && c <= '9'; });
      if (obj != m_objects.end() && numeric) {
        auto idx = std::stoull(std::string(last.begin(), last.end()));
        auto offset = idx * segmentSize;
        len = offset >= obj->second ? 0 : std::min<std::uint64_t>(segmentSize, obj->second - offset);
      }
    }
    DeterministicRng gen(m_seed, "content" + name.toUri());
    return gen.bytes(len);
  }

private:
  Name m_prefix;
  crypto::KeyPair m_key;
  std::uint64_t m_seed;
  std::map<Name, std::uint64_t> m_objects;
  std::map<Name, Data> m_store;
  std::uint64_t m_interests = 0;
};

class ArApp : public App
{
public:
  ArApp(RouterConfig cfg, std::uint64_t seed)
    : router(std::move(cfg), seed, 0)
  {
  }

  void
  onInterest(const Interest& i, AppContext& ctx) override
  {
    auto before = router.stats();
    if (router.isCreateSession(i.name)) {
      ctx.send(router.handleCreateSession(i, ctx.now()));
      ctx.trace("session-accept", i.name);
    }
    else {
      auto v = router.handleEncryptedInterest(i, ctx.now());
      if (auto* f = std::get_if<Forward>(&v)) {
        ctx.sim().recordTuple(ctx.node(), i.name, router.pending().at(i.name), ctx.now());
        ctx.trace("ar-forward", f->inner.name);
        ctx.send(f->inner);
      }
      else {
        ctx.trace("ar-reject-" + std::string(toString(std::get<Reject>(v).reason)), i.name);
      }
    }
    charge(before, ctx);
  }

  void
  onData(const Data& d, AppContext& ctx) override
  {
    auto before = router.stats();
    auto out = router.handleReturningContent(d, ctx.now());
    if (out.empty()) {
      ctx.trace("ar-drop", d.name);
    }
    for (auto& w : out) {
      ctx.trace("ar-wrap", w.name);
      ctx.send(std::move(w));
    }
    charge(before, ctx);
  }

  AnonymizingRouter router;

private:
  void
  charge(const RouterStats& before, AppContext& ctx) const
  {
    const auto& c = ctx.config().costs;
    const auto& after = router.stats();
    SimTime cost = static_cast<SimTime>(after.pkeDecryptions - before.pkeDecryptions) * c.decrypt +
                   static_cast<SimTime>(after.signatures - before.signatures) * c.sign +
                   static_cast<SimTime>(after.dhAgreements - before.dhAgreements) * c.dh;
    if (auto n = after.symDecryptedBytes - before.symDecryptedBytes) {
      cost += c.sym(n);
    }
    if (auto n = after.symEncryptedBytes - before.symEncryptedBytes) {
      cost += c.sym(n);
    }
    ctx.charge(cost);
  }
};

class DirectoryApp : public App
{
public:
  DirectoryApp(const Directory& dir, crypto::KeyPair key)
    : m_dir(dir)
    , m_key(std::move(key))
  {
  }

  void
  onInterest(const Interest& i, AppContext& ctx) override
  {
    if (!directoryPrefix().isPrefixOf(i.name)) {
      return;
    }
    auto d = m_dir.publish(m_key.sk, ++m_version, ctx.now(), ctx.rng());
    // Answer under the requested name so that prefix interests are satisfied.
    if (!i.name.isPrefixOf(d.name)) {
      return;
    }
    ctx.charge(ctx.config().costs.sign);
    ctx.send(std::move(d));
  }

private:
  const Directory& m_dir;
  crypto::KeyPair m_key;
  std::uint64_t m_version = 0;
};

class ConsumerApp : public App
{
public:
  ConsumerApp(std::vector<ARDescriptor> listing, std::map<Name, crypto::PublicKey> producers)
    : m_listing(std::move(listing))
    , m_producers(std::move(producers))
  {
  }

  void
  onTimer(std::uint64_t token, AppContext& ctx) override
  {
    if (token & kStartBit) {
      startJob(token & ~kStartBit, ctx);
      return;
    }
    auto it = m_out.find(token);
    if (it == m_out.end()) {
      return;
    }
    auto o = it->second;
    forget(token, it);
    auto& r = ctx.sim().mutableJob(o.job);
    if (o.attempt < ctx.config().maxRetries) {
      ++r.retransmissions;
      ctx.trace("timeout", r.interests[o.index].name);
      issue(o.job, o.index, o.attempt + 1, ctx);
    }
    else {
      r.failed = true;
      --m_jobs[o.job].inflight;
      ctx.trace("fetch-timeout", r.interests[o.index].name);
    }
  }

  void
  onData(const Data& d, AppContext& ctx) override
  {
    if (auto h = m_handshakes.find(d.name); h != m_handshakes.end()) {
      finishHandshake(h, d, ctx);
      return;
    }
    std::vector<std::uint64_t> tokens;
    for (std::size_t len = 0; len <= d.name.size(); ++len) {
      auto [lo, hi] = m_byName.equal_range(d.name.getPrefix(len));
      for (auto it = lo; it != hi; ++it) {
        tokens.push_back(it->second);
      }
    }
    const auto& c = ctx.config().costs;
    for (auto token : tokens) {
      auto it = m_out.find(token);
      const auto& o = it->second;
      auto& r = ctx.sim().mutableJob(o.job);
      Data original;
      if (r.mode == Mode::Plain) {
        ctx.charge(c.verify);
        const auto* pk = producerKey(d.name);
        if (pk == nullptr || !verifyData(d, *pk)) {
          ctx.trace("bad-signature", d.name);
          continue;
        }
        original = d;
      }
      else {
        ctx.charge(2 * c.sym(d.payload.size()) + c.verify);
        try {
          const auto* pk = producerKey(r.interests[o.index].name);
          if (pk == nullptr) {
            throw ProducerSignatureInvalid("no trust anchor");
          }
          original = decapsulateContent(*o.circuit, d, *pk);
        }
        catch (const Error& e) {
          ctx.trace("discard", d.name);
          continue;
        }
      }
      deliver(token, it, std::move(original), ctx);
    }
  }

private:
  struct Outstanding
  {
    std::size_t job = 0;
    std::size_t index = 0;
    SimTime sentAt = 0;
    std::optional<EphemeralCircuit> circuit;
    unsigned attempt = 0;
    Name wireName;
  };

  struct JobState
  {
    std::size_t next = 0;
    std::size_t inflight = 0;
    std::size_t done = 0;
  };

  const crypto::PublicKey*
  producerKey(const Name& name) const
  {
    const crypto::PublicKey* best = nullptr;
    std::size_t bestLen = 0;
    for (const auto& [prefix, pk] : m_producers) {
      if (prefix.isPrefixOf(name) && (best == nullptr || prefix.size() > bestLen)) {
        best = &pk;
        bestLen = prefix.size();
      }
    }
    return best;
  }

  void
  startJob(std::size_t id, AppContext& ctx)
  {
    auto& r = ctx.sim().mutableJob(id);
    r.rtts.assign(r.interests.size(), -1);
    if (ctx.config().recordContent) {
      r.delivered.assign(r.interests.size(), std::nullopt);
    }
    m_jobs[id];
    if (r.mode == Mode::AndanaS) {
      bool missing = false;
      for (const auto& ar : m_listing) {
        auto s = m_sessions.find(ar.ns);
        if (s != m_sessions.end() && s->second.isLive(ctx.now())) {
          continue;
        }
        missing = true;
        bool pending = std::any_of(m_handshakes.begin(), m_handshakes.end(),
                                   [&] (const auto& h) { return h.second.ar.ns == ar.ns; });
        if (!pending) {
          auto p = beginSession(ar, ctx.config().handshake, ctx.now(), ctx.rng());
          ctx.charge(ctx.config().handshake == HandshakeMode::Dh ? ctx.config().costs.dh : ctx.config().costs.encrypt);
          ctx.trace("session-request", ar.ns);
          ctx.send(p.interest);
          m_handshakes.emplace(p.interest.name, std::move(p));
        }
      }
      if (missing) {
        m_waiting.push_back(id);
        return;
      }
    }
    r.setupDone = ctx.now();
    pump(id, ctx);
  }

  void
  finishHandshake(std::map<Name, PendingHandshake>::iterator h, const Data& d, AppContext& ctx)
  {
    const auto& c = ctx.config().costs;
    ctx.charge(c.verify + (h->second.mode == HandshakeMode::Dh ? c.dh : 0));
    try {
      auto s = completeSession(h->second, d, ctx.now());
      ctx.trace("session-up", s.ar.ns);
      m_sessions[s.ar.ns] = std::move(s);
    }
    catch (const HandshakeFailed&) {
      ctx.trace("session-failed", h->second.ar.ns);
    }
    m_handshakes.erase(h);
    if (!m_handshakes.empty()) {
      return;
    }
    auto waiting = std::move(m_waiting);
    m_waiting.clear();
    for (auto id : waiting) {
      auto& r = ctx.sim().mutableJob(id);
      bool ready = std::all_of(m_listing.begin(), m_listing.end(), [&] (const auto& ar) {
        auto s = m_sessions.find(ar.ns);
        return s != m_sessions.end() && s->second.isLive(ctx.now());
      });
      if (!ready) {
        r.failed = true;
        ctx.trace("setup-failed", r.name);
        continue;
      }
      r.setupDone = ctx.now();
      pump(id, ctx);
    }
  }

  void
  pump(std::size_t id, AppContext& ctx)
  {
    auto& js = m_jobs[id];
    auto& r = ctx.sim().mutableJob(id);
    while (js.inflight < ctx.config().window && js.next < r.interests.size()) {
      ++js.inflight;
      issue(id, js.next++, 0, ctx);
    }
    if (js.done == r.interests.size() && !r.complete) {
      r.complete = true;
      r.finishedAt = ctx.now();
      ctx.trace("job-done", r.name);
    }
  }

  void
  issue(std::size_t id, std::size_t index, unsigned attempt, AppContext& ctx)
  {
    auto& r = ctx.sim().mutableJob(id);
    const Interest& orig = r.interests[index];
    const auto& c = ctx.config().costs;
    Outstanding o{id, index, ctx.now(), std::nullopt, attempt, {}};
    Interest wire;
    try {
      if (r.mode == Mode::Plain) {
        wire = orig;
      }
      else {
        auto circuit = selectCircuit(m_listing, ctx.rng(), ctx.now(), ctx.config().maxInterestsPerCircuit);
        if (ctx.config().alignCircuits) {
          const auto& t = ctx.sim().topology();
          if (t.route(ctx.node(), circuit.exit.ns).size() < t.route(ctx.node(), circuit.entry.ns).size()) {
            std::swap(circuit.entry, circuit.exit);
          }
        }
        if (r.mode == Mode::AndanaA) {
          wire = encryptInterestAsymmetric(circuit, orig, ctx.now(), m_rtt.estimate(), ctx.rng());
          ctx.charge(2 * c.encrypt);
        }
        else {
          wire = encryptInterestSession(circuit, m_sessions.at(circuit.entry.ns), m_sessions.at(circuit.exit.ns),
                                        orig, ctx.now(), m_rtt.estimate(), ctx.rng());
          ctx.charge(2 * c.sym(wire.name.back().size()));
        }
        ctx.sim().recordCircuit(ctx.node(), wire.name, orig, circuit, ctx.now());
        o.circuit = std::move(circuit);
      }
    }
    catch (const std::exception& e) {
      r.failed = true;
      --m_jobs[id].inflight;
      ctx.trace("issue-failed", orig.name);
      return;
    }
    auto token = m_nextToken++;
    o.wireName = wire.name;
    m_byName.emplace(wire.name, token);
    m_out.emplace(token, std::move(o));
    ctx.trace("issue", orig.name);
    ctx.setTimer(ctx.now() + ctx.config().interestTimeout, token);
    ctx.send(std::move(wire));
  }

  void
  forget(std::uint64_t token, std::map<std::uint64_t, Outstanding>::iterator it)
  {
    auto [lo, hi] = m_byName.equal_range(it->second.wireName);
    for (auto j = lo; j != hi; ++j) {
      if (j->second == token) {
        m_byName.erase(j);
        break;
      }
    }
    m_out.erase(it);
  }

  void
  deliver(std::uint64_t token, std::map<std::uint64_t, Outstanding>::iterator it, Data data, AppContext& ctx)
  {
    auto o = it->second;
    forget(token, it);
    auto& r = ctx.sim().mutableJob(o.job);
    auto& js = m_jobs[o.job];
    SimTime rtt = ctx.now() - o.sentAt;
    m_rtt.addSample(rtt);
    r.rtts[o.index] = rtt;
    ctx.trace("deliver", data.name);
    if (ctx.config().recordContent) {
      r.delivered[o.index] = std::move(data);
    }
    --js.inflight;
    ++js.done;
    pump(o.job, ctx);
  }

private:
  std::vector<ARDescriptor> m_listing;
  std::map<Name, crypto::PublicKey> m_producers;
  std::map<std::uint64_t, Outstanding> m_out;
  std::multimap<Name, std::uint64_t> m_byName;
  std::map<std::size_t, JobState> m_jobs;
  std::map<Name, SessionState> m_sessions;
  std::map<Name, PendingHandshake> m_handshakes;
  std::vector<std::size_t> m_waiting;
  RttEstimator m_rtt;
  std::uint64_t m_nextToken = 1;
};

// ---------------------------------------------------------------------------

Simulator::Simulator(Topology topology, SimConfig config, AdversarySpec adversary)
  : m_topology(std::move(topology))
  , m_config(config)
{
  m_topology.validate();
  m_trace.enabled = m_config.trace;
  DeterministicRng master(m_config.seed, "simulator");

  for (const auto& spec : m_topology.nodes) {
    Node n;
    n.spec = spec;
    std::size_t cs = m_config.csCapacity;
    if (spec.role == Role::Ar) {
      std::uint64_t rate = 0;
      for (auto f : m_topology.interfaces(spec.id)) {
        rate = std::max(rate, m_topology.linkAt({spec.id, f})->bandwidth);
      }
      cs = std::max<std::size_t>(cs, static_cast<std::size_t>(
                                       (static_cast<unsigned __int128>(rate) * m_config.arWindow + 999'999) / 1'000'000));
    }
    n.fwd = std::make_unique<Forwarder>(cs);
    n.rng = std::make_unique<DeterministicRng>(master.fork("node:" + spec.id));
    m_nodes.emplace(spec.id, std::move(n));
  }

  for (std::size_t i = 0; i < m_topology.links.size(); ++i) {
    const auto& l = m_topology.links[i];
    m_links.push_back({l, std::llround(l.latencyMs * 1000.0), {0, 0}});
    m_faceToLink[{l.a, l.ai}] = {i, 0};
    m_faceToLink[{l.b, l.bi}] = {i, 1};
  }

  for (const auto& [id, entries] : m_topology.fibs) {
    for (const auto& e : entries) {
      node(id).fwd->fib().addRoute(e.prefix, e.iface);
    }
  }

  std::map<Name, crypto::PublicKey> producerKeys;
  for (auto& [id, n] : m_nodes) {
    const auto& spec = n.spec;
    switch (spec.role) {
    case Role::Ar: {
      RouterConfig rc;
      rc.ns = spec.prefix;
      rc.organization = spec.organization;
      rc.window = m_config.arWindow;
      rc.keyLifetime = m_config.arKeyLifetime;
      std::uint64_t rate = 0;
      for (auto f : m_topology.interfaces(id)) {
        rate = std::max(rate, m_topology.linkAt({id, f})->bandwidth);
      }
      rc.bandwidth = rate;
      rc.expectedRate = rate;
      rc.cacheReservation = n.fwd->contentStore().capacity();
      auto app = std::make_unique<ArApp>(rc, m_config.seed);
      m_ars[id] = app.get();
      m_directory.registerAr(app->router.descriptor(0));
      n.app = std::move(app);
      n.fwd->fib().addRoute(spec.prefix, kAppFace);
      break;
    }
    case Role::Producer: {
      auto key = crypto::generateKeyPair(crypto::KeyRole::Signing, *n.rng);
      producerKeys[spec.prefix] = key.pk;
      auto app = std::make_unique<ProducerApp>(spec.prefix, std::move(key), m_config.seed);
      m_producers[id] = app.get();
      n.app = std::move(app);
      n.fwd->fib().addRoute(spec.prefix, kAppFace);
      break;
    }
    case Role::Directory: {
      auto key = crypto::generateKeyPair(crypto::KeyRole::Signing, *n.rng);
      n.app = std::make_unique<DirectoryApp>(m_directory, std::move(key));
      n.fwd->fib().addRoute(spec.prefix, kAppFace);
      break;
    }
    default:
      break;
    }
  }
  for (auto& [id, n] : m_nodes) {
    if (n.spec.role == Role::Consumer) {
      auto app = std::make_unique<ConsumerApp>(m_directory.listArs(0), producerKeys);
      m_consumers[id] = app.get();
      n.app = std::move(app);
    }
    m_trace.add(0, id, "node-up", n.spec.prefix.toUri(), std::string(toString(n.spec.role)));
  }

  for (const auto& t : adversary.taps) {
    if (!m_faceToLink.contains(t)) {
      throw ConfigError("tap on unknown interface " + t.node + ":" + std::to_string(t.iface));
    }
    tap(t, 0);
  }
  for (const auto* set : {&adversary.producers, &adversary.consumers, &adversary.routers}) {
    for (const auto& id : *set) {
      if (!m_topology.hasNode(id)) {
        throw ConfigError("adversary names unknown node '" + id + "'");
      }
      markCompromised(id, 0);
    }
  }
}

Simulator::~Simulator() = default;

Simulator::Node&
Simulator::node(const std::string& id)
{
  auto it = m_nodes.find(id);
  if (it == m_nodes.end()) {
    throw ConfigError("unknown node '" + id + "'");
  }
  return it->second;
}

const Simulator::Node&
Simulator::node(const std::string& id) const
{
  auto it = m_nodes.find(id);
  if (it == m_nodes.end()) {
    throw ConfigError("unknown node '" + id + "'");
  }
  return it->second;
}

void
Simulator::schedule(SimTime t, std::function<void()> fn)
{
  m_events.push(Event{std::max(t, m_now), m_seq++, std::move(fn)});
}

void
Simulator::run()
{
  while (!m_events.empty()) {
    auto e = m_events.top();
    m_events.pop();
    m_now = e.time;
    e.fn();
  }
}

void
Simulator::runUntil(SimTime t)
{
  while (!m_events.empty() && m_events.top().time <= t) {
    auto e = m_events.top();
    m_events.pop();
    m_now = e.time;
    e.fn();
  }
  m_now = std::max(m_now, t);
}

std::size_t
Simulator::fetch(const std::string& consumer, const Name& name, std::uint64_t size, Mode mode, SimTime at)
{
  if (!m_consumers.contains(consumer)) {
    throw ConfigError("'" + consumer + "' is not a consumer");
  }
  auto r = std::make_unique<JobResult>();
  r->id = m_jobs.size();
  r->consumer = consumer;
  r->mode = mode;
  r->name = name;
  r->size = size;
  r->requestedAt = at;
  auto segments = std::max<std::uint64_t>(1, (size + m_config.segmentSize - 1) / m_config.segmentSize);
  auto& rng = *node(consumer).rng;
  for (std::uint64_t i = 0; i < segments; ++i) {
    Interest in(name.append(std::to_string(i)));
    in.nonce = rng.bytes(4);
    r->interests.push_back(std::move(in));
  }
  if (auto srv = m_topology.server(name); srv && m_producers.contains(*srv)) {
    m_producers[*srv]->publish(name, size);
  }
  auto id = r->id;
  m_jobs.push_back(std::move(r));
  schedule(at, [this, consumer, id] {
    enqueue(node(consumer), Job{Job::Kind::Timer, 0, {}, kStartBit | id});
  });
  return id;
}

std::size_t
Simulator::request(const std::string& consumer, const Interest& interest, Mode mode, SimTime at)
{
  if (!m_consumers.contains(consumer)) {
    throw ConfigError("'" + consumer + "' is not a consumer");
  }
  auto r = std::make_unique<JobResult>();
  r->id = m_jobs.size();
  r->consumer = consumer;
  r->mode = mode;
  r->name = interest.name;
  r->requestedAt = at;
  r->interests.push_back(interest);
  auto id = r->id;
  m_jobs.push_back(std::move(r));
  schedule(at, [this, consumer, id] {
    enqueue(node(consumer), Job{Job::Kind::Timer, 0, {}, kStartBit | id});
  });
  return id;
}

const JobResult&
Simulator::job(std::size_t id) const
{
  return *m_jobs.at(id);
}

JobResult&
Simulator::mutableJob(std::size_t id)
{
  return *m_jobs.at(id);
}

void
Simulator::enqueue(Node& n, Job job)
{
  n.queue.push_back(std::move(job));
  startNext(n);
}

void
Simulator::startNext(Node& n)
{
  if (n.busy || n.queue.empty()) {
    return;
  }
  Job job = std::move(n.queue.front());
  n.queue.pop_front();
  n.busy = true;

  struct Outputs
  {
    std::vector<Emission> net;
    std::vector<Packet> toApp;
    std::vector<Packet> fromApp;
    std::vector<std::pair<SimTime, std::uint64_t>> timers;
  };
  auto out = std::make_shared<Outputs>();
  SimTime cost = 0;
  const std::string& id = n.spec.id;

  if (job.kind == Job::Kind::FromFace) {
    cost = m_config.costs.forward;
    auto before = n.fwd->counters();
    std::vector<Emission> em;
    if (const auto* i = std::get_if<Interest>(&job.packet)) {
      em = n.fwd->onInterest(*i, job.face, m_now);
    }
    else {
      em = n.fwd->onData(std::get<Data>(job.packet), job.face, m_now);
    }
    const auto& after = n.fwd->counters();
    auto name = [&] { return traceName(packetName(job.packet)); };
    if (after.cacheHits > before.cacheHits) {
      m_trace.add(m_now, id, "cache-hit", name(), faceString(job.face));
    }
    else if (after.interestsCollapsed > before.interestsCollapsed) {
      m_trace.add(m_now, id, "collapse", name(), faceString(job.face));
    }
    else if (after.interestsDropped > before.interestsDropped) {
      m_trace.add(m_now, id, "drop", name(), faceString(job.face));
    }
    else if (after.dataUnsolicited > before.dataUnsolicited) {
      m_trace.add(m_now, id, "unsolicited", name(), faceString(job.face));
    }
    for (auto& e : em) {
      if (e.face == kAppFace) {
        out->toApp.push_back(std::move(e.packet));
      }
      else {
        out->net.push_back(std::move(e));
      }
    }
  }
  else if (n.app) {
    AppContext ctx(*this, id, m_now);
    if (job.kind == Job::Kind::Timer) {
      n.app->onTimer(job.token, ctx);
    }
    else if (const auto* i = std::get_if<Interest>(&job.packet)) {
      n.app->onInterest(*i, ctx);
    }
    else {
      n.app->onData(std::get<Data>(job.packet), ctx);
    }
    cost = ctx.m_cost;
    out->fromApp = std::move(ctx.m_out);
    out->timers = std::move(ctx.m_timers);
  }

  SimTime end = m_now + cost;
  Node* np = &n;
  schedule(end, [this, np, out, end] {
    for (auto& e : out->net) {
      transmit({np->spec.id, e.face}, e.packet, end);
    }
    for (auto& p : out->toApp) {
      np->queue.push_back(Job{Job::Kind::ToApp, kAppFace, std::move(p), 0});
    }
    for (auto& p : out->fromApp) {
      np->queue.push_back(Job{Job::Kind::FromFace, kAppFace, std::move(p), 0});
    }
    for (auto [at, token] : out->timers) {
      schedule(at, [this, np, token] { enqueue(*np, Job{Job::Kind::Timer, 0, {}, token}); });
    }
    np->busy = false;
    startNext(*np);
  });
}

void
Simulator::transmit(const InterfaceRef& from, const Packet& p, SimTime t, bool replayed)
{
  auto it = m_faceToLink.find(from);
  if (it == m_faceToLink.end()) {
    return;
  }
  auto [idx, dir] = it->second;
  auto& link = m_links[idx];
  auto bytes = wireSize(p);
  m_bytesOnWire += bytes;
  auto tx = static_cast<SimTime>((static_cast<unsigned __int128>(bytes) * 1'000'000 + link.spec.bandwidth - 1) /
                                 link.spec.bandwidth);
  SimTime start = std::max(t, link.freeAt[dir]);
  SimTime done = start + tx;
  link.freeAt[dir] = done;
  SimTime arrival = done + link.latency;

  bool interest = std::holds_alternative<Interest>(p);
  auto name = traceName(packetName(p));
  m_trace.add(t, from.node, replayed ? "replay" : (interest ? "tx-interest" : "tx-data"), name,
              faceString(from.iface));
  observe(from, false, p, t);

  InterfaceRef to = dir == 0 ? InterfaceRef{link.spec.b, link.spec.bi} : InterfaceRef{link.spec.a, link.spec.ai};
  schedule(arrival, [this, to, p, arrival, interest, name] {
    m_trace.add(arrival, to.node, interest ? "rx-interest" : "rx-data", name, faceString(to.iface));
    observe(to, true, p, arrival);
    enqueue(node(to.node), Job{Job::Kind::FromFace, to.iface, p, 0});
  });
}

SimTime
Simulator::minCompromiseDelay() const
{
  return m_config.minCompromiseDelay >= 0 ? m_config.minCompromiseDelay : 10 * m_topology.maxRoundTrip();
}

std::optional<SimTime>
Simulator::compromisedSince(const std::string& n) const
{
  auto it = m_compromised.find(n);
  if (it == m_compromised.end()) {
    return std::nullopt;
  }
  return it->second;
}

bool
Simulator::isCompromised(const std::string& n, SimTime t) const
{
  auto since = compromisedSince(n);
  return since && *since <= t;
}

bool
Simulator::isTapped(const InterfaceRef& iface, SimTime t) const
{
  auto it = m_taps.find(iface);
  return (it != m_taps.end() && it->second <= t) || isCompromised(iface.node, t);
}

void
Simulator::markCompromised(const std::string& n, SimTime t)
{
  auto it = m_compromised.find(n);
  if (it == m_compromised.end() || t < it->second) {
    m_compromised[n] = t;
    m_trace.add(t, n, "compromised", "-", "-");
  }
}

void
Simulator::tap(const InterfaceRef& iface, SimTime from)
{
  auto it = m_taps.find(iface);
  if (it == m_taps.end() || from < it->second) {
    m_taps[iface] = from;
  }
  // Holding every interface of a router is as good as holding its keys.
  auto role = m_topology.node(iface.node).role;
  if (role != Role::Router && role != Role::Ar) {
    return;
  }
  SimTime latest = 0;
  for (auto f : m_topology.interfaces(iface.node)) {
    auto t = m_taps.find({iface.node, f});
    if (t == m_taps.end()) {
      return;
    }
    latest = std::max(latest, t->second);
  }
  markCompromised(iface.node, latest);
}

void
Simulator::compromise(const std::string& target, SimTime at)
{
  if (!m_topology.hasNode(target)) {
    throw ConfigError("unknown node '" + target + "'");
  }
  if (at < m_now + minCompromiseDelay()) {
    throw TooSoon("compromise of " + target + " must be at least " + std::to_string(minCompromiseDelay()) +
                  " us after the current time");
  }
  markCompromised(target, at);
}

void
Simulator::replay(const Packet& packet, const InterfaceRef& from, SimTime at)
{
  auto wire = encodePacket(packet);
  bool seen = std::any_of(m_view.begin(), m_view.end(),
                          [&] (const Observation& o) { return encodePacket(o.packet) == wire; });
  if (!seen) {
    throw NotObserved("packet " + traceName(packetName(packet)) + " is not in the adversary view");
  }
  if (!m_faceToLink.contains(from) || !isTapped(from, at)) {
    throw ConfigError("replay interface is not under adversary control");
  }
  schedule(at, [this, packet, from, at] { transmit(from, packet, at, true); });
}

void
Simulator::observe(const InterfaceRef& at, bool inbound, const Packet& p, SimTime t)
{
  if (!isTapped(at, t)) {
    return;
  }
  Observation o{t, at, inbound, p, annotate(p, t)};
  m_trace.addView(o);
  m_view.push_back(std::move(o));
}

std::string
Simulator::annotate(const Packet& p, SimTime t) const
{
  const Name& name = packetName(p);
  auto k = m_keyring.find(name);
  if (const auto* i = std::get_if<Interest>(&p)) {
    if (k != m_keyring.end() && !k->second.interestPlain.empty()) {
      return k->second.interestPlain;
    }
    auto srv = m_topology.server(i->name);
    if (srv && m_ars.contains(*srv) && isCompromised(*srv, t)) {
      if (auto layer = m_ars.at(*srv)->router.peel(i->name, t)) {
        if (const auto* relay = std::get_if<onion::Relay>(&layer->next)) {
          return "relay:" + traceName(onion::relayName(*relay));
        }
        return "interest:" + traceName(std::get<Interest>(layer->next).name);
      }
    }
    return "-";
  }
  if (k == m_keyring.end() || k->second.dataKeys.empty()) {
    return "-";
  }
  try {
    Bytes body = std::get<Data>(p).payload;
    for (const auto& key : k->second.dataKeys) {
      body = crypto::symDecrypt(key, body);
    }
    if (!k->second.revealsProducerData) {
      return "opaque";
    }
    return "data:" + traceName(decodeData(body).name);
  }
  catch (const Error&) {
    return "-";
  }
}

void
Simulator::recordTuple(const std::string& n, const Name& outer, const PendingTuple& t, SimTime now)
{
  if (!isCompromised(n, now)) {
    return;
  }
  KeyringEntry e;
  e.interestPlain = (t.innerEncrypted ? "relay:" : "interest:") + traceName(t.inner.name);
  e.dataKeys = {t.key};
  e.revealsProducerData = !t.innerEncrypted;
  m_keyring[outer] = std::move(e);
}

void
Simulator::recordCircuit(const std::string& n, const Name& outer, const Interest& original,
                         const EphemeralCircuit& c, SimTime now)
{
  if (!isCompromised(n, now)) {
    return;
  }
  m_keyring[outer] = KeyringEntry{"interest:" + traceName(original.name), {c.k1, c.k2}, true};
}

Forwarder&
Simulator::forwarder(const std::string& n)
{
  return *node(n).fwd;
}

AnonymizingRouter&
Simulator::ar(const std::string& n)
{
  auto it = m_ars.find(n);
  if (it == m_ars.end()) {
    throw ConfigError("'" + n + "' is not an AR");
  }
  return it->second->router;
}

std::uint64_t
Simulator::producerInterests(const std::string& n) const
{
  return m_producers.at(n)->interests();
}

const Data*
Simulator::produced(const std::string& n, const Name& name) const
{
  return m_producers.at(n)->produced(name);
}

const crypto::PublicKey&
Simulator::producerKey(const std::string& n) const
{
  return m_producers.at(n)->key();
}

std::vector<ARDescriptor>
Simulator::listing() const
{
  return m_directory.listArs(m_now);
}

} // namespace andana::sim
