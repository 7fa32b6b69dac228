#include "andana/analyzer.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace andana::analysis {

namespace {

bool
isRouter(Role r)
{
  return r == Role::Router || r == Role::Ar;
}

const NodeSpec&
requireNode(const Topology& t, const std::string& id, Role role, const char* what)
{
  if (!t.hasNode(id) || t.node(id).role != role) {
    throw ConfigError(std::string(what) + " '" + id + "' does not exist");
  }
  return t.node(id);
}

void
requireConsumer(const Topology& t, const std::string& u)
{
  if (!t.hasNode(u) || t.node(u).role != Role::Consumer) {
    throw UnknownConsumer("unknown consumer '" + u + "'");
  }
}

void
requireProducer(const Topology& t, const std::string& p)
{
  if (!t.hasNode(p) || t.node(p).role != Role::Producer) {
    throw UnknownProducer("unknown producer '" + p + "'");
  }
}

// FIB longest-prefix match, first entry winning ties, as Topology::route does.
std::optional<InterfaceRef>
nextHop(const Topology& t, const std::string& at, const Name& name)
{
  auto it = t.fibs.find(at);
  if (it == t.fibs.end()) {
    return std::nullopt;
  }
  const FibSpec* best = nullptr;
  for (const auto& e : it->second) {
    if (e.prefix.isPrefixOf(name) && (best == nullptr || e.prefix.size() > best->prefix.size())) {
      best = &e;
    }
  }
  if (best == nullptr) {
    return std::nullopt;
  }
  return t.peer({at, best->iface});
}

std::vector<Name>
servedPrefixes(const Topology& t)
{
  std::vector<Name> out;
  for (const auto& n : t.nodes) {
    if (n.role == Role::Ar || n.role == Role::Producer || n.role == Role::Directory) {
      out.push_back(n.prefix);
    }
  }
  return out;
}

struct Candidate
{
  int condition = 0;
  std::string consumer;
  std::size_t action = 0;
  Configuration config;
};

// Consumer-anonymity witnesses in reporting order: shared honest entry, shared honest exit with
// the same entry, then network-layer indistinguishability.
std::vector<Candidate>
consumerWitnesses(const Configuration& config, const Topology& topology, const AdversaryClosure& adv,
                  const std::string& u, std::size_t k)
{
  const Action& a = config.at(u).at(k);
  std::vector<std::string> honest;
  for (const auto& id : topology.nodesWithRole(Role::Consumer)) {
    if (id != u && !adv.controlsConsumer(id)) {
      honest.push_back(id);
    }
  }

  std::vector<Candidate> out;
  auto swapWith = [&] (int cond, const std::string& v, std::size_t j) {
    Configuration c = config;
    std::swap(c[u][k], c[v][j]);
    out.push_back({cond, v, j, std::move(c)});
  };
  for (int cond : {2, 3}) {
    const std::string& shared = cond == 2 ? a.r1 : a.r2;
    if (adv.controlsRouter(shared)) {
      continue;
    }
    for (const auto& v : honest) {
      auto it = config.find(v);
      if (it == config.end()) {
        continue;
      }
      for (std::size_t j = 0; j < it->second.size(); ++j) {
        const Action& b = it->second[j];
        if (cond == 2 ? b.r1 == a.r1 : (b.r2 == a.r2 && b.r1 == a.r1)) {
          swapWith(cond, v, j);
        }
      }
    }
  }

  const Name& ns1 = topology.node(a.r1).prefix;
  auto seen = observedPath(topology, adv, u, ns1);
  for (const auto& v : honest) {
    if (observedPath(topology, adv, v, ns1) == seen) {
      Configuration c = config;
      auto& mine = c[u];
      mine.erase(mine.begin() + static_cast<std::ptrdiff_t>(k));
      if (mine.empty()) {
        c.erase(u);
      }
      c[v].push_back(a);
      out.push_back({1, v, c[v].size() - 1, std::move(c)});
    }
  }
  return out;
}

std::size_t
firstActionFor(const Configuration& config, const std::string& u, const std::string& p)
{
  auto it = config.find(u);
  if (it != config.end()) {
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      if (it->second[k].producer == p) {
        return k;
      }
    }
  }
  throw ConfigError("consumer '" + u + "' sends nothing to '" + p + "'");
}

} // namespace

AdversaryClosure::AdversaryClosure(const Topology& topology, const Adversary& adversary)
  : m_topology(topology)
  , m_consumers(adversary.consumers)
  , m_producers(adversary.producers)
{
  for (const auto& t : adversary.taps) {
    if (!topology.linkAt(t)) {
      throw ConfigError("tap on unknown interface " + t.node + ":" + std::to_string(t.iface));
    }
    m_interfaces.insert(t);
  }
  auto own = [&] (const std::string& id) {
    for (auto f : topology.interfaces(id)) {
      m_interfaces.insert({id, f});
    }
  };
  for (const auto& id : adversary.consumers) {
    requireNode(topology, id, Role::Consumer, "compromised consumer");
    own(id);
  }
  for (const auto& id : adversary.producers) {
    requireNode(topology, id, Role::Producer, "compromised producer");
    own(id);
  }
  for (const auto& id : adversary.routers) {
    if (!topology.hasNode(id) || !isRouter(topology.node(id).role)) {
      throw ConfigError("compromised router '" + id + "' does not exist");
    }
    own(id);
    m_routers.insert(id);
  }
  for (const auto& n : topology.nodes) {
    if (!isRouter(n.role)) {
      continue;
    }
    auto ifaces = topology.interfaces(n.id);
    if (!ifaces.empty() && std::all_of(ifaces.begin(), ifaces.end(), [&] (FaceId f) {
          return m_interfaces.contains({n.id, f});
        })) {
      m_routers.insert(n.id);
    }
  }
}

bool
AdversaryClosure::observes(const InterfaceRef& arrival) const
{
  if (m_interfaces.contains(arrival)) {
    return true;
  }
  auto p = m_topology.peer(arrival);
  return p && m_interfaces.contains(*p);
}

void
validate(const Configuration& config, const Topology& topology)
{
  for (const auto& [u, actions] : config) {
    requireNode(topology, u, Role::Consumer, "consumer");
    for (const auto& a : actions) {
      requireNode(topology, a.r1, Role::Ar, "AR");
      requireNode(topology, a.r2, Role::Ar, "AR");
      requireNode(topology, a.producer, Role::Producer, "producer");
      if (a.r1 == a.r2) {
        throw ConfigError("circuit of '" + u + "' uses '" + a.r1 + "' twice");
      }
      if (a.content.empty()) {
        throw ConfigError("action of '" + u + "' has no content");
      }
    }
  }
}

Name
interestName(const Topology& topology, const Action& a)
{
  return topology.node(a.producer).prefix.append(toBytes(a.content));
}

std::vector<InterfaceRef>
interestPath(const Topology& topology, const std::string& source, const Name& name)
{
  std::vector<InterfaceRef> out;
  for (const auto& hop : topology.route(source, name)) {
    if (hop.in) {
      out.push_back({hop.node, *hop.in});
    }
  }
  return out;
}

std::set<std::string>
interfaceAnonymitySet(const Topology& topology, const InterfaceRef& arrival, const Name& destination)
{
  std::set<std::string> out;
  auto from = topology.peer(arrival);
  if (!from) {
    return out;
  }
  auto server = topology.server(destination);
  auto forwards = [&] (const std::string& n, const std::string& to) -> std::optional<InterfaceRef> {
    if (server && n == *server) {
      return std::nullopt;
    }
    auto next = nextHop(topology, n, destination);
    if (!next || next->node != to) {
      return std::nullopt;
    }
    return next;
  };
  // The peer must send this destination over exactly this link.
  auto first = forwards(from->node, arrival.node);
  if (!first || *first != arrival) {
    return out;
  }
  // Everyone whose forwarding path reaches the peer.
  std::vector<std::string> stack{from->node};
  out.insert(from->node);
  while (!stack.empty()) {
    auto at = stack.back();
    stack.pop_back();
    for (const auto& n : topology.nodes) {
      if (!out.contains(n.id) && forwards(n.id, at)) {
        out.insert(n.id);
        stack.push_back(n.id);
      }
    }
  }
  return out;
}

std::set<std::string>
interfaceAnonymitySet(const Topology& topology, const InterfaceRef& arrival)
{
  std::set<std::string> out;
  for (const auto& prefix : servedPrefixes(topology)) {
    out.merge(interfaceAnonymitySet(topology, arrival, prefix));
  }
  return out;
}

std::set<std::string>
interestAnonymitySet(const Topology& topology, const Adversary& adversary, const std::vector<InterfaceRef>& path,
                     const Name& destination)
{
  AdversaryClosure adv(topology, adversary);
  std::optional<std::set<std::string>> acc;
  for (const auto& i : path) {
    if (!adv.observes(i)) {
      continue;
    }
    auto a = interfaceAnonymitySet(topology, i, destination);
    if (!acc) {
      acc = std::move(a);
      continue;
    }
    std::set<std::string> both;
    std::set_intersection(acc->begin(), acc->end(), a.begin(), a.end(), std::inserter(both, both.end()));
    acc = std::move(both);
  }
  if (!acc) {
    acc.emplace();
    for (const auto& n : topology.nodes) {
      acc->insert(n.id);
    }
  }
  return *acc;
}

std::set<InterfaceRef>
observedPath(const Topology& topology, const AdversaryClosure& adv, const std::string& source, const Name& destination)
{
  std::set<InterfaceRef> out;
  for (const auto& i : interestPath(topology, source, destination)) {
    if (adv.observes(i)) {
      out.insert(i);
    }
  }
  return out;
}

std::string_view
toString(Via v)
{
  switch (v) {
  case Via::None: return "none";
  case Via::ProducerAnonymity: return "producer-anonymity";
  case Via::ConsumerAnonymity: return "consumer-anonymity";
  case Via::Both: return "both";
  }
  return "?";
}

ConsumerVerdict
checkConsumerAnonymity(const Configuration& config, const Topology& topology, const Adversary& adversary,
                       const std::string& u, std::size_t action)
{
  requireConsumer(topology, u);
  validate(config, topology);
  AdversaryClosure adv(topology, adversary);
  if (adv.controlsConsumer(u)) {
    throw ConfigError("consumer '" + u + "' is compromised");
  }
  auto it = config.find(u);
  if (it == config.end() || action >= it->second.size()) {
    throw ConfigError("consumer '" + u + "' has no action " + std::to_string(action));
  }
  auto w = consumerWitnesses(config, topology, adv, u, action);
  if (w.empty()) {
    return {};
  }
  return {true, w.front().condition, w.front().consumer, std::move(w.front().config)};
}

ProducerVerdict
checkProducerAnonymity(const Configuration& config, const Topology& topology, const Adversary& adversary,
                       const std::string& u, const std::string& p)
{
  requireConsumer(topology, u);
  requireProducer(topology, p);
  validate(config, topology);
  AdversaryClosure adv(topology, adversary);
  auto k = firstActionFor(config, u, p);
  if (adv.controlsConsumer(u)) {
    return {};
  }
  const Action& a = config.at(u)[k];
  for (int cond : {1, 2}) {
    if (adv.controlsRouter(cond == 1 ? a.r1 : a.r2)) {
      continue;
    }
    for (const auto& [v, actions] : config) {
      if (adv.controlsConsumer(v)) {
        continue;
      }
      for (std::size_t j = 0; j < actions.size(); ++j) {
        const Action& b = actions[j];
        if ((v == u && j == k) || b.producer == p) {
          continue;
        }
        if (cond == 1 ? b.r1 != a.r1 : b.r2 != a.r2) {
          continue;
        }
        // Exchange everything the honest AR hides: the tail after the entry, or the
        // producer and content after the exit.
        Action a2 = a;
        Action b2 = b;
        if (cond == 1) {
          a2 = {a.r1, b.r2, b.producer, b.content};
          b2 = {b.r1, a.r2, a.producer, a.content};
        }
        else {
          a2 = {a.r1, a.r2, b.producer, b.content};
          b2 = {b.r1, b.r2, a.producer, a.content};
        }
        Configuration c = config;
        c[u][k] = a2;
        c[v][j] = b2;
        return {true, cond, v, j, std::move(c)};
      }
    }
  }
  return {};
}

UnlinkabilityVerdict
checkUnlinkability(const Configuration& config, const Topology& topology, const Adversary& adversary,
                   const std::string& u, const std::string& p)
{
  requireConsumer(topology, u);
  requireProducer(topology, p);
  validate(config, topology);
  AdversaryClosure adv(topology, adversary);
  auto k = firstActionFor(config, u, p);
  if (adv.controlsConsumer(u)) {
    return {};
  }
  auto pv = checkProducerAnonymity(config, topology, adversary, u, p);

  // Consumer anonymity helps only if the ciphertext seen for u then belongs to someone else, or
  // u ends up with an action for another producer.
  std::optional<Candidate> cw;
  for (auto& w : consumerWitnesses(config, topology, adv, u, k)) {
    if (w.condition == 1 || config.at(w.consumer)[w.action].producer != p) {
      cw = std::move(w);
      break;
    }
  }

  UnlinkabilityVerdict v;
  if (pv.anonymous && cw) {
    v.via = Via::Both;
  }
  else if (pv.anonymous) {
    v.via = Via::ProducerAnonymity;
  }
  else if (cw) {
    v.via = Via::ConsumerAnonymity;
  }
  if (pv.anonymous) {
    v.witness = pv.partnerConsumer;
    v.witnessConfig = std::move(pv.witnessConfig);
  }
  else if (cw) {
    v.witness = cw->consumer;
    v.witnessConfig = std::move(cw->config);
  }
  return v;
}

// Scenario files -----------------------------------------------------------------------------

namespace {

using nlohmann::json;

InterfaceRef
parseInterface(const json& j)
{
  if (j.is_string()) {
    auto s = j.get<std::string>();
    auto colon = s.rfind(':');
    if (colon == std::string::npos) {
      throw ConfigError("interface '" + s + "' is not node:iface");
    }
    return {s.substr(0, colon), static_cast<FaceId>(std::stoul(s.substr(colon + 1)))};
  }
  return {j.at("node").get<std::string>(), j.at("iface").get<FaceId>()};
}

json
configToJson(const Configuration& c)
{
  json out = json::object();
  for (const auto& [u, actions] : c) {
    json list = json::array();
    for (const auto& a : actions) {
      list.push_back({{"r1", a.r1}, {"r2", a.r2}, {"producer", a.producer}, {"content", a.content}});
    }
    out[u] = std::move(list);
  }
  return out;
}

std::set<std::string>
stringSet(const json& j, const char* key)
{
  std::set<std::string> out;
  if (j.contains(key)) {
    for (const auto& e : j.at(key)) {
      out.insert(e.get<std::string>());
    }
  }
  return out;
}

} // namespace

Scenario
Scenario::fromJson(std::string_view text, const std::string& baseDir)
{
  try {
    auto j = json::parse(text);
    Scenario s;
    if (j.contains("topology")) {
      s.topology = Topology::fromJson(j.at("topology").dump());
    }
    else if (j.contains("topology_ref")) {
      std::filesystem::path ref = j.at("topology_ref").get<std::string>();
      if (ref.is_relative()) {
        ref = std::filesystem::path(baseDir) / ref;
      }
      s.topology = Topology::fromFile(ref.string());
    }
    else {
      throw ConfigError("scenario needs topology_ref or topology");
    }

    if (j.contains("adversary")) {
      const auto& a = j.at("adversary");
      s.adversary.producers = stringSet(a, "producers");
      s.adversary.consumers = stringSet(a, "consumers");
      s.adversary.routers = stringSet(a, "routers");
      if (a.contains("taps")) {
        for (const auto& t : a.at("taps")) {
          s.adversary.taps.insert(parseInterface(t));
        }
      }
    }
    for (const auto& [u, actions] : j.at("configuration").items()) {
      auto& list = s.configuration[u];
      for (const auto& a : actions) {
        list.push_back({a.at("r1").get<std::string>(), a.at("r2").get<std::string>(),
                        a.at("producer").get<std::string>(), a.at("content").get<std::string>()});
      }
    }
    validate(s.configuration, s.topology);
    AdversaryClosure check(s.topology, s.adversary);

    if (j.contains("queries")) {
      for (const auto& q : j.at("queries")) {
        Query query;
        auto kind = q.at("kind").get<std::string>();
        if (kind == "consumer") {
          query.kind = Query::Kind::Consumer;
        }
        else if (kind == "producer") {
          query.kind = Query::Kind::Producer;
        }
        else if (kind == "unlinkability") {
          query.kind = Query::Kind::Unlinkability;
        }
        else {
          throw ConfigError("unknown query kind '" + kind + "'");
        }
        query.consumer = q.at("consumer").get<std::string>();
        query.producer = q.value("producer", std::string{});
        query.action = q.value("action", std::size_t{0});
        if (query.kind != Query::Kind::Consumer && query.producer.empty()) {
          throw ConfigError("query needs a producer");
        }
        s.queries.push_back(std::move(query));
      }
    }
    return s;
  }
  catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

Scenario
Scenario::fromFile(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read scenario '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return fromJson(ss.str(), std::filesystem::path(path).parent_path().string());
}

ScenarioResult
evaluate(const Scenario& s)
{
  std::vector<Query> queries = s.queries;
  if (queries.empty()) {
    AdversaryClosure adv(s.topology, s.adversary);
    for (const auto& [u, actions] : s.configuration) {
      if (adv.controlsConsumer(u)) {
        continue;
      }
      for (std::size_t k = 0; k < actions.size(); ++k) {
        queries.push_back({Query::Kind::Consumer, u, {}, k});
        queries.push_back({Query::Kind::Unlinkability, u, actions[k].producer, k});
      }
    }
  }

  ScenarioResult r;
  json verdicts = json::array();
  for (const auto& q : queries) {
    json v{{"consumer", q.consumer}};
    bool ok = false;
    switch (q.kind) {
    case Query::Kind::Consumer: {
      auto c = checkConsumerAnonymity(s.configuration, s.topology, s.adversary, q.consumer, q.action);
      ok = c.anonymous;
      v["kind"] = "consumer";
      v["action"] = q.action;
      if (ok) {
        v["condition"] = c.condition;
        v["witness"] = c.witness;
        v["witness_configuration"] = configToJson(c.witnessConfig);
      }
      break;
    }
    case Query::Kind::Producer: {
      auto p = checkProducerAnonymity(s.configuration, s.topology, s.adversary, q.consumer, q.producer);
      ok = p.anonymous;
      v["kind"] = "producer";
      v["producer"] = q.producer;
      if (ok) {
        v["condition"] = p.condition;
        v["witness"] = p.partnerConsumer;
        v["witness_configuration"] = configToJson(p.witnessConfig);
      }
      break;
    }
    case Query::Kind::Unlinkability: {
      auto u = checkUnlinkability(s.configuration, s.topology, s.adversary, q.consumer, q.producer);
      ok = u.unlinkable();
      v["kind"] = "unlinkability";
      v["producer"] = q.producer;
      if (ok) {
        v["via"] = toString(u.via);
        v["witness"] = u.witness;
        v["witness_configuration"] = configToJson(u.witnessConfig);
      }
      break;
    }
    }
    v["verdict"] = ok ? (q.kind == Query::Kind::Unlinkability ? "Unlinkable" : "Anonymous") : "NotEstablished";
    r.allEstablished = r.allEstablished && ok;
    verdicts.push_back(std::move(v));
  }
  r.json = json{{"verdicts", verdicts}}.dump(2);
  return r;
}

} // namespace andana::analysis
