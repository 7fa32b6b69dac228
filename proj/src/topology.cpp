#include "andana/topology.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace andana {

using nlohmann::json;

std::string_view
toString(Role r)
{
  switch (r) {
  case Role::Consumer: return "consumer";
  case Role::Router: return "router";
  case Role::Ar: return "ar";
  case Role::Producer: return "producer";
  case Role::Directory: return "directory";
  }
  return "?";
}

Role
parseRole(std::string_view s)
{
  for (auto r : {Role::Consumer, Role::Router, Role::Ar, Role::Producer, Role::Directory}) {
    if (toString(r) == s) {
      return r;
    }
  }
  throw ConfigError("unknown node role '" + std::string(s) + "'");
}

Topology
Topology::fromJson(std::string_view text)
{
  Topology t;
  try {
    auto j = json::parse(text);
    for (const auto& n : j.at("nodes")) {
      NodeSpec spec;
      spec.id = n.at("id").get<std::string>();
      spec.role = parseRole(n.at("role").get<std::string>());
      if (n.contains("prefix")) {
        spec.prefix = Name::parse(n.at("prefix").get<std::string>());
      }
      else if (spec.role == Role::Ar || spec.role == Role::Producer) {
        spec.prefix = Name().append(spec.id);
      }
      else if (spec.role == Role::Directory) {
        spec.prefix = Name::parse("/andana/directory");
      }
      spec.organization = n.value("organization", spec.id);
      t.nodes.push_back(std::move(spec));
    }
    for (const auto& l : j.at("links")) {
      LinkSpec spec;
      spec.a = l.at("a").get<std::string>();
      spec.ai = l.at("ai").get<FaceId>();
      spec.b = l.at("b").get<std::string>();
      spec.bi = l.at("bi").get<FaceId>();
      spec.latencyMs = l.value("latency_ms", 1.0);
      spec.bandwidth = l.value("bw_bps", std::uint64_t{125'000'000});
      t.links.push_back(std::move(spec));
    }
    if (j.contains("fibs")) {
      for (const auto& [node, entries] : j.at("fibs").items()) {
        auto& list = t.fibs[node];
        for (const auto& e : entries) {
          list.push_back({Name::parse(e.at("prefix").get<std::string>()), e.at("iface").get<FaceId>()});
        }
      }
    }
    t.validate();
    if (!j.contains("fibs")) {
      t.computeRoutes();
    }
  }
  catch (const json::exception& e) {
    throw ConfigError(std::string("bad topology document: ") + e.what());
  }
  catch (const MalformedName& e) {
    throw ConfigError(std::string("bad name in topology: ") + e.what());
  }
  return t;
}

Topology
Topology::fromFile(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open topology file " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return fromJson(ss.str());
}

std::string
Topology::toJson() const
{
  json j;
  j["nodes"] = json::array();
  for (const auto& n : nodes) {
    json o{{"id", n.id}, {"role", std::string(toString(n.role))}};
    if (!n.prefix.empty()) {
      o["prefix"] = n.prefix.toUri();
    }
    if (n.role == Role::Ar) {
      o["organization"] = n.organization;
    }
    j["nodes"].push_back(std::move(o));
  }
  j["links"] = json::array();
  for (const auto& l : links) {
    j["links"].push_back({{"a", l.a}, {"ai", l.ai}, {"b", l.b}, {"bi", l.bi},
                          {"latency_ms", l.latencyMs}, {"bw_bps", l.bandwidth}});
  }
  j["fibs"] = json::object();
  for (const auto& [node, entries] : fibs) {
    auto& arr = j["fibs"][node] = json::array();
    for (const auto& e : entries) {
      arr.push_back({{"prefix", e.prefix.toUri()}, {"iface", e.iface}});
    }
  }
  return j.dump(2);
}

void
Topology::validate() const
{
  std::set<std::string> ids;
  for (const auto& n : nodes) {
    if (n.id.empty() || !ids.insert(n.id).second) {
      throw ConfigError("duplicate or empty node id '" + n.id + "'");
    }
    if ((n.role == Role::Ar || n.role == Role::Producer) && n.prefix.empty()) {
      throw ConfigError("node " + n.id + " must serve a non-root prefix");
    }
  }
  std::set<InterfaceRef> ends;
  for (const auto& l : links) {
    for (const auto& end : {InterfaceRef{l.a, l.ai}, InterfaceRef{l.b, l.bi}}) {
      if (!ids.contains(end.node)) {
        throw ConfigError("link references unknown node '" + end.node + "'");
      }
      if (!ends.insert(end).second) {
        throw ConfigError("interface " + std::to_string(end.iface) + " of " + end.node + " used twice");
      }
    }
    if (l.a == l.b) {
      throw ConfigError("self-loop at " + l.a);
    }
    if (!(l.latencyMs > 0) || !std::isfinite(l.latencyMs)) {
      throw ConfigError("link latency must be positive");
    }
    if (l.bandwidth == 0) {
      throw ConfigError("link bandwidth must be positive");
    }
  }
  for (const auto& [node, entries] : fibs) {
    if (!ids.contains(node)) {
      throw ConfigError("FIB for unknown node '" + node + "'");
    }
    for (const auto& e : entries) {
      if (!ends.contains({node, e.iface})) {
        throw ConfigError("FIB of " + node + " uses missing interface " + std::to_string(e.iface));
      }
    }
  }
}

bool
Topology::hasNode(const std::string& id) const
{
  return std::any_of(nodes.begin(), nodes.end(), [&] (const auto& n) { return n.id == id; });
}

const NodeSpec&
Topology::node(const std::string& id) const
{
  for (const auto& n : nodes) {
    if (n.id == id) {
      return n;
    }
  }
  throw ConfigError("unknown node '" + id + "'");
}

std::vector<std::string>
Topology::nodesWithRole(Role r) const
{
  std::vector<std::string> out;
  for (const auto& n : nodes) {
    if (n.role == r) {
      out.push_back(n.id);
    }
  }
  return out;
}

std::vector<FaceId>
Topology::interfaces(const std::string& id) const
{
  std::vector<FaceId> out;
  for (const auto& l : links) {
    if (l.a == id) {
      out.push_back(l.ai);
    }
    if (l.b == id) {
      out.push_back(l.bi);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

const LinkSpec*
Topology::linkAt(const InterfaceRef& end) const
{
  for (const auto& l : links) {
    if ((l.a == end.node && l.ai == end.iface) || (l.b == end.node && l.bi == end.iface)) {
      return &l;
    }
  }
  return nullptr;
}

std::optional<InterfaceRef>
Topology::peer(const InterfaceRef& end) const
{
  const auto* l = linkAt(end);
  if (l == nullptr) {
    return std::nullopt;
  }
  if (l->a == end.node && l->ai == end.iface) {
    return InterfaceRef{l->b, l->bi};
  }
  return InterfaceRef{l->a, l->ai};
}

std::optional<std::string>
Topology::server(const Name& name) const
{
  const NodeSpec* best = nullptr;
  for (const auto& n : nodes) {
    if ((n.role == Role::Ar || n.role == Role::Producer || n.role == Role::Directory) &&
        n.prefix.isPrefixOf(name) && (best == nullptr || n.prefix.size() > best->prefix.size())) {
      best = &n;
    }
  }
  if (best == nullptr) {
    return std::nullopt;
  }
  return best->id;
}

void
Topology::computeRoutes()
{
  fibs.clear();
  for (const auto& n : nodes) {
    fibs[n.id];
  }
  for (const auto& dst : nodes) {
    if (dst.role != Role::Ar && dst.role != Role::Producer && dst.role != Role::Directory) {
      continue;
    }
    // Dijkstra from the destination over integer microsecond latencies.
    std::map<std::string, SimTime> dist;
    dist[dst.id] = 0;
    std::set<std::pair<SimTime, std::string>> frontier{{0, dst.id}};
    while (!frontier.empty()) {
      auto [d, u] = *frontier.begin();
      frontier.erase(frontier.begin());
      for (const auto& l : links) {
        std::string v;
        if (l.a == u) {
          v = l.b;
        }
        else if (l.b == u) {
          v = l.a;
        }
        else {
          continue;
        }
        SimTime nd = d + std::llround(l.latencyMs * 1000.0);
        auto it = dist.find(v);
        if (it == dist.end() || nd < it->second) {
          if (it != dist.end()) {
            frontier.erase({it->second, v});
          }
          dist[v] = nd;
          frontier.insert({nd, v});
        }
      }
    }
    for (const auto& n : nodes) {
      if (n.id == dst.id || !dist.contains(n.id)) {
        continue;
      }
      std::optional<std::tuple<SimTime, std::string, FaceId>> best;
      for (auto iface : interfaces(n.id)) {
        auto p = peer({n.id, iface});
        const auto* l = linkAt({n.id, iface});
        if (!dist.contains(p->node)) {
          continue;
        }
        std::tuple<SimTime, std::string, FaceId> cand{dist[p->node] + std::llround(l->latencyMs * 1000.0),
                                                      p->node, iface};
        if (!best || cand < *best) {
          best = cand;
        }
      }
      if (best) {
        fibs[n.id].push_back({dst.prefix, std::get<2>(*best)});
      }
    }
  }
}

std::vector<Hop>
Topology::route(const std::string& source, const Name& name) const
{
  auto target = server(name);
  std::vector<Hop> path;
  std::set<std::string> visited;
  std::string at = source;
  std::optional<FaceId> in;
  while (true) {
    Hop hop{at, in, std::nullopt};
    if ((target && at == *target) || !visited.insert(at).second) {
      path.push_back(hop);
      return path;
    }
    // Longest-prefix match over this node's FIB.
    const FibSpec* best = nullptr;
    if (auto it = fibs.find(at); it != fibs.end()) {
      for (const auto& e : it->second) {
        if (e.prefix.isPrefixOf(name) && (best == nullptr || e.prefix.size() > best->prefix.size())) {
          best = &e;
        }
      }
    }
    if (best == nullptr) {
      path.push_back(hop);
      return path;
    }
    hop.out = best->iface;
    path.push_back(hop);
    auto next = peer({at, best->iface});
    at = next->node;
    in = next->iface;
  }
}

SimTime
Topology::maxRoundTrip() const
{
  SimTime sum = 0;
  for (const auto& l : links) {
    sum += std::llround(l.latencyMs * 1000.0);
  }
  return 2 * sum;
}

Topology
Topology::lineFour(double latencyMs, std::uint64_t bandwidth)
{
  Topology t;
  t.nodes = {
    {"c", Role::Consumer, {}, "c"},
    {"ar1", Role::Ar, Name::parse("/orgA/ar1"), "A"},
    {"ar2", Role::Ar, Name::parse("/orgB/ar2"), "B"},
    {"p", Role::Producer, Name::parse("/prod"), "p"},
  };
  t.links = {
    {"c", 1, "ar1", 1, latencyMs, bandwidth},
    {"ar1", 2, "ar2", 1, latencyMs, bandwidth},
    {"ar2", 2, "p", 1, latencyMs, bandwidth},
  };
  t.validate();
  t.computeRoutes();
  return t;
}

} // namespace andana
