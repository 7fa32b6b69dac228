#ifndef ANDANA_TESTS_SUPPORT_HPP
#define ANDANA_TESTS_SUPPORT_HPP

#include "andana/analyzer.hpp"
#include "andana/topology.hpp"

#include <initializer_list>

namespace andana::testing {

struct NodeDecl
{
  std::string id;
  Role role;
};

/// Builds a topology from nodes and undirected edges, numbering each node's interfaces 1, 2, ...
/// in edge order, with shortest-path FIBs. AR and producer prefixes default to /<id>.
inline Topology
build(const std::vector<NodeDecl>& nodes, const std::vector<std::pair<std::string, std::string>>& edges)
{
  Topology t;
  std::map<std::string, FaceId> next;
  for (const auto& n : nodes) {
    NodeSpec s{n.id, n.role, {}, n.id};
    if (n.role == Role::Ar || n.role == Role::Producer) {
      s.prefix = Name::parse("/" + n.id);
    }
    t.nodes.push_back(std::move(s));
    next[n.id] = 1;
  }
  for (const auto& [a, b] : edges) {
    t.links.push_back({a, next[a]++, b, next[b]++, 1.0, 1'000'000});
  }
  t.validate();
  t.computeRoutes();
  return t;
}

/// The interface of `node` on its link to `peer`.
inline InterfaceRef
towards(const Topology& t, const std::string& node, const std::string& peer)
{
  for (auto f : t.interfaces(node)) {
    if (t.peer({node, f})->node == peer) {
      return {node, f};
    }
  }
  throw std::logic_error("no link " + node + " -> " + peer);
}

/// Every (source, served prefix) route, recorded per arrival interface: the brute-force sender sets.
inline std::map<InterfaceRef, std::map<Name, std::set<std::string>>>
bruteForceSenders(const Topology& t)
{
  std::map<InterfaceRef, std::map<Name, std::set<std::string>>> out;
  for (const auto& src : t.nodes) {
    for (const auto& dst : t.nodes) {
      if (dst.prefix.empty()) {
        continue;
      }
      auto hops = t.route(src.id, dst.prefix);
      for (const auto& h : hops) {
        if (h.in) {
          out[{h.node, *h.in}][dst.prefix].insert(src.id);
        }
      }
    }
  }
  return out;
}

} // namespace andana::testing

#endif // ANDANA_TESTS_SUPPORT_HPP
