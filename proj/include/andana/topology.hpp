#ifndef ANDANA_TOPOLOGY_HPP
#define ANDANA_TOPOLOGY_HPP

#include "andana/forwarder.hpp"

#include <map>
#include <string>

namespace andana {

enum class Role : std::uint8_t {
  Consumer,
  Router,
  Ar,
  Producer,
  Directory,
};

std::string_view
toString(Role r);

/// Throws ConfigError.
Role
parseRole(std::string_view s);

struct NodeSpec
{
  std::string id;
  Role role = Role::Router;
  /// Served namespace: AR namespace, producer prefix or directory prefix. Empty otherwise.
  Name prefix;
  /// AR operator; defaults to the node id.
  std::string organization;
};

struct LinkSpec
{
  std::string a;
  FaceId ai = 0;
  std::string b;
  FaceId bi = 0;
  double latencyMs = 1.0;
  std::uint64_t bandwidth = 125'000'000; // bytes/s
};

struct FibSpec
{
  Name prefix;
  FaceId iface = 0;
};

/// A (node, interface) pair.
struct InterfaceRef
{
  std::string node;
  FaceId iface = 0;

  friend auto
  operator<=>(const InterfaceRef&, const InterfaceRef&) = default;
};

/// One step of a packet's path: the node it is at and the interface it came in on.
struct Hop
{
  std::string node;
  std::optional<FaceId> in;
  std::optional<FaceId> out;

  friend bool
  operator==(const Hop&, const Hop&) = default;
};

/**
 * @brief Static network description: nodes with roles, bidirectional links, FIBs.
 *
 * JSON form: {nodes:[{id,role[,prefix][,organization]}], links:[{a,ai,b,bi,latency_ms,bw_bps}],
 * fibs:{node:[{prefix,iface}]}}. bw_bps is in bytes per second. When "fibs" is absent,
 * shortest-latency routes to every served prefix are computed.
 */
class Topology
{
public:
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  std::map<std::string, std::vector<FibSpec>> fibs;

  /// Throws ConfigError.
  static Topology
  fromJson(std::string_view text);

  static Topology
  fromFile(const std::string& path);

  std::string
  toJson() const;

  /// Throws ConfigError on duplicate ids or interfaces, dangling references, or bad link parameters.
  void
  validate() const;

  bool
  hasNode(const std::string& id) const;

  const NodeSpec&
  node(const std::string& id) const;

  std::vector<std::string>
  nodesWithRole(Role r) const;

  /// Network interfaces of `id`, ascending.
  std::vector<FaceId>
  interfaces(const std::string& id) const;

  /// The other end of a link.
  std::optional<InterfaceRef>
  peer(const InterfaceRef& end) const;

  const LinkSpec*
  linkAt(const InterfaceRef& end) const;

  /// Node serving the longest prefix of `name`, if any.
  std::optional<std::string>
  server(const Name& name) const;

  /// Replaces all FIBs with shortest-latency routes to every served prefix. Ties go to the
  /// lower neighbor id, then the lower interface.
  void
  computeRoutes();

  /// Hop-by-hop path of an interest for `name` injected at `source`, following FIB longest-prefix
  /// matches until it reaches the serving node. Stops early on a missing route or a loop.
  std::vector<Hop>
  route(const std::string& source, const Name& name) const;

  /// Twice the sum of all link latencies; no simple path has a longer round trip.
  SimTime
  maxRoundTrip() const;

  /// consumer c - ar1 (/orgA/ar1, A) - ar2 (/orgB/ar2, B) - producer p (/prod).
  static Topology
  lineFour(double latencyMs = 0.2, std::uint64_t bandwidth = 125'000'000);
};

} // namespace andana

#endif // ANDANA_TOPOLOGY_HPP
