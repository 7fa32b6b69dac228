#ifndef ANDANA_ANALYZER_HPP
#define ANDANA_ANALYZER_HPP

#include "andana/topology.hpp"

#include <set>

namespace andana::analysis {

class UnknownConsumer : public Error
{
public:
  using Error::Error;
};

class UnknownProducer : public Error
{
public:
  using Error::Error;
};

class InstanceTooLarge : public Error
{
public:
  using Error::Error;
};

/// Compromised entities and eavesdropped interfaces.
struct Adversary
{
  std::set<std::string> producers;
  std::set<std::string> consumers;
  std::set<std::string> routers;
  std::set<InterfaceRef> taps;
};

/**
 * @brief An adversary with the closure rules applied.
 *
 * Every interface of a compromised node is controlled, and a router or AR whose interfaces
 * are all controlled is compromised. A controlled interface exposes the whole link it sits on.
 */
class AdversaryClosure
{
public:
  AdversaryClosure(const Topology& topology, const Adversary& adversary);

  bool
  controlsInterface(const InterfaceRef& i) const
  {
    return m_interfaces.contains(i);
  }

  /// True if traffic arriving at `arrival` is visible, i.e. either end of its link is controlled.
  bool
  observes(const InterfaceRef& arrival) const;

  bool
  controlsRouter(const std::string& id) const
  {
    return m_routers.contains(id);
  }

  bool
  controlsConsumer(const std::string& id) const
  {
    return m_consumers.contains(id);
  }

  bool
  controlsProducer(const std::string& id) const
  {
    return m_producers.contains(id);
  }

  const std::set<InterfaceRef>&
  interfaces() const
  {
    return m_interfaces;
  }

  const std::set<std::string>&
  routers() const
  {
    return m_routers;
  }

private:
  const Topology& m_topology;
  std::set<InterfaceRef> m_interfaces;
  std::set<std::string> m_routers;
  std::set<std::string> m_consumers;
  std::set<std::string> m_producers;
};

/// One consumer action: an interest for producer/content sent over the circuit (r1, r2).
struct Action
{
  std::string r1;
  std::string r2;
  std::string producer;
  std::string content;

  friend auto
  operator<=>(const Action&, const Action&) = default;
};

/// Consumer id to the actions it performs. Each action carries its own fresh ciphertext.
using Configuration = std::map<std::string, std::vector<Action>>;

/// Throws ConfigError unless every consumer, AR and producer exists with the right role and r1 != r2.
void
validate(const Configuration& config, const Topology& topology);

/// The plain interest name of an action: producer prefix followed by the content component.
Name
interestName(const Topology& topology, const Action& a);

/// Interfaces at which an interest for `name` injected at `source` arrives, in path order.
std::vector<InterfaceRef>
interestPath(const Topology& topology, const std::string& source, const Name& name);

/// Entities whose interests for `destination` arrive at `arrival`. Forwarding is deterministic,
/// so this is the upstream cone of the link feeding `arrival`.
std::set<std::string>
interfaceAnonymitySet(const Topology& topology, const InterfaceRef& arrival, const Name& destination);

/// Union over every served prefix.
std::set<std::string>
interfaceAnonymitySet(const Topology& topology, const InterfaceRef& arrival);

/// Intersection of the interface anonymity sets over the observed interfaces of `path`.
/// With no observed interface the result is every entity in the topology.
std::set<std::string>
interestAnonymitySet(const Topology& topology, const Adversary& adversary, const std::vector<InterfaceRef>& path,
                     const Name& destination);

/// Observed arrival interfaces of an interest from `source` for `destination`.
std::set<InterfaceRef>
observedPath(const Topology& topology, const AdversaryClosure& adv, const std::string& source,
             const Name& destination);

struct ConsumerVerdict
{
  bool anonymous = false;
  /// 1: network-layer indistinguishability, 2: shared honest entry AR, 3: shared honest exit AR.
  int condition = 0;
  std::string witness;
  /// An indistinguishable configuration in which `witness` performs the action.
  Configuration witnessConfig;
};

struct ProducerVerdict
{
  bool anonymous = false;
  /// 1: shared honest entry AR, 2: shared honest exit AR.
  int condition = 0;
  std::string partnerConsumer;
  std::size_t partnerAction = 0;
  /// An indistinguishable configuration in which the observed ciphertext reaches another producer.
  Configuration witnessConfig;
};

enum class Via : std::uint8_t {
  None,
  ProducerAnonymity,
  ConsumerAnonymity,
  Both,
};

std::string_view
toString(Via v);

struct UnlinkabilityVerdict
{
  Via via = Via::None;
  std::string witness;
  Configuration witnessConfig;

  bool
  unlinkable() const
  {
    return via != Via::None;
  }
};

/// Consumer anonymity of `u`'s action number `action`. NotEstablished only means the sufficient
/// conditions fail. Throws UnknownConsumer, ConfigError if `u` is compromised or has no such action.
ConsumerVerdict
checkConsumerAnonymity(const Configuration& config, const Topology& topology, const Adversary& adversary,
                       const std::string& u, std::size_t action = 0);

/// Producer anonymity of the first action of `u` for producer `p`.
ProducerVerdict
checkProducerAnonymity(const Configuration& config, const Topology& topology, const Adversary& adversary,
                       const std::string& u, const std::string& p);

/// Unlinkability of `u` and `p` for the first action of `u` for `p`.
UnlinkabilityVerdict
checkUnlinkability(const Configuration& config, const Topology& topology, const Adversary& adversary,
                   const std::string& u, const std::string& p);

// Symbolic oracle --------------------------------------------------------------------------------

/// Bounds on instances the oracle accepts.
struct OracleLimits
{
  std::size_t consumers = 4;
  std::size_t ars = 3;
  std::size_t producers = 3;
  std::size_t actions = 4; // in total, over all consumers
};

/**
 * Canonical symbolic view of a configuration: one string per connected piece of what the
 * adversary sees, sorted. Ciphertexts under keys the adversary lacks are opaque; opened layers
 * show their content and nest the packet they reveal. Two views are equal up to renaming of
 * opaque tokens exactly when the sorted lists are equal.
 */
std::vector<std::string>
symbolicView(const Configuration& config, const Topology& topology, const Adversary& adversary);

/// Throws InstanceTooLarge outside OracleLimits.
bool
oracleIndistinguishable(const Configuration& a, const Configuration& b, const Topology& topology,
                        const Adversary& adversary);

/// Exhaustive search for C' indistinguishable from `config` in which a consumer other than `u`
/// performs `u`'s action.
std::optional<Configuration>
findConsumerWitness(const Configuration& config, const Topology& topology, const Adversary& adversary,
                    const std::string& u, std::size_t action);

/// Exhaustive search for C' indistinguishable from `config` in which the ciphertext observed for
/// `u`'s action is sent by an honest consumer to a different producer.
std::optional<Configuration>
findProducerWitness(const Configuration& config, const Topology& topology, const Adversary& adversary,
                    const std::string& u, std::size_t action);

/// Exhaustive search for C' indistinguishable from `config` in which the ciphertext observed for
/// `u`'s action does not go from `u` to the same producer.
std::optional<Configuration>
findUnlinkabilityWitness(const Configuration& config, const Topology& topology, const Adversary& adversary,
                         const std::string& u, std::size_t action);

// Scenario files ---------------------------------------------------------------------------------

struct Query
{
  enum class Kind : std::uint8_t { Consumer, Producer, Unlinkability } kind = Kind::Consumer;
  std::string consumer;
  std::string producer;
  std::size_t action = 0;
};

/// JSON {topology_ref | topology, adversary, configuration[, queries]}.
struct Scenario
{
  Topology topology;
  Adversary adversary;
  Configuration configuration;
  std::vector<Query> queries;

  /// Relative topology_ref paths resolve against `baseDir`. Throws ConfigError.
  static Scenario
  fromJson(std::string_view text, const std::string& baseDir = ".");

  static Scenario
  fromFile(const std::string& path);
};

struct ScenarioResult
{
  std::string json;
  /// True when every query yields Anonymous or Unlinkable.
  bool allEstablished = true;
};

/// Evaluates every query, or, without queries, consumer anonymity and unlinkability for every
/// action of every honest consumer.
ScenarioResult
evaluate(const Scenario& s);

} // namespace andana::analysis

#endif // ANDANA_ANALYZER_HPP
