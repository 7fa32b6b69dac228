#ifndef ANDANA_SIM_HPP
#define ANDANA_SIM_HPP

#include "andana/router.hpp"
#include "andana/topology.hpp"

#include <deque>
#include <functional>
#include <memory>
#include <queue>
#include <set>

namespace andana::sim {

/// Face id of a node's local application.
constexpr FaceId kAppFace = 0xFFFF'FFFFu;

class TooSoon : public Error
{
public:
  using Error::Error;
};

class NotObserved : public Error
{
public:
  using Error::Error;
};

class FetchTimeout : public Error
{
public:
  using Error::Error;
};

enum class Mode : std::uint8_t {
  Plain,
  AndanaA,
  AndanaS,
};

std::string_view
toString(Mode m);

/// "plain", "andana-a" or "andana-s". Throws ConfigError.
Mode
parseMode(std::string_view s);

/// Simulated CPU time (µs) charged for each operation a node performs.
struct CostModel
{
  SimTime forward = 170;   // one packet through the forwarder
  SimTime sign = 500;      // RSA private-key operation
  SimTime decrypt = 500;   // RSA private-key operation
  SimTime verify = 30;
  SimTime encrypt = 30;
  SimTime dh = 150;
  SimTime symFixed = 10;
  double symPerByte = 0.01;

  SimTime
  sym(std::size_t bytes) const
  {
    return symFixed + static_cast<SimTime>(symPerByte * static_cast<double>(bytes));
  }
};

struct SimConfig
{
  std::uint64_t seed = 1;
  CostModel costs;
  bool trace = true;
  std::size_t csCapacity = 32u << 20;
  std::size_t segmentSize = 4096;
  unsigned window = 4;
  HandshakeMode handshake = HandshakeMode::Dh;
  /// Time an issued interest waits for content before it is re-expressed.
  SimTime interestTimeout = millis(4000);
  unsigned maxRetries = 3;
  unsigned maxInterestsPerCircuit = 1;
  /// Orient every drawn circuit so its entry is the AR nearer the consumer, keeping anonymized
  /// traffic on the shortest path when the ARs lie along it.
  bool alignCircuits = false;
  /// AR timestamp window and key lifetime.
  SimTime arWindow = millis(2000);
  SimTime arKeyLifetime = millis(3'600'000);
  /// Negative: 10 × the topology's maximum round trip.
  SimTime minCompromiseDelay = -1;
  /// Keep delivered Data for inspection.
  bool recordContent = true;
};

/// Initial adversary: compromised entities and tapped interfaces, all effective from time 0.
struct AdversarySpec
{
  std::set<std::string> producers;
  std::set<std::string> consumers;
  std::set<std::string> routers;
  std::set<InterfaceRef> taps;
};

struct Observation
{
  SimTime time = 0;
  InterfaceRef at;
  bool inbound = false;
  Packet packet;
  /// What the adversary can read inside, or "-".
  std::string plain;
};

/// Line-oriented event log: "time|node|event|name|iface" plus "view|..." lines.
class TraceLog
{
public:
  void
  add(SimTime t, std::string_view node, std::string_view event, std::string_view name, std::string_view iface);

  void
  addView(const Observation& o);

  const std::vector<std::string>&
  lines() const
  {
    return m_lines;
  }

  std::string
  text() const;

  std::size_t
  count(std::string_view event, std::string_view node = {}) const;

  bool enabled = true;

private:
  std::vector<std::string> m_lines;
};

/// Compact trace rendering of a name: components longer than 32 bytes become "~" + 16 hex digits.
std::string
traceName(const Name& name);

struct JobResult
{
  std::size_t id = 0;
  std::string consumer;
  Mode mode = Mode::Plain;
  Name name;
  std::uint64_t size = 0;
  std::vector<Interest> interests;
  SimTime requestedAt = 0;
  SimTime setupDone = -1;
  SimTime finishedAt = -1;
  bool complete = false;
  bool failed = false;
  unsigned retransmissions = 0;
  std::vector<SimTime> rtts;
  std::vector<std::optional<Data>> delivered;

  SimTime
  setupTime() const
  {
    return setupDone < 0 ? 0 : setupDone - requestedAt;
  }

  /// Completion time from the request, or from the end of setup.
  SimTime
  totalTime(bool includeSetup) const
  {
    return finishedAt - (includeSetup ? requestedAt : setupDone);
  }
};

/// Keys the adversary has picked up from compromised entities.
struct KeyringEntry
{
  std::string interestPlain;
  std::vector<crypto::SymmetricKey> dataKeys;
  bool revealsProducerData = false;
};

class Simulator;

/// Interface a node application sees while one of its jobs runs.
class AppContext
{
public:
  AppContext(Simulator& sim, const std::string& node, SimTime now)
    : m_sim(sim)
    , m_node(node)
    , m_now(now)
  {
  }

  SimTime
  now() const
  {
    return m_now;
  }

  const std::string&
  node() const
  {
    return m_node;
  }

  RandomSource&
  rng();

  const SimConfig&
  config() const;

  void
  charge(SimTime cpu)
  {
    m_cost += cpu;
  }

  SimTime
  cost() const
  {
    return m_cost;
  }

  /// Hands a packet to the local forwarder once the job finishes.
  void
  send(Packet p)
  {
    m_out.push_back(std::move(p));
  }

  void
  setTimer(SimTime at, std::uint64_t token)
  {
    m_timers.emplace_back(at, token);
  }

  void
  trace(std::string_view event, const Name& name);

  Simulator&
  sim()
  {
    return m_sim;
  }

private:
  friend class Simulator;
  Simulator& m_sim;
  const std::string& m_node;
  SimTime m_now;
  SimTime m_cost = 0;
  std::vector<Packet> m_out;
  std::vector<std::pair<SimTime, std::uint64_t>> m_timers;
};

class App
{
public:
  virtual ~App() = default;

  virtual void
  onInterest(const Interest&, AppContext&)
  {
  }

  virtual void
  onData(const Data&, AppContext&)
  {
  }

  virtual void
  onTimer(std::uint64_t, AppContext&)
  {
  }
};

class ConsumerApp;
class ProducerApp;
class ArApp;

/**
 * @brief Deterministic discrete-event network simulator.
 *
 * Each node runs a forwarder plus at most one application behind kAppFace and owns
 * one CPU that serves jobs in FIFO order. Links are store-and-forward with unbounded
 * FIFO queues per direction. Equal topology, workload, adversary and seed give a
 * byte-identical trace.
 */
class Simulator
{
public:
  Simulator(Topology topology, SimConfig config = {}, AdversarySpec adversary = {});
  ~Simulator();

  Simulator(const Simulator&) = delete;
  Simulator&
  operator=(const Simulator&) = delete;

  const Topology&
  topology() const
  {
    return m_topology;
  }

  const SimConfig&
  config() const
  {
    return m_config;
  }

  SimTime
  now() const
  {
    return m_now;
  }

  /// Segmented fetch of `size` bytes published under `name` (segments name/0 .. name/k-1).
  std::size_t
  fetch(const std::string& consumer, const Name& name, std::uint64_t size, Mode mode, SimTime at);

  /// A single interest.
  std::size_t
  request(const std::string& consumer, const Interest& interest, Mode mode, SimTime at);

  const JobResult&
  job(std::size_t id) const;

  void
  run();

  void
  runUntil(SimTime t);

  /// Schedules a compromise. Throws TooSoon if `at` is closer than the minimum delay.
  void
  compromise(const std::string& target, SimTime at);

  /// Re-sends an observed packet out of `from` at `at`. Throws NotObserved.
  void
  replay(const Packet& packet, const InterfaceRef& from, SimTime at);

  void
  tap(const InterfaceRef& iface, SimTime from);

  bool
  isCompromised(const std::string& node, SimTime t) const;

  bool
  isTapped(const InterfaceRef& iface, SimTime t) const;

  std::optional<SimTime>
  compromisedSince(const std::string& node) const;

  const std::vector<Observation>&
  view() const
  {
    return m_view;
  }

  const std::map<Name, KeyringEntry>&
  keyring() const
  {
    return m_keyring;
  }

  SimTime
  minCompromiseDelay() const;

  const TraceLog&
  trace() const
  {
    return m_trace;
  }

  Forwarder&
  forwarder(const std::string& node);

  AnonymizingRouter&
  ar(const std::string& node);

  /// Interests that reached the producer application on `node`.
  std::uint64_t
  producerInterests(const std::string& node) const;

  /// The Data the producer signed for `name`, if it did.
  const Data*
  produced(const std::string& node, const Name& name) const;

  const crypto::PublicKey&
  producerKey(const std::string& node) const;

  std::vector<ARDescriptor>
  listing() const;

  std::uint64_t
  bytesOnWire() const
  {
    return m_bytesOnWire;
  }

  // Used by applications.
  JobResult&
  mutableJob(std::size_t id);

  void
  recordTuple(const std::string& node, const Name& outer, const PendingTuple& t, SimTime now);

  void
  recordCircuit(const std::string& node, const Name& outer, const Interest& original,
                const EphemeralCircuit& c, SimTime now);

  TraceLog&
  traceLog()
  {
    return m_trace;
  }

private:
  struct Job
  {
    enum class Kind : std::uint8_t { FromFace, ToApp, Timer } kind;
    FaceId face = 0;
    Packet packet;
    std::uint64_t token = 0;
  };

  struct Node
  {
    NodeSpec spec;
    std::unique_ptr<Forwarder> fwd;
    std::unique_ptr<DeterministicRng> rng;
    std::unique_ptr<App> app;
    std::deque<Job> queue;
    bool busy = false;
  };

  struct Link
  {
    LinkSpec spec;
    SimTime latency = 0;
    SimTime freeAt[2] = {0, 0};
  };

  struct Event
  {
    SimTime time;
    std::uint64_t seq;
    std::function<void()> fn;

    bool
    operator>(const Event& o) const
    {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  void
  schedule(SimTime t, std::function<void()> fn);

  void
  enqueue(Node& node, Job job);

  void
  startNext(Node& node);

  void
  transmit(const InterfaceRef& from, const Packet& p, SimTime t, bool replayed = false);

  void
  observe(const InterfaceRef& at, bool inbound, const Packet& p, SimTime t);

  std::string
  annotate(const Packet& p, SimTime t) const;

  void
  markCompromised(const std::string& node, SimTime t);

  Node&
  node(const std::string& id);

  const Node&
  node(const std::string& id) const;

  friend class AppContext;

private:
  Topology m_topology;
  SimConfig m_config;
  SimTime m_now = 0;
  std::uint64_t m_seq = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> m_events;
  std::map<std::string, Node> m_nodes;
  std::vector<Link> m_links;
  std::map<InterfaceRef, std::pair<std::size_t, int>> m_faceToLink;
  std::map<std::string, ArApp*> m_ars;
  std::map<std::string, ProducerApp*> m_producers;
  std::map<std::string, ConsumerApp*> m_consumers;
  std::vector<std::unique_ptr<JobResult>> m_jobs;
  Directory m_directory;

  std::map<std::string, SimTime> m_compromised;
  std::map<InterfaceRef, SimTime> m_taps;
  std::vector<Observation> m_view;
  std::map<Name, KeyringEntry> m_keyring;

  TraceLog m_trace;
  std::uint64_t m_bytesOnWire = 0;
};

} // namespace andana::sim

#endif // ANDANA_SIM_HPP
