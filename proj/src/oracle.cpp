// Symbolic view of a configuration and exhaustive witness search.
//
// Every action contributes three packets: the doubly wrapped interest from the consumer to r1,
// the inner layer from r1 to r2, and the plain interest from r2 to the producer. A packet is
// seen on each observed link of its route. A layer is opened when the adversary holds the AR's
// key or is the consumer itself; an opened layer nests the packet it reveals. Tokens of
// different actions never meet, so a view is a multiset of trees and renaming tokens reduces
// to comparing sorted canonical strings.

#include "andana/analyzer.hpp"

#include <unordered_set>

namespace andana::analysis {

namespace {

std::string
observed(const Topology& t, const AdversaryClosure& adv, const std::string& source, const Name& dest)
{
  std::vector<std::string> seen;
  auto hops = t.route(source, dest);
  for (std::size_t h = 0; h + 1 < hops.size(); ++h) {
    InterfaceRef out{hops[h].node, *hops[h].out};
    InterfaceRef in{hops[h + 1].node, *hops[h + 1].in};
    if (adv.controlsInterface(out) || adv.controlsInterface(in)) {
      seen.push_back(in.node + ":" + std::to_string(in.iface));
    }
  }
  std::sort(seen.begin(), seen.end());
  std::string s;
  for (const auto& x : seen) {
    s.append(x).push_back(',');
  }
  return s;
}

struct ActionView
{
  std::vector<std::string> pieces;
  /// The piece holding the consumer's own packet, or "" when the adversary never sees it.
  std::string first;
};

ActionView
viewOf(const Topology& t, const AdversaryClosure& adv, const std::string& v, const Action& a)
{
  const Name& ns1 = t.node(a.r1).prefix;
  const Name& ns2 = t.node(a.r2).prefix;
  Name plain = t.node(a.producer).prefix.append(toBytes(a.content));
  auto o1 = observed(t, adv, v, ns1);
  auto o2 = observed(t, adv, a.r1, ns2);
  auto o3 = observed(t, adv, a.r2, plain);
  bool own = adv.controlsConsumer(v);
  bool open1 = own || adv.controlsRouter(a.r1);
  bool open2 = own || adv.controlsRouter(a.r2);

  std::string f3 = "(" + o3 + "|plain:" + plain.toUri() + ")";
  std::string f2 = "(" + ns2.toUri() + "|" + o2 + "|" + (open2 ? "int:" + plain.toUri() + f3 : "?") + ")";
  std::string f1 = "(" + (own ? "own:" + v + "|" : "") + ns1.toUri() + "|" + o1 + "|" +
                   (open1 ? "relay:" + ns2.toUri() + f2 : "?") + ")";

  ActionView out;
  if (own || open1 || !o1.empty()) {
    out.pieces.push_back(f1);
    out.first = f1;
  }
  if (!open1 && (open2 || !o2.empty())) {
    out.pieces.push_back(f2);
  }
  if (!open2 && !o3.empty()) {
    out.pieces.push_back(f3);
  }
  return out;
}

void
checkLimits(const Topology& t, std::initializer_list<const Configuration*> configs)
{
  OracleLimits lim;
  if (t.nodesWithRole(Role::Consumer).size() > lim.consumers || t.nodesWithRole(Role::Ar).size() > lim.ars ||
      t.nodesWithRole(Role::Producer).size() > lim.producers) {
    throw InstanceTooLarge("topology exceeds the oracle bounds");
  }
  for (const auto* c : configs) {
    std::size_t total = 0;
    for (const auto& [u, actions] : *c) {
      total += actions.size();
    }
    if (total > lim.actions) {
      throw InstanceTooLarge("configuration has too many actions for the oracle");
    }
  }
}

using Multiset = std::map<std::string, int>;

struct Option
{
  std::string consumer;
  Action action;
  Multiset pieces;
  std::string first;
};

class Search
{
public:
  Search(const Configuration& config, const Topology& t, const Adversary& adversary)
    : m_topology(t)
    , m_adv(t, adversary)
  {
    checkLimits(t, {&config});
    validate(config, t);
    for (const auto& [u, actions] : config) {
      for (const auto& a : actions) {
        for (const auto& p : viewOf(t, m_adv, u, a).pieces) {
          ++m_target[p];
        }
      }
    }

    std::set<std::string> contents{"~fresh"};
    for (const auto& [u, actions] : config) {
      for (const auto& a : actions) {
        contents.insert(a.content);
      }
    }
    auto ars = t.nodesWithRole(Role::Ar);
    for (const auto& v : t.nodesWithRole(Role::Consumer)) {
      for (const auto& r1 : ars) {
        for (const auto& r2 : ars) {
          if (r1 == r2) {
            continue;
          }
          for (const auto& p : t.nodesWithRole(Role::Producer)) {
            for (const auto& c : contents) {
              Action a{r1, r2, p, c};
              auto view = viewOf(t, m_adv, v, a);
              Option o{v, a, {}, view.first};
              for (const auto& piece : view.pieces) {
                ++o.pieces[piece];
              }
              m_options.push_back(std::move(o));
            }
          }
        }
      }
    }
    for (std::size_t i = 0; i < m_options.size(); ++i) {
      for (const auto& [piece, n] : m_options[i].pieces) {
        m_byPiece[piece].push_back(i);
      }
    }
  }

  const AdversaryClosure&
  adversary() const
  {
    return m_adv;
  }

  /// First piece of `u`'s action as it appears in the view.
  std::string
  firstOf(const std::string& u, const Action& a) const
  {
    return viewOf(m_topology, m_adv, u, a).first;
  }

  /// Some C' with the target view that contains an option accepted by `pick`.
  template<typename Pick>
  std::optional<Configuration>
  find(Pick pick)
  {
    for (const auto& o : m_options) {
      if (!pick(o) || !contains(m_target, o.pieces)) {
        continue;
      }
      auto rest = minus(m_target, o.pieces);
      std::vector<std::size_t> chosen;
      if (cover(rest, chosen)) {
        Configuration c;
        c[o.consumer].push_back(o.action);
        for (auto i : chosen) {
          c[m_options[i].consumer].push_back(m_options[i].action);
        }
        return c;
      }
    }
    return std::nullopt;
  }

private:
  static bool
  contains(const Multiset& big, const Multiset& small)
  {
    for (const auto& [k, n] : small) {
      auto it = big.find(k);
      if (it == big.end() || it->second < n) {
        return false;
      }
    }
    return true;
  }

  static Multiset
  minus(Multiset big, const Multiset& small)
  {
    for (const auto& [k, n] : small) {
      if ((big[k] -= n) == 0) {
        big.erase(k);
      }
    }
    return big;
  }

  static std::string
  key(const Multiset& m)
  {
    std::string s;
    for (const auto& [k, n] : m) {
      s.append(std::to_string(n)).append("*").append(k).push_back('\n');
    }
    return s;
  }

  // Exact cover of `rest` by visible options; invisible actions never matter.
  bool
  cover(const Multiset& rest, std::vector<std::size_t>& chosen)
  {
    if (rest.empty()) {
      return true;
    }
    auto k = key(rest);
    if (m_dead.contains(k)) {
      return false;
    }
    const auto& piece = rest.begin()->first;
    auto it = m_byPiece.find(piece);
    if (it != m_byPiece.end()) {
      for (auto i : it->second) {
        if (!contains(rest, m_options[i].pieces)) {
          continue;
        }
        chosen.push_back(i);
        if (cover(minus(rest, m_options[i].pieces), chosen)) {
          return true;
        }
        chosen.pop_back();
      }
    }
    m_dead.insert(k);
    return false;
  }

private:
  const Topology& m_topology;
  AdversaryClosure m_adv;
  Multiset m_target;
  std::vector<Option> m_options;
  std::map<std::string, std::vector<std::size_t>> m_byPiece;
  std::unordered_set<std::string> m_dead;
};

const Action&
actionOf(const Configuration& config, const std::string& u, std::size_t k)
{
  auto it = config.find(u);
  if (it == config.end() || k >= it->second.size()) {
    throw ConfigError("consumer '" + u + "' has no action " + std::to_string(k));
  }
  return it->second[k];
}

} // namespace

std::vector<std::string>
symbolicView(const Configuration& config, const Topology& topology, const Adversary& adversary)
{
  validate(config, topology);
  AdversaryClosure adv(topology, adversary);
  std::vector<std::string> out;
  for (const auto& [u, actions] : config) {
    for (const auto& a : actions) {
      auto v = viewOf(topology, adv, u, a);
      out.insert(out.end(), v.pieces.begin(), v.pieces.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool
oracleIndistinguishable(const Configuration& a, const Configuration& b, const Topology& topology,
                        const Adversary& adversary)
{
  checkLimits(topology, {&a, &b});
  return symbolicView(a, topology, adversary) == symbolicView(b, topology, adversary);
}

std::optional<Configuration>
findConsumerWitness(const Configuration& config, const Topology& topology, const Adversary& adversary,
                    const std::string& u, std::size_t action)
{
  Search s(config, topology, adversary);
  const Action& a = actionOf(config, u, action);
  return s.find([&] (const Option& o) { return o.consumer != u && o.action == a; });
}

std::optional<Configuration>
findProducerWitness(const Configuration& config, const Topology& topology, const Adversary& adversary,
                    const std::string& u, std::size_t action)
{
  Search s(config, topology, adversary);
  const Action& a = actionOf(config, u, action);
  auto first = s.firstOf(u, a);
  return s.find([&] (const Option& o) {
    return o.first == first && !s.adversary().controlsConsumer(o.consumer) && o.action.producer != a.producer;
  });
}

std::optional<Configuration>
findUnlinkabilityWitness(const Configuration& config, const Topology& topology, const Adversary& adversary,
                         const std::string& u, std::size_t action)
{
  Search s(config, topology, adversary);
  const Action& a = actionOf(config, u, action);
  auto first = s.firstOf(u, a);
  return s.find([&] (const Option& o) {
    return o.first == first && (o.consumer != u || o.action.producer != a.producer);
  });
}

} // namespace andana::analysis
