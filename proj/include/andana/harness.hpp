#ifndef ANDANA_HARNESS_HPP
#define ANDANA_HARNESS_HPP

#include "andana/sim.hpp"

#include <iosfwd>

namespace andana::harness {

using sim::CostModel;
using sim::Mode;

struct FetchOptions
{
  Mode mode = Mode::Plain;
  std::uint64_t size = 1 << 20;
  std::uint64_t seed = 1;
  bool includeSetup = false;
  /// Empty: the first consumer in the topology.
  std::string consumer;
  /// Empty: "<first producer prefix>/file".
  std::string name;
  CostModel costs;
};

struct FetchMetrics
{
  Mode mode = Mode::Plain;
  std::uint64_t size = 0;
  std::size_t segments = 0;
  double totalMs = 0;
  double setupMs = 0;
  std::vector<double> rttMs;
  std::uint64_t bytesOnWire = 0;
  std::uint64_t producerInterests = 0;
  std::string trace;

  std::string
  toJson() const;
};

/// One segmented fetch in a fresh simulation. Throws FetchTimeout if any segment is lost for good.
FetchMetrics
fetch(const Topology& topology, const FetchOptions& options);

struct BenchOptions
{
  std::vector<std::uint64_t> sizes{64u << 10, 1u << 20, 8u << 20};
  unsigned repeats = 1;
  std::uint64_t seed = 1;
  CostModel costs;
};

struct BenchResult
{
  std::string csv;
  /// The TraceLogs of every run, in grid order.
  std::string traces;
};

/// Rows are ordered by size, then run, then mode (plain first). Setup is included in total_ms.
BenchResult
bench(const Topology& topology, const BenchOptions& options);

/// Evaluates a scenario file and writes the verdict JSON to `out`.
/// Returns 0 when every query is Anonymous or Unlinkable, 2 when one is NotEstablished, 1 on errors.
int
analyze(const std::string& scenarioPath, std::ostream& out, std::ostream& err);

} // namespace andana::harness

#endif // ANDANA_HARNESS_HPP
