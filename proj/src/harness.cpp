#include "andana/harness.hpp"
#include "andana/analyzer.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ostream>

namespace andana::harness {

using namespace sim;

namespace {

double
toMs(SimTime t)
{
  return static_cast<double>(t) / 1000.0;
}

std::string
fixed(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

} // namespace

std::string
FetchMetrics::toJson() const
{
  nlohmann::ordered_json j;
  j["mode"] = toString(mode);
  j["size"] = size;
  j["segments"] = segments;
  j["total_time_ms"] = totalMs;
  j["setup_time_ms"] = setupMs;
  j["bytes_on_wire"] = bytesOnWire;
  j["producer_interests"] = producerInterests;
  j["rtt_ms"] = rttMs;
  return j.dump(2);
}

FetchMetrics
fetch(const Topology& topology, const FetchOptions& options)
{
  std::string consumer = options.consumer;
  if (consumer.empty()) {
    auto cs = topology.nodesWithRole(Role::Consumer);
    if (cs.empty()) {
      throw ConfigError("topology has no consumer");
    }
    consumer = cs.front();
  }
  auto producers = topology.nodesWithRole(Role::Producer);
  if (producers.empty()) {
    throw ConfigError("topology has no producer");
  }
  Name name = options.name.empty() ? topology.node(producers.front()).prefix.append(toBytes("file"))
                                   : Name::parse(options.name);
  auto server = topology.server(name);
  if (!server) {
    throw ConfigError("no producer serves " + name.toUri());
  }

  SimConfig config;
  config.seed = options.seed;
  config.costs = options.costs;
  config.recordContent = false;
  config.alignCircuits = true;
  Simulator sim(topology, config);
  auto id = sim.fetch(consumer, name, options.size, options.mode, 0);
  sim.run();
  const auto& job = sim.job(id);
  if (!job.complete) {
    throw FetchTimeout("fetch of " + name.toUri() + " did not complete");
  }

  FetchMetrics m;
  m.mode = options.mode;
  m.size = options.size;
  m.segments = job.rtts.size();
  m.totalMs = toMs(job.totalTime(options.includeSetup));
  m.setupMs = toMs(job.setupTime());
  for (auto r : job.rtts) {
    m.rttMs.push_back(toMs(r));
  }
  m.bytesOnWire = sim.bytesOnWire();
  m.producerInterests = sim.producerInterests(*server);
  m.trace = sim.trace().text();
  return m;
}

BenchResult
bench(const Topology& topology, const BenchOptions& options)
{
  BenchResult r;
  r.csv = "mode,size,run,total_ms,setup_ms,overhead_ratio\n";
  for (auto size : options.sizes) {
    for (unsigned run = 0; run < options.repeats; ++run) {
      double plain = 0;
      for (auto mode : {Mode::Plain, Mode::AndanaA, Mode::AndanaS}) {
        FetchOptions f;
        f.mode = mode;
        f.size = size;
        f.seed = options.seed + run;
        f.includeSetup = true;
        f.costs = options.costs;
        auto m = fetch(topology, f);
        if (mode == Mode::Plain) {
          plain = m.totalMs;
        }
        double ratio = mode == Mode::Plain ? 1.0 : m.totalMs / plain;
        r.csv += std::string(toString(mode)) + "," + std::to_string(size) + "," + std::to_string(run) + "," +
                 fixed(m.totalMs, 3) + "," + fixed(m.setupMs, 3) + "," + fixed(ratio, 4) + "\n";
        r.traces += "# " + std::string(toString(mode)) + " " + std::to_string(size) + " " + std::to_string(run) + "\n";
        r.traces += m.trace;
      }
    }
  }
  return r;
}

int
analyze(const std::string& scenarioPath, std::ostream& out, std::ostream& err)
{
  try {
    auto scenario = analysis::Scenario::fromFile(scenarioPath);
    auto result = analysis::evaluate(scenario);
    out << result.json << "\n";
    return result.allEstablished ? 0 : 2;
  }
  catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace andana::harness
