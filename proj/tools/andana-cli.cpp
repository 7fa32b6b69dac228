// Experiment front-end: segmented fetches, the benchmark grid and scenario analysis.

#include "andana/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace andana;
using namespace andana::sim;

namespace {

Topology
loadTopology(const std::string& path)
{
  return path.empty() ? Topology::lineFour() : Topology::fromFile(path);
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{"andana-cli"};
  app.require_subcommand(1);

  std::string topologyPath;
  std::string modeText = "plain";
  std::uint64_t size = 1 << 20;
  std::uint64_t seed = 1;
  bool includeSetup = false;
  std::string name;
  bool showTrace = false;
  auto* fetchCmd = app.add_subcommand("fetch", "fetch one segmented object and print metrics as JSON");
  fetchCmd->add_option("--topology", topologyPath, "topology JSON (default: built-in 4-node line)");
  fetchCmd->add_option("--mode", modeText)->check(CLI::IsMember({"plain", "andana-a", "andana-s"}));
  fetchCmd->add_option("--size", size, "bytes");
  fetchCmd->add_option("--seed", seed);
  fetchCmd->add_flag("--include-setup", includeSetup, "count session and circuit setup in total_time");
  fetchCmd->add_option("--name", name, "object name (default: <first producer prefix>/file)");
  fetchCmd->add_flag("--trace", showTrace, "print the TraceLog after the metrics");

  std::string csvPath;
  std::vector<std::uint64_t> sizes{64u << 10, 1u << 20, 8u << 20};
  unsigned repeats = 1;
  std::string tracePath;
  auto* benchCmd = app.add_subcommand("bench", "run the plain/andana-a/andana-s grid and write CSV");
  benchCmd->add_option("--topology", topologyPath);
  benchCmd->add_option("--csv", csvPath, "output file (default: stdout)");
  benchCmd->add_option("--sizes", sizes, "object sizes in bytes")->delimiter(',');
  benchCmd->add_option("--repeats", repeats);
  benchCmd->add_option("--seed", seed);
  benchCmd->add_option("--trace-out", tracePath, "write all TraceLogs here");

  std::string scenarioPath;
  auto* analyzeCmd = app.add_subcommand("analyze", "evaluate an analyzer scenario");
  analyzeCmd->add_option("--scenario", scenarioPath)->required();

  try {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*fetchCmd) {
      harness::FetchOptions o;
      o.mode = parseMode(modeText);
      o.size = size;
      o.seed = seed;
      o.includeSetup = includeSetup;
      o.name = name;
      auto m = harness::fetch(loadTopology(topologyPath), o);
      std::cout << m.toJson() << "\n";
      if (showTrace) {
        std::cout << m.trace;
      }
      return 0;
    }
    if (*benchCmd) {
      harness::BenchOptions o;
      o.sizes = sizes;
      o.repeats = repeats;
      o.seed = seed;
      auto r = harness::bench(loadTopology(topologyPath), o);
      if (csvPath.empty()) {
        std::cout << r.csv;
      }
      else {
        std::ofstream(csvPath, std::ios::binary) << r.csv;
      }
      if (!tracePath.empty()) {
        std::ofstream(tracePath, std::ios::binary) << r.traces;
      }
      return 0;
    }
    return harness::analyze(scenarioPath, std::cout, std::cerr);
  }
  catch (const FetchTimeout& e) {
    std::cerr << "fetch timeout: " << e.what() << "\n";
    return 1;
  }
  catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
