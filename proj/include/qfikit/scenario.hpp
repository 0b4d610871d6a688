#pragma once

// Scenario documents: JSON descriptions of a state family, a parameter
// value, and a computation route, plus the runners behind the command-line
// front end. Single computations produce a JSON result record; sweeps
// produce a CSV table.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfikit/families.hpp"

namespace qfikit::scenario {

struct SweepSpec {
  double from = 0.0;
  double to = 0.0;
  int steps = 0;  // number of points, endpoints included; at least 2
};

struct Scenario {
  families::Family family;
  double theta = 0.0;
  std::string method = "auto";
  double fd_step = 1e-5;
  int fock_dim = 80;
  int series_order = 40;
  long trials = 1;
  std::vector<std::string> outputs{"qfi", "residuals"};
  std::optional<SweepSpec> sweep;

  explicit Scenario(families::Family f) : family(std::move(f)) {}
};

// Parses and validates a scenario document. Throws ArgumentError on any
// schema violation, including method/representation mismatches.
Scenario parse_scenario(const nlohmann::json& doc);

// Reads and parses a scenario file; JSON syntax errors surface as
// ArgumentError.
Scenario load_scenario(const std::string& path);

struct ComputeOutcome {
  nlohmann::json record;
  bool crosscheck_pass = true;  // false only when a crosscheck ran and failed
};

// Runs the scenario's method at scenario.theta and assembles the result
// record. Method "crosscheck" runs every applicable route and embeds the
// comparison block.
ComputeOutcome run_compute(const Scenario& s);

// Evaluates the sweep grid concurrently (one row per theta, rows ordered by
// theta) and renders the CSV table. A failing point aborts with its theta
// in the message.
std::string run_sweep_csv(const Scenario& s);

// Shortest decimal string that parses back to exactly v.
std::string format_double(double v);

}  // namespace qfikit::scenario
