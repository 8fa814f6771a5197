#pragma once

// Scenario documents and reports for the command-line front end.
//
// A scenario is a JSON document:
//
//   {
//     "dimension": 2,
//     "objects": {
//       "rho": {"kind": "state",  "matrix": [[[1,0],[0,0]], [[0,0],[0,0]]]},
//       "E":   {"kind": "effect", "matrix": [[0.5, 0], [0, 0.5]]},
//       "Z":   {"kind": "pvm",    "spin": {"direction": [0, 0, 1]}},
//       "A":   {"kind": "povm",   "spin": {"direction": [1, 0, 0], "eta": 0.9}},
//       "K":   {"kind": "kernel", "weights": [[0.9, 0.1], [0.1, 0.9]]}
//     },
//     "command": {"name": "prob", "args": ["rho", "E"], "params": {}}
//   }
//
// Matrices are row-major nested arrays; an entry is [re, im] or a bare real.
// Objects may override "dimension" (a two-qubit state for chsh, say).
// pvm/povm objects take "elements" (list of matrices) with optional "labels"
// and "values", or a "spin" constructor. Extended spaces produced by dilate
// index system (x) ancilla as s * ancilla_dim + a.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "povmkit/errors.hpp"
#include "povmkit/operator_core.hpp"

namespace povmkit {

using Json = nlohmann::ordered_json;

enum class ObjectKind { State, Effect, Observable, Pvm, Povm, Kernel };

std::string_view to_string(ObjectKind kind) noexcept;

struct SpinSpec {
  std::array<double, 3> direction{0.0, 0.0, 1.0};
  std::optional<double> eta;  // absent: sharp
};

struct ObjectSpec {
  std::string name;
  ObjectKind kind = ObjectKind::State;
  Eigen::Index dimension = 0;
  bool explicit_dimension = false;
  std::vector<Matrix> matrices;  // one for state/effect/observable, elements for pvm/povm
  std::vector<std::string> labels;
  std::optional<std::vector<double>> values;
  RealMatrix weights;            // kernel
  std::optional<SpinSpec> spin;  // pvm/povm constructor
};

struct CommandSpec {
  std::string name;
  std::vector<std::string> args;
  Json params = Json::object();
};

struct Scenario {
  Eigen::Index dimension = 0;
  std::vector<ObjectSpec> objects;
  CommandSpec command;

  const ObjectSpec* find(std::string_view name) const;
};

enum class ReportStatus { Ok, Invalid, Infeasible, Error };

std::string_view to_string(ReportStatus status) noexcept;

/// Scenario that cannot be run. Exit code 3 for malformed documents, 1 for
/// well-formed documents with bad references, kinds, dimensions or objects.
class ScenarioError : public Error {
 public:
  ScenarioError(ReportStatus status, int exit_code, const std::string& what, std::string object = {},
                std::string invariant = {})
      : Error(what), status_(status), exit_code_(exit_code), object_(std::move(object)),
        invariant_(std::move(invariant)) {}

  ReportStatus status() const noexcept { return status_; }
  int exit_code() const noexcept { return exit_code_; }
  const std::string& object() const noexcept { return object_; }
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  ReportStatus status_;
  int exit_code_;
  std::string object_;
  std::string invariant_;
};

/// Parses and validates: every object against its kind's invariants, every
/// command argument against the command's signature and dimensions.
Scenario parse_scenario(std::string_view text, double tol = kDefaultTol);

/// Inverse of parse_scenario up to number formatting (matrices come back as
/// [re, im] pairs).
Json serialize_scenario(const Scenario& scenario);

enum class OutputFormat { Text, Json };

struct RunOptions {
  double tolerance = kDefaultTol;
  std::uint64_t seed = 0;
  std::uint64_t samples = 10000;
  OutputFormat format = OutputFormat::Text;
  // Set when the value came from the command line; it then overrides the
  // scenario's command params.
  bool seed_given = false;
  bool samples_given = false;
};

struct Report {
  ReportStatus status = ReportStatus::Ok;
  std::string command;
  Json options = Json::object();
  Json payload = Json::object();
  std::vector<std::string> diagnostics;
  int exit_code = 0;

  Json to_json() const;
};

/// Dispatches the scenario's command. Library errors become reports:
/// invalid input exits 1, a coexistence search that finds no joint exits 2.
Report run(const Scenario& scenario, const RunOptions& options);

/// parse_scenario followed by run; parse failures become reports too.
Report run_document(std::string_view text, const RunOptions& options);

/// JSON (full precision) or text (12 significant digits).
std::string render(const Report& report, OutputFormat format);

}  // namespace povmkit
