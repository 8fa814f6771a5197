#include <gtest/gtest.h>

#include <cmath>

#include "povmkit/scenario.hpp"

using namespace povmkit;

namespace {

const char* kProb = R"({
  "dimension": 2,
  "objects": {
    "rho": {"kind": "state", "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]]},
    "E": {"kind": "effect", "matrix": [[0.5,0],[0,0.5]]}
  },
  "command": {"name": "prob", "args": ["rho", "E"]}
})";

std::string with_command(const std::string& objects, const std::string& command, int dimension = 2) {
  return R"({"dimension": )" + std::to_string(dimension) + R"(, "objects": {)" + objects +
         R"(}, "command": )" + command + "}";
}

const std::string kSpins =
    R"("A": {"kind": "povm", "spin": {"direction": [1,0,0], "eta": 0.9}},
       "B": {"kind": "povm", "spin": {"direction": [0,0,1], "eta": 0.9}})";

Report run_text(const std::string& text, RunOptions options = {}) {
  options.format = OutputFormat::Json;
  return run_document(text, options);
}

void expect_error(const std::string& text, int exit_code, const std::string& object, const std::string& invariant) {
  try {
    parse_scenario(text);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.exit_code(), exit_code) << e.what();
    EXPECT_EQ(e.object(), object) << e.what();
    EXPECT_EQ(e.invariant(), invariant) << e.what();
  }
}

}  // namespace

TEST(ParseScenario, ProbExample) {
  const auto s = parse_scenario(kProb);
  EXPECT_EQ(s.dimension, 2);
  ASSERT_EQ(s.objects.size(), 2u);
  EXPECT_EQ(s.find("rho")->kind, ObjectKind::State);
  EXPECT_EQ(s.find("E")->kind, ObjectKind::Effect);
  EXPECT_EQ(s.find("E")->matrices.front()(1, 1), cplx(0.5, 0.0));
  EXPECT_EQ(s.command.name, "prob");
  EXPECT_EQ(s.command.args, (std::vector<std::string>{"rho", "E"}));
}

TEST(ParseScenario, EffectOutOfRangeNamesObjectAndBound) {
  expect_error(with_command(R"("E": {"kind": "effect", "matrix": [[1.2,0],[0,0.5]]})",
                            R"({"name": "classify", "args": ["E"]})"),
               1, "E", "effect-upper-bound");
}

TEST(ParseScenario, EmptyObjectsWithValidate) {
  try {
    parse_scenario(with_command("", R"({"name": "validate"})"));
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.exit_code(), 1);
    EXPECT_NE(std::string(e.what()).find("no objects"), std::string::npos);
  }
}

TEST(ParseScenario, SyntaxErrorsExitThree) {
  expect_error("{\"dimension\": 2,", 3, "", "");
  expect_error(R"({"dimension": 2, "objects": {}, "command": {"name": "prob"}, "extra": 1})", 3, "", "");
  expect_error(with_command(R"("E": {"kind": "widget", "matrix": [[1,0],[0,1]]})", R"({"name": "validate"})"), 3,
               "", "");
}

TEST(ParseScenario, ReferenceKindAndDimensionErrors) {
  const std::string state = R"("rho": {"kind": "state", "matrix": [[1,0],[0,0]]})";
  try {
    parse_scenario(with_command(state, R"({"name": "prob", "args": ["rho", "missing"]})"));
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.exit_code(), 1);
    EXPECT_EQ(e.object(), "missing");
  }
  try {
    parse_scenario(with_command(state, R"({"name": "prob", "args": ["rho", "rho"]})"));
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.exit_code(), 1);
    EXPECT_EQ(e.object(), "rho");
  }
  expect_error(with_command(R"("rho": {"kind": "state", "matrix": [[1,0,0],[0,0,0]]})", R"({"name": "validate"})"),
               1, "rho", "dimension");
  EXPECT_THROW(parse_scenario(with_command(state, R"({"name": "teleport", "args": ["rho"]})")), ScenarioError);
}

TEST(SerializeScenario, RoundTrip) {
  const std::string doc = with_command(
      kSpins + R"(,
       "rho": {"kind": "state", "matrix": [[[0.7,0],[0.1,-0.2]],[[0.1,0.2],[0.3,0]]]},
       "E": {"kind": "effect", "matrix": [[0.123456789012345678, 0],[0, 0.9]]},
       "H": {"kind": "observable", "matrix": [[1,[0,-1]],[[0,1],-1]]},
       "T": {"kind": "povm", "elements": [[[0.25,0],[0,0.75]],[[0.75,0],[0,0.25]]], "labels": ["a","b"], "values": [2, 3]},
       "K": {"kind": "kernel", "weights": [[0.9, 0.1], [0.1, 0.9]]},
       "Bell": {"kind": "state", "dimension": 4, "matrix": [[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]})",
      R"({"name": "coexist", "args": ["A", "B"], "params": {"starts": 5}})");
  const auto first = parse_scenario(doc);
  const Json serialized = serialize_scenario(first);
  const auto second = parse_scenario(serialized.dump());
  ASSERT_EQ(first.objects.size(), second.objects.size());
  for (std::size_t i = 0; i < first.objects.size(); ++i) {
    const auto& a = first.objects[i];
    const auto& b = second.objects[i];
    EXPECT_EQ(a.name, b.name);
    EXPECT_EQ(a.kind, b.kind);
    EXPECT_EQ(a.dimension, b.dimension);
    ASSERT_EQ(a.matrices.size(), b.matrices.size());
    for (std::size_t m = 0; m < a.matrices.size(); ++m) {
      EXPECT_LE((a.matrices[m] - b.matrices[m]).cwiseAbs().maxCoeff(), 1e-15);
    }
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.spin.has_value(), b.spin.has_value());
  }
  EXPECT_EQ(first.command.params, second.command.params);
  EXPECT_EQ(serialize_scenario(second), serialized);
}

TEST(Run, ProbMaximallyMixed) {
  const auto r = run_text(with_command(R"("rho": {"kind": "state", "matrix": [[0.5,0],[0,0.5]]},
                                        "E": {"kind": "effect", "matrix": [[0.5,0],[0,0.5]]})",
                                       R"({"name": "prob", "args": ["rho", "E"]})"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.status, ReportStatus::Ok);
  EXPECT_DOUBLE_EQ(r.payload["w"].get<double>(), 0.5);
}

TEST(Run, CoexistInfeasibleExitsTwo) {
  const auto r = run_text(with_command(kSpins, R"({"name": "coexist", "args": ["A", "B"]})"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.status, ReportStatus::Infeasible);
  EXPECT_LT(r.payload["residual"].get<double>(), 0.0);
  EXPECT_FALSE(r.payload["found"].get<bool>());
}

TEST(Run, SimulateEigenstate) {
  RunOptions options;
  options.samples = 1000;
  options.seed = 7;
  options.samples_given = options.seed_given = true;
  const auto r = run_text(with_command(R"("rho": {"kind": "state", "matrix": [[1,0],[0,0]]},
                                        "Z": {"kind": "pvm", "spin": {"direction": [0,0,1]}})",
                                       R"({"name": "simulate", "args": ["rho", "Z"]})"),
                          options);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.payload["counts"]["+1"].get<std::uint64_t>(), 1000u);
  EXPECT_EQ(r.payload["counts"]["-1"].get<std::uint64_t>(), 0u);
  EXPECT_EQ(r.options["seed"].get<std::uint64_t>(), 7u);
  EXPECT_EQ(r.options["samples"].get<std::uint64_t>(), 1000u);
}

TEST(Run, DefaultsRecordedInReport) {
  const auto r = run_text(kProb);
  EXPECT_EQ(r.options["tolerance"].get<double>(), 1e-9);
  EXPECT_EQ(r.options["seed"].get<std::uint64_t>(), 0u);
  EXPECT_EQ(r.options["samples"].get<std::uint64_t>(), 10000u);
}

TEST(Run, ParseFailureStillNamesCommand) {
  const auto r = run_text(with_command(R"("E": {"kind": "effect", "matrix": [[1.2,0],[0,0.5]]})",
                                       R"({"name": "classify", "args": ["E"]})"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.status, ReportStatus::Invalid);
  EXPECT_EQ(r.command, "classify");
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_NE(r.diagnostics.front().find("E"), std::string::npos);
  EXPECT_NE(r.diagnostics.front().find("effect-upper-bound"), std::string::npos);
  EXPECT_EQ(run_text("[1, 2").exit_code, 3);
}

TEST(Run, ByteIdenticalReportsForSameSeed) {
  const std::string doc = with_command(
      R"("rho": {"kind": "state", "matrix": [[0.6,[0.1,0.2]],[[0.1,-0.2],0.4]]},
         "X": {"kind": "pvm", "spin": {"direction": [1,0,0]}},
         "Z": {"kind": "povm", "spin": {"direction": [0,0,1], "eta": 0.6}})",
      R"({"name": "sequence", "args": ["rho", "Z", "X", "Z"], "params": {"trajectories": 2000, "threads": 3}})");
  RunOptions options;
  options.seed = 42;
  options.seed_given = true;
  const auto a = render(run_text(doc, options), OutputFormat::Json);
  const auto b = render(run_text(doc, options), OutputFormat::Json);
  EXPECT_EQ(a, b);
  options.seed = 43;
  EXPECT_NE(render(run_text(doc, options), OutputFormat::Json), a);
}

TEST(Render, TextUsesTwelveSignificantDigits) {
  const auto r = run_text(with_command(R"("rho": {"kind": "state", "matrix": [[0.123456789012345678,0],[0,0.876543210987654322]]},
                                        "E": {"kind": "effect", "matrix": [[1,0],[0,0]]})",
                                       R"({"name": "prob", "args": ["rho", "E"]})"));
  const std::string text = render(r, OutputFormat::Text);
  EXPECT_NE(text.find("0.123456789012"), std::string::npos) << text;
  EXPECT_EQ(text.find("0.1234567890123"), std::string::npos) << text;
  const std::string json = render(r, OutputFormat::Json);
  EXPECT_NE(json.find("0.12345678901234"), std::string::npos) << json;
}
