#include "povmkit/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <variant>

#include "povmkit/naimark.hpp"
#include "povmkit/observables.hpp"
#include "povmkit/simulator.hpp"

namespace povmkit {

namespace {

[[noreturn]] void parse_error(const std::string& what) {
  throw ScenarioError(ReportStatus::Error, 3, "parse error: " + what);
}

[[noreturn]] void invalid(const std::string& what, const std::string& object = {},
                          const std::string& invariant = {}) {
  throw ScenarioError(ReportStatus::Invalid, 1, what, object, invariant);
}

const std::map<std::string, ObjectKind, std::less<>>& kind_names() {
  static const std::map<std::string, ObjectKind, std::less<>> names{
      {"state", ObjectKind::State}, {"effect", ObjectKind::Effect}, {"observable", ObjectKind::Observable},
      {"pvm", ObjectKind::Pvm},     {"povm", ObjectKind::Povm},     {"kernel", ObjectKind::Kernel}};
  return names;
}

// ---------------------------------------------------------------------------
// Reading

double read_number(const Json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where + ": expected a number");
  return j.get<double>();
}

std::uint64_t read_unsigned(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned()) parse_error(where + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

cplx read_complex(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {read_number(j[0], where), read_number(j[1], where)};
  parse_error(where + ": expected [re, im] or a real number");
}

Matrix read_matrix(const Json& j, Eigen::Index dim, const std::string& object) {
  if (!j.is_array() || j.empty()) parse_error(object + ": matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  for (const auto& row : j) {
    if (!row.is_array()) parse_error(object + ": matrix rows must be arrays");
  }
  for (const auto& row : j) {
    if (static_cast<Eigen::Index>(row.size()) != rows) {
      invalid(object + ": matrix is not square", object, "dimension");
    }
  }
  if (rows != dim) {
    invalid(object + ": matrix is " + std::to_string(rows) + "x" + std::to_string(rows) +
                " but the declared dimension is " + std::to_string(dim),
            object, "dimension");
  }
  Matrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < rows; ++c) {
      m(r, c) = read_complex(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)],
                             object + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

void require_keys(const Json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      parse_error(where + ": unknown field \"" + it.key() + "\"");
    }
  }
}

ObjectSpec read_object(const std::string& name, const Json& j, Eigen::Index default_dim) {
  if (!j.is_object()) parse_error("object \"" + name + "\" must be a JSON object");
  ObjectSpec spec;
  spec.name = name;
  if (!j.contains("kind") || !j["kind"].is_string()) parse_error(name + ": missing string field \"kind\"");
  const auto kind = kind_names().find(j["kind"].get<std::string>());
  if (kind == kind_names().end()) parse_error(name + ": unknown kind \"" + j["kind"].get<std::string>() + "\"");
  spec.kind = kind->second;

  spec.dimension = default_dim;
  if (j.contains("dimension")) {
    const auto d = read_unsigned(j["dimension"], name + ".dimension");
    if (d == 0) parse_error(name + ".dimension must be positive");
    spec.dimension = static_cast<Eigen::Index>(d);
    spec.explicit_dimension = true;
  }
  if (spec.dimension > kMaxDim) {
    invalid(name + ": dimension " + std::to_string(spec.dimension) + " exceeds the supported maximum " +
                std::to_string(kMaxDim),
            name, "capacity");
  }

  switch (spec.kind) {
    case ObjectKind::State:
    case ObjectKind::Effect:
    case ObjectKind::Observable:
      require_keys(j, name, {"kind", "dimension", "matrix"});
      if (!j.contains("matrix")) parse_error(name + ": missing field \"matrix\"");
      spec.matrices.push_back(read_matrix(j["matrix"], spec.dimension, name));
      break;
    case ObjectKind::Pvm:
    case ObjectKind::Povm:
      require_keys(j, name, {"kind", "dimension", "elements", "labels", "values", "spin"});
      if (j.contains("spin") == j.contains("elements")) {
        parse_error(name + ": exactly one of \"elements\" or \"spin\" is required");
      }
      if (j.contains("spin")) {
        const Json& s = j["spin"];
        if (!s.is_object()) parse_error(name + ".spin must be an object");
        require_keys(s, name + ".spin", {"direction", "eta"});
        SpinSpec spin;
        if (!s.contains("direction") || !s["direction"].is_array() || s["direction"].size() != 3) {
          parse_error(name + ".spin.direction must be an array of 3 numbers");
        }
        for (std::size_t k = 0; k < 3; ++k) spin.direction[k] = read_number(s["direction"][k], name + ".spin.direction");
        if (s.contains("eta")) spin.eta = read_number(s["eta"], name + ".spin.eta");
        spec.spin = spin;
        if (j.contains("labels") || j.contains("values")) {
          parse_error(name + ": spin constructors fix their own labels and values");
        }
      } else {
        if (!j["elements"].is_array() || j["elements"].empty()) {
          parse_error(name + ".elements must be a non-empty array of matrices");
        }
        for (std::size_t i = 0; i < j["elements"].size(); ++i) {
          spec.matrices.push_back(read_matrix(j["elements"][i], spec.dimension,
                                              name + ".elements[" + std::to_string(i) + "]"));
        }
        if (j.contains("labels")) {
          if (!j["labels"].is_array()) parse_error(name + ".labels must be an array of strings");
          for (const auto& l : j["labels"]) {
            if (!l.is_string()) parse_error(name + ".labels must be an array of strings");
            spec.labels.push_back(l.get<std::string>());
          }
        }
        if (j.contains("values")) {
          if (!j["values"].is_array()) parse_error(name + ".values must be an array of numbers");
          std::vector<double> values;
          for (const auto& v : j["values"]) values.push_back(read_number(v, name + ".values"));
          spec.values = std::move(values);
        }
      }
      break;
    case ObjectKind::Kernel: {
      require_keys(j, name, {"kind", "dimension", "weights"});
      if (!j.contains("weights") || !j["weights"].is_array() || j["weights"].empty()) {
        parse_error(name + ": \"weights\" must be a non-empty array of rows");
      }
      const Json& w = j["weights"];
      const std::size_t cols = w[0].is_array() ? w[0].size() : 0;
      if (cols == 0) parse_error(name + ".weights rows must be non-empty arrays");
      spec.weights.resize(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(cols));
      for (std::size_t r = 0; r < w.size(); ++r) {
        if (!w[r].is_array() || w[r].size() != cols) parse_error(name + ".weights rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) {
          spec.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              read_number(w[r][c], name + ".weights");
        }
      }
      break;
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Typed objects

using Typed = std::variant<DensityOperator, Effect, Matrix, ProjectiveMeasure, GeneralizedMeasure, StochasticKernel>;

template <typename F>
auto guarded(const std::string& object, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const ValidationError& e) {
    invalid(object + ": " + e.what(), object, e.invariant());
  } catch (const DimensionError& e) {
    invalid(object + ": " + e.what(), object, "dimension");
  } catch (const CapacityError& e) {
    invalid(object + ": " + e.what(), object, "capacity");
  }
}

std::optional<OutcomeSpace> outcome_space(const ObjectSpec& spec) {
  if (spec.labels.empty() && !spec.values) return std::nullopt;
  std::vector<std::string> labels = spec.labels;
  if (labels.empty()) labels = OutcomeSpace::indexed(spec.matrices.size()).labels();
  return OutcomeSpace(std::move(labels), spec.values);
}

Typed materialize(const ObjectSpec& spec, double tol) {
  return guarded(spec.name, [&]() -> Typed {
    switch (spec.kind) {
      case ObjectKind::State:
        return DensityOperator::from_matrix(spec.matrices.front(), tol);
      case ObjectKind::Effect:
        return Effect::from_matrix(spec.matrices.front(), tol);
      case ObjectKind::Observable:
        require_hermitian(spec.matrices.front(), tol, "observable");
        return hermitian_part(spec.matrices.front());
      case ObjectKind::Pvm:
        if (spec.spin) {
          if (spec.dimension != 2) throw DimensionError("spin constructors are qubit (dimension 2) only");
          if (spec.spin->eta && *spec.spin->eta != 1.0) {
            throw ValidationError("sharp", "a pvm spin constructor cannot be unsharp (use kind povm)");
          }
          return spin_pvm(spec.spin->direction);
        }
        return validate_pvm(spec.matrices, outcome_space(spec).value_or(OutcomeSpace{}), tol);
      case ObjectKind::Povm:
        if (spec.spin) {
          if (spec.dimension != 2) throw DimensionError("spin constructors are qubit (dimension 2) only");
          return unsharp_spin(spec.spin->direction, spec.spin->eta.value_or(1.0));
        }
        return validate_povm(spec.matrices, outcome_space(spec).value_or(OutcomeSpace{}), tol);
      case ObjectKind::Kernel:
        return StochasticKernel(spec.weights);
    }
    throw ValidationError("kind", "unknown kind");
  });
}

// ---------------------------------------------------------------------------
// Command signatures

using KindSet = std::set<ObjectKind>;

struct Signature {
  std::vector<KindSet> args;
  std::optional<KindSet> repeat;  // further arguments of these kinds
  std::set<std::string, std::less<>> params;
};

const KindSet kMeasure{ObjectKind::Pvm, ObjectKind::Povm};
const KindSet kMeasureOrObservable{ObjectKind::Pvm, ObjectKind::Povm, ObjectKind::Observable};
const KindSet kBinary{ObjectKind::Effect, ObjectKind::Pvm, ObjectKind::Povm};

const std::map<std::string, Signature, std::less<>>& signatures() {
  using K = ObjectKind;
  static const std::map<std::string, Signature, std::less<>> table{
      {"validate", {{}, KindSet{K::State, K::Effect, K::Observable, K::Pvm, K::Povm, K::Kernel}, {}}},
      {"prob", {{{K::State}, {K::Effect, K::Pvm, K::Povm}}, std::nullopt, {}}},
      {"classify", {{{K::Effect}}, KindSet{K::State}, {}}},
      {"smear", {{kMeasure, {K::Kernel}}, std::nullopt, {}}},
      {"coexist", {{kBinary, kBinary}, std::nullopt, {"seed", "starts"}}},
      {"dilate", {{kMeasure}, std::nullopt, {"variant_seed"}}},
      {"uncertainty", {{{K::State}, {K::Observable}, {K::Observable}}, std::nullopt, {}}},
      {"chsh", {{{K::State}, {K::Observable}, {K::Observable}, {K::Observable}, {K::Observable}}, std::nullopt, {}}},
      {"simulate", {{{K::State}, kMeasureOrObservable}, std::nullopt, {"samples", "seed"}}},
      {"sequence", {{{K::State}, kMeasureOrObservable}, kMeasureOrObservable, {"samples", "seed", "trajectories", "threads"}}},
  };
  return table;
}

std::string kinds_text(const KindSet& kinds) {
  std::string out;
  for (auto k : kinds) out += (out.empty() ? "" : "|") + std::string(to_string(k));
  return out;
}

void check_command(const Scenario& s) {
  const auto sig_it = signatures().find(s.command.name);
  if (sig_it == signatures().end()) parse_error("unknown command \"" + s.command.name + "\"");
  const Signature& sig = sig_it->second;
  const auto& name = s.command.name;

  for (auto it = s.command.params.begin(); it != s.command.params.end(); ++it) {
    if (!sig.params.contains(it.key())) parse_error(name + ": unknown parameter \"" + it.key() + "\"");
    read_unsigned(it.value(), name + ".params." + it.key());
  }

  if (name == "validate" && s.objects.empty()) invalid("no objects");

  const auto& args = s.command.args;
  if (args.size() < sig.args.size() || (!sig.repeat && args.size() > sig.args.size())) {
    invalid(name + ": expected " + std::to_string(sig.args.size()) + (sig.repeat ? "+" : "") +
            " arguments, got " + std::to_string(args.size()));
  }
  if (name == "classify" && args.size() > 2) invalid("classify: expected an effect and an optional state");

  std::vector<const ObjectSpec*> objects;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const ObjectSpec* o = s.find(args[i]);
    if (!o) invalid(name + ": unknown object \"" + args[i] + "\"", args[i], "reference");
    const KindSet& allowed = i < sig.args.size() ? sig.args[i] : *sig.repeat;
    if (!allowed.contains(o->kind)) {
      invalid(name + ": argument " + std::to_string(i) + " (\"" + args[i] + "\") is a " +
                  std::string(to_string(o->kind)) + ", expected " + kinds_text(allowed),
              args[i], "kind");
    }
    objects.push_back(o);
  }

  auto mismatch = [&](const ObjectSpec& a, const ObjectSpec& b) {
    invalid(name + ": dimension mismatch between \"" + a.name + "\" (" + std::to_string(a.dimension) +
                ") and \"" + b.name + "\" (" + std::to_string(b.dimension) + ")",
            b.name, "dimension");
  };
  if (name == "chsh") {
    const auto& st = *objects[0];
    if (objects[1]->dimension != objects[2]->dimension) mismatch(*objects[1], *objects[2]);
    if (objects[3]->dimension != objects[4]->dimension) mismatch(*objects[3], *objects[4]);
    if (st.dimension != objects[1]->dimension * objects[3]->dimension) {
      invalid("chsh: state \"" + st.name + "\" has dimension " + std::to_string(st.dimension) +
                  ", expected dim(A) * dim(B) = " +
                  std::to_string(objects[1]->dimension * objects[3]->dimension),
              st.name, "dimension");
    }
  } else if (name != "validate") {
    for (const auto* o : objects) {
      if (o->kind == ObjectKind::Kernel) continue;
      if (o->dimension != objects.front()->dimension) mismatch(*objects.front(), *o);
    }
  }
}

// ---------------------------------------------------------------------------
// Output helpers

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json measure_json(const GeneralizedMeasure& m) {
  Json out = Json::object();
  out["labels"] = m.outcomes().labels();
  if (m.outcomes().values()) out["values"] = *m.outcomes().values();
  Json effects = Json::array();
  for (const auto& e : m.effects()) effects.push_back(matrix_json(e.matrix()));
  out["effects"] = std::move(effects);
  return out;
}

Json labelled(const std::vector<std::string>& labels, const auto& values) {
  Json out = Json::object();
  for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]] = values[i];
  return out;
}

Json record_json(const MeasurementRecord& r) {
  Json out = Json::object();
  out["samples"] = r.samples;
  out["counts"] = labelled(r.labels, r.counts);
  out["frequencies"] = labelled(r.labels, r.frequencies);
  out["stderr"] = labelled(r.labels, r.std_error);
  out["born"] = labelled(r.labels, r.born);
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch

Json base_options(const RunOptions& options) {
  Json o = Json::object();
  o["tolerance"] = options.tolerance;
  o["seed"] = options.seed;
  o["samples"] = options.samples;
  o["format"] = options.format == OutputFormat::Json ? "json" : "text";
  return o;
}

class Runner {
 public:
  Runner(const Scenario& s, const RunOptions& o) : scenario_(s), options_(o) {}

  Report run() {
    Report report;
    report.command = scenario_.command.name;
    report.options = options_json();
    const auto& name = scenario_.command.name;
    if (name == "validate") report.payload = validate();
    else if (name == "prob") report.payload = prob();
    else if (name == "classify") report.payload = classify_cmd();
    else if (name == "smear") report.payload = smear_cmd();
    else if (name == "coexist") report.payload = coexist(report);
    else if (name == "dilate") report.payload = dilate_cmd();
    else if (name == "uncertainty") report.payload = uncertainty();
    else if (name == "chsh") report.payload = chsh();
    else if (name == "simulate") report.payload = simulate();
    else if (name == "sequence") report.payload = sequence();
    else parse_error("unknown command \"" + name + "\"");
    return report;
  }

 private:
  const Scenario& scenario_;
  const RunOptions& options_;
  std::map<std::string, Typed, std::less<>> cache_;

  double tol() const { return options_.tolerance; }

  std::uint64_t param(std::string_view key, std::uint64_t fallback) const {
    const auto& p = scenario_.command.params;
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->template get<std::uint64_t>();
  }
  std::uint64_t seed() const { return options_.seed_given ? options_.seed : param("seed", options_.seed); }
  std::uint64_t samples() const {
    return options_.samples_given ? options_.samples : param("samples", options_.samples);
  }

  Json options_json() const {
    Json o = base_options(options_);
    o["seed"] = seed();
    o["samples"] = samples();
    return o;
  }

  const ObjectSpec& spec(std::size_t arg) const { return *scenario_.find(scenario_.command.args.at(arg)); }

  const Typed& typed(const ObjectSpec& s) {
    auto it = cache_.find(s.name);
    if (it == cache_.end()) it = cache_.emplace(s.name, materialize(s, tol())).first;
    return it->second;
  }

  const DensityOperator& state(std::size_t arg) { return std::get<DensityOperator>(typed(spec(arg))); }
  const Effect& effect(std::size_t arg) { return std::get<Effect>(typed(spec(arg))); }
  const Matrix& observable(std::size_t arg) { return std::get<Matrix>(typed(spec(arg))); }

  GeneralizedMeasure measure(std::size_t arg) {
    const Typed& t = typed(spec(arg));
    if (const auto* p = std::get_if<ProjectiveMeasure>(&t)) return p->as_povm();
    if (const auto* g = std::get_if<GeneralizedMeasure>(&t)) return *g;
    if (const auto* e = std::get_if<Effect>(&t)) {
      return validate_povm({e->matrix(), e->complement().matrix()}, OutcomeSpace({"true", "false"}), tol());
    }
    return pvm_from_observable(std::get<Matrix>(t), kDefaultGroupTol, tol()).as_povm();
  }

  Json validate() {
    std::vector<const ObjectSpec*> targets;
    if (scenario_.command.args.empty()) {
      for (const auto& o : scenario_.objects) targets.push_back(&o);
    } else {
      for (std::size_t i = 0; i < scenario_.command.args.size(); ++i) targets.push_back(&spec(i));
    }
    Json list = Json::array();
    for (const auto* o : targets) {
      const Typed& t = typed(*o);
      Json item = Json::object();
      item["name"] = o->name;
      item["kind"] = to_string(o->kind);
      item["dimension"] = o->dimension;
      item["valid"] = true;
      if (const auto* rho = std::get_if<DensityOperator>(&t)) {
        item["purity"] = trace_product(rho->matrix(), rho->matrix());
      } else if (const auto* e = std::get_if<Effect>(&t)) {
        item["class"] = to_string(classify(*e, tol()));
      } else if (const auto* p = std::get_if<ProjectiveMeasure>(&t)) {
        item["outcomes"] = p->outcomes().labels();
      } else if (const auto* g = std::get_if<GeneralizedMeasure>(&t)) {
        item["outcomes"] = g->outcomes().labels();
        item["informationally_complete"] = is_informationally_complete(*g);
      } else if (const auto* k = std::get_if<StochasticKernel>(&t)) {
        item["outputs"] = k->outputs();
        item["inputs"] = k->inputs();
      }
      list.push_back(std::move(item));
    }
    return Json{{"objects", std::move(list)}};
  }

  Json prob() {
    const DensityOperator& rho = state(0);
    Json out = Json::object();
    if (spec(1).kind == ObjectKind::Effect) {
      out["w"] = born_probability(rho, effect(1), tol());
      return out;
    }
    const GeneralizedMeasure m = measure(1);
    out["probabilities"] = labelled(m.outcomes().labels(), outcome_probabilities(rho, m));
    return out;
  }

  Json classify_cmd() {
    const Effect& e = effect(0);
    Json out = Json::object();
    out["class"] = to_string(classify(e, tol()));
    out["sharp"] = is_sharp(e, tol());
    out["regular"] = is_regular(e, tol());
    const RealVector spectrum = eigenvalues_hermitian(e.matrix());
    out["spectrum"] = std::vector<double>(spectrum.data(), spectrum.data() + spectrum.size());
    if (scenario_.command.args.size() == 2) {
      out["w"] = born_probability(state(1), e, tol());
      out["real_in_state"] = is_real_in_state(e, state(1), tol());
    }
    return out;
  }

  Json smear_cmd() {
    const GeneralizedMeasure m = measure(0);
    const auto& k = std::get<StochasticKernel>(typed(spec(1)));
    return measure_json(smear(m, k));
  }

  Json coexist(Report& report) {
    const GeneralizedMeasure a = measure(0);
    const GeneralizedMeasure b = measure(1);
    if (a.size() != 2 || b.size() != 2) {
      invalid("coexist: both arguments must be binary (two outcomes)", a.size() != 2 ? spec(0).name : spec(1).name,
              "binary");
    }
    Json out = Json::object();
    const Matrix& ap = a.effect(0).matrix();
    const Matrix& bp = b.effect(0).matrix();
    out["commutator_norm"] = commutator_norm(ap, bp);

    if (is_projector(ap, tol()) && is_projector(bp, tol())) {
      // Sharp pair: coexistence is exactly commutation.
      out["method"] = "projector-commutation";
      out["certified"] = true;
      if (projectors_coexistent(ap, bp, tol())) {
        out["found"] = true;
        out["joint"] = measure_json(joint_pvm(ap, bp, tol()).as_povm());
      } else {
        out["found"] = false;
        report.status = ReportStatus::Infeasible;
        report.exit_code = 2;
        report.diagnostics.push_back("projectors do not commute, so they are not coexistent");
      }
      return out;
    }

    CoexistenceOptions opt;
    opt.tol = tol();
    opt.seed = seed();
    opt.starts = static_cast<int>(param("starts", static_cast<std::uint64_t>(opt.starts)));
    const CoexistenceResult result = coexist_binary_povms(a, b, opt);
    out["method"] = result.method;
    out["certified"] = false;
    out["found"] = result.found;
    out["residual"] = result.residual;
    out["g"] = matrix_json(result.g);
    if (result.joint) {
      const auto& j = result.joint->effects();
      const double marginal = std::max(
          operator_norm(j[0].matrix() + j[1].matrix() - ap), operator_norm(j[0].matrix() + j[2].matrix() - bp));
      out["marginal_deviation"] = marginal;
      out["joint"] = measure_json(*result.joint);
    } else {
      report.status = ReportStatus::Infeasible;
      report.exit_code = 2;
      report.diagnostics.push_back(
          "no joint observable found within the search budget (a heuristic report, not a proof)");
    }
    return out;
  }

  Json dilation_json(const GeneralizedMeasure& m, const DilationResult& d) {
    Json out = Json::object();
    out["ancilla_dim"] = d.ancilla_dim;
    out["extended_dim"] = d.system_dim * d.ancilla_dim;
    out["isometry_defect"] = d.isometry_defect();
    const auto states = spanning_states(m.dim());
    out["max_deviation"] = verify_dilation(m, d, states);
    out["isometry"] = matrix_json(d.isometry);
    Json projectors = Json::array();
    for (const auto& p : d.extended_pvm.projectors()) projectors.push_back(matrix_json(p));
    out["projectors"] = std::move(projectors);
    return out;
  }

  Json dilate_cmd() {
    const GeneralizedMeasure m = measure(0);
    const DilationResult d = guarded(spec(0).name, [&] { return dilate(m); });
    Json out = dilation_json(m, d);
    out["ordering"] = "system-major: index = s * ancilla_dim + a";
    if (scenario_.command.params.contains("variant_seed")) {
      const auto alt_seed = param("variant_seed", 0);
      const DilationResult alt = guarded(spec(0).name, [&] { return alternate_dilation(m, alt_seed); });
      Json a = dilation_json(m, alt);
      a["variant_seed"] = alt_seed;
      a["projector_family_distance"] = projector_family_distance(d, alt);
      out["alternate"] = std::move(a);
    }
    return out;
  }

  Json uncertainty() {
    const auto& rho = state(0);
    const Moments a = expectation_variance(rho, observable(1), tol());
    const Moments b = expectation_variance(rho, observable(2), tol());
    const RobertsonResult r = robertson_check(rho, observable(1), observable(2), tol());
    Json out = Json::object();
    out["mean_a"] = a.mean;
    out["delta_a"] = a.delta;
    out["mean_b"] = b.mean;
    out["delta_b"] = b.delta;
    out["lhs"] = r.lhs;
    out["rhs"] = r.rhs;
    out["holds"] = r.holds;
    return out;
  }

  Json chsh() {
    const double value = guarded(spec(1).name, [&] {
      return chsh_value(state(0), observable(1), observable(2), observable(3), observable(4), tol());
    });
    Json out = Json::object();
    out["value"] = value;
    out["classical_bound"] = 2.0;
    out["tsirelson_bound"] = 2.0 * std::numbers::sqrt2;
    return out;
  }

  Json simulate() {
    const EnsembleConfig config{state(0), measure(1), samples(), seed()};
    Json out = record_json(sample_outcomes(config));
    out["seed"] = config.seed;
    return out;
  }

  Json sequence() {
    std::vector<GeneralizedMeasure> measures;
    std::vector<std::string> names;
    for (std::size_t i = 1; i < scenario_.command.args.size(); ++i) {
      measures.push_back(measure(i));
      names.push_back(spec(i).name);
    }
    const std::uint64_t trajectories = param("trajectories", samples());
    const auto threads = static_cast<unsigned>(param("threads", 1));
    const SequenceResult r = sequential_measurement(state(0), measures, seed(), trajectories, threads);
    Json out = Json::object();
    out["trajectories"] = trajectories;
    out["seed"] = seed();
    out["terminated"] = r.terminated;
    Json steps = Json::array();
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
      Json step = record_json(r.steps[k]);
      step["measure"] = names[k];
      steps.push_back(std::move(step));
    }
    out["steps"] = std::move(steps);
    Json first = Json::array();
    for (const auto& s : r.first.steps) {
      first.push_back(Json{{"measure", names[s.measure_index]},
                           {"outcome", s.outcome},
                           {"post_state", matrix_json(s.post_state.matrix())}});
    }
    out["first_trajectory"] = std::move(first);
    if (r.first.terminated) out["first_trajectory_terminated"] = r.first.termination_reason;
    return out;
  }
};

}  // namespace

std::string_view to_string(ObjectKind kind) noexcept {
  switch (kind) {
    case ObjectKind::State: return "state";
    case ObjectKind::Effect: return "effect";
    case ObjectKind::Observable: return "observable";
    case ObjectKind::Pvm: return "pvm";
    case ObjectKind::Povm: return "povm";
    case ObjectKind::Kernel: return "kernel";
  }
  return "unknown";
}

std::string_view to_string(ReportStatus status) noexcept {
  switch (status) {
    case ReportStatus::Ok: return "ok";
    case ReportStatus::Invalid: return "invalid";
    case ReportStatus::Infeasible: return "infeasible";
    case ReportStatus::Error: return "error";
  }
  return "error";
}

const ObjectSpec* Scenario::find(std::string_view name) const {
  const auto it = std::find_if(objects.begin(), objects.end(), [&](const ObjectSpec& o) { return o.name == name; });
  return it == objects.end() ? nullptr : &*it;
}

Scenario parse_scenario(std::string_view text, double tol) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    parse_error(std::string("syntax error: ") + e.what());
  }
  if (!doc.is_object()) parse_error("document must be a JSON object");
  require_keys(doc, "document", {"dimension", "objects", "command"});

  Scenario s;
  if (!doc.contains("dimension")) parse_error("missing field \"dimension\"");
  const auto dim = read_unsigned(doc["dimension"], "dimension");
  if (dim == 0) parse_error("dimension must be positive");
  s.dimension = static_cast<Eigen::Index>(dim);

  const Json objects = doc.contains("objects") ? doc["objects"] : Json::object();
  if (!objects.is_object()) parse_error("\"objects\" must be a JSON object");
  for (auto it = objects.begin(); it != objects.end(); ++it) {
    s.objects.push_back(read_object(it.key(), it.value(), s.dimension));
  }

  if (!doc.contains("command") || !doc["command"].is_object()) parse_error("missing object field \"command\"");
  const Json& cmd = doc["command"];
  require_keys(cmd, "command", {"name", "args", "params"});
  if (!cmd.contains("name") || !cmd["name"].is_string()) parse_error("command.name must be a string");
  s.command.name = cmd["name"].get<std::string>();
  if (cmd.contains("args")) {
    if (!cmd["args"].is_array()) parse_error("command.args must be an array of object names");
    for (const auto& a : cmd["args"]) {
      if (!a.is_string()) parse_error("command.args must be an array of object names");
      s.command.args.push_back(a.get<std::string>());
    }
  }
  if (cmd.contains("params")) {
    if (!cmd["params"].is_object()) parse_error("command.params must be an object");
    s.command.params = cmd["params"];
  }

  check_command(s);
  for (const auto& o : s.objects) materialize(o, tol);
  return s;
}

Json serialize_scenario(const Scenario& s) {
  Json doc = Json::object();
  doc["dimension"] = s.dimension;
  Json objects = Json::object();
  for (const auto& o : s.objects) {
    Json j = Json::object();
    j["kind"] = to_string(o.kind);
    if (o.explicit_dimension) j["dimension"] = o.dimension;
    switch (o.kind) {
      case ObjectKind::State:
      case ObjectKind::Effect:
      case ObjectKind::Observable:
        j["matrix"] = matrix_json(o.matrices.front());
        break;
      case ObjectKind::Pvm:
      case ObjectKind::Povm:
        if (o.spin) {
          Json spin = Json::object();
          spin["direction"] = o.spin->direction;
          if (o.spin->eta) spin["eta"] = *o.spin->eta;
          j["spin"] = std::move(spin);
        } else {
          Json elements = Json::array();
          for (const auto& m : o.matrices) elements.push_back(matrix_json(m));
          j["elements"] = std::move(elements);
          if (!o.labels.empty()) j["labels"] = o.labels;
          if (o.values) j["values"] = *o.values;
        }
        break;
      case ObjectKind::Kernel: {
        Json rows = Json::array();
        for (Eigen::Index r = 0; r < o.weights.rows(); ++r) {
          Json row = Json::array();
          for (Eigen::Index c = 0; c < o.weights.cols(); ++c) row.push_back(o.weights(r, c));
          rows.push_back(std::move(row));
        }
        j["weights"] = std::move(rows);
        break;
      }
    }
    objects[o.name] = std::move(j);
  }
  doc["objects"] = std::move(objects);
  Json cmd = Json::object();
  cmd["name"] = s.command.name;
  cmd["args"] = s.command.args;
  cmd["params"] = s.command.params;
  doc["command"] = std::move(cmd);
  return doc;
}

Report run(const Scenario& scenario, const RunOptions& options) {
  Runner runner(scenario, options);
  auto failure = [&](ReportStatus status, int code, const std::string& message) {
    Report r;
    r.status = status;
    r.exit_code = code;
    r.command = scenario.command.name;
    r.options = base_options(options);
    r.diagnostics.push_back(message);
    return r;
  };
  try {
    return runner.run();
  } catch (const ScenarioError& e) {
    return failure(e.status(), e.exit_code(), e.what());
  } catch (const ValidationError& e) {
    return failure(ReportStatus::Invalid, 1, std::string(e.what()) + " [" + e.invariant() + "]");
  } catch (const DimensionError& e) {
    return failure(ReportStatus::Invalid, 1, e.what());
  } catch (const CapacityError& e) {
    return failure(ReportStatus::Invalid, 1, e.what());
  } catch (const Error& e) {
    return failure(ReportStatus::Error, 1, e.what());
  }
}

Report run_document(std::string_view text, const RunOptions& options) {
  Scenario scenario;
  try {
    scenario = parse_scenario(text, options.tolerance);
  } catch (const ScenarioError& e) {
    Report r;
    r.status = e.status();
    r.exit_code = e.exit_code();
    r.options = base_options(options);
    // Name the command when the document got far enough to have one.
    const Json raw = Json::parse(text.begin(), text.end(), nullptr, false);
    if (raw.is_object() && raw.contains("command") && raw["command"].is_object() &&
        raw["command"].contains("name") && raw["command"]["name"].is_string()) {
      r.command = raw["command"]["name"].get<std::string>();
    }
    std::string message = e.what();
    if (!e.invariant().empty()) message += " [" + e.invariant() + "]";
    r.diagnostics.push_back(message);
    return r;
  }
  return run(scenario, options);
}

}  // namespace povmkit
