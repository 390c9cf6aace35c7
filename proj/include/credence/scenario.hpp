#pragma once

// Scenario files and emitted artifacts. JSON in, JSON or CSV out. Every
// payload is fully validated at load, before any computation runs, with
// errors naming the offending field.
//
// Kinds are detected from an explicit "kind" field when present, otherwise
// from discriminating keys: "alleles" -> population, "experiments" ->
// design, "outcomes" -> inference, "beads" -> galton.

#include <ctime>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "design.hpp"
#include "errors.hpp"
#include "galton.hpp"
#include "inference.hpp"
#include "selection.hpp"

namespace credence {

enum class ScenarioKind { kInference, kPopulation, kGalton, kDesign };

inline const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kInference: return "inference";
    case ScenarioKind::kPopulation: return "population";
    case ScenarioKind::kGalton: return "galton";
    case ScenarioKind::kDesign: return "design";
  }
  return "unknown";
}

struct InferenceScenario {
  Distribution prior;
  ObservationModel model;
  std::vector<std::string> data;
};

struct DesignScenario {
  Distribution prior;
  std::vector<Experiment> experiments;
};

struct Scenario {
  ScenarioKind kind;
  std::variant<InferenceScenario, Population, GaltonConfig, DesignScenario> payload;
  std::string source;     // file path
  std::string loaded_at;  // ISO-8601 UTC; provenance only, never in data output

  const InferenceScenario& inference() const { return expect<InferenceScenario>("inference"); }
  const Population& population() const { return expect<Population>("population"); }
  const GaltonConfig& galton() const { return expect<GaltonConfig>("galton"); }
  const DesignScenario& design() const { return expect<DesignScenario>("design"); }

 private:
  template <typename T>
  const T& expect(const char* wanted) const {
    if (const T* p = std::get_if<T>(&payload)) return *p;
    throw UsageError(std::string("scenario is of kind ") + to_string(kind) + ", command needs " +
                     wanted);
  }
};

namespace detail {

using json = nlohmann::json;

inline const json& require_field(const json& j, const std::string& field) {
  const auto it = j.find(field);
  if (it == j.end()) throw ValidationError("missing field \"" + field + "\"");
  return *it;
}

inline std::vector<double> double_array(const json& j, const std::string& field) {
  const json& arr = require_field(j, field);
  if (!arr.is_array()) throw ValidationError("\"" + field + "\" must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw ValidationError(field + "[" + std::to_string(i) + "] must be a number");
    out.push_back(arr[i].get<double>());
  }
  return out;
}

inline std::vector<std::string> string_array(const json& j, const std::string& field) {
  const json& arr = require_field(j, field);
  if (!arr.is_array()) throw ValidationError("\"" + field + "\" must be an array");
  std::vector<std::string> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string())
      throw ValidationError(field + "[" + std::to_string(i) + "] must be a string");
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

inline std::uint64_t uint_field(const json& j, const std::string& field, std::uint64_t minimum) {
  const json& v = require_field(j, field);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<std::int64_t>() < 0))
    throw ValidationError("\"" + field + "\" must be a non-negative integer");
  const std::uint64_t value = v.get<std::uint64_t>();
  if (value < minimum)
    throw ValidationError("\"" + field + "\" must be >= " + std::to_string(minimum));
  return value;
}

// Re-throws core validation errors with the owning field name attached.
template <typename Fn>
auto named(const std::string& field, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(field + ": " + e.what());
  }
}

inline std::vector<std::vector<double>> matrix_field(const json& j, const std::string& field) {
  const json& m = require_field(j, field);
  if (!m.is_array()) throw ValidationError("\"" + field + "\" must be an array of rows");
  std::vector<std::vector<double>> rows;
  rows.reserve(m.size());
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (!m[r].is_array())
      throw ValidationError(field + " row " + std::to_string(r) + " must be an array");
    std::vector<double> row;
    row.reserve(m[r].size());
    for (std::size_t c = 0; c < m[r].size(); ++c) {
      if (!m[r][c].is_number())
        throw ValidationError(field + "[" + std::to_string(r) + "][" + std::to_string(c) +
                              "] must be a number");
      row.push_back(m[r][c].get<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

// {"labels": [...], "probs": [...]}, arrays index-aligned.
inline Distribution distribution_from_json(const nlohmann::json& j) {
  auto labels = detail::string_array(j, "labels");
  auto probs = detail::double_array(j, "probs");
  auto space = detail::named("labels", [&] { return HypothesisSpace(std::move(labels)); });
  return detail::named("probs", [&] { return Distribution(std::move(space), std::move(probs)); });
}

inline nlohmann::json to_json(const Distribution& d) {
  return nlohmann::json{{"labels", d.space().labels()}, {"probs", d.probs()}};
}

inline InferenceScenario inference_scenario_from_json(const nlohmann::json& j) {
  auto labels = detail::string_array(j, "labels");
  auto space = detail::named("labels", [&] { return HypothesisSpace(std::move(labels)); });
  auto prior = detail::named("prior", [&] {
    return Distribution(space, detail::double_array(j, "prior"));
  });
  auto model = detail::named("matrix", [&] {
    return ObservationModel(space, detail::string_array(j, "outcomes"),
                            detail::matrix_field(j, "matrix"));
  });
  std::vector<std::string> data;
  if (j.contains("data")) data = detail::string_array(j, "data");
  for (std::size_t i = 0; i < data.size(); ++i)
    if (!model.outcome_index(data[i]))
      throw ValidationError("data[" + std::to_string(i) + "] names unknown outcome \"" + data[i] +
                            "\"");
  return InferenceScenario{std::move(prior), std::move(model), std::move(data)};
}

inline Population population_from_json(const nlohmann::json& j) {
  auto alleles = detail::string_array(j, "alleles");
  auto freqs = detail::double_array(j, "freqs");
  auto fitnesses = detail::double_array(j, "fitnesses");
  std::optional<std::uint64_t> size;
  if (j.contains("size")) size = detail::uint_field(j, "size", 1);
  auto space = detail::named("alleles", [&] { return HypothesisSpace(std::move(alleles)); });
  auto dist = detail::named("freqs", [&] { return Distribution(std::move(space), std::move(freqs)); });
  return detail::named("fitnesses",
                       [&] { return Population(std::move(dist), std::move(fitnesses), size); });
}

inline GaltonConfig galton_config_from_json(const nlohmann::json& j) {
  auto prior_probs = detail::double_array(j, "prior");
  const std::size_t bins = prior_probs.size();
  auto prior = detail::named("prior", [&] {
    return Distribution(indexed_space(bins), std::move(prior_probs));
  });
  auto likelihood = detail::double_array(j, "likelihood");
  const std::uint64_t beads = detail::uint_field(j, "beads", 1);
  const std::uint64_t seed = j.contains("seed") ? detail::uint_field(j, "seed", 0) : 0;
  LikelihoodScaling scaling = LikelihoodScaling::kMaxNormalized;
  if (j.contains("scaling")) {
    const auto& s = j.at("scaling");
    if (!s.is_string() || (s != "max" && s != "direct"))
      throw ValidationError("\"scaling\" must be \"max\" or \"direct\"");
    if (s == "direct") scaling = LikelihoodScaling::kDirect;
  }
  return detail::named("likelihood", [&] {
    return GaltonConfig(std::move(prior), std::move(likelihood), beads, seed, scaling);
  });
}

inline DesignScenario design_scenario_from_json(const nlohmann::json& j) {
  auto labels = detail::string_array(j, "labels");
  auto space = detail::named("labels", [&] { return HypothesisSpace(std::move(labels)); });
  auto prior = detail::named("prior", [&] {
    return Distribution(space, detail::double_array(j, "prior"));
  });
  const auto& exps = detail::require_field(j, "experiments");
  if (!exps.is_array() || exps.empty())
    throw ValidationError("\"experiments\" must be a non-empty array");
  std::vector<Experiment> experiments;
  experiments.reserve(exps.size());
  for (std::size_t i = 0; i < exps.size(); ++i) {
    const std::string where = "experiments[" + std::to_string(i) + "]";
    if (!exps[i].is_object()) throw ValidationError(where + " must be an object");
    const auto& label_field = detail::require_field(exps[i], "label");
    if (!label_field.is_string()) throw ValidationError(where + ".label must be a string");
    auto model = detail::named(where, [&] {
      return ObservationModel(space, detail::string_array(exps[i], "outcomes"),
                              detail::matrix_field(exps[i], "matrix"));
    });
    experiments.push_back(Experiment{label_field.get<std::string>(), std::move(model)});
  }
  return DesignScenario{std::move(prior), std::move(experiments)};
}

inline std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline ScenarioKind detect_kind(const nlohmann::json& j) {
  if (j.contains("kind")) {
    const auto& k = j.at("kind");
    if (k == "inference") return ScenarioKind::kInference;
    if (k == "population") return ScenarioKind::kPopulation;
    if (k == "galton") return ScenarioKind::kGalton;
    if (k == "design") return ScenarioKind::kDesign;
    throw ValidationError("\"kind\" must be one of inference, population, galton, design");
  }
  if (j.contains("alleles")) return ScenarioKind::kPopulation;
  if (j.contains("experiments")) return ScenarioKind::kDesign;
  if (j.contains("outcomes")) return ScenarioKind::kInference;
  if (j.contains("beads")) return ScenarioKind::kGalton;
  throw ValidationError(
      "cannot determine scenario kind: add a \"kind\" field or one of the schema keys "
      "(outcomes, alleles, beads, experiments)");
}

inline Scenario parse_scenario(const nlohmann::json& j, std::string source) {
  if (!j.is_object()) throw ValidationError("scenario root must be a JSON object");
  const ScenarioKind kind = detect_kind(j);
  const auto payload =
      [&]() -> std::variant<InferenceScenario, Population, GaltonConfig, DesignScenario> {
    switch (kind) {
      case ScenarioKind::kPopulation: return population_from_json(j);
      case ScenarioKind::kGalton: return galton_config_from_json(j);
      case ScenarioKind::kDesign: return design_scenario_from_json(j);
      case ScenarioKind::kInference: break;
    }
    return inference_scenario_from_json(j);
  };
  return Scenario{kind, payload(), std::move(source), iso8601_utc_now()};
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_scenario(j, path);
}

// ---- emitted artifacts ----

inline nlohmann::json to_json(const GaltonRun& run) {
  return nlohmann::json{{"loaded", run.loaded},       {"retained", run.retained},
                        {"wasted", run.wasted},       {"empirical", to_json(run.empirical)},
                        {"analytic", to_json(run.analytic)}, {"tv", run.tv}};
}

inline nlohmann::json to_json(const EquivalenceReport& report) {
  nlohmann::json j{{"max_abs_difference", report.max_abs_difference},
                   {"replicator", to_json(report.replicator)},
                   {"bayes", to_json(report.bayes)}};
  j["two_allele_difference"] =
      report.two_allele_difference ? nlohmann::json(*report.two_allele_difference)
                                   : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const DesignReport& report) {
  return nlohmann::json{{"eig_bits", report.eig_bits},
                        {"knowledge_gain", report.knowledge_gain},
                        {"chosen_index", report.chosen_index},
                        {"chosen_label", report.chosen_label},
                        {"ranking", "expected_entropy_reduction_bits"}};
}

namespace detail {

inline void csv_value(std::ostream& os, double v) { os << format_double(v); }

}  // namespace detail

// step,evidence,entropy_bits,knowledge, then one probability column per
// hypothesis label in space order. Row 0 is the prior (empty evidence).
inline void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  const auto& space = trajectory.initial().space();
  os << "step,evidence,entropy_bits,knowledge";
  for (const auto& label : space.labels()) os << "," << label;
  os << "\n";
  const auto row = [&](std::size_t step, const std::string& evidence, const Distribution& d,
                       EntropyBits e, KnowledgeScore k) {
    os << step << "," << evidence << ",";
    detail::csv_value(os, e.value);
    os << ",";
    detail::csv_value(os, k.value);
    for (double p : d.probs()) {
      os << ",";
      detail::csv_value(os, p);
    }
    os << "\n";
  };
  row(0, "", trajectory.initial(), entropy(trajectory.initial()), knowledge(trajectory.initial()));
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const auto& s = trajectory.steps()[t];
    row(t + 1, s.evidence, s.posterior, s.entropy_bits, s.knowledge_score);
  }
}

// generation,mean_fitness,entropy_bits, then one frequency column per allele.
inline void write_generation_trace_csv(std::ostream& os, const GenerationTrace& trace) {
  if (trace.generations.empty()) return;
  const auto& space = trace.generations.front().freqs.space();
  os << "generation,mean_fitness,entropy_bits";
  for (const auto& label : space.labels()) os << "," << label;
  os << "\n";
  for (std::size_t g = 0; g < trace.generations.size(); ++g) {
    const auto& rec = trace.generations[g];
    os << g << ",";
    detail::csv_value(os, rec.mean_fitness);
    os << ",";
    detail::csv_value(os, rec.entropy_bits.value);
    for (double p : rec.freqs.probs()) {
      os << ",";
      detail::csv_value(os, p);
    }
    os << "\n";
  }
}

inline void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRow> rows) {
  os << "beads,mean_tv,std_tv\n";
  for (const auto& row : rows) {
    os << row.beads << ",";
    detail::csv_value(os, row.mean_tv);
    os << ",";
    detail::csv_value(os, row.std_tv);
    os << "\n";
  }
}

}  // namespace credence
