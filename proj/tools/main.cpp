// credence — command-line front end.
//
// JSON scenarios in, JSON or CSV out. Data payloads carry no timestamps;
// provenance (source path, load time, effective seed) lives in a single
// header line that --no-header suppresses, so reruns with the same seed are
// byte-identical below it.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <credence/credence.hpp>

namespace {

void print_header(const std::string& command, const std::string& source,
                  const std::string& loaded_at, std::optional<std::uint64_t> seed) {
  std::cout << "# credence " << command << " source=" << source << " loaded=" << loaded_at;
  if (seed) std::cout << " seed=" << *seed;
  std::cout << "\n";
}

std::ofstream open_trace(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw credence::ValidationError("cannot open trace file for writing: " + path);
  return out;
}

void emit_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

int run_update(const credence::Scenario& scenario, const std::string& trace_path,
               bool no_header) {
  const auto& sc = scenario.inference();
  const credence::Trajectory trajectory =
      credence::sequential_update(sc.prior, sc.model, sc.data);
  const credence::Distribution& final = trajectory.final_distribution();
  if (!no_header) print_header("update", scenario.source, scenario.loaded_at, std::nullopt);
  emit_json({{"posterior", credence::to_json(final)},
             {"entropy_bits", credence::entropy(final).value},
             {"knowledge", credence::knowledge(final).value},
             {"steps", trajectory.size()}});
  if (!trace_path.empty()) {
    auto out = open_trace(trace_path);
    credence::write_trajectory_csv(out, trajectory);
  }
  return 0;
}

int run_evolve(const credence::Scenario& scenario, std::size_t generations, bool stochastic,
               std::uint64_t seed, const std::string& trace_path, bool no_header) {
  const credence::GenerationTrace trace =
      credence::evolve(scenario.population(), generations, stochastic, seed);
  if (!no_header)
    print_header("evolve", scenario.source, scenario.loaded_at,
                 stochastic ? std::optional<std::uint64_t>(seed) : std::nullopt);
  credence::write_generation_trace_csv(std::cout, trace);
  if (!trace_path.empty()) {
    auto out = open_trace(trace_path);
    credence::write_generation_trace_csv(out, trace);
  }
  return 0;
}

int run_galton(const credence::Scenario& scenario, std::optional<std::uint64_t> beads,
               std::optional<std::uint64_t> seed, unsigned threads, bool study,
               std::uint64_t study_seeds, bool no_header) {
  credence::GaltonConfig config = scenario.galton();
  if (beads) config = config.with_beads(*beads);
  if (seed) config = config.with_seed(*seed);  // command line wins over the file
  if (!no_header) print_header("galton", scenario.source, scenario.loaded_at, config.seed());
  if (study) {
    const std::vector<std::uint64_t> counts{100, 1000, 10000, 100000, 1000000};
    const auto rows = credence::convergence_study(config, counts, study_seeds, threads);
    credence::write_convergence_csv(std::cout, rows);
    return 0;
  }
  emit_json(credence::to_json(credence::run(config, threads)));
  return 0;
}

int run_equiv(const credence::Scenario& scenario, bool no_header) {
  const credence::EquivalenceReport report =
      credence::equivalence_check(scenario.population());
  if (!no_header) print_header("equiv", scenario.source, scenario.loaded_at, std::nullopt);
  emit_json(credence::to_json(report));
  const bool diverged =
      report.max_abs_difference > 1e-9 ||
      (report.two_allele_difference && *report.two_allele_difference > 1e-9);
  if (diverged) {
    std::cerr << "error: computation: replicator and Bayes updates diverged beyond 1e-9\n";
    return 2;
  }
  return 0;
}

int run_design(const credence::Scenario& scenario, bool no_header) {
  const auto& sc = scenario.design();
  const credence::DesignReport report = credence::select_best(sc.prior, sc.experiments);
  if (!no_header) print_header("design", scenario.source, scenario.loaded_at, std::nullopt);
  emit_json(credence::to_json(report));
  return 0;
}

// info accepts either a full scenario or a bare {"labels", "probs"} object;
// scenarios are measured through their prior (freqs, for populations).
int run_info(const std::string& path, bool no_header) {
  std::ifstream in(path);
  if (!in) throw credence::ValidationError("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw credence::ParseError(path + ": " + e.what());
  }
  if (!j.is_object()) throw credence::ValidationError("scenario root must be a JSON object");
  const auto distribution = [&]() -> credence::Distribution {
    if (j.contains("probs")) return credence::distribution_from_json(j);
    const credence::Scenario scenario = credence::parse_scenario(j, path);
    switch (scenario.kind) {
      case credence::ScenarioKind::kInference: return scenario.inference().prior;
      case credence::ScenarioKind::kPopulation: return scenario.population().freqs();
      case credence::ScenarioKind::kGalton: return scenario.galton().prior();
      case credence::ScenarioKind::kDesign: break;
    }
    return scenario.design().prior;
  }();
  if (!no_header) print_header("info", path, credence::iso8601_utc_now(), std::nullopt);
  emit_json({{"entropy_bits", credence::entropy(distribution).value},
             {"knowledge", credence::knowledge(distribution).value}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inferential-system toolkit: Bayesian updating, replicator dynamics, and the"
               " Galton three-compartment device"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string trace_path;
  std::uint64_t seed = 0;
  std::uint64_t generations = 0;
  std::uint64_t beads = 0;
  std::uint64_t study_seeds = 30;
  unsigned threads = 1;
  bool stochastic = false;
  bool study = false;
  bool no_header = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path, "Path to a JSON scenario file")
        ->required();
    sub->add_flag("--no-header", no_header, "Suppress the provenance header line");
  };

  CLI::App* update = app.add_subcommand(
      "update", "Run the Bayesian update over a scenario's observation sequence");
  add_common(update);
  update->add_option("--trace", trace_path, "Write the per-step trajectory CSV to this path");

  CLI::App* evolve = app.add_subcommand(
      "evolve", "Iterate the replicator update over a population, printing a CSV trace");
  add_common(evolve);
  evolve->add_option("--generations", generations, "Number of generations to run")->required();
  evolve->add_flag("--stochastic", stochastic,
                   "Wright-Fisher resampling after each deterministic update (needs \"size\")");
  evolve->add_option("--seed", seed, "Seed for stochastic runs");
  evolve->add_option("--trace", trace_path, "Also write the CSV trace to this path");

  CLI::App* galton = app.add_subcommand(
      "galton", "Simulate the three-compartment device; JSON counts or --study CSV");
  add_common(galton);
  CLI::Option* galton_beads =
      galton->add_option("--beads", beads, "Override the scenario's bead count");
  CLI::Option* galton_seed =
      galton->add_option("--seed", seed, "Override the scenario's seed");
  galton->add_option("--threads", threads, "Worker threads (any count gives identical output)");
  galton->add_flag("--study", study, "Run the bead-count convergence study, print CSV only");
  galton->add_option("--study-seeds", study_seeds, "Seeds per bead count in the study");

  CLI::App* equiv = app.add_subcommand(
      "equiv", "Check replicator step against the Bayes posterior on one population");
  add_common(equiv);

  CLI::App* design = app.add_subcommand(
      "design", "Pick the experiment with the greatest expected information gain");
  add_common(design);

  CLI::App* info =
      app.add_subcommand("info", "Print entropy (bits) and knowledge of a distribution");
  add_common(info);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*info) return run_info(scenario_path, no_header);
    const credence::Scenario scenario = credence::load_scenario(scenario_path);
    if (*update) return run_update(scenario, trace_path, no_header);
    if (*evolve) return run_evolve(scenario, generations, stochastic, seed, trace_path, no_header);
    if (*galton)
      return run_galton(scenario,
                        galton_beads->count() ? std::optional<std::uint64_t>(beads) : std::nullopt,
                        galton_seed->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
                        threads, study, study_seeds, no_header);
    if (*equiv) return run_equiv(scenario, no_header);
    if (*design) return run_design(scenario, no_header);
  } catch (const credence::ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return 1;
  } catch (const credence::ComputationError& e) {
    std::cerr << "error: computation: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
