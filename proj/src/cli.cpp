#include "sgsacc/cli.hpp"

#include <map>
#include <ostream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgsacc/config.hpp"
#include "sgsacc/data.hpp"
#include "sgsacc/errors.hpp"
#include "sgsacc/pipeline.hpp"
#include "sgsacc/report.hpp"
#include "sgsacc/robustness.hpp"

namespace sgsacc {

using nlohmann::json;

namespace {

struct Flags {
  std::string config;
  std::string schemas;
  std::string instances;
  std::vector<std::string> generations;
  std::vector<std::string> variants;
  std::string nli;
  std::string nli_url;
  std::vector<std::string> unseen_domains;
  bool validation = true;
  bool augmentation = true;
  bool ser_case_sensitive = false;
  std::size_t negatives_per_slot = 3;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::size_t workers = 1;
};

void add_common(CLI::App* sub, Flags& f, bool with_generations, bool with_variants) {
  sub->add_option("--config", f.config, "JSON config file; flags override its keys");
  sub->add_option("--schemas", f.schemas, "Service schema file");
  sub->add_option("--instances", f.instances, "Instance file");
  if (with_generations) {
    sub->add_option("--generations", f.generations, "Generations file (repeatable)");
  }
  if (with_variants) {
    sub->add_option("--variants", f.variants, "Schema variant file (repeatable)");
  }
  sub->add_option("--nli", f.nli, "NLI backend")->check(CLI::IsMember({"mock", "remote"}));
  sub->add_option("--nli-url", f.nli_url, "Inference service base URL");
  sub->add_option("--unseen-domains", f.unseen_domains, "Domains absent from training")
      ->delimiter(',');
  sub->add_flag("--validation,!--no-validation", f.validation, "Run the validation step");
  sub->add_flag("--augmentation,!--no-augmentation", f.augmentation,
                "Retry with previous turn and slot description");
  sub->add_flag("--ser-case-sensitive", f.ser_case_sensitive, "Exact-case slot value matching");
  sub->add_option("--negatives-per-slot", f.negatives_per_slot,
                  "Substitute values per non-categorical slot");
  sub->add_option("--seed", f.seed, "Seed for negative sampling");
  sub->add_option("--output-dir", f.output_dir, "Directory for report files");
  sub->add_option("--workers", f.workers, "Parallel instance workers")->check(CLI::PositiveNumber);
}

RunConfig resolve_config(const CLI::App& sub, const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  const auto given = [&](const char* name) {
    try {
      return sub.count(name) > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  if (given("--schemas")) c.schemas = f.schemas;
  if (given("--instances")) c.instances = f.instances;
  if (given("--generations")) c.generations.assign(f.generations.begin(), f.generations.end());
  if (given("--variants")) c.variants.assign(f.variants.begin(), f.variants.end());
  if (given("--nli")) c.nli = f.nli;
  if (given("--nli-url")) c.nli_url = f.nli_url;
  if (given("--unseen-domains")) c.unseen_domains = f.unseen_domains;
  if (given("--validation")) c.validation = f.validation;
  if (given("--augmentation")) c.augmentation = f.augmentation;
  if (given("--ser-case-sensitive")) c.ser_case_sensitive = f.ser_case_sensitive;
  if (given("--negatives-per-slot")) c.negatives_per_slot = f.negatives_per_slot;
  if (given("--seed")) c.seed = f.seed;
  if (given("--output-dir")) c.output_dir = f.output_dir;
  if (given("--workers")) c.workers = f.workers;
  return c;
}

struct Dataset {
  SchemaCatalog catalog;
  std::vector<EvalInstance> instances;
};

Dataset load_dataset(const RunConfig& c) {
  if (c.schemas.empty()) throw InputError("no schema file given (--schemas)");
  if (c.instances.empty()) throw InputError("no instance file given (--instances)");
  Dataset d;
  d.catalog = parse_schemas(c.schemas);
  d.instances = parse_instances(c.instances, d.catalog, c.unseen_domains);
  return d;
}

GenerationSet load_generations(const RunConfig& c, std::span<const EvalInstance> instances,
                               std::ostream& err) {
  if (c.generations.empty()) throw InputError("no generations file given (--generations)");
  std::vector<GenerationCandidate> all;
  for (const auto& path : c.generations) {
    auto part = parse_generations(path, path.stem().string());
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  auto set = resolve_generations(std::move(all), instances);
  for (const auto& id : set.dangling_ids) {
    err << "sgsacc: warning: generation for unknown instance '" << id << "' skipped\n";
  }
  return set;
}

ReportHeader make_header(const std::string& command, const RunConfig& c,
                         const NliBackend* nli) {
  return {command, config_hash(c), c.seed, nli == nullptr ? std::string("none") : nli->identity()};
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_atomic(path, doc.dump(2) + "\n");
}

json options_json(const RunConfig& c) {
  return {{"validation", c.validation},
          {"augmentation", c.augmentation},
          {"negatives_per_slot", c.negatives_per_slot},
          {"ser_case_sensitive", c.ser_case_sensitive},
          {"unseen_domains", c.unseen_domains}};
}

int cmd_evaluate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  auto data = load_dataset(c);
  const auto generations = load_generations(c, data.instances, err);
  auto nli = make_backend(c);
  Pipeline pipeline(std::move(data.catalog), std::move(data.instances), nli,
                    c.pipeline_options());
  const auto header = make_header("evaluate", c, nli.get());

  std::vector<MetricReport> reports;
  json systems = json::array();
  for (const auto& system_id : generations.system_ids()) {
    const auto gens = generations.for_system(system_id);
    const auto eval = pipeline.evaluate_system(system_id, gens);
    write_json(c.output_dir / ("details_" + file_stem_for(system_id) + ".json"),
               details_json(header, eval));
    systems.push_back(metric_report_json(eval.report, eval.missing_ids.size()));
    reports.push_back(eval.report);
  }

  json summary = header_json(header);
  summary["options"] = options_json(c);
  summary["instances"] = pipeline.instances().size();
  summary["systems"] = std::move(systems);
  summary["dangling_generation_ids"] = generations.dangling_ids;
  summary["warnings"] = pipeline.warnings();
  write_json(c.output_dir / "summary.json", summary);

  print_metric_table(out, reports);
  return kExitOk;
}

int cmd_validate(RunConfig c, std::ostream& out) {
  c.validation = true;
  auto data = load_dataset(c);
  auto nli = make_backend(c);
  Pipeline pipeline(std::move(data.catalog), std::move(data.instances), nli,
                    c.pipeline_options());
  const auto outcomes = pipeline.validation_outcomes();
  auto doc = validation_json(make_header("validate", c, nli.get()), outcomes);
  doc["options"] = options_json(c);
  doc["warnings"] = pipeline.warnings();
  write_json(c.output_dir / "validation.json", doc);

  const std::size_t excluded = doc["excluded"].get<std::size_t>();
  out << "validated " << (outcomes.size() - excluded) << " of " << outcomes.size()
      << " instances; exclusion rate "
      << format_percent(outcomes.empty() ? std::nullopt
                                         : std::optional<double>(doc["exclusion_rate"].get<double>()),
                        1)
      << "%\n";
  return kExitOk;
}

int cmd_rerank(const RunConfig& c, std::ostream& out, std::ostream& err) {
  auto data = load_dataset(c);
  const auto generations = load_generations(c, data.instances, err);
  auto nli = make_backend(c);
  Pipeline pipeline(std::move(data.catalog), std::move(data.instances), nli,
                    c.pipeline_options());
  const auto entries = pipeline.rerank(generations.candidates);

  std::string merged;
  json per_instance = json::array();
  std::map<std::string, std::size_t> wins;
  for (const auto& e : entries) {
    const auto& winner = e.outcome.selected;
    json record = {{"instance_id", winner.instance_id},
                   {"system_id", "ensemble"},
                   {"text", winner.text},
                   {"source_system", winner.system_id}};
    if (winner.log_likelihood) record["log_likelihood"] = *winner.log_likelihood;
    merged += record.dump() + "\n";
    ++wins[winner.system_id];

    json scores = json::array();
    for (const auto& s : e.outcome.scores) {
      scores.push_back({{"system_id", s.system_id},
                        {"score", s.score},
                        {"log_likelihood", s.log_likelihood ? json(*s.log_likelihood)
                                                            : json(nullptr)}});
    }
    per_instance.push_back(
        {{"instance_id", e.instance_id}, {"winner", winner.system_id}, {"scores", scores}});
  }
  write_atomic(c.output_dir / "ensemble_generations.jsonl", merged);

  json doc = header_json(make_header("rerank", c, nli.get()));
  doc["options"] = options_json(c);
  doc["wins"] = wins;
  doc["instances"] = std::move(per_instance);
  write_json(c.output_dir / "rerank.json", doc);

  out << "reranked " << entries.size() << " instances;";
  for (const auto& [system, n] : wins) out << " " << system << "=" << n;
  out << "\n";
  return kExitOk;
}

int cmd_robustness(const RunConfig& c, std::ostream& out) {
  if (c.variants.empty()) throw InputError("no schema variant given (--variants)");
  auto data = load_dataset(c);
  auto nli = make_backend(c);
  const auto pool = ValuePool::from_instances(data.instances);
  const auto opts = c.pipeline_options();

  std::vector<RobustnessReport> reports;
  json rows = json::array();
  for (const auto& path : c.variants) {
    const auto variant = parse_schemas(path);
    reports.push_back(run_robustness(path.stem().string(), data.instances, variant, pool, *nli,
                                     opts.eval, opts.negatives));
    rows.push_back(robustness_json(reports.back()));
  }
  json doc = header_json(make_header("robustness", c, nli.get()));
  doc["options"] = options_json(c);
  doc["variants"] = std::move(rows);
  write_json(c.output_dir / "robustness.json", doc);
  print_robustness_table(out, reports);
  return kExitOk;
}

int cmd_build_refs(const RunConfig& c, std::ostream& out) {
  auto data = load_dataset(c);
  const auto pool = ValuePool::from_instances(data.instances);
  const auto opts = c.pipeline_options();
  std::vector<InstanceReferences> refs;
  std::vector<std::string> warnings;
  refs.reserve(data.instances.size());
  for (const auto& inst : data.instances) {
    refs.push_back(build_instance_references(inst, data.catalog, pool, opts.negatives));
    warnings.insert(warnings.end(), refs.back().warnings.begin(), refs.back().warnings.end());
  }
  json doc = header_json(make_header("build-refs", c, nullptr));
  doc["options"] = options_json(c);
  doc["instances"] = references_json(data.instances, refs);
  doc["warnings"] = warnings;
  write_json(c.output_dir / "references.json", doc);

  std::size_t candidates = 0;
  std::size_t negatives = 0;
  for (const auto& r : refs) {
    for (const auto& a : r.actions) {
      candidates += a.candidates.size();
      negatives += a.negatives.size();
    }
  }
  out << "built " << candidates << " candidate and " << negatives
      << " negative references for " << refs.size() << " instances\n";
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schema-guided semantic accuracy for task-oriented dialogue generation", "sgsacc"};
  app.require_subcommand(1);

  Flags flags;
  auto* evaluate = app.add_subcommand("evaluate", "Score generations: SGSAcc and SER");
  auto* validate = app.add_subcommand("validate", "Run only the validation step");
  auto* rerank = app.add_subcommand("rerank", "Select the most faithful generation per instance");
  auto* robustness = app.add_subcommand("robustness", "Precision/recall/F1 per schema variant");
  auto* build_refs = app.add_subcommand("build-refs", "Dump candidate and negative references");
  add_common(evaluate, flags, true, false);
  add_common(validate, flags, false, false);
  add_common(rerank, flags, true, false);
  add_common(robustness, flags, false, true);
  add_common(build_refs, flags, false, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (evaluate->parsed()) return cmd_evaluate(resolve_config(*evaluate, flags), out, err);
    if (validate->parsed()) return cmd_validate(resolve_config(*validate, flags), out);
    if (rerank->parsed()) return cmd_rerank(resolve_config(*rerank, flags), out, err);
    if (robustness->parsed()) return cmd_robustness(resolve_config(*robustness, flags), out);
    if (build_refs->parsed()) return cmd_build_refs(resolve_config(*build_refs, flags), out);
  } catch (const TransportError& e) {
    err << "sgsacc: backend failure: " << e.what() << "\n";
    return kExitBackend;
  } catch (const ProtocolError& e) {
    err << "sgsacc: backend failure: " << e.what() << "\n";
    return kExitBackend;
  } catch (const Error& e) {
    err << "sgsacc: error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "sgsacc: error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "sgsacc: internal error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace sgsacc
