#include <algorithm>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "sgsacc/cli.hpp"
#include "sgsacc/config.hpp"
#include "sgsacc/errors.hpp"
#include "sgsacc/evaluator.hpp"
#include "sgsacc/pipeline.hpp"
#include "sgsacc/references.hpp"
#include "sgsacc/report.hpp"

namespace py = pybind11;
using namespace sgsacc;

namespace {

py::object to_python(const nlohmann::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

SlotSchema make_slot(const std::string& name, const std::string& description, bool categorical,
                     const std::vector<std::string>& possible_values) {
  SlotSchema s;
  s.name = name;
  s.description = description;
  s.is_categorical = categorical;
  s.possible_values = possible_values;
  auto sorted = possible_values;
  std::sort(sorted.begin(), sorted.end());
  s.is_boolean = categorical && sorted == std::vector<std::string>{"False", "True"};
  return s;
}

RunConfig make_config(std::filesystem::path schemas, std::filesystem::path instances,
                      std::vector<std::filesystem::path> generations,
                      std::vector<std::string> unseen, const std::string& nli,
                      const std::string& nli_url, bool validation, bool augmentation,
                      bool ser_case_sensitive, std::size_t negatives_per_slot,
                      std::uint64_t seed, std::size_t workers) {
  RunConfig c;
  c.schemas = std::move(schemas);
  c.instances = std::move(instances);
  c.generations = std::move(generations);
  c.unseen_domains = std::move(unseen);
  c.nli = nli;
  c.nli_url = nli_url;
  c.validation = validation;
  c.augmentation = augmentation;
  c.ser_case_sensitive = ser_case_sensitive;
  c.negatives_per_slot = negatives_per_slot;
  c.seed = seed;
  c.workers = workers == 0 ? 1 : workers;
  return c;
}

Pipeline make_pipeline(const RunConfig& c) {
  auto catalog = parse_schemas(c.schemas);
  auto instances = parse_instances(c.instances, catalog, c.unseen_domains);
  return Pipeline(std::move(catalog), std::move(instances), make_backend(c), c.pipeline_options());
}

GenerationSet load_generations(const RunConfig& c, std::span<const EvalInstance> instances) {
  std::vector<GenerationCandidate> all;
  for (const auto& path : c.generations) {
    auto part = parse_generations(path, path.stem().string());
    all.insert(all.end(), part.begin(), part.end());
  }
  return resolve_generations(std::move(all), instances);
}

#define SGSACC_RUN_OPTIONS                                                                    \
  py::kw_only(), py::arg("unseen_domains") = std::vector<std::string>{},                      \
      py::arg("nli") = "mock", py::arg("nli_url") = "", py::arg("validation") = true,         \
      py::arg("augmentation") = true, py::arg("ser_case_sensitive") = false,                  \
      py::arg("negatives_per_slot") = 3, py::arg("seed") = 0, py::arg("workers") = 1

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entailment-based semantic accuracy for schema-guided dialogue generation";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ConflictError>(m, "ConflictError", base.ptr());
  py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
  py::register_exception<ValueDomainError>(m, "ValueDomainError", base.ptr());
  py::register_exception<TransportError>(m, "TransportError", base.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());

  m.def("normalize_slot_name", [](const std::string& s) { return normalize_slot_name(s); },
        py::arg("slot"));

  m.def(
      "build_candidates",
      [](const std::string& intent, std::optional<std::string> slot,
         std::vector<std::string> values, const std::string& description, bool is_categorical,
         const std::vector<std::string>& possible_values) {
        DialogueAction a{intent, slot, std::move(values)};
        std::optional<SlotSchema> schema;
        if (slot) schema = make_slot(*slot, description, is_categorical, possible_values);
        std::vector<std::pair<std::string, std::string>> out;
        for (auto& c : build_candidates(a, schema ? &*schema : nullptr)) {
          out.emplace_back(std::move(c.text), std::move(c.rule_id));
        }
        return out;
      },
      "Candidate references as (text, rule_id) pairs.", py::arg("intent"),
      py::arg("slot") = py::none(), py::arg("values") = std::vector<std::string>{},
      py::arg("description") = "", py::arg("is_categorical") = false,
      py::arg("possible_values") = std::vector<std::string>{});

  m.def(
      "build_negatives",
      [](const std::string& intent, const std::string& slot, std::vector<std::string> values,
         const std::string& description, bool is_categorical,
         const std::vector<std::string>& possible_values, const std::vector<std::string>& pool,
         std::size_t per_slot, std::uint64_t seed) {
        const auto schema = make_slot(slot, description, is_categorical, possible_values);
        const auto set = build_negatives({intent, slot, std::move(values)}, schema, pool,
                                         {per_slot, seed});
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& r : set.refs) out.emplace_back(r.text, r.tampered_value);
        return out;
      },
      "Negative references as (text, substituted value) pairs.", py::arg("intent"),
      py::arg("slot"), py::arg("values"), py::arg("description") = "",
      py::arg("is_categorical") = false, py::arg("possible_values") = std::vector<std::string>{},
      py::arg("value_pool") = std::vector<std::string>{}, py::arg("per_slot") = 3,
      py::arg("seed") = 0);

  m.def(
      "augment_premise",
      [](const std::string& utterance, std::optional<std::string> previous_turn,
         std::optional<std::string> slot_description) {
        std::optional<std::string_view> p, d;
        if (previous_turn) p = *previous_turn;
        if (slot_description) d = *slot_description;
        return augment_premise(utterance, p, d);
      },
      py::arg("utterance"), py::arg("previous_turn") = py::none(),
      py::arg("slot_description") = py::none());

  m.def(
      "mock_classify",
      [](const std::string& premise, const std::string& hypothesis) {
        const auto v = MockNli().classify({premise, hypothesis});
        py::dict d;
        d["entailment"] = v.entailment();
        d["neutral"] = v.neutral();
        d["contradiction"] = v.contradiction();
        d["label"] = std::string(to_string(v.label()));
        return d;
      },
      "Offline token-overlap NLI verdict.", py::arg("premise"), py::arg("hypothesis"));

  m.def(
      "evaluate",
      [](std::filesystem::path schemas, std::filesystem::path instances,
         std::vector<std::filesystem::path> generations, std::vector<std::string> unseen,
         const std::string& nli, const std::string& nli_url, bool validation, bool augmentation,
         bool ser_case_sensitive, std::size_t negatives_per_slot, std::uint64_t seed,
         std::size_t workers) {
        nlohmann::json doc;
        {
          py::gil_scoped_release release;
          const auto c = make_config(std::move(schemas), std::move(instances),
                                     std::move(generations), std::move(unseen), nli, nli_url,
                                     validation, augmentation, ser_case_sensitive,
                                     negatives_per_slot, seed, workers);
          auto pipeline = make_pipeline(c);
          const auto gens = load_generations(c, pipeline.instances());
          doc["config_hash"] = config_hash(c);
          doc["instances"] = pipeline.instances().size();
          doc["systems"] = nlohmann::json::array();
          for (const auto& system : gens.system_ids()) {
            const auto eval = pipeline.evaluate_system(system, gens.for_system(system));
            doc["systems"].push_back(metric_report_json(eval.report, eval.missing_ids.size()));
          }
          doc["dangling_generation_ids"] = gens.dangling_ids;
        }
        return to_python(doc);
      },
      "SGSAcc and SER per system, as a dict.", py::arg("schemas"), py::arg("instances"),
      py::arg("generations"), SGSACC_RUN_OPTIONS);

  m.def(
      "validate",
      [](std::filesystem::path schemas, std::filesystem::path instances,
         std::vector<std::string> unseen, const std::string& nli, const std::string& nli_url,
         bool validation, bool augmentation, bool ser_case_sensitive,
         std::size_t negatives_per_slot, std::uint64_t seed, std::size_t workers) {
        nlohmann::json doc;
        {
          py::gil_scoped_release release;
          auto c = make_config(std::move(schemas), std::move(instances), {}, std::move(unseen),
                               nli, nli_url, validation, augmentation, ser_case_sensitive,
                               negatives_per_slot, seed, workers);
          c.validation = true;
          auto pipeline = make_pipeline(c);
          const auto outcomes = pipeline.validation_outcomes();
          doc = validation_json({"validate", config_hash(c), c.seed, pipeline.nli().identity()},
                                outcomes);
        }
        return to_python(doc);
      },
      "Validation outcomes and exclusion rate, as a dict.", py::arg("schemas"),
      py::arg("instances"), SGSACC_RUN_OPTIONS);

  m.def(
      "rerank",
      [](std::filesystem::path schemas, std::filesystem::path instances,
         std::vector<std::filesystem::path> generations, std::vector<std::string> unseen,
         const std::string& nli, const std::string& nli_url, bool validation, bool augmentation,
         bool ser_case_sensitive, std::size_t negatives_per_slot, std::uint64_t seed,
         std::size_t workers) {
        nlohmann::json out = nlohmann::json::array();
        {
          py::gil_scoped_release release;
          const auto c = make_config(std::move(schemas), std::move(instances),
                                     std::move(generations), std::move(unseen), nli, nli_url,
                                     validation, augmentation, ser_case_sensitive,
                                     negatives_per_slot, seed, workers);
          auto pipeline = make_pipeline(c);
          const auto gens = load_generations(c, pipeline.instances());
          for (const auto& e : pipeline.rerank(gens.candidates)) {
            const auto& w = e.outcome.selected;
            out.push_back({{"instance_id", w.instance_id},
                           {"source_system", w.system_id},
                           {"text", w.text},
                           {"score", e.outcome.scores[e.outcome.winner_index].score}});
          }
        }
        return to_python(out);
      },
      "Most faithful generation per instance.", py::arg("schemas"), py::arg("instances"),
      py::arg("generations"), SGSACC_RUN_OPTIONS);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      "Runs the command line tool in-process; returns (exit code, stdout, stderr).",
      py::arg("args"));
}
