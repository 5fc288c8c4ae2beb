#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracle.hpp"
#include "sgsacc/errors.hpp"
#include "sgsacc/evaluator.hpp"
#include "sgsacc/metrics.hpp"
#include "sgsacc/pipeline.hpp"

using namespace sgsacc;

namespace {

class SpyNli final : public NliBackend {
 public:
  std::vector<NliVerdict> classify_batch(std::span<const NliPair> pairs) override {
    for (const auto& p : pairs) premises.push_back(p.premise);
    return MockNli().classify_batch(pairs);
  }
  std::string identity() const override { return "spy"; }
  std::vector<std::string> premises;
};

const char* kSchema = R"([
  {"service_name": "Services_1", "slots": [
    {"name": "name", "description": "the name of the hair stylist", "is_categorical": false}]},
  {"service_name": "Restaurants_1", "slots": [
    {"name": "kids_friendly", "description": "whether the place is kids friendly", "is_categorical": true,
     "possible_values": ["True", "False"]},
    {"name": "city", "description": "city of the restaurant", "is_categorical": false}]}
])";

// Five turns whose outcomes are worked out by hand below.
const char* kInstances = R"([
  {"instance_id": "i1", "service": "Services_1",
   "actions": [{"intent": "INFORM", "slot": "name", "values": ["Queens"]}],
   "ground_truth": "What about Queens?", "previous_turn": "I want to book a hair cut."},
  {"instance_id": "i2", "service": "Restaurants_1",
   "actions": [{"intent": "INFORM", "slot": "kids_friendly", "values": ["True"]}],
   "ground_truth": "Kids friendly? Yes, the place is kids friendly."},
  {"instance_id": "i3", "service": "Restaurants_1",
   "actions": [{"intent": "INFORM", "slot": "city", "values": ["Oakland"]}, {"intent": "GOODBYE"}],
   "ground_truth": "It is in Oakland. Bye bye.", "previous_turn": "Where is it?"},
  {"instance_id": "i4", "service": "Restaurants_1",
   "actions": [{"intent": "INFORM", "slot": "city", "values": ["Fresno"]}],
   "ground_truth": "The city is Fresno, not Oakland."},
  {"instance_id": "i5", "service": "Services_1",
   "actions": [{"intent": "REQUEST", "slot": "name"}],
   "ground_truth": "Which stylist would you like?"}
])";

const std::vector<GenerationCandidate> kGenerations = {
    {"i1", "s", "How about Queens?", std::nullopt},
    {"i2", "s", "Sorry, I do not know.", std::nullopt},
    {"i3", "s", "Oakland it is. Have a good day.", std::nullopt},
    {"i4", "s", "The city is fresno.", std::nullopt},
    {"i5", "s", "Request the name of the hair stylist.", std::nullopt},
};

Pipeline five_instance_pipeline(EvalOptions eval) {
  auto catalog = parse_schemas_text(kSchema);
  std::vector<std::string> unseen = {"Services"};
  auto inst = parse_instances_text(kInstances, catalog, unseen);
  PipelineOptions opts;
  opts.eval = eval;
  return Pipeline(std::move(catalog), std::move(inst), std::make_shared<MockNli>(), opts);
}

}  // namespace

TEST_CASE("augment_premise") {
  CHECK(augment_premise("What about Queens?", "I want to book a hair cut.", "the name of the hair stylist") ==
        "I want to book a hair cut. the name of the hair stylist. What about Queens?");
  CHECK(augment_premise("u", std::nullopt, std::nullopt) == "u");
  CHECK(augment_premise("u", "p", std::nullopt) == "p u");
  CHECK(augment_premise("u", std::nullopt, "desc.") == "desc. u");
  CHECK(augment_premise("u", "", "") == "u");
}

TEST_CASE("coreference is resolved by augmentation") {
  MockNli nli;
  const std::vector<CandidateReference> cands = {{"The name of the hair stylist is Queens.", "desc-single"},
                                                 {"Name is Queens.", "name-single"}};
  PremiseContext ctx{std::string("I want to book a hair cut."), std::string("the name of the hair stylist")};
  const auto sel = select_entailment_reference(cands, "What about Queens?", ctx, nli);
  CHECK(sel.entailed());
  CHECK(sel.used_augmented_premise);
  CHECK(sel.index == 0);

  const auto bare = select_entailment_reference(cands, "What about Queens?", PremiseContext{}, nli);
  CHECK_FALSE(bare.entailed());
  CHECK_FALSE(bare.used_augmented_premise);
}

TEST_CASE("selection picks the entailed candidate, earliest on ties") {
  MockNli nli;
  const std::vector<CandidateReference> cands = {{"Kids friendly? Yes.", "a"}, {"Unrelated text.", "b"}};
  const auto sel = select_entailment_reference(cands, "kids friendly yes", {}, nli);
  CHECK(sel.index == 0);
  CHECK(sel.score() == 1.0);

  const std::vector<CandidateReference> two = {{"Alpha.", "a"}, {"Alpha beta.", "b"}};
  CHECK(select_entailment_reference(two, "alpha beta", {}, nli).index == 0);
  const std::vector<CandidateReference> later = {{"Gamma.", "a"}, {"Alpha beta.", "b"}};
  CHECK(select_entailment_reference(later, "alpha beta", {}, nli).index == 1);

  const std::vector<CandidateReference> one = {{"Gamma.", "a"}};
  const auto single = select_entailment_reference(one, "alpha", {}, nli);
  CHECK(single.index == 0);
  CHECK_FALSE(single.entailed());
  CHECK_THROWS_AS(select_entailment_reference({}, "alpha", {}, nli), std::invalid_argument);
}

TEST_CASE("augmentation is only tried after a bare failure") {
  SpyNli spy;
  const std::vector<CandidateReference> cands = {{"Alpha.", "a"}};
  PremiseContext ctx{std::string("prev"), std::string("desc")};
  const auto sel = select_entailment_reference(cands, "alpha", ctx, spy);
  CHECK_FALSE(sel.used_augmented_premise);
  CHECK(spy.premises == std::vector<std::string>{"alpha"});
}

TEST_CASE("validation catches the unrealized and the wrong") {
  const std::string dir = SGSACC_FIXTURE_DIR;
  auto catalog = parse_schemas(dir + "/schemas.json");
  std::vector<std::string> unseen = {"Alarm"};
  auto inst = parse_instances(dir + "/instances.json", catalog, unseen);
  Pipeline p(std::move(catalog), std::move(inst), std::make_shared<MockNli>());
  std::map<std::string, ValidationOutcome> by_id;
  for (const auto& o : p.validation_outcomes()) by_id[o.instance_id] = o;

  // Nonstop flag and luggage are never said in these ground truths.
  CHECK_FALSE(by_id.at("d3_t1").passed);
  CHECK(by_id.at("d3_t1").failed_positive);
  CHECK_FALSE(by_id.at("d4_t1").passed);
  CHECK(by_id.at("d4_t1").failed_positive);
  CHECK(by_id.at("d1_t1").passed);
}

TEST_CASE("validation passes a clean turn and fails on an entailed negative") {
  MockNli nli;
  SchemaCatalog catalog = parse_schemas_text(kSchema);
  EvalInstance inst;
  inst.instance_id = "x";
  inst.service = "Restaurants_1";
  inst.actions = {{"INFORM", "city", {"Fresno"}}};
  inst.ground_truth = "The city is Fresno.";
  ValuePool pool;
  pool.add("Restaurants_1", "city", "Fresno");
  pool.add("Restaurants_1", "city", "Oakland");
  auto refs = build_instance_references(inst, catalog, pool);
  CHECK(validate_instance(inst, refs, nli).passed);

  inst.ground_truth = "The city is Fresno or Oakland.";
  refs = build_instance_references(inst, catalog, pool);
  const auto bad = validate_instance(inst, refs, nli);
  CHECK_FALSE(bad.passed);
  CHECK(bad.failed_negative);
  CHECK_FALSE(bad.failed_positive);
}

TEST_CASE("instance faithfulness needs every action") {
  MockNli nli;
  SchemaCatalog catalog = parse_schemas_text(kSchema);
  EvalInstance inst;
  inst.instance_id = "x";
  inst.service = "Restaurants_1";
  inst.actions = {{"INFORM", "city", {"Fresno"}}, {"GOODBYE", std::nullopt, {}}};
  inst.ground_truth = "City is Fresno. Bye bye.";
  const auto refs = build_instance_references(inst, catalog, ValuePool{});

  auto r = evaluate_instance({"x", "s", "City is Fresno. Bye bye.", std::nullopt}, inst, refs, nli);
  CHECK(r.instance_faithful);
  CHECK(r.assessments.size() == 2);
  CHECK_FALSE(r.assessments[0].used_augmented_premise);

  r = evaluate_instance({"x", "s", "City is Fresno.", std::nullopt}, inst, refs, nli);
  CHECK_FALSE(r.instance_faithful);
  CHECK(r.assessments[0].faithful);
  CHECK_FALSE(r.assessments[1].faithful);

  r = evaluate_instance({"x", "s", "   ", std::nullopt}, inst, refs, nli);
  CHECK_FALSE(r.instance_faithful);

  auto other = refs;
  other.actions.pop_back();
  CHECK_THROWS_AS(evaluate_instance({"x", "s", "y", std::nullopt}, inst, other, nli), std::logic_error);
}

TEST_CASE("five-turn fixture matches the hand-computed truth table") {
  auto p = five_instance_pipeline({});
  const auto eval = p.evaluate_system("s", kGenerations);
  struct Row { const char* id; bool validated; bool faithful; bool unseen; };
  const Row table[] = {{"i1", true, true, true}, {"i2", true, true, false}, {"i3", true, false, false},
                       {"i4", false, true, false}, {"i5", false, true, true}};
  REQUIRE(eval.results.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CAPTURE(table[i].id);
    CHECK(eval.results[i].instance_id == table[i].id);
    CHECK(eval.results[i].validated == table[i].validated);
    CHECK(eval.results[i].instance_faithful == table[i].faithful);
    CHECK(eval.results[i].unseen == table[i].unseen);
  }
  const auto& s = eval.report.sgsacc;
  CHECK(s.all.overall == doctest::Approx(80.0));
  CHECK(s.all.seen == doctest::Approx(200.0 / 3.0));
  CHECK(s.all.unseen == doctest::Approx(100.0));
  CHECK(s.validated.overall == doctest::Approx(200.0 / 3.0));
  CHECK(s.validated.seen == doctest::Approx(50.0));
  CHECK(s.validated.unseen == doctest::Approx(100.0));
  CHECK(eval.report.excluded_count == 2);
  CHECK(eval.report.validated_count == 3);
  CHECK(eval.report.ser.ser.overall == doctest::Approx(0.0));
  CHECK(eval.report.ser.applicable.overall == 3);

  const auto outcomes = p.validation_outcomes();
  CHECK(outcomes[3].failed_negative);
  CHECK(outcomes[4].failed_positive);
  CHECK(eval.results[1].assessments[0].used_augmented_premise);
}

TEST_CASE("five-turn fixture without augmentation") {
  EvalOptions opts;
  opts.augmentation = false;
  opts.ser_case_sensitive = true;
  auto p = five_instance_pipeline(opts);
  const auto eval = p.evaluate_system("s", kGenerations);
  const bool faithful[] = {false, false, false, true, true};
  const bool validated[] = {false, true, false, false, false};
  for (std::size_t i = 0; i < 5; ++i) {
    CAPTURE(i);
    CHECK(eval.results[i].instance_faithful == faithful[i]);
    CHECK(eval.results[i].validated == validated[i]);
  }
  CHECK(eval.report.sgsacc.all.overall == doctest::Approx(40.0));
  CHECK(eval.report.sgsacc.validated.overall == doctest::Approx(0.0));
  CHECK_FALSE(eval.report.sgsacc.validated.unseen.has_value());
  // "fresno" only matches case-insensitively.
  CHECK(eval.report.ser.erroneous.overall == 1);
}

TEST_CASE("validation off leaves nothing validated and nothing excluded") {
  EvalOptions opts;
  opts.validation = false;
  auto p = five_instance_pipeline(opts);
  const auto eval = p.evaluate_system("s", kGenerations);
  CHECK_FALSE(eval.report.validation_ran);
  CHECK(eval.report.excluded_count == 0);
  CHECK_FALSE(eval.report.sgsacc.validated.overall.has_value());
  CHECK(eval.report.sgsacc.all.overall == doctest::Approx(80.0));
}

TEST_CASE("validation does not depend on the system being scored") {
  const auto data = testing::make_synthetic(50, 21);
  std::vector<std::string> unseen = {"Flights"};
  Pipeline p(data.catalog, data.instances, std::make_shared<MockNli>());
  const auto a = p.evaluate_system("a", data.system_a);
  const auto b = p.evaluate_system("b", data.system_b);
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    CHECK(a.results[i].validated == b.results[i].validated);
  }
  CHECK(a.report.excluded_count == b.report.excluded_count);
}

TEST_CASE("turning a faithful instance unfaithful never raises SGSAcc") {
  std::mt19937 rng(17);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<InstanceResult> results;
    std::vector<EvalInstance> inst;
    const std::size_t n = 1 + rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      InstanceResult r;
      r.instance_id = "i" + std::to_string(i);
      r.instance_faithful = rng() % 2;
      r.validated = rng() % 3 != 0;
      r.unseen = rng() % 4 == 0;
      results.push_back(r);
      EvalInstance e;
      e.instance_id = r.instance_id;
      e.is_unseen_domain = r.unseen;
      inst.push_back(e);
    }
    const auto split = DomainSplit::from_instances(inst);
    const auto before = compute_sgsacc(results, split);
    const std::size_t k = rng() % n;
    results[k].instance_faithful = false;
    const auto after = compute_sgsacc(results, split);
    CHECK(*after.all.overall <= *before.all.overall);
    if (before.validated.overall) CHECK(*after.validated.overall <= *before.validated.overall);

    std::shuffle(results.begin(), results.end(), rng);
    CHECK(compute_sgsacc(results, split) == after);
  }
}
