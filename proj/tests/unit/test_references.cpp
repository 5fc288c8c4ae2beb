#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "golden.hpp"
#include "sgsacc/errors.hpp"
#include "sgsacc/references.hpp"

using namespace sgsacc;
using sgsacc::testing::golden_slot;

namespace {

std::vector<std::string> texts(const std::vector<CandidateReference>& refs) {
  std::vector<std::string> out;
  for (const auto& r : refs) out.push_back(r.text);
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Random slot names over a vocabulary that exercises the has/have/is rules.
std::string random_slot_name(std::mt19937& rng) {
  static const std::vector<std::string> words = {"is", "has", "have", "kids", "friendly", "live",
                                                 "music", "nonstop", "wifi", "pets", "open",
                                                 "additional", "luggage", "Is", "HAS"};
  const std::size_t n = 1 + rng() % 3;
  std::string name;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) name += '_';
    name += words[rng() % words.size()];
  }
  return name;
}

}  // namespace

TEST_CASE("normalize_slot_name") {
  CHECK(normalize_slot_name("kids_friendly") == "kids friendly");
  CHECK(normalize_slot_name("is_nonstop") == "is nonstop");
  CHECK(normalize_slot_name("name") == "name");
  CHECK(normalize_slot_name("__a__b_") == "a b");
  CHECK(normalize_slot_name("Has_Live_Music") == "Has Live Music");
}

TEST_CASE("golden candidates for every intent and slot type") {
  for (const auto& c : testing::golden_cases()) {
    CAPTURE(c.name);
    CHECK(texts(build_candidates(c.action, c.slot ? &*c.slot : nullptr)) == c.expected);
  }
  CHECK(testing::golden_failures().empty());
}

TEST_CASE("worked examples") {
  const auto kids = golden_slot("kids_friendly", "whether the place is kids friendly", true, {"True", "False"});
  auto t = texts(build_candidates({"INFORM", "kids_friendly", {"True"}}, &kids));
  CHECK(contains(t, "Whether the place is kids friendly? Yes."));
  CHECK(contains(t, "Kids friendly? Yes."));
  CHECK(contains(t, "Is kids friendly."));

  const auto stylist = golden_slot("name", "the name of the hair stylist");
  t = texts(build_candidates({"INFORM", "name", {"Queens"}}, &stylist));
  CHECK(contains(t, "The name of the hair stylist is Queens."));
  CHECK(contains(t, "Name is Queens."));

  const auto nonstop = golden_slot("is_nonstop", "whether the flight is a direct one", true, {"True", "False"});
  t = texts(build_candidates({"INFORM", "is_nonstop", {"False"}}, &nonstop));
  CHECK(contains(t, "Whether the flight is a direct one? No."));
  CHECK(contains(t, "Is nonstop? No."));
  CHECK(contains(t, "Is not nonstop."));

  const auto luggage = golden_slot("additional_luggage", "whether to carry excess baggage in the bus", true, {"True", "False"});
  t = texts(build_candidates({"CONFIRM", "additional_luggage", {"False"}}, &luggage));
  CHECK(contains(t, "Has no additional luggage."));
  CHECK(contains(t, "Does not additional luggage."));
}

TEST_CASE("value domain and resolution errors") {
  const auto kids = golden_slot("kids_friendly", "d", true, {"True", "False"});
  CHECK_THROWS_AS(build_candidates({"INFORM", "kids_friendly", {"maybe"}}, &kids), ValueDomainError);
  CHECK_THROWS_AS(build_candidates({"INFORM", "kids_friendly", {"true"}}, &kids), ValueDomainError);
  CHECK_THROWS_AS(build_candidates({"INFORM", "kids_friendly", {"True", "False"}}, &kids), ValueDomainError);
  CHECK_THROWS_AS(build_candidates({"INFORM", "kids_friendly", {}}, &kids), ValueDomainError);
  CHECK_THROWS_AS(build_candidates({"INFORM", "kids_friendly", {"True"}}, nullptr), ResolutionError);
  CHECK_THROWS_AS(build_candidates({"REQUEST", "kids_friendly", {}}, nullptr), ResolutionError);
}

TEST_CASE("negatives: boolean flip") {
  const auto kids = golden_slot("kids_friendly", "whether the place is kids friendly", true, {"True", "False"});
  const auto n = build_negatives({"INFORM", "kids_friendly", {"True"}}, kids, {});
  REQUIRE_FALSE(n.refs.empty());
  CHECK(n.refs[0].text == "Whether the place is kids friendly? No.");
  for (const auto& r : n.refs) CHECK(r.tampered_value == "False");
  CHECK(n.warnings.empty());
}

TEST_CASE("negatives: every other categorical value") {
  const auto price = golden_slot("price_range", "price range of the restaurant", true, {"cheap", "moderate", "expensive"});
  const auto n = build_negatives({"INFORM", "price_range", {"moderate"}}, price, {});
  std::set<std::string> values;
  for (const auto& r : n.refs) values.insert(r.tampered_value);
  CHECK(values == std::set<std::string>{"cheap", "expensive"});
  CHECK(n.refs.size() == 4);
}

TEST_CASE("negatives: pool values for non-categorical slots") {
  const auto stylist = golden_slot("name", "the name of the hair stylist");
  const std::vector<std::string> pool = {"Floyd's Barbershop", "Queens"};
  const auto n = build_negatives({"INFORM", "name", {"Queens"}}, stylist, pool);
  REQUIRE_FALSE(n.refs.empty());
  CHECK(n.refs[0].text == "The name of the hair stylist is Floyd's Barbershop.");
  for (const auto& r : n.refs) CHECK(r.tampered_value == "Floyd's Barbershop");
}

TEST_CASE("negatives: no substitute gives a warning and nothing else") {
  const auto single = golden_slot("party", "the party", true, {"only"});
  const auto n = build_negatives({"INFORM", "party", {"only"}}, single, {});
  CHECK(n.refs.empty());
  CHECK(n.warnings.size() == 1);

  const auto stylist = golden_slot("name", "the name of the hair stylist");
  const std::vector<std::string> pool = {"Queens"};
  const auto m = build_negatives({"INFORM", "name", {"Queens"}}, stylist, pool);
  CHECK(m.refs.empty());
  CHECK(m.warnings.size() == 1);
}

TEST_CASE("negatives: sampling is bounded by K and seeded") {
  const auto stylist = golden_slot("name", "the name of the hair stylist");
  std::vector<std::string> pool;
  for (int i = 0; i < 20; ++i) pool.push_back("Salon " + std::to_string(i));
  const DialogueAction a{"INFORM", "name", {"Salon 3"}};

  const auto values_of = [](const NegativeSet& s) {
    std::set<std::string> v;
    for (const auto& r : s.refs) v.insert(r.tampered_value);
    return v;
  };
  for (std::size_t k : {1u, 3u, 5u}) {
    const auto n = build_negatives(a, stylist, pool, {k, 42});
    const auto v = values_of(n);
    CHECK(v.size() == k);
    CHECK_FALSE(v.count("Salon 3"));
    const auto again = build_negatives(a, stylist, pool, {k, 42});
    CHECK(again.refs == n.refs);
  }
  // Different seeds are allowed to pick different values; over many seeds some must.
  std::set<std::set<std::string>> distinct;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    distinct.insert(values_of(build_negatives(a, stylist, pool, {3, seed})));
  }
  CHECK(distinct.size() > 1);
}

TEST_CASE("property: deterministic, disjoint booleans, negatives never positive") {
  std::mt19937 rng(1234);
  for (int iter = 0; iter < 500; ++iter) {
    const std::string name = random_slot_name(rng);
    const std::string desc = rng() % 4 == 0 ? "" : "whether it is " + normalize_slot_name(name);
    const auto slot = golden_slot(name, desc, true, {"True", "False"});
    CAPTURE(name);

    const DialogueAction t{"INFORM", name, {"True"}};
    const DialogueAction f{"INFORM", name, {"False"}};
    const auto ct = texts(build_candidates(t, &slot));
    const auto cf = texts(build_candidates(f, &slot));
    CHECK(ct == texts(build_candidates(t, &slot)));
    for (const auto& s : ct) CHECK_FALSE(contains(cf, s));

    for (const auto& a : {t, f}) {
      const auto pos = texts(build_candidates(a, &slot));
      for (const auto& n : build_negatives(a, slot, {}).refs) CHECK_FALSE(contains(pos, n.text));
    }
  }

  const std::vector<std::string> names = {"Ann", "Bo", "Cy", "Di", "Ed", "ann"};
  for (int iter = 0; iter < 300; ++iter) {
    const auto slot = golden_slot(random_slot_name(rng), "the stylist");
    std::vector<std::string> pool(names.begin(), names.begin() + 1 + rng() % names.size());
    const DialogueAction a{"INFORM", slot.name, {names[rng() % names.size()]}};
    const auto pos = texts(build_candidates(a, &slot));
    const auto neg = build_negatives(a, slot, pool, {3, rng()});
    for (const auto& n : neg.refs) CHECK_FALSE(contains(pos, n.text));
  }
}

TEST_CASE("property: every candidate embeds the slot name or description") {
  std::mt19937 rng(99);
  for (int iter = 0; iter < 500; ++iter) {
    const std::string name = random_slot_name(rng);
    const bool boolean = rng() % 2 == 0;
    const std::string desc = rng() % 3 == 0 ? "" : "about " + std::to_string(iter) + " things.";
    const auto slot = boolean ? golden_slot(name, desc, true, {"True", "False"}) : golden_slot(name, desc);
    static const char* kIntents[] = {"INFORM", "OFFER", "REQUEST", "CONFIRM"};
    DialogueAction a{kIntents[rng() % 4], name, {}};
    if (a.intent != "REQUEST") {
      a.values = boolean ? std::vector<std::string>{rng() % 2 ? "True" : "False"}
                         : std::vector<std::string>{"v1"};
    }

    const std::string n = lower(normalize_slot_name(name));
    std::string d = lower(desc);
    while (!d.empty() && d.back() == '.') d.pop_back();
    // "is" substitution for false booleans: the first "is" token gains a "not".
    std::string negated;
    {
      bool done = false;
      std::string word;
      std::vector<std::string> words;
      for (char c : n + " ") {
        if (c == ' ') {
          if (!word.empty()) words.push_back(word);
          word.clear();
        } else {
          word += c;
        }
      }
      for (const auto& w : words) {
        if (!negated.empty()) negated += ' ';
        negated += w;
        if (!done && w == "is") {
          negated += " not";
          done = true;
        }
      }
    }
    for (const auto& c : texts(build_candidates(a, &slot))) {
      const auto lc = lower(c);
      const bool ok = lc.find(n) != std::string::npos ||
                      (!d.empty() && lc.find(d) != std::string::npos) ||
                      lc.find(negated) != std::string::npos;
      CAPTURE(c);
      CHECK(ok);
    }
  }
}

TEST_CASE("instance references carry descriptions and warnings") {
  SchemaCatalog catalog;
  ServiceSchema svc;
  svc.service_name = "Services_1";
  svc.slots = {golden_slot("name", "the name of the hair stylist"),
               golden_slot("party", "the party", true, {"only"})};
  catalog.add(svc);
  EvalInstance inst;
  inst.instance_id = "i1";
  inst.service = "Services_1";
  inst.actions = {{"INFORM", "name", {"Queens"}}, {"INFORM", "party", {"only"}}, {"GOODBYE", std::nullopt, {}}};
  ValuePool pool;
  pool.add("Services_1", "name", "Queens");
  pool.add("Services_1", "name", "Floyd's Barbershop");
  const auto refs = build_instance_references(inst, catalog, pool);
  REQUIRE(refs.actions.size() == 3);
  CHECK(refs.actions[0].slot_description == "the name of the hair stylist");
  CHECK(refs.actions[0].negatives.size() == 2);
  CHECK(refs.actions[1].negatives.empty());
  CHECK(refs.actions[2].slot_description.empty());
  CHECK(refs.warnings.size() == 1);
}
