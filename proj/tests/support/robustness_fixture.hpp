#pragma once

// Ten single-action turns. Ground truths state the city verbatim except where
// a case plants a miss (false negative) or lists every other city (false
// positive on the tampered references).

#include <string>
#include <vector>

#include "sgsacc/data.hpp"

namespace sgsacc::testing {

inline const char* robustness_schema() {
  return R"([{"service_name": "Restaurants_1", "slots": [
    {"name": "city", "description": "city of the restaurant", "is_categorical": false}]}])";
}

inline const char* robustness_variant_schema() {
  return R"([{"service_name": "Restaurants_1", "slots": [
    {"name": "city", "description": "town the eatery is in", "is_categorical": false}]}])";
}

inline const std::vector<std::string>& robustness_cities() {
  static const std::vector<std::string> c = {"Albany", "Berkeley", "Concord", "Dublin", "Emeryville",
                                             "Fremont", "Gilroy", "Hayward", "Irvine", "Jackson"};
  return c;
}

struct RobustnessCase {
  bool plant_miss = false;
  bool plant_false_positive = false;
};

inline std::vector<EvalInstance> robustness_instances(const SchemaCatalog& catalog,
                                                      const std::vector<RobustnessCase>& cases) {
  const auto& cities = robustness_cities();
  std::string json = "[";
  for (std::size_t i = 0; i < cases.size(); ++i) {
    std::string gt = "City is " + cities[i] + ".";
    if (cases[i].plant_miss) gt = "It is somewhere nice.";
    if (cases[i].plant_false_positive) {
      gt = "City is " + cities[i] + ", or maybe";
      for (std::size_t j = 0; j < cities.size(); ++j) {
        if (j != i) gt += " " + cities[j];
      }
      gt += ".";
    }
    if (i > 0) json += ",";
    json += R"({"instance_id": "c)" + std::to_string(i) +
            R"(", "service": "Restaurants_1", "actions": [{"intent": "INFORM", "slot": "city", "values": [")" +
            cities[i] + R"("]}], "ground_truth": ")" + gt + "\"}";
  }
  json += "]";
  return parse_instances_text(json, catalog, {});
}

}  // namespace sgsacc::testing
