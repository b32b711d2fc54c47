#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mdskit/rational.hpp"

namespace mdskit {

enum class Relation { kEqual, kAtLeast };

inline const char* relation_name(Relation r) {
  return r == Relation::kEqual ? "eq" : "ge";
}

struct Check {
  std::string label;
  Rational lhs;
  Rational rhs;
  Relation relation = Relation::kEqual;
  bool pass = false;
};

/// Flat list of labelled exact comparisons. Both sides are kept so a failure
/// is diagnosable without re-running the sweep.
struct VerifyReport {
  std::vector<Check> checks;

  bool overall() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }

  void add_equal(std::string label, Rational lhs, Rational rhs) {
    checks.push_back(
        {std::move(label), lhs, rhs, Relation::kEqual, lhs == rhs});
  }
  void add_at_least(std::string label, Rational lhs, Rational rhs) {
    checks.push_back(
        {std::move(label), lhs, rhs, Relation::kAtLeast, lhs >= rhs});
  }
  void merge(const VerifyReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }

  const Check* first_failure() const {
    for (const auto& c : checks) {
      if (!c.pass) return &c;
    }
    return nullptr;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json doc;
    doc["format"] = "verify-report";
    doc["version"] = 1;
    doc["overall"] = overall();
    doc["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json jc;
      jc["label"] = c.label;
      jc["relation"] = relation_name(c.relation);
      jc["lhs"] = c.lhs.to_string();
      jc["rhs"] = c.rhs.to_string();
      jc["pass"] = c.pass;
      doc["checks"].push_back(jc);
    }
    return doc;
  }
};

}  // namespace mdskit
