#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "proxmin/problem.hpp"

namespace proxmin {

// Instance description; deserialized from the CLI problem config. Field names
// are part of the CLI contract.
struct InstanceSpec {
  std::string instance;  // sparse_least_squares | l1_penalty_nlp |
                         // min_norm_system | sharp_lagrangian | custom
  int n = 2;
  int m = 1;
  double penalty = 1.0;
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();

  static InstanceSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  InstanceSpec();
  InstanceSpec(const InstanceSpec&);
  InstanceSpec(InstanceSpec&&) noexcept;
  InstanceSpec& operator=(const InstanceSpec&);
  InstanceSpec& operator=(InstanceSpec&&) noexcept;
  ~InstanceSpec();
};

// Builds a fully wired problem with its Lipschitz/convexity constants.
// Rejects instances that violate the standing assumptions (notably
// sparse_least_squares, whose outer 1/2||.||^2 is not globally Lipschitz).
CompositeProblem build_instance(const InstanceSpec& spec);

// Start point: params["x0"] when present, otherwise ones projected onto Omega.
Vector default_x0(const CompositeProblem& p, const InstanceSpec& spec);

// The buildable corpus members with desk-scale defaults (used by tests and
// the lemma-suite runner).
std::vector<InstanceSpec> corpus_specs(std::uint64_t seed);

}  // namespace proxmin
