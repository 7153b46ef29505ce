#pragma once

#include <stdexcept>
#include <string>

#include "drlab/policy.hpp"

namespace drlab {

inline const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kOracle:
      return "oracle";
    case PolicyKind::kMyopic:
      return "myopic";
    case PolicyKind::kPerturbedMyopic:
      return "perturbed";
  }
  return "unknown";
}

inline PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "oracle") return PolicyKind::kOracle;
  if (name == "myopic") return PolicyKind::kMyopic;
  if (name == "perturbed") return PolicyKind::kPerturbedMyopic;
  throw std::invalid_argument("unknown policy name: " + name);
}

}  // namespace drlab
