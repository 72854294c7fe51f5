#pragma once

#include "json.hpp"
#include "satsched/instance.hpp"

namespace satsched {

// Missing keys keep their defaults; unknown keys are rejected.
void to_json(nlohmann::json& j, const GeneratorParams& p);
void from_json(const nlohmann::json& j, GeneratorParams& p);

}  // namespace satsched
