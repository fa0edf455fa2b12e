#pragma once

#include "creature_lab/homogenize.hpp"

#include <json.hpp>

namespace cl {

using Json = nlohmann::json;

struct Fixture {
  std::optional<GrowthSequences> params;
  std::optional<AmbientTree> tree;
  std::vector<SpecFn> specfns;
  std::vector<Creature> creatures;
  std::vector<Fragment> conditions;
  std::vector<LeafLabeling> labelings;
};

Json spec_to_json(const SpecFn& f);
SpecFn spec_from_json(const Json& j);

Json to_json(const Fixture& f);
/// Throws DomainError on malformed input.
Fixture fixture_from_json(const Json& j);

/// Canonical text: sorted keys, sorted node lists, two-space indent, trailing newline.
std::string emit(const Fixture& f);
Fixture parse_fixture(const std::string& text);
Fixture load_fixture(const std::string& path);
void save_fixture(const std::string& path, const Fixture& f);

}  // namespace cl
