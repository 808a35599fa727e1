#pragma once

#include "json.hpp"

#include "gridattack/features.hpp"
#include "gridattack/waveform.hpp"

// ADL converters so the config and plumbing types serialize with
// nlohmann::json directly. Field names are part of the on-disk schemas and
// must not change without bumping the schema versions in dataset_io.hpp.
namespace gridattack {

void to_json(nlohmann::json& j, const SimulationTiming& t);
void from_json(const nlohmann::json& j, SimulationTiming& t);

void to_json(nlohmann::json& j, const SurrogateParams& p);
void from_json(const nlohmann::json& j, SurrogateParams& p);

void to_json(nlohmann::json& j, const DatasetConfig& c);
void from_json(const nlohmann::json& j, DatasetConfig& c);

void to_json(nlohmann::json& j, const Standardizer& s);
void from_json(const nlohmann::json& j, Standardizer& s);

void to_json(nlohmann::json& j, const Split& s);
void from_json(const nlohmann::json& j, Split& s);

}  // namespace gridattack
