#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "subcausal/table.hpp"

namespace subcausal {

// {"J":2,"K":2,"observed":[{"t":..,"x":..,"y":..,"n":..}],"missing":[{"t":..,"y":..,"n":..}]}
// Unknown cells default to zero; counts must be nonnegative integers.
ObservedTable ingest_json(const std::string& text);

// Columns t,x,y,m,n with a header row; x must be empty when m = 1.
ObservedTable ingest_csv(const std::string& text);

// Dispatch on format ("json" | "csv" | "auto" by extension/content).
ObservedTable load_table(const std::string& path, const std::string& format = "auto");

// Bundled data sets addressable by --fixture.
ObservedTable fixture(const std::string& name);
std::vector<std::string> fixture_names();

nlohmann::ordered_json table_to_json(const ObservedTable& table);
nlohmann::ordered_json joint_to_json(const JointDistribution& joint);

// JSON has no infinity literal; non-finite values become "inf"/"-inf"/"nan".
nlohmann::ordered_json json_number(double v);

// FNV-1a over the canonical count serialization; identifies the input data.
std::string table_digest(const ObservedTable& table);

}  // namespace subcausal
