#pragma once

// JSON documents: surrogates, grid reports, partition models, predator-prey
// datasets and golden reference values. Doubles use shortest round-trip
// formatting, so parse(dump(x)) reproduces x bit for bit.

#include <map>
#include <string>

#include <json.hpp>

#include "wqmc/adaptgrid.hpp"
#include "wqmc/hatbasis.hpp"
#include "wqmc/pou.hpp"
#include "wqmc/problems.hpp"

namespace wqmc {

using Json = nlohmann::json;

Json to_json(const TensorHatSurrogate& s);
TensorHatSurrogate surrogate_from_json(const Json& j);

Json to_json(const AdaptiveReport& r);

Json to_json(const GaussianComponent& c);
GaussianComponent component_from_json(const Json& j);

Json to_json(const PartitionModel& m);
PartitionModel partition_from_json(const Json& j);

Json to_json(const Dataset& d);
Dataset dataset_from_json(const Json& j);

struct GoldenValue {
  double value = 0.0;
  double error_estimate = 0.0;
  /// How the value was produced (rule, nodes, sample count, ...).
  Json spec = Json::object();
};
using GoldenTable = std::map<std::string, GoldenValue>;

Json to_json(const GoldenTable& t);
GoldenTable golden_from_json(const Json& j);

/// Throws ParseError with the path on I/O or syntax errors.
Json read_json_file(const std::string& path);
/// Two-space indented dump with a trailing newline.
void write_json_file(const std::string& path, const Json& j);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace wqmc
