#pragma once

// JSON, text and SVG serialization shared by the command-line tool and tests.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "votedyn/concentration.hpp"
#include "votedyn/dynamics.hpp"
#include "votedyn/experiment.hpp"
#include "votedyn/fixed_points.hpp"

namespace votedyn {

using Json = nlohmann::ordered_json;

/// A configuration value that does not match its schema. what() starts with
/// the JSON path of the offending field, e.g. `$.trials: expected ...`.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses `half_half`, `biased_global:B`, `clustered:D1,D2`,
/// `exact_counts:A1,A2` or `random_density:RHO`. Throws std::invalid_argument.
InitFamily parse_init(const std::string& text);

/// Inverse of parse_init with round-trip number formatting.
std::string format_init(const InitFamily& family);

/// Reads an ExperimentConfig, defaults filling absent fields. Keys outside
/// the config schema are rejected unless listed in `extra_keys`.
ExperimentConfig config_from_json(const Json& j, const std::vector<std::string>& extra_keys = {});
Json config_to_json(const ExperimentConfig& cfg);

// Typed accessors that raise SchemaError with the field path.
double json_number(const Json& j, const std::string& key, double fallback);
std::uint64_t json_unsigned(const Json& j, const std::string& key, std::uint64_t fallback);
std::vector<double> json_number_list(const Json& j, const std::string& key,
                                     const std::vector<double>& fallback);

std::string model_name(ModelTag model);
ModelTag model_from_name(const std::string& name);

Json fixed_point_json(const FixedPointReport& rep);
Json analysis_json(ModelTag model, double u, const std::vector<FixedPointReport>& reports);

Json summary_json(const TrialSummary& s);
Json sweep_json(const ExperimentConfig& cfg, const std::vector<SweepBlock>& blocks);
Json sink_json(const ExperimentConfig& cfg, const SinkReport& rep);
Json escape_json(const ExperimentConfig& cfg, const EscapeReport& rep);
Json deviation_json(const ExperimentConfig& cfg, std::uint64_t t_max, const DeviationReport& rep);
Json worst_case_json(const ExperimentConfig& cfg, const WorstCaseReport& rep);
Json scaling_json(const ExperimentConfig& cfg, const ScalingReport& rep);
Json probe_json(const ProbeResult& res);
Json goodness_json(const GoodnessReport& rep);
Json wstat_json(const WStatReport& rep);

struct SvgStats {
  std::size_t arrows = 0;
  std::size_t markers = 0;
  std::size_t sink_markers = 0;  ///< sinks other than the consensus corners
};

/// Arrow field of H (alpha) or T (delta) on a regular grid, drawn into an
/// 800×800 viewBox with the second coordinate increasing upward. Closed-form
/// fixed points (and their sign images) are drawn as labeled circles; sinks
/// and consensus points are filled.
SvgStats write_vector_field_svg(std::ostream& out, const InducedMap& m, MapSpace space, double grid_step);

}  // namespace votedyn
