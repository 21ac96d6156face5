#pragma once

#include <json.hpp>

#include "cim/analysis.hpp"
#include "cim/eval.hpp"
#include "cim/nas.hpp"
#include "cim/noise.hpp"
#include "cim/train.hpp"

namespace cim {

using Json = nlohmann::json;

Json noise_to_json(const NoiseSpec& spec);
NoiseSpec noise_from_json(const Json& j);

Json architecture_to_json(const ArchitectureSpec& arch);
ArchitectureSpec architecture_from_json(const Json& j);

Json space_to_json(const SearchSpace& space);
SearchSpace space_from_json(const Json& j);

Json eval_to_json(const EvalDistribution& dist);
EvalDistribution eval_from_json(const Json& j);

Json fit_report_to_json(const FitReport& report);

/// Plot-ready histogram table: per element, one "bin_center observed expected"
/// line per bin.
std::string fit_report_histogram_table(const FitReport& report);

Json episode_to_json(const EpisodeRecord& rec);
EpisodeRecord episode_from_json(const Json& j);

Json train_log_to_json(const TrainLog& log);

/// Parses a file that holds either one JSON document or newline-delimited
/// JSON records; returns the records.
std::vector<Json> read_json_records(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace cim
