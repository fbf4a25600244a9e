#pragma once

// JSON shapes of every report and input file. The CLI prints exactly these.

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogstream/allocator.hpp"
#include "cogstream/cogload.hpp"
#include "cogstream/pest.hpp"
#include "cogstream/readmodel.hpp"
#include "cogstream/savings.hpp"
#include "cogstream/simulator.hpp"

namespace cogstream::json_io {

using nlohmann::json;

json to_json(const readmodel::LogNormalModel& m);
json to_json(const readmodel::FitReport& r);
json to_json(const readmodel::KsResult& r);
json to_json(const readmodel::TTestResult& r);
json to_json(const cogload::FogBreakdown& f);
json to_json(const savings::SavingsReport& r);
json to_json(const savings::RedistributionPlan& p);
json to_json(const allocator::AllocationPlan& p);
json to_json(const simulator::SimPoint& p);
json to_json(std::span<const simulator::SimPoint> table);
json to_json(const pest::TranscriptEntry& e);
json to_json(const pest::ReaderRun& run);

// `target_srar,method,avg_wps,saving_pct` with a header row.
std::string table_csv(std::span<const simulator::SimPoint> table);

// Group set file: [{"name", "proportion", "mu", "sigma"}, ...]
std::vector<savings::GroupSpec> parse_groups(const json& j);

// passages.json: [{"id", "text", "oracle_score", "mu", "sigma", "share"}].
// Passages without mu/sigma are fitted from `samples` (matched on
// passage_id). A missing share defaults to 1/n for every passage.
std::vector<simulator::PassageRecord> parse_passages(
    const json& j, std::span<const readmodel::SpeedSample> samples = {});

json passages_to_json(std::span<const simulator::PassageRecord> passages);

// Reads a whole file; throws Error{BadInput} when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace cogstream::json_io
