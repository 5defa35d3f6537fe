#pragma once

#include <map>
#include <string>

#include "hop/experiments.hpp"
#include "hop/sobolev.hpp"

namespace hop {

// Flat key-value view of a campaign configuration: the digest input, the
// config-file format, and the replay payload.
using KV = std::map<std::string, std::string>;

// FNV-1a over the canonical "key=value\n" rendering (map order is sorted).
std::string config_digest(const KV& kv);

KV to_kv(const CaseStudyConfig& c);
KV to_kv(const LocalizationConfig& c);
KV to_kv(const FreeRegionConfig& c);
KV to_kv(const CounterexampleConfig& c);

CaseStudyConfig case_config_from_kv(const KV& kv);
LocalizationConfig localization_config_from_kv(const KV& kv);
FreeRegionConfig free_region_config_from_kv(const KV& kv);
CounterexampleConfig counterexample_config_from_kv(const KV& kv);

// Canonical JSON renderings (object keys sorted, schema: 1 embedded).
std::string report_json(const CaseStudyReport& r);
std::string report_json(const LocalizationReport& r);
std::string report_json(const FreeRegionReport& r);
std::string report_json(const CounterexampleReport& r);
std::string report_json(const DeterministicRateReport& r);
std::string report_json(const TailCurve& curve, const KV& config);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Parse the flat key = value config-file format (one pair per line, '#' comments).
KV parse_config_text(const std::string& text);

// Rerun the campaign embedded in a report file and diff the canonical JSON;
// returns an empty string when the rerun is byte-identical.
std::string replay_report_json(const std::string& json_text);

// CSV emissions (the plotting contract).
std::string tail_curve_csv(const TailCurve& t);
std::string potential_grid_csv(const RandomPotential& V, int points);
std::string field_csv(const CoefficientField& f);
std::string resonances_csv(const std::vector<Resonance>& rs);
std::string resonances_json(const std::vector<Resonance>& rs, const KV& config);

}  // namespace hop
