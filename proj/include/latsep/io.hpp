#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "latsep/bound.hpp"
#include "latsep/fits.hpp"
#include "latsep/harness.hpp"
#include "latsep/pca.hpp"
#include "latsep/separation.hpp"
#include "latsep/types.hpp"

namespace latsep {

enum class ReportFormat { json, csv };

// --- datasets ---

/// Columns: id, y, zero or more a_<name>, then z_0..z_{d-1}.
EmbeddingSet load_csv(const std::string& path);
void save_csv(const EmbeddingSet& dataset, const std::string& path);

/// `<path>.bin` payload (float32 LE row-major matrix, then uint8 labels, then
/// one uint8 block per attribute in header order) plus `<path>.json` header.
EmbeddingSet load_binary(const std::string& path);
void save_binary(const EmbeddingSet& dataset, const std::string& path);

// --- reports ---

nlohmann::json to_json(const SeparationReport& report);
nlohmann::json to_json(const PcaModel& model);
nlohmann::json to_json(const SweepResult& sweep);
nlohmann::json to_json(const SensitivityFit& fit);
nlohmann::json to_json(const PowerLawFit& fit);
nlohmann::json to_json(const CorrelationReport& report);
nlohmann::json to_json(const std::vector<BoundCheck>& checks);
nlohmann::json to_json(const SubgroupSummary& summary);

SeparationReport separation_from_json(const nlohmann::json& j);
SweepResult sweep_from_json(const nlohmann::json& j);
SensitivityFit fit_from_json(const nlohmann::json& j);

void save_report(const SeparationReport& report, const std::string& path, ReportFormat format);
void save_report(const SweepResult& sweep, const std::string& path, ReportFormat format);
void save_report(const SensitivityFit& fit, const std::string& path, ReportFormat format);
void save_report(const CorrelationReport& report, const std::string& path, ReportFormat format);
void save_report(const std::vector<BoundCheck>& checks, const std::string& path,
                 ReportFormat format);

/// Key-sorted, newline-terminated JSON file.
void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

/// Stable run identifier: FNV-1a of the canonical config dump plus the seed.
std::string run_id(const nlohmann::json& config, std::uint64_t seed);

/// Fixed-width significant-digit float formatting used by CSV reports.
std::string format_sig9(double v);

}  // namespace latsep
