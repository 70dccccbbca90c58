#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "refbench/fieldscore.hpp"
#include "refbench/matching.hpp"

namespace refbench {

inline constexpr int kReportFormatVersion = 1;

// One scored (dataset, task, strategy, backend) cell, traceable to the
// manifest that produced the predictions.
struct MetricsReport {
    int format_version = kReportFormatVersion;
    std::string dataset;
    std::string task;
    std::string strategy;
    std::string backend;
    std::string manifest_hash;
    Metrics metrics;                          // parse / e2e field-level pooling
    std::optional<ExtractionScore> extraction;  // extract task
    CategoryHistogram histogram;
    std::map<std::string, std::map<std::string, GroupReport>> breakdowns;
    size_t n_failures = 0;
    double runtime_seconds = 0.0;

    double precision() const;
    double recall() const;
    double micro_f1() const;
};

std::string report_to_json_text(const MetricsReport& report);
MetricsReport report_from_json_text(const std::string& text);

// One row per report; extraction rows add AvgSim and leave MacroF1 blank.
std::string reports_to_csv(const std::vector<MetricsReport>& reports);
std::string reports_to_markdown(const std::vector<MetricsReport>& reports);
std::string reports_to_json(const std::vector<MetricsReport>& reports);

}  // namespace refbench
