#pragma once

#include <string>

#include "sigval/harness.hpp"
#include "sigval/mmd_test.hpp"

namespace sigval {

// JSON report text: two-space indent, fixed key order, shortest
// round-trip number formatting, one trailing newline. Identical inputs
// therefore produce byte-identical files regardless of thread count.
// Wall-clock timings are only emitted when asked for, since they are the
// one field that varies between otherwise identical runs.
std::string test_result_json(const TestResult& result);
std::string power_report_json(const PowerReport& report,
                              bool include_timing = false);
std::string validation_report_json(const ValidationReport& report);

// CSV flavors: power cells as one table row per (m, order), single
// results as key,value rows.
std::string test_result_csv(const TestResult& result);
std::string power_report_csv(const PowerReport& report);
std::string validation_report_csv(const ValidationReport& report);

// Calibration-only report: the fitted model plus estimator diagnostics.
std::string calibration_json(const CalibrationOutcome& outcome);
std::string calibration_csv(const CalibrationOutcome& outcome);

// Multi-line terminal summaries.
std::string human_summary(const TestResult& result);
std::string human_summary(const PowerReport& report);
std::string human_summary(const ValidationReport& report);
std::string human_summary(const CalibrationOutcome& outcome);

// Writes text to the path; an empty path or "-" means stdout.
void write_text(const std::string& path, const std::string& text);

} // namespace sigval
