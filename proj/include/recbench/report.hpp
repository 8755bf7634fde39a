#pragma once

#include "recbench/evaluation.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace recbench {

struct ReportRow {
    Method method = Method::mirror_oracle;
    std::string metric;  ///< "d_C" or "d_H"
    /// Per-category means in all_categories() order; empty without records.
    std::array<std::optional<double>, 6> values{};
    /// Lowest value of this metric in the column (ties all marked).
    std::array<bool, 6> best{};
};

struct Report {
    std::vector<ReportRow> rows;

    /// Header method,metric,bottle,...,mug; winners carry a trailing '*'.
    std::string to_csv() const;
    /// Same layout, space-aligned, values at 4 significant digits.
    std::string to_text() const;
};

/// Rows ordered by method, then d_C before d_H. Throws InvalidInput when empty.
Report make_report(const std::vector<EvalRecord>& records);

/// Inverse of Report::to_csv.
Report parse_report_csv(const std::string& csv);

/// Writes <dir>/report.csv and <dir>/report.txt.
void write_report(const std::filesystem::path& dir, const Report& report);

}  // namespace recbench
