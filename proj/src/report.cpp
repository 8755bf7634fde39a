#include "recbench/report.hpp"

#include "recbench/errors.hpp"
#include "recbench/io_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace recbench {

namespace {

constexpr std::array<const char*, 2> kMetrics{"d_C", "d_H"};

// CSV cells round-trip exactly; text cells keep 4 significant digits.
std::string cell(const ReportRow& row, std::size_t c, bool exact) {
    if (!row.values[c]) return "";
    const double v = *row.values[c];
    std::string text;
    if (exact || !std::isfinite(v)) {
        text = format_real(v);
    } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        text = buf;
    }
    return text + (row.best[c] ? "*" : "");
}

std::vector<std::vector<std::string>> table(const Report& report, bool exact) {
    std::vector<std::vector<std::string>> t;
    std::vector<std::string> header{"method", "metric"};
    for (auto c : all_categories()) header.push_back(to_string(c));
    t.push_back(header);
    for (const auto& row : report.rows) {
        std::vector<std::string> line{to_string(row.method), row.metric};
        for (std::size_t c = 0; c < row.values.size(); ++c) line.push_back(cell(row, c, exact));
        t.push_back(line);
    }
    return t;
}

void mark_winners(Report& report) {
    for (const std::string metric : kMetrics) {
        for (std::size_t c = 0; c < all_categories().size(); ++c) {
            std::optional<double> best;
            for (const auto& row : report.rows) {
                if (row.metric == metric && row.values[c] && (!best || *row.values[c] < *best)) best = row.values[c];
            }
            for (auto& row : report.rows) {
                if (row.metric == metric) row.best[c] = row.values[c] && *row.values[c] == *best;
            }
        }
    }
}

}  // namespace

std::string Report::to_csv() const {
    std::ostringstream out;
    for (const auto& line : table(*this, true)) {
        for (std::size_t i = 0; i < line.size(); ++i) out << (i ? "," : "") << line[i];
        out << '\n';
    }
    return out.str();
}

std::string Report::to_text() const {
    const auto t = table(*this, false);
    std::vector<std::size_t> width(t.front().size(), 0);
    for (const auto& line : t)
        for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    std::ostringstream out;
    for (const auto& line : t) {
        std::string text;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i) text += "  ";
            // Names left-aligned, numbers right-aligned.
            const std::string pad(width[i] - line[i].size(), ' ');
            text += i < 2 ? line[i] + pad : pad + line[i];
        }
        while (!text.empty() && text.back() == ' ') text.pop_back();
        out << text << '\n';
    }
    return out.str();
}

Report make_report(const std::vector<EvalRecord>& records) {
    if (records.empty()) throw InvalidInput("report: no records");
    // (method, category) -> (sum d_c, sum d_h, count)
    std::map<std::pair<Method, Category>, std::array<double, 3>> sums;
    for (const auto& r : records) {
        auto& s = sums[{r.method, r.category}];
        s[0] += r.d_c;
        s[1] += r.d_h;
        s[2] += 1.0;
    }
    Report report;
    for (auto m : all_methods()) {
        const bool present =
            std::any_of(records.begin(), records.end(), [m](const EvalRecord& r) { return r.method == m; });
        if (!present) continue;
        for (std::size_t k = 0; k < kMetrics.size(); ++k) {
            ReportRow row;
            row.method = m;
            row.metric = kMetrics[k];
            for (std::size_t c = 0; c < all_categories().size(); ++c) {
                const auto it = sums.find({m, all_categories()[c]});
                if (it != sums.end()) row.values[c] = it->second[k] / it->second[2];
            }
            report.rows.push_back(row);
        }
    }
    mark_winners(report);
    return report;
}

Report parse_report_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::string expected = "method,metric";
    for (auto c : all_categories()) expected += "," + to_string(c);
    if (line != expected) throw InvalidInput("report: unexpected header '" + line + "'");
    Report report;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cells.size() != 2 + all_categories().size()) throw InvalidInput("report: wrong column count: " + line);
        ReportRow row;
        row.method = parse_method(cells[0]);
        row.metric = cells[1];
        if (row.metric != kMetrics[0] && row.metric != kMetrics[1]) {
            throw InvalidInput("report: unknown metric " + row.metric);
        }
        for (std::size_t c = 0; c < all_categories().size(); ++c) {
            std::string text = cells[2 + c];
            if (text.empty()) continue;
            if (text.back() == '*') {
                row.best[c] = true;
                text.pop_back();
            }
            row.values[c] = parse_real(text);
        }
        report.rows.push_back(row);
    }
    return report;
}

void write_report(const std::filesystem::path& dir, const Report& report) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, text] : {std::pair{"report.csv", report.to_csv()}, std::pair{"report.txt", report.to_text()}}) {
        note_file_access();
        std::ofstream out(dir / name);
        if (!out) throw IoError("cannot write " + (dir / name).string());
        out << text;
        if (!out) throw IoError("failed writing " + (dir / name).string());
    }
}

}  // namespace recbench
