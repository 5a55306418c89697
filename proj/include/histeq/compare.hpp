#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "histeq/equalize.hpp"
#include "histeq/image.hpp"
#include "histeq/metrics.hpp"

namespace histeq {

/// Metric columns of the comparison report, in fixed order.
inline constexpr const char* kReportColumns[] = {"psnr", "mse", "rmse", "uiq",
                                                 "pcc",  "snr", "mae"};

struct MethodResult {
  std::string method;
  std::string output_path;
  MetricReport metrics;
};

enum class ReportFormat { Table, Csv, Json };

/// Method names x metric values for one source image, plus where each
/// enhanced image was written.
struct CompareReport {
  std::string source;
  ReportFormat format = ReportFormat::Table;
  std::vector<MethodResult> rows;
};

/// Runs the five methods with their default parameters, in report order.
inline std::vector<std::pair<std::string, GrayImage>> enhance_all(const GrayImage& img) {
  std::vector<std::pair<std::string, GrayImage>> out;
  out.emplace_back("CHE", che(img));
  out.emplace_back("BHE", bhe(img));
  out.emplace_back("RMSHE", rmshe(img, RmsheDepth(2)));
  out.emplace_back("AHE", ahe(img, AheConfig{}));
  out.emplace_back("MDHE", mdhe(img, MdheConfig{}));
  return out;
}

namespace detail {

// Report cells carry five decimals; rounding here keeps the csv, table and
// json emissions value-identical.
inline std::optional<double> round_cell(const std::optional<double>& v) {
  if (!v || std::isinf(*v)) return v;
  return std::lround(*v * 1e5) / 1e5;
}

inline std::string format_cell(const std::optional<double>& v) {
  if (!v) return "undefined";
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5f", *round_cell(v));
  return buf;
}

inline std::vector<std::optional<double>> metric_cells(const MetricReport& m) {
  return {m.psnr, m.mse, m.rmse, m.uiq, m.pcc, m.snr, m.mae};
}

}  // namespace detail

inline std::string render_csv(const CompareReport& report) {
  std::ostringstream out;
  out << "method";
  for (const char* column : kReportColumns) out << ',' << column;
  out << '\n';
  for (const MethodResult& row : report.rows) {
    out << row.method;
    for (const auto& cell : detail::metric_cells(row.metrics)) {
      out << ',' << detail::format_cell(cell);
    }
    out << '\n';
  }
  return out.str();
}

inline std::string render_json(const CompareReport& report) {
  nlohmann::ordered_json doc;
  doc["source"] = report.source;
  doc["methods"] = nlohmann::ordered_json::array();
  for (const MethodResult& row : report.rows) {
    nlohmann::ordered_json entry;
    entry["method"] = row.method;
    if (!row.output_path.empty()) entry["output"] = row.output_path;
    const auto cells = detail::metric_cells(row.metrics);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto rounded = detail::round_cell(cells[i]);
      if (rounded && !std::isinf(*rounded)) {
        entry[kReportColumns[i]] = *rounded;
      } else {
        entry[kReportColumns[i]] = detail::format_cell(cells[i]);
      }
    }
    doc["methods"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

inline std::string render_table(const CompareReport& report) {
  // Human-readable layout; metric columns keep the csv order with the
  // table's customary PPC spelling for the correlation coefficient.
  static constexpr const char* kHeaders[] = {"Method", "PSNR", "MSE", "RMSE",
                                             "UIQ",    "PPC", "SNR", "MAE"};
  std::vector<std::vector<std::string>> grid;
  grid.emplace_back(std::begin(kHeaders), std::end(kHeaders));
  for (const MethodResult& row : report.rows) {
    std::vector<std::string> cells{row.method};
    for (const auto& cell : detail::metric_cells(row.metrics)) {
      cells.push_back(detail::format_cell(cell));
    }
    grid.push_back(std::move(cells));
  }

  std::vector<std::size_t> widths(grid.front().size(), 0);
  for (const auto& row : grid) {
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }

  std::ostringstream out;
  out << "Comparison for " << report.source << '\n';
  for (const auto& row : grid) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << "  ";
      out << row[i];
      for (std::size_t pad = row[i].size(); pad < widths[i]; ++pad) out << ' ';
    }
    out << '\n';
  }
  out << "(lower is better for MSE, RMSE, MAE; higher for PSNR, UIQ, PPC, SNR)\n";
  return out.str();
}

inline std::string render_report(const CompareReport& report) {
  switch (report.format) {
    case ReportFormat::Csv:
      return render_csv(report);
    case ReportFormat::Json:
      return render_json(report);
    case ReportFormat::Table:
      break;
  }
  return render_table(report);
}

}  // namespace histeq
