#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>

#include <CLI11.hpp>

#include "histeq/histeq.hpp"

namespace {

// Exit codes: 0 success, 1 runtime/IO error, 2 usage error.
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

bool parse_grid(const std::string& text, int& rows, int& cols) {
  const auto split = text.find('x');
  if (split == std::string::npos || split == 0 || split + 1 == text.size()) return false;
  const auto parse = [](std::string_view part, int& out) {
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    return ec == std::errc{} && ptr == part.data() + part.size() && out >= 1;
  };
  return parse(std::string_view(text).substr(0, split), rows) &&
         parse(std::string_view(text).substr(split + 1), cols);
}

int run_enhance(const std::string& input, const std::string& output, const std::string& method,
                int depth, const std::string& grid, double brightness_limit,
                std::optional<double> clip_limit, bool blend) {
  int rows = 0;
  int cols = 0;
  if (!parse_grid(grid, rows, cols)) {
    std::cerr << "invalid --grid '" << grid << "': expected ROWSxCOLS\n";
    return kExitUsage;
  }
  if (clip_limit && !(*clip_limit > 1.0)) {
    std::cerr << "invalid --clip-limit: must exceed 1.0\n";
    return kExitUsage;
  }
  const auto format = histeq::format_for_extension(output);
  if (!format) {
    std::cerr << "unsupported output extension for '" << output << "' (use .pgm, .pnm or .png)\n";
    return kExitUsage;
  }

  try {
    const histeq::GrayImage image = histeq::load_image(input);
    const histeq::GrayImage enhanced = [&] {
      if (method == "che") return histeq::che(image);
      if (method == "bhe") return histeq::bhe(image);
      if (method == "rmshe") return histeq::rmshe(image, histeq::RmsheDepth(depth));
      if (method == "ahe") return histeq::ahe(image, histeq::AheConfig{rows, cols, clip_limit});
      return histeq::mdhe(image, histeq::MdheConfig{rows, cols, brightness_limit, blend});
    }();
    histeq::save_image(enhanced, output, *format);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int run_hist(const std::string& input, const std::string& output) {
  try {
    const histeq::Histogram h = histeq::compute_histogram(histeq::load_image(input));
    std::ostringstream csv;
    csv << "level,count\n";
    for (int level = 0; level < histeq::kLevels; ++level) {
      csv << level << ',' << h.counts[static_cast<std::size_t>(level)] << '\n';
    }
    if (output == "-") {
      std::cout << csv.str();
      return 0;
    }
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    out << csv.str();
    out.flush();
    if (!out.good()) {
      std::cerr << "error: cannot write histogram to '" << output << "'\n";
      return kExitRuntime;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int run_compare(const std::string& input, const std::string& outdir, const std::string& format) {
  histeq::CompareReport report;
  report.source = input;
  report.format = format == "csv"    ? histeq::ReportFormat::Csv
                  : format == "json" ? histeq::ReportFormat::Json
                                     : histeq::ReportFormat::Table;
  try {
    const histeq::GrayImage image = histeq::load_image(input);
    const std::filesystem::path dir(outdir);
    std::filesystem::create_directories(dir);

    for (auto& [name, enhanced] : histeq::enhance_all(image)) {
      std::string file_name = name;
      std::transform(file_name.begin(), file_name.end(), file_name.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      const std::filesystem::path out_path = dir / (file_name + ".pgm");
      histeq::save_image(enhanced, out_path, histeq::ImageFormat::PgmBinary);
      report.rows.push_back({name, out_path.string(), histeq::full_report(image, enhanced)});
    }
    std::cout << histeq::render_report(report);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grayscale contrast enhancement via histogram equalization, with quality metrics"};
  app.require_subcommand(1);

  std::string enh_input, enh_output, method;
  std::string grid = "8x8";
  int depth = 2;
  double brightness_limit = 10.0;
  std::optional<double> clip_limit;
  bool blend = false;
  auto* enhance = app.add_subcommand("enhance", "Enhance one image with one method");
  enhance->add_option("input", enh_input, "input image (PGM P2/P5 or PNG)")->required();
  enhance->add_option("output", enh_output, "output image (.pgm, .pnm or .png)")->required();
  enhance->add_option("--method", method, "one of che, ahe, bhe, rmshe, mdhe")
      ->required()
      ->check(CLI::IsMember({"che", "ahe", "bhe", "rmshe", "mdhe"}));
  enhance->add_option("--depth", depth, "rmshe recursion depth")
      ->check(CLI::Range(0, 7))
      ->capture_default_str();
  enhance->add_option("--grid", grid, "tile grid ROWSxCOLS for ahe/mdhe")->capture_default_str();
  enhance->add_option("--brightness-limit", brightness_limit, "mdhe mean-drift limit")
      ->check(CLI::Range(0.0, 255.0))
      ->capture_default_str();
  enhance->add_option("--clip-limit", clip_limit, "ahe histogram clip factor (must exceed 1)");
  enhance->add_flag("--blend", blend, "mdhe: blend tile transforms bilinearly");

  std::string hist_input;
  std::string hist_output = "-";
  auto* hist = app.add_subcommand("hist", "Export the 256-bin histogram as level,count CSV");
  hist->add_option("input", hist_input, "input image")->required();
  hist->add_option("output", hist_output, "output CSV path, '-' for stdout")
      ->capture_default_str();

  std::string cmp_input, cmp_outdir;
  std::string cmp_format = "table";
  auto* compare =
      app.add_subcommand("compare", "Run all five methods and report the quality metrics");
  compare->add_option("input", cmp_input, "input image")->required();
  compare->add_option("outdir", cmp_outdir, "directory for the five enhanced images")->required();
  compare->add_option("--format", cmp_format, "report format")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  }

  if (enhance->parsed()) {
    return run_enhance(enh_input, enh_output, method, depth, grid, brightness_limit, clip_limit,
                       blend);
  }
  if (hist->parsed()) return run_hist(hist_input, hist_output);
  return run_compare(cmp_input, cmp_outdir, cmp_format);
}
