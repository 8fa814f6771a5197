// povmkit: run a measurement scenario document and print a report.
//
//   povmkit [--tolerance T] [--seed S] [--samples N] [--format text|json] <scenario.json | ->
//
// Exit codes: 0 ok, 1 invalid input, 2 no joint observable found (coexist),
// 3 unreadable or malformed document.

#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "povmkit/kernels.hpp"
#include "povmkit/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Operational quantum measurement toolkit: scenario runner"};
  povmkit::RunOptions options;
  std::string path;
  std::string format = "text";

  app.add_option("scenario", path, "Scenario JSON file, or - for stdin")->required();
  app.add_option("--tolerance", options.tolerance, "Validation tolerance")
      ->default_val(povmkit::kDefaultTol)
      ->check(CLI::NonNegativeNumber);
  auto* seed = app.add_option("--seed", options.seed, "RNG seed")->default_val(0);
  auto* samples = app.add_option("--samples", options.samples, "Ensemble size")->default_val(10000);
  app.add_option("--format", format, "Output format")
      ->default_val("text")
      ->check(CLI::IsMember({"text", "json"}));
  app.set_version_flag("--version", std::string("povmkit 0.1.0 (kernels: ") +
                                        std::string(povmkit::kernels::backend_name(
                                            povmkit::kernels::active_backend())) +
                                        ")");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  options.format = format == "json" ? povmkit::OutputFormat::Json : povmkit::OutputFormat::Text;
  options.seed_given = seed->count() > 0;
  options.samples_given = samples->count() > 0;

  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::cerr << "povmkit: cannot read " << path << '\n';
      return 3;
    }
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  const povmkit::Report report = povmkit::run_document(text, options);
  std::cout << povmkit::render(report, options.format);
  for (const auto& d : report.diagnostics) std::cerr << "povmkit: " << d << '\n';
  return report.exit_code;
}
