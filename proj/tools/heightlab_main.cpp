// Command-line runner for the verification suites.
//
// Exit status: 0 pass, 1 error or failed assertion, 2 inconclusive (cap hit).

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "heightlab/experiments.hpp"

namespace hx = heightlab::experiments;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heightlab: exact p-adic and height verification suites"};
  std::string suite, out, format, config_path, descriptor_path, c_text;
  std::uint64_t seed = 0, cap = 0, samples = 0;
  long p = 0, d = 0, precision = 0;

  std::string suites;
  for (auto s : hx::all_suites()) suites += (suites.empty() ? "" : ", ") + hx::to_string(s);
  app.add_option("--suite", suite, "one of: " + suites);
  app.add_option("--seed", seed, "random seed");
  app.add_option("--cap", cap, "orbit and index cap");
  app.add_option("--samples", samples, "sample count (gm-heights: numerator/denominator bound)");
  app.add_option("--p", p, "restrict to one prime");
  app.add_option("--d", d, "restrict to one dimension");
  app.add_option("--precision", precision, "p-adic precision N");
  app.add_option("--c", c_text, "global-bound constant c");
  app.add_option("--out", out, "report path (default: stdout)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--config", config_path, "JSON config file; explicit flags take precedence");
  app.add_option("--descriptor", descriptor_path, "local-bound experiment descriptor file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    hx::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = hx::merge_config(cfg, nlohmann::json::parse(slurp(config_path)));
    else if (app.count("--suite") == 0) throw std::invalid_argument("--suite or --config is required");
    if (app.count("--suite")) cfg.suite = hx::parse_suite(suite);
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--cap")) cfg.cap = cap;
    if (app.count("--samples")) cfg.samples = samples;
    if (app.count("--p")) cfg.p = p;
    if (app.count("--d")) cfg.d = d;
    if (app.count("--precision")) cfg.precision = precision;
    if (app.count("--c")) cfg.c = heightlab::parse_rational(c_text);
    if (app.count("--out")) cfg.out = out;
    if (app.count("--format")) cfg.format = format == "csv" ? hx::Format::Csv : hx::Format::Json;
    if (app.count("--descriptor")) cfg.descriptor = slurp(descriptor_path);

    const hx::Report report = hx::run(cfg);
    emit(cfg.out, cfg.format == hx::Format::Csv ? report.csv : hx::render_json(report));
    if (report.status != hx::Status::Pass) {
      std::cerr << hx::to_string(cfg.suite) << ": " << hx::status_name(report.status) << "\n";
    }
    return static_cast<int>(report.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
