// regsentry: detects regression faults between two versions of a MiniC program.
//
//   regsentry run --config <path> [--resume-from K] [--emit-cnf] [--format F]
//   regsentry instrument --config <path> --props <file> [--upgraded]
//   regsentry solve <file.cnf>
//
// Exit status: 0 no violations, 1 violations found, 2 error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "regsentry/bmc/instrument.hpp"
#include "regsentry/error.hpp"
#include "regsentry/infer/property.hpp"
#include "regsentry/pipeline/pipeline.hpp"
#include "regsentry/sat/solver.hpp"

using namespace regsentry;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regression fault detection for MiniC programs"};
  app.require_subcommand(1);

  std::string config_path;
  int resume_from = 1;
  bool emit_cnf = false;
  std::string format = "both";
  bool quiet = false;
  CLI::App* run = app.add_subcommand("run", "Run the four-phase analysis");
  run->add_option("--config", config_path, "Configuration file")->required();
  run->add_option("--resume-from", resume_from, "First phase to run (1..4)")->check(CLI::Range(1, 4));
  run->add_flag("--emit-cnf", emit_cnf, "Write every SAT query in DIMACS form");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text", "both"}));
  run->add_flag("-q,--quiet", quiet, "Do not print the text report");

  std::string props_path;
  bool upgraded = false;
  CLI::App* inst = app.add_subcommand("instrument", "Print a version with property assertions");
  inst->add_option("--config", config_path, "Configuration file")->required();
  inst->add_option("--props", props_path, "Property file")->required();
  inst->add_flag("--upgraded", upgraded, "Instrument the upgraded version");

  std::string cnf_path;
  CLI::App* solve = app.add_subcommand("solve", "Decide a DIMACS file with the built-in solver");
  solve->add_option("file", cnf_path, "DIMACS file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      pipeline::RunOptions options;
      options.resume_from = resume_from;
      options.emit_cnf = emit_cnf;
      options.format = format == "json" ? pipeline::Format::Json
                       : format == "text" ? pipeline::Format::Text
                                          : pipeline::Format::Both;
      pipeline::Pipeline p(pipeline::load_config(config_path), options);
      const pipeline::Report& r = p.run();
      if (!quiet) std::cout << (options.format == pipeline::Format::Json ? p.to_json().dump(2) + "\n" : p.to_text());
      return r.exit_status();
    }
    if (*inst) {
      pipeline::PipelineConfig cfg = pipeline::load_config(config_path);
      pipeline::Versions v = pipeline::load_versions(cfg);
      auto props = infer::parse_properties(slurp(props_path), cfg.bit_width);
      bmc::InstrumentedUnit iu = bmc::instrument(upgraded ? v.upgraded : v.base, props);
      std::cout << iu.text();
      return 0;
    }
    if (*solve) {
      sat::CnfResult r = sat::solve(sat::parse_dimacs(slurp(cnf_path)));
      std::cout << "s " << (r.result == sat::Result::Sat     ? "SATISFIABLE"
                            : r.result == sat::Result::Unsat ? "UNSATISFIABLE"
                                                             : "UNKNOWN")
                << "\n";
      if (r.result == sat::Result::Sat) {
        std::cout << "v";
        for (std::size_t i = 0; i < r.model.size(); ++i)
          std::cout << " " << (r.model[i] ? "" : "-") << (i + 1);
        std::cout << " 0\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "regsentry: error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
