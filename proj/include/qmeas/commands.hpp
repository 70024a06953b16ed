#pragma once

// Subcommands of the command-line tool. Each writes its CSV/JSON outputs and
// a manifest.json into out_dir and returns the manifest.

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmeas/config.hpp"

namespace qmeas {

// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);

 private:
  std::FILE* f_;
  std::size_t width_;
  std::string path_;
};

const std::vector<std::string>& command_names();

// Throws ErrorKind::config for an unknown command; simulation errors propagate.
nlohmann::json run_command(const std::string& command, const ExperimentConfig& cfg,
                           const std::string& out_dir);

// Re-runs the command recorded in a manifest with its resolved config.
nlohmann::json replay_manifest(const std::string& manifest_path, const std::string& out_dir);

// Written next to the outputs when a run aborts.
nlohmann::json diagnostic_json(const std::string& command, const std::exception& e);

}  // namespace qmeas
