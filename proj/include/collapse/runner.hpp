#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

#include "collapse/config.hpp"
#include "collapse/environment.hpp"

namespace collapse::cli {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  /// Relative spectrum files are resolved against this directory.
  std::filesystem::path base_dir = ".";
  /// Monte-Carlo workers; 0 = hardware concurrency.
  unsigned threads = 0;
};

struct RunOutputs {
  std::filesystem::path csv;
  std::filesystem::path manifest;
};

/// Column names of the results file written for `kind`.
const std::vector<std::string>& csv_header(ExperimentKind kind);
std::string csv_file_name(ExperimentKind kind);

/// Reads a detector spectrum from CSV with header u,d,w.
env::DetectorSpectrum read_spectrum_csv(const std::filesystem::path& path);

/// Runs the experiment and writes <kind>.csv and manifest.json into out_dir.
RunOutputs run(const ExperimentConfig& config, const RunOptions& options);

/// Worker count from COLLAPSE_SIM_THREADS (unset or 0 = auto).
unsigned threads_from_environment();

}  // namespace collapse::cli
