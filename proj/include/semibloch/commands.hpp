#pragma once

#include "semibloch/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace semibloch {

const char* version();

// bands, geometry, chern, flow, hall, egorov-quantum, egorov-operator, selftest
const std::vector<std::string>& command_names();

enum ExitCode { exit_ok = 0, exit_config = 1, exit_check = 2 };

struct CommandOptions {
  std::filesystem::path out;  // empty: output root from config, environment, or default
  int threads = 0;            // 0: from config
  bool strict = false;        // or-ed with the config flag
  bool quiet = false;
};

struct ArtifactRecord {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string fnv1a;
};

struct CheckRecord {
  std::string name;
  double value = 0.0;
  std::string bound;
  bool pass = true;
  bool advisory = false;  // a miss is reported as "warn" and does not change the exit code
};

// tmp file + rename; records the artifact for the manifest
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir);
  const std::filesystem::path& dir() const { return dir_; }
  void write(const std::string& name, const std::string& content);
  const std::vector<ArtifactRecord>& records() const { return records_; }

 private:
  std::filesystem::path dir_;
  std::vector<ArtifactRecord> records_;
};

void write_atomic(const std::filesystem::path& path, const std::string& content);

// SEMIBLOCH_OUT names the default output root
std::filesystem::path output_root(const RunConfig& c, const CommandOptions& o);

struct CommandResult {
  int exit_code = exit_ok;
  std::filesystem::path dir;
  std::vector<CheckRecord> checks;
  std::vector<std::string> lines;  // human summary
  std::string error;
};

// runs the subcommand and writes artifacts plus manifest.json; errors are mapped to exit codes
CommandResult run_command(const std::string& name, const RunConfig& c, const CommandOptions& o);
// exit code for a library or config error
int exit_code_for(const std::exception& e);

}  // namespace semibloch
