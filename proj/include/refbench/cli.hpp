#pragma once

#include <map>
#include <string>
#include <vector>

#include "refbench/backends.hpp"
#include "refbench/fieldscore.hpp"
#include "refbench/matching.hpp"
#include "refbench/pipeline.hpp"
#include "refbench/textnorm.hpp"

namespace refbench {

// Exit codes: 0 = completed (model failures are data, not errors),
// 2 = configuration / operator error, 3 = unrecoverable I/O.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

// The single structured config document. Secrets stay in the environment;
// the file only names the variables.
struct CliConfig {
    std::map<std::string, BackendProfile> profiles;
    ClassifyThresholds thresholds;
    FieldSimConfig sim;
    ExtractionConfig extraction;
    PipelineConfig pipeline;
    std::string embedding_profile;
    std::string grobid_profile;
    std::string snapshot;  // canonical config text, hashed into manifests
};

CliConfig load_cli_config(const std::string& path);  // throws ConfigError / IoError
CliConfig default_cli_config();

int run_main(int argc, const char* const* argv);
int run_main(const std::vector<std::string>& args);

}  // namespace refbench
