#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "cli/config.hpp"
#include "cli/output.hpp"

namespace sse::cli {

using Progress = std::function<void(const std::string&)>;

/// Runs the configured experiment, writing data files into `out`. Returns
/// the machine-readable results summary (also stored in the manifest).
nlohmann::json run(const RunConfig& config, RunOutput& out, unsigned threads,
                   const Progress& progress = {});

}  // namespace sse::cli
