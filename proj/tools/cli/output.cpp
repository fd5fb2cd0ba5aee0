#include "cli/output.hpp"

#include <chrono>
#include <ctime>

#include "sse/errors.hpp"
#include "sse/version.hpp"

namespace sse::cli {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string provenance_line(const std::string& hash, Command c) {
  return std::string("# sse_lab ") + version_string + " config_hash=" + hash +
         " command=" + to_string(c);
}

RunOutput::RunOutput(fs::path dir, const RunConfig& config)
    : dir_(std::move(dir)), config_(config), hash_(config_hash(config)), started_(utc_now()) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  write_manifest("running", nullptr);
}

std::ofstream RunOutput::open(const std::string& name) {
  const fs::path path = dir_ / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

void RunOutput::close(std::ofstream& f, const fs::path& path) {
  f.close();
  if (!f) throw IoError("write failed for " + path.string());
}

void RunOutput::write_csv(const std::string& name, const std::function<void(std::ostream&)>& fill) {
  auto f = open(name);
  f << provenance_line(hash_, config_.command) << '\n';
  fill(f);
  close(f, dir_ / name);
  files_.push_back(name);
}

void RunOutput::write_json(const std::string& name, nlohmann::json body) {
  body["config_hash"] = hash_;
  write_text(name, body.dump(2) + "\n");
}

void RunOutput::write_text(const std::string& name, const std::string& text) {
  auto f = open(name);
  f << text;
  close(f, dir_ / name);
  files_.push_back(name);
}

void RunOutput::warn(std::string message) { warnings_.push_back(std::move(message)); }

void RunOutput::finish(const nlohmann::json& results) { write_manifest("complete", results); }

void RunOutput::write_manifest(const std::string& status, const nlohmann::json& results) {
  const auto& p = config_.params;
  nlohmann::json m;
  m["sse_lab_version"] = version_string;
  m["status"] = status;
  m["config"] = to_json(config_);
  m["config_hash"] = hash_;
  m["derived"] = {{"gamma", p.gamma()},
                  {"omega_ep", p.omega_ep()},
                  {"omega_sse", p.omega_sse()},
                  {"t_return", p.t_return()}};
  m["started_at"] = started_;
  if (status == "complete") {
    m["finished_at"] = utc_now();
    m["outputs"] = files_;
    m["warnings"] = warnings_;
    m["results"] = results;
  }
  const fs::path path = dir_ / "manifest.json";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string());
  f << m.dump(2) << '\n';
  close(f, path);
}

RunConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  if (j.is_object() && j.contains("config")) {
    RunConfig c = config_from_json(j.at("config"));
    if (j.contains("config_hash") && j.at("config_hash") != config_hash(c))
      throw InvalidArgument(path.string() + ": config_hash does not match its config");
    return c;
  }
  return config_from_json(j);
}

}  // namespace sse::cli
