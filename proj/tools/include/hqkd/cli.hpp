#pragma once

// Command layer behind the hqkd executable. Requests are plain string maps so
// they can be embedded in a report and replayed later.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace hqkd::cli {

using Json = nlohmann::ordered_json;

enum class Format { human, csv, json };

Format parse_format(std::string_view name);

struct CommandRequest {
  std::string subcommand;
  std::map<std::string, std::string> params;
  Format format = Format::human;
  // Side output of `run`; not part of the replayable request.
  std::optional<std::string> transcript_path;
};

struct Provenance {
  std::optional<std::uint64_t> seed;
  std::string config_hash;  // FNV-1a 64 of the canonical request, hex
  std::string version;
  Json request;             // {"subcommand": ..., "params": {...}}
};

struct ReportDocument {
  std::string subcommand;
  Json payload;
  Provenance provenance;
  int exit_code = 0;  // 3 for a vulnerable verdict under screen-basis --strict
};

// Parameters that name a file accept "inline:<contents>" in place of a path;
// basis parameters also accept the built-in names 202, bell, 004 and 400.
// Throws hqkd::Error subclasses on validation failures.
ReportDocument execute(const CommandRequest& request);

std::string render(const ReportDocument& doc, Format format);

// Inverse of render(doc, Format::json).
ReportDocument parse_report(std::string_view text);

CommandRequest request_from_json(const Json& request);

std::string version();

}  // namespace hqkd::cli
