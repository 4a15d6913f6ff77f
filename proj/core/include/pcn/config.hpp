#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "pcn/experiment.hpp"

namespace pcn {

/// Applies one `key=value` assignment. Throws UnknownKey or ParseError.
void apply_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines (`#` starts a comment), then applies
/// `overrides` (each `KEY=VALUE`), then validates. Absent keys keep their
/// defaults. Throws ParseError, UnknownKey or ValidationError.
ExperimentConfig parse_config_text(std::string_view text, std::span<const std::string> overrides = {});

/// Reads `path` and forwards to parse_config_text. Throws ParseError when the
/// file cannot be read.
ExperimentConfig parse_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});

}  // namespace pcn
