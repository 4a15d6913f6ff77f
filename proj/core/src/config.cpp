#include "pcn/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pcn/errors.hpp"

namespace pcn {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ParseError("bad value for '" + std::string(key) + "': '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ParseError("bad boolean for '" + std::string(key) + "': '" + std::string(value) + "'");
}

void apply_assignment(ExperimentConfig& cfg, std::string_view assignment, const std::string& where) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ParseError(where + ": expected key = value");
  const auto key = trim(assignment.substr(0, eq));
  const auto value = trim(assignment.substr(eq + 1));
  if (key.empty()) throw ParseError(where + ": empty key");
  try {
    apply_config_value(cfg, key, value);
  } catch (const UnknownKey& e) {
    throw UnknownKey(where + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

}  // namespace

void apply_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "nodes") {
    cfg.nodes = parse_number<int>(key, value);
  } else if (key == "degree") {
    cfg.degree = parse_number<int>(key, value);
  } else if (key == "cap_min") {
    cfg.cap_min = parse_number<double>(key, value);
  } else if (key == "cap_max") {
    cfg.cap_max = parse_number<double>(key, value);
  } else if (key == "payments") {
    cfg.payments = parse_number<int>(key, value);
  } else if (key == "amount_min") {
    cfg.amount_min = parse_number<double>(key, value);
  } else if (key == "amount_max") {
    cfg.amount_max = parse_number<double>(key, value);
  } else if (key == "connections") {
    cfg.connections = parse_number<int>(key, value);
  } else if (key == "imbalance") {
    cfg.imbalance = parse_number<double>(key, value);
  } else if (key == "fee_rate") {
    cfg.fee_rate = parse_number<double>(key, value);
  } else if (key == "strategy") {
    const auto kind = parse_strategy(value);
    if (!kind) throw ParseError("unknown strategy '" + std::string(value) + "'");
    cfg.strategy = *kind;
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "replications") {
    cfg.replications = parse_number<int>(key, value);
  } else if (key == "track_user_channels") {
    cfg.track_user_channels = parse_bool(key, value);
  } else if (key == "ratio_argmin") {
    cfg.ratio_argmin = parse_bool(key, value);
  } else {
    throw UnknownKey("unknown key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config_text(std::string_view text, std::span<const std::string> overrides) {
  ExperimentConfig cfg;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    apply_assignment(cfg, line, "line " + std::to_string(line_no));
  }
  for (const auto& o : overrides) apply_assignment(cfg, o, "override '" + o + "'");

  try {
    cfg.validate();
  } catch (const InvalidConfig& e) {
    throw ValidationError(e.what());
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), overrides);
}

}  // namespace pcn
