#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pcn/errors.hpp"
#include "pcn/experiment.hpp"

namespace pcn {

namespace {

constexpr std::string_view kPaymentsHeader = "id,source_user,destination,amount";
constexpr std::string_view kKeyHeader = "strategy,connections,amount_min,amount_max,imbalance,seed";
constexpr std::string_view kMetricNames[] = {"success_rate", "avg_relative_fee", "avg_hop_count",
                                             "final_imbalance"};

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string key_columns(StrategyKind strategy, int connections, double amount_min, double amount_max,
                        double imbalance, std::uint64_t seed) {
  std::string out(to_string(strategy));
  out += ',' + std::to_string(connections);
  out += ',' + fixed(amount_min, 6);
  out += ',' + fixed(amount_max, 6);
  out += ',' + fixed(imbalance, 6);
  out += ',' + std::to_string(seed);
  return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

template <typename T>
T parse_field(std::string_view field, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError("payments line " + std::to_string(line_no) + ": bad field '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> trials) {
  out << kKeyHeader;
  for (const auto name : kMetricNames) out << ',' << name;
  out << '\n';
  for (const auto& t : trials) {
    out << key_columns(t.strategy, t.connections, t.amount_min, t.amount_max, t.imbalance, t.seed) << ','
        << fixed(t.metrics.success_rate, 9) << ',' << fixed(t.metrics.avg_relative_fee, 9) << ','
        << fixed(t.metrics.avg_hop_count, 9) << ',' << fixed(t.metrics.final_imbalance, 9) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
  out << kKeyHeader << ",trials";
  for (const auto name : kMetricNames) out << ',' << name << "_mean," << name << "_stddev";
  out << '\n';
  for (const auto& r : rows) {
    out << key_columns(r.strategy, r.connections, r.amount_min, r.amount_max, r.imbalance, r.seed) << ','
        << r.trials;
    for (const auto* m : {&r.success_rate, &r.avg_relative_fee, &r.avg_hop_count, &r.final_imbalance}) {
      out << ',' << fixed(m->mean, 9) << ',' << fixed(m->stddev, 9);
    }
    out << '\n';
  }
}

void write_payments_csv(std::ostream& out, std::span<const PaymentRequest> payments) {
  out << kPaymentsHeader << '\n';
  for (const auto& p : payments) {
    out << p.id << ',' << p.source_user.value << ',' << p.destination.value << ',' << fixed(p.amount, 6) << '\n';
  }
}

std::vector<PaymentRequest> read_payments_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kPaymentsHeader) {
    throw ParseError("payments file must start with header '" + std::string(kPaymentsHeader) + "'");
  }
  std::vector<PaymentRequest> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) throw ParseError("payments line " + std::to_string(line_no) + ": expected 4 fields");
    PaymentRequest req;
    req.id = parse_field<std::uint64_t>(fields[0], line_no);
    req.source_user = UserId{parse_field<std::uint32_t>(fields[1], line_no)};
    req.destination = NodeId{parse_field<std::uint32_t>(fields[2], line_no)};
    req.amount = parse_field<double>(fields[3], line_no);
    if (!(req.amount > 0.0)) throw ParseError("payments line " + std::to_string(line_no) + ": amount must be > 0");
    out.push_back(req);
  }
  return out;
}

}  // namespace pcn
