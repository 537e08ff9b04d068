#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "matchlab/continuum.hpp"

namespace matchlab::exp {

/// One metric value from one replication of one sweep cell.
struct ResultRow {
  std::string experiment;
  int replication = 0;
  Mode mode = Mode::mono;
  int m = 0;
  double beta = 0.0;
  double gamma = 0.0;
  std::optional<int> k_bin;
  std::optional<int> value_bin;
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

using ResultTable = std::vector<ResultRow>;

inline constexpr std::string_view kCsvHeader =
    "experiment,replication,mode,m,beta,gamma,k_bin,value_bin,metric,value,seed";

/// Header plus one LF-terminated line per row; empty fields for absent bins.
void write_csv(std::ostream& out, const ResultTable& table);
std::string to_csv(const ResultTable& table);

/// Throws std::runtime_error naming the line on malformed input.
ResultTable read_csv(std::istream& in);

enum class Column { experiment, replication, mode, m, beta, gamma, k_bin, value_bin, metric, seed };

std::string column_name(Column c);
/// Throws std::invalid_argument for unknown names.
Column parse_column(std::string_view name);
std::string column_value(const ResultRow& row, Column c);

/// Every column except replication and seed.
std::vector<Column> default_group_keys();

struct SummaryRow {
  std::vector<std::string> key;
  double mean = 0.0;
  /// Sample standard deviation over sqrt(count); 0 for a single row.
  double se = 0.0;
  int count = 0;
};

/// Group-by mean and standard error, groups in order of first appearance.
/// Throws std::invalid_argument on an empty table.
std::vector<SummaryRow> summarize(const ResultTable& table, std::span<const Column> group_keys);

void write_summary_csv(std::ostream& out, std::span<const Column> group_keys,
                       const std::vector<SummaryRow>& rows);

/// 64-bit FNV-1a, used for config and CSV fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t x);

}  // namespace matchlab::exp
