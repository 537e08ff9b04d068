#include "matchlab/results.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "matchlab/format.hpp"

namespace matchlab::exp {

namespace {

std::string optional_int(const std::optional<int>& x) { return x ? std::to_string(*x) : std::string(); }

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

void write_csv(std::ostream& out, const ResultTable& table) {
  out << kCsvHeader << '\n';
  for (const auto& r : table) {
    out << r.experiment << ',' << r.replication << ',' << to_string(r.mode) << ',' << r.m << ','
        << format_double(r.beta) << ',' << format_double(r.gamma) << ',' << optional_int(r.k_bin) << ','
        << optional_int(r.value_bin) << ',' << r.metric << ',' << format_double(r.value) << ',' << r.seed
        << '\n';
  }
}

std::string to_csv(const ResultTable& table) {
  std::ostringstream s;
  write_csv(s, table);
  return s.str();
}

ResultTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("line 1: expected header '" + std::string(kCsvHeader) + "'");
  ResultTable table;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    auto bad = [&](const std::string& what) {
      return std::runtime_error("line " + std::to_string(line_no) + ": " + what);
    };
    if (f.size() != 11) throw bad("expected 11 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.experiment = f[0];
    if (!parse_int(f[1], r.replication)) throw bad("bad replication");
    try {
      r.mode = parse_mode(f[2]);
    } catch (const std::invalid_argument& e) {
      throw bad(e.what());
    }
    if (!parse_int(f[3], r.m)) throw bad("bad m");
    if (!parse_double(f[4], r.beta) || !parse_double(f[5], r.gamma)) throw bad("bad beta/gamma");
    int bin = 0;
    if (!f[6].empty()) {
      if (!parse_int(f[6], bin)) throw bad("bad k_bin");
      r.k_bin = bin;
    }
    if (!f[7].empty()) {
      if (!parse_int(f[7], bin)) throw bad("bad value_bin");
      r.value_bin = bin;
    }
    r.metric = f[8];
    if (!parse_double(f[9], r.value)) throw bad("bad value");
    if (!parse_int(f[10], r.seed)) throw bad("bad seed");
    table.push_back(std::move(r));
  }
  return table;
}

std::string column_name(Column c) {
  switch (c) {
    case Column::experiment: return "experiment";
    case Column::replication: return "replication";
    case Column::mode: return "mode";
    case Column::m: return "m";
    case Column::beta: return "beta";
    case Column::gamma: return "gamma";
    case Column::k_bin: return "k_bin";
    case Column::value_bin: return "value_bin";
    case Column::metric: return "metric";
    case Column::seed: return "seed";
  }
  return {};
}

Column parse_column(std::string_view name) {
  for (Column c : {Column::experiment, Column::replication, Column::mode, Column::m, Column::beta, Column::gamma,
                   Column::k_bin, Column::value_bin, Column::metric, Column::seed})
    if (column_name(c) == name) return c;
  throw std::invalid_argument("unknown column '" + std::string(name) + "'");
}

std::string column_value(const ResultRow& row, Column c) {
  switch (c) {
    case Column::experiment: return row.experiment;
    case Column::replication: return std::to_string(row.replication);
    case Column::mode: return to_string(row.mode);
    case Column::m: return std::to_string(row.m);
    case Column::beta: return format_double(row.beta);
    case Column::gamma: return format_double(row.gamma);
    case Column::k_bin: return optional_int(row.k_bin);
    case Column::value_bin: return optional_int(row.value_bin);
    case Column::metric: return row.metric;
    case Column::seed: return std::to_string(row.seed);
  }
  return {};
}

std::vector<Column> default_group_keys() {
  return {Column::experiment, Column::mode,  Column::m,         Column::beta,
          Column::gamma,      Column::k_bin, Column::value_bin, Column::metric};
}

std::vector<SummaryRow> summarize(const ResultTable& table, std::span<const Column> group_keys) {
  if (table.empty()) throw std::invalid_argument("cannot summarize an empty table");

  struct Accumulator {
    int count = 0;
    double mean = 0.0;
    double m2 = 0.0;  // Welford
  };
  std::map<std::vector<std::string>, std::size_t> index;
  std::vector<std::vector<std::string>> keys;
  std::vector<Accumulator> acc;

  for (const auto& row : table) {
    std::vector<std::string> key;
    key.reserve(group_keys.size());
    for (Column c : group_keys) key.push_back(column_value(row, c));
    auto [it, inserted] = index.try_emplace(key, keys.size());
    if (inserted) {
      keys.push_back(key);
      acc.emplace_back();
    }
    auto& a = acc[it->second];
    ++a.count;
    const double delta = row.value - a.mean;
    a.mean += delta / a.count;
    a.m2 += delta * (row.value - a.mean);
  }

  std::vector<SummaryRow> out;
  out.reserve(keys.size());
  for (std::size_t g = 0; g < keys.size(); ++g) {
    const auto& a = acc[g];
    const double sd = a.count > 1 ? std::sqrt(a.m2 / (a.count - 1)) : 0.0;
    out.push_back({keys[g], a.mean, sd / std::sqrt(double(a.count)), a.count});
  }
  return out;
}

void write_summary_csv(std::ostream& out, std::span<const Column> group_keys, const std::vector<SummaryRow>& rows) {
  for (Column c : group_keys) out << column_name(c) << ',';
  out << "mean,se,count\n";
  for (const auto& r : rows) {
    for (const auto& k : r.key) out << k << ',';
    out << format_double(r.mean) << ',' << format_double(r.se) << ',' << r.count << '\n';
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) s[i] = digits[x & 0xF];
  return s;
}

}  // namespace matchlab::exp
