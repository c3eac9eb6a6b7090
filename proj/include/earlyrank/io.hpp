#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "graph.hpp"
#include "scoring.hpp"
#include "tsv.hpp"

namespace earlyrank {

/// A score table read back from a ranking file, in file order.
struct ScoreTable {
  std::vector<ExternalId> accounts;
  std::vector<double> scores;
  /// Text of the '#' header lines, without the leading "# ".
  std::vector<std::string> comments;
};

/// rank, account_id, score for rows already in rank order; rank starts at 1. Each comment
/// becomes a "# " header line.
inline void write_ranking(std::ostream& out, std::span<const ExternalId> accounts, std::span<const double> scores,
                          std::span<const std::string> comments = {}) {
  for (const auto& c : comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < accounts.size(); ++i) {
    out << i + 1 << '\t' << accounts[i] << '\t' << tsv::format_double(scores[i]) << '\n';
  }
}

inline void write_ranking(std::ostream& out, const FollowGraph& g, const Ranking& ranking,
                          std::span<const std::string> comments = {}) {
  std::vector<ExternalId> accounts;
  std::vector<double> scores;
  for (const auto& e : ranking) {
    accounts.push_back(g.external_id(e.account));
    scores.push_back(e.score);
  }
  write_ranking(out, accounts, scores, comments);
}

inline ScoreTable read_ranking(const std::string& path) {
  ScoreTable table;
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = tsv::strip_cr(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      auto text = view.substr(1);
      if (!text.empty() && text.front() == ' ') text.remove_prefix(1);
      table.comments.emplace_back(text);
      continue;
    }
    const auto f = tsv::split(view);
    const auto where = tsv::location(path, line_no);
    if (f.size() != 3) throw DataError(where + ": expected rank, account_id, score");
    const auto id = tsv::parse_number<ExternalId>(f[1]);
    const auto score = tsv::parse_number<double>(f[2]);
    if (!id || !score) throw DataError(where + ": malformed ranking record");
    table.accounts.push_back(*id);
    table.scores.push_back(*score);
  }
  return table;
}

/// Value of a "key=value" header comment, or empty.
inline std::string comment_value(const ScoreTable& table, const std::string& key) {
  for (const auto& c : table.comments) {
    if (c.rfind(key + "=", 0) == 0) return c.substr(key.size() + 1);
  }
  return {};
}

inline void write_cf_table(std::ostream& out, const FollowGraph& g, std::span<const double> cf) {
  for (NodeId u = 0; u < g.num_nodes(); ++u) out << g.external_id(u) << '\t' << tsv::format_double(cf[u]) << '\n';
}

/// One external account id per line; '#' lines ignored.
inline std::vector<ExternalId> read_account_list(const std::string& path) {
  std::vector<ExternalId> ids;
  tsv::for_each_record(path, [&](std::size_t line, const std::vector<std::string_view>& f) {
    const auto id = tsv::parse_number<ExternalId>(f[0]);
    if (!id || f.size() != 1) throw DataError(tsv::location(path, line) + ": expected one account id");
    ids.push_back(*id);
  });
  return ids;
}

/// Snapshot time declared by a "# snapshot_time=N" header line of a meta file, if any.
inline std::optional<std::int64_t> declared_snapshot_time(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  const std::string_view key = "# snapshot_time=";
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = tsv::strip_cr(line);
    if (view.rfind(key, 0) != 0) continue;
    const auto t = tsv::parse_number<std::int64_t>(view.substr(key.size()));
    if (!t) throw DataError(tsv::location(path, line_no) + ": bad snapshot_time");
    return t;
  }
  return std::nullopt;
}

/// FNV-1a 64 over the file bytes, as 16 hex digits.
inline std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace earlyrank
