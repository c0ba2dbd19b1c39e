#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "svote/errors.hpp"
#include "svote/rules.hpp"

namespace svote {

namespace io_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline u64 parse_u64(std::string_view text, const std::string& what) {
  const std::string t = trim(text);
  u64 v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError(what + ": expected a non-negative decimal integer, got '" + t + "'");
  }
  return v;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace io_detail

// "p13" / "p31" name the two Mersenne fields; anything else is a decimal prime.
inline PrimeModulus parse_prime(const std::string& text) {
  if (text == "p13") return mersenne13();
  if (text == "p31") return mersenne31();
  return PrimeModulus(io_detail::parse_u64(text, "prime"));
}

inline std::string prime_label(const PrimeModulus& m) {
  if (m.value() == mersenne13().value()) return "p13";
  if (m.value() == mersenne31().value()) return "p31";
  return std::to_string(m.value());
}

// Key-value election config:
//   rule = borda            voters = 50
//   candidates = A, B, C    winners = 2
//   range_max = 5           talliers = 3
//   prime = p31             threshold = 1   (default floor((D-1)/2))
//   tiebreak = lowest_index seed = 7
// '#' starts a comment. Candidates are sorted on load.
inline ElectionConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (io_detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = io_detail::trim(std::string_view(line).substr(0, eq));
    if (kv.count(key)) throw ParseError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = io_detail::trim(std::string_view(line).substr(eq + 1));
  }
  auto take = [&](const std::string& key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("config is missing '" + key + "'");
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_or = [&](const std::string& key, std::string fallback) {
    return kv.count(key) ? take(key) : fallback;
  };

  ElectionConfig cfg;
  try {
    cfg.rule = parse_rule(take("rule"));
  } catch (const ConfigError& e) {
    throw ParseError(e.message());
  }
  cfg.voters = io_detail::parse_u64(take("voters"), "voters");
  for (auto& name : io_detail::split(take("candidates"), ',')) {
    if (name.empty()) throw ParseError("empty candidate name");
    cfg.candidates.push_back(name);
  }
  cfg.winners = io_detail::parse_u64(take_or("winners", "1"), "winners");
  cfg.range_max = io_detail::parse_u64(take_or("range_max", "0"), "range_max");
  cfg.talliers = io_detail::parse_u64(take_or("talliers", "3"), "talliers");
  const std::string prime = take_or("prime", "p31");
  try {
    cfg.modulus = parse_prime(prime);
  } catch (const ConfigError&) {
    throw ParseError("prime '" + prime + "' is not a prime");
  }
  const std::string threshold = take_or("threshold", "");
  cfg.threshold = threshold.empty() ? honest_majority_threshold(cfg.talliers)
                                    : io_detail::parse_u64(threshold, "threshold");
  const std::string tiebreak = take_or("tiebreak", "lowest_index");
  if (tiebreak != "lowest_index") throw ParseError("unsupported tiebreak '" + tiebreak + "'");
  cfg.seed = io_detail::parse_u64(take_or("seed", "0"), "seed");
  if (!kv.empty()) throw ParseError("unknown config key '" + kv.begin()->first + "'");
  try {
    cfg.sort_candidates();
  } catch (const ConfigError& e) {
    throw ParseError(e.message());
  }
  return cfg;
}

inline ElectionConfig load_config(const std::string& path) { return parse_config(io_detail::read_file(path)); }

inline std::string format_config(const ElectionConfig& cfg) {
  std::ostringstream out;
  out << "rule = " << rule_name(cfg.rule) << "\n";
  out << "voters = " << cfg.voters << "\n";
  out << "candidates = ";
  for (std::size_t i = 0; i < cfg.candidates.size(); ++i) out << (i ? ", " : "") << cfg.candidates[i];
  out << "\nwinners = " << cfg.winners << "\n";
  if (cfg.rule == Rule::Range) out << "range_max = " << cfg.range_max << "\n";
  out << "talliers = " << cfg.talliers << "\n";
  out << "prime = " << prime_label(cfg.modulus) << "\n";
  out << "threshold = " << cfg.threshold << "\n";
  out << "tiebreak = lowest_index\n";
  out << "seed = " << cfg.seed << "\n";
  return out.str();
}

// One ballot per line: `voter_tag;s1,s2,...,sM`.
inline std::vector<Ballot> parse_ballots(const std::string& text, std::size_t candidates) {
  std::vector<Ballot> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = io_detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto semi = t.find(';');
    const std::string where = "ballot line " + std::to_string(lineno);
    if (semi == std::string::npos) throw ParseError(where + ": expected 'voter_tag;scores'");
    Ballot b;
    b.voter_tag = io_detail::trim(std::string_view(t).substr(0, semi));
    if (b.voter_tag.empty()) throw ParseError(where + ": empty voter tag");
    if (b.voter_tag.size() > 0xffff) throw ParseError(where + ": voter tag too long");
    for (const auto& field : io_detail::split(std::string_view(t).substr(semi + 1), ',')) {
      b.scores.push_back(io_detail::parse_u64(field, where));
    }
    if (b.scores.size() != candidates) {
      throw ParseError(where + ": expected " + std::to_string(candidates) + " scores, got " +
                       std::to_string(b.scores.size()));
    }
    out.push_back(std::move(b));
  }
  return out;
}

inline std::vector<Ballot> load_ballots(const std::string& path, std::size_t candidates) {
  return parse_ballots(io_detail::read_file(path), candidates);
}

inline std::string format_ballots(const std::vector<Ballot>& ballots) {
  std::ostringstream out;
  for (const Ballot& b : ballots) {
    out << b.voter_tag << ';';
    for (std::size_t i = 0; i < b.scores.size(); ++i) out << (i ? "," : "") << b.scores[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace svote
