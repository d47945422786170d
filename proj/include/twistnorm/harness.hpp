#pragma once

// Run configuration, the verification pipelines and their JSONL reports.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "twistnorm/solver.hpp"

namespace twistnorm {

struct RunConfig {
  unsigned p = 3;
  unsigned d = 1;
  std::optional<unsigned> j_size;
  std::vector<std::array<long, 5>> curves;                  // `curve` or `curves`
  std::vector<std::vector<std::vector<i64>>> family;        // one d x d matrix per label
  std::vector<std::string> labels;
  std::vector<unsigned> n{1};
  unsigned s = 0;
  std::optional<unsigned> max_level;
  unsigned precision = 20;
  unsigned depth = 0;
  bool stability = false;
  unsigned samples = 25;
  std::uint64_t seed = 20240917;
};

/// Flat `key = value` lines; values are integers, booleans, strings or arrays of those.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
void validate_config(const RunConfig& cfg);
nlohmann::json config_json(const RunConfig& cfg);

class Report {
 public:
  void add(nlohmann::json record, double seconds);
  void append(const Report& other);
  const std::vector<nlohmann::json>& records() const { return records_; }

  /// One record per line; timings included unless canonical.
  std::string jsonl(bool canonical = false) const;
  std::string summary() const;
  /// Every non-informational record passed.
  bool all_pass() const;

 private:
  std::vector<nlohmann::json> records_;
};

nlohmann::json structure_json(const AbGroupStructure& g);

enum class FamilyPath { automatic, general, singleton };

/// The twist family a config describes; a single label goes through TwistFamily::singleton unless forced.
TwistFamily family_from_config(const RunConfig& cfg, FamilyPath path = FamilyPath::automatic);

Report verify_theorem1(const RunConfig& cfg, FamilyPath path = FamilyPath::automatic);
Report verify_theorem0(const RunConfig& cfg, FamilyPath path = FamilyPath::automatic);
Report probe_norm_surjectivity(const RunConfig& cfg);
/// The norm-quotient identity over n = 1..max_n and u in {2, 1 + p, 1 + p^2, 1 + p^3}.
Report sweep(unsigned p, unsigned max_n, bool stability, unsigned precision = 20);

}  // namespace twistnorm
