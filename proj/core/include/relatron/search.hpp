#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relatron/bank.hpp"
#include "relatron/io.hpp"
#include "relatron/landscape.hpp"

namespace relatron {

struct Dimension {
  enum class Kind { Categorical, Numeric };
  std::string name;
  Kind kind = Kind::Categorical;
  std::vector<json> values;  // categorical choices
  double low = 0.0;          // numeric range
  double high = 1.0;
  bool log_scale = false;
};

struct SearchSpace {
  std::vector<Dimension> dimensions;

  bool finite() const;        // all dimensions categorical
  std::size_t size() const;   // product of choice counts when finite
  json config_at(std::size_t index) const;  // enumeration order for finite spaces
  bool contains(const json& config) const;
};

SearchSpace space_from_json(const json& doc);
ordered_json space_to_json(const SearchSpace& space);

struct Trial {
  json config;
  double objective = 0.0;  // validation score
  bool higher_is_better = true;
  std::optional<double> test_score;
  std::optional<landscape::LandscapeMetrics> metrics;
};

std::vector<json> suggest_random(const SearchSpace& space, int n, std::uint64_t seed);

// Per-dimension Parzen density-ratio sampler: below 5 observations it falls
// back to uniform sampling; otherwise the history splits at the gamma
// quantile into good/bad sets, 24 candidates are drawn from the good density
// and ranked by good/bad density ratio.
std::vector<json> suggest_tpe(const SearchSpace& space, const std::vector<Trial>& history,
                              int n, double gamma, std::uint64_t seed);

enum class Generator { Random, Tpe };

using Evaluator = std::function<Trial(const json& config)>;

struct ReplayResult {
  std::vector<Trial> trajectory;
  json best_config;
  double best_objective = 0.0;
  std::optional<double> best_test_score;
  json selected_config;  // after optional landscape post-selection
  bool post_selected = false;
};

// Budget-limited replay search. Already-evaluated configs are skipped so an
// exhaustive budget covers a finite space exactly; when the top-3 validation
// trials carry landscape metrics the final choice is refined by hard voting.
ReplayResult replay_hpo(const SearchSpace& space, const Evaluator& evaluate, int budget,
                        Generator generator, std::uint64_t seed);

// Space spanned by the recorded configs of one task (optionally one family):
// each key becomes a categorical dimension over its observed values.
SearchSpace space_from_bank(const Bank& bank, const std::string& task,
                            const std::optional<std::string>& family = std::nullopt);

// Looks up the bank record with the nearest config signature (exact match
// first, then fewest differing keys); returns its scores as the trial result.
Evaluator bank_evaluator(const Bank& bank, const std::string& task,
                         const std::optional<std::string>& family = std::nullopt);

}  // namespace relatron
