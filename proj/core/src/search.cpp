#include "relatron/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>

#include "relatron/error.hpp"
#include "relatron/metrics.hpp"
#include "relatron/rng.hpp"

namespace relatron {

namespace {

constexpr int kCandidatePool = 24;
constexpr int kStartupTrials = 5;

double numeric_value(const json& v) { return v.get<double>(); }

double to_model_space(double x, const Dimension& dim) {
  return dim.log_scale ? std::log(x) : x;
}

double from_model_space(double x, const Dimension& dim) {
  return dim.log_scale ? std::exp(x) : x;
}

struct DimensionDensity {
  // Categorical: add-one smoothed counts over the declared values.
  std::vector<double> category_prob;
  // Numeric: Gaussian kernels at observations (model space) with a shared
  // bandwidth 1.06 * sigma * n^(-1/5).
  std::vector<double> observations;
  double bandwidth = 1.0;
};

DimensionDensity build_density(const Dimension& dim, const std::vector<const json*>& configs) {
  DimensionDensity density;
  if (dim.kind == Dimension::Kind::Categorical) {
    density.category_prob.assign(dim.values.size(), 1.0);  // add-one smoothing
    double total = static_cast<double>(dim.values.size());
    for (const json* config : configs) {
      const json& v = config->at(dim.name);
      for (std::size_t i = 0; i < dim.values.size(); ++i) {
        if (dim.values[i] == v) {
          density.category_prob[i] += 1.0;
          total += 1.0;
          break;
        }
      }
    }
    for (double& p : density.category_prob) p /= total;
    return density;
  }

  for (const json* config : configs) {
    density.observations.push_back(to_model_space(numeric_value(config->at(dim.name)), dim));
  }
  const double n = static_cast<double>(density.observations.size());
  const double lo = to_model_space(dim.low, dim);
  const double hi = to_model_space(dim.high, dim);
  double sigma = 0.0;
  if (!density.observations.empty()) {
    double mean = 0.0;
    for (double x : density.observations) mean += x;
    mean /= n;
    for (double x : density.observations) sigma += (x - mean) * (x - mean);
    sigma = std::sqrt(sigma / n);
  }
  density.bandwidth = 1.06 * sigma * std::pow(std::max(n, 1.0), -0.2);
  if (density.bandwidth <= 0.0) {
    density.bandwidth = std::max((hi - lo) / 20.0, 1e-12);
  }
  return density;
}

double density_pdf(const DimensionDensity& density, const Dimension& dim, const json& value) {
  if (dim.kind == Dimension::Kind::Categorical) {
    for (std::size_t i = 0; i < dim.values.size(); ++i) {
      if (dim.values[i] == value) return density.category_prob[i];
    }
    return 1e-12;
  }
  if (density.observations.empty()) {
    const double lo = to_model_space(dim.low, dim);
    const double hi = to_model_space(dim.high, dim);
    return hi > lo ? 1.0 / (hi - lo) : 1.0;
  }
  const double x = to_model_space(numeric_value(value), dim);
  const double h = density.bandwidth;
  double acc = 0.0;
  for (double obs : density.observations) {
    const double z = (x - obs) / h;
    acc += std::exp(-0.5 * z * z);
  }
  return acc / (density.observations.size() * h * std::sqrt(2.0 * M_PI)) + 1e-300;
}

json sample_dimension_uniform(const Dimension& dim, Rng& rng) {
  if (dim.kind == Dimension::Kind::Categorical) {
    return dim.values[rng.next_below(dim.values.size())];
  }
  const double lo = to_model_space(dim.low, dim);
  const double hi = to_model_space(dim.high, dim);
  return from_model_space(lo + (hi - lo) * rng.next_double(), dim);
}

json sample_dimension_good(const Dimension& dim, const DimensionDensity& density, Rng& rng) {
  if (dim.kind == Dimension::Kind::Categorical) {
    double u = rng.next_double();
    for (std::size_t i = 0; i < dim.values.size(); ++i) {
      u -= density.category_prob[i];
      if (u <= 0.0) return dim.values[i];
    }
    return dim.values.back();
  }
  if (density.observations.empty()) {
    return sample_dimension_uniform(dim, rng);
  }
  const double center = density.observations[rng.next_below(density.observations.size())];
  const double lo = to_model_space(dim.low, dim);
  const double hi = to_model_space(dim.high, dim);
  const double x = std::clamp(center + density.bandwidth * rng.next_gaussian(), lo, hi);
  return from_model_space(x, dim);
}

}  // namespace

bool SearchSpace::finite() const {
  for (const Dimension& dim : dimensions) {
    if (dim.kind != Dimension::Kind::Categorical) return false;
  }
  return !dimensions.empty();
}

std::size_t SearchSpace::size() const {
  if (!finite()) return 0;
  std::size_t total = 1;
  for (const Dimension& dim : dimensions) total *= dim.values.size();
  return total;
}

json SearchSpace::config_at(std::size_t index) const {
  json config = json::object();
  for (const Dimension& dim : dimensions) {
    config[dim.name] = dim.values[index % dim.values.size()];
    index /= dim.values.size();
  }
  return config;
}

bool SearchSpace::contains(const json& config) const {
  for (const Dimension& dim : dimensions) {
    if (!config.contains(dim.name)) return false;
    const json& v = config.at(dim.name);
    if (dim.kind == Dimension::Kind::Categorical) {
      if (std::find(dim.values.begin(), dim.values.end(), v) == dim.values.end()) {
        return false;
      }
    } else {
      const double x = numeric_value(v);
      if (x < dim.low || x > dim.high) return false;
    }
  }
  return true;
}

SearchSpace space_from_json(const json& doc) {
  SearchSpace space;
  for (const auto& d : doc.at("dimensions")) {
    Dimension dim;
    dim.name = d.at("name").get<std::string>();
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "categorical") {
      dim.kind = Dimension::Kind::Categorical;
      dim.values = d.at("values").get<std::vector<json>>();
      if (dim.values.empty()) {
        throw Error(ErrorCode::EmptySpace, dim.name + " has no values");
      }
    } else if (kind == "numeric") {
      dim.kind = Dimension::Kind::Numeric;
      dim.low = d.at("low").get<double>();
      dim.high = d.at("high").get<double>();
      dim.log_scale = d.value("log", false);
      if (!(dim.high > dim.low) || (dim.log_scale && dim.low <= 0.0)) {
        throw Error(ErrorCode::EmptySpace, dim.name + " has an invalid range");
      }
    } else {
      throw Error(ErrorCode::ParseError, "unknown dimension kind: " + kind);
    }
    space.dimensions.push_back(std::move(dim));
  }
  if (space.dimensions.empty()) {
    throw Error(ErrorCode::EmptySpace, "space has no dimensions");
  }
  return space;
}

ordered_json space_to_json(const SearchSpace& space) {
  ordered_json doc;
  ordered_json dims = ordered_json::array();
  for (const Dimension& dim : space.dimensions) {
    ordered_json d;
    d["name"] = dim.name;
    if (dim.kind == Dimension::Kind::Categorical) {
      d["kind"] = "categorical";
      d["values"] = dim.values;
    } else {
      d["kind"] = "numeric";
      d["low"] = dim.low;
      d["high"] = dim.high;
      d["log"] = dim.log_scale;
    }
    dims.push_back(std::move(d));
  }
  doc["dimensions"] = std::move(dims);
  return doc;
}

std::vector<json> suggest_random(const SearchSpace& space, int n, std::uint64_t seed) {
  if (space.dimensions.empty()) {
    throw Error(ErrorCode::EmptySpace, "empty search space");
  }
  std::vector<json> out;
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::from_key(seed, {0xA0, static_cast<std::uint64_t>(i)});
    json config = json::object();
    for (const Dimension& dim : space.dimensions) {
      config[dim.name] = sample_dimension_uniform(dim, rng);
    }
    out.push_back(std::move(config));
  }
  return out;
}

std::vector<json> suggest_tpe(const SearchSpace& space, const std::vector<Trial>& history,
                              int n, double gamma, std::uint64_t seed) {
  if (space.dimensions.empty()) {
    throw Error(ErrorCode::EmptySpace, "empty search space");
  }
  if (static_cast<int>(history.size()) < kStartupTrials) {
    return suggest_random(space, n, seed);
  }

  // Direction-aware split at the gamma quantile.
  std::vector<std::size_t> order(history.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const bool higher = history.front().higher_is_better;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher ? history[a].objective > history[b].objective
                  : history[a].objective < history[b].objective;
  });
  const std::size_t n_good = std::max<std::size_t>(
      1, static_cast<std::size_t>(gamma * static_cast<double>(history.size())));
  std::vector<const json*> good, bad;
  for (std::size_t r = 0; r < order.size(); ++r) {
    (r < n_good ? good : bad).push_back(&history[order[r]].config);
  }

  std::vector<DimensionDensity> good_density, bad_density;
  for (const Dimension& dim : space.dimensions) {
    good_density.push_back(build_density(dim, good));
    bad_density.push_back(build_density(dim, bad));
  }

  struct Scored {
    json config;
    double ratio;
    int index;
  };
  std::vector<Scored> candidates;
  for (int c = 0; c < kCandidatePool; ++c) {
    Rng rng = Rng::from_key(seed, {0xA1, static_cast<std::uint64_t>(c),
                                   static_cast<std::uint64_t>(history.size())});
    json config = json::object();
    double log_ratio = 0.0;
    for (std::size_t d = 0; d < space.dimensions.size(); ++d) {
      const Dimension& dim = space.dimensions[d];
      json value = sample_dimension_good(dim, good_density[d], rng);
      log_ratio += std::log(density_pdf(good_density[d], dim, value)) -
                   std::log(density_pdf(bad_density[d], dim, value));
      config[dim.name] = std::move(value);
    }
    candidates.push_back({std::move(config), log_ratio, c});
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Scored& a, const Scored& b) {
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    return a.index < b.index;
  });

  std::vector<json> out;
  for (int i = 0; i < n && i < static_cast<int>(candidates.size()); ++i) {
    out.push_back(candidates[static_cast<std::size_t>(i)].config);
  }
  return out;
}

ReplayResult replay_hpo(const SearchSpace& space, const Evaluator& evaluate, int budget,
                        Generator generator, std::uint64_t seed) {
  if (space.dimensions.empty()) {
    throw Error(ErrorCode::EmptySpace, "empty search space");
  }
  if (budget < 1) {
    throw Error(ErrorCode::InvalidArgument, "budget must be >= 1");
  }

  ReplayResult result;
  std::set<std::string> evaluated;
  const bool finite = space.finite();
  const std::size_t space_size = finite ? space.size() : 0;

  int stale_rounds = 0;
  std::uint64_t round = 0;
  while (static_cast<int>(result.trajectory.size()) < budget) {
    if (finite && evaluated.size() >= space_size) break;  // space exhausted

    const int want = budget - static_cast<int>(result.trajectory.size());
    std::vector<json> batch;
    const std::uint64_t batch_seed = derive_key(seed, {0xB0, round++});
    if (generator == Generator::Random) {
      batch = suggest_random(space, want, batch_seed);
    } else {
      batch = suggest_tpe(space, result.trajectory, want, 0.25, batch_seed);
    }

    bool progressed = false;
    for (json& config : batch) {
      if (static_cast<int>(result.trajectory.size()) >= budget) break;
      const std::string sig = config_signature(config, {});
      if (!evaluated.insert(sig).second) continue;  // duplicate suggestion
      Trial trial = evaluate(config);
      trial.config = std::move(config);
      result.trajectory.push_back(std::move(trial));
      progressed = true;
    }
    if (!progressed) {
      if (++stale_rounds >= 8) {
        if (finite) {
          // Deterministic sweep over the remaining configs.
          for (std::size_t i = 0;
               i < space_size && static_cast<int>(result.trajectory.size()) < budget; ++i) {
            json config = space.config_at(i);
            const std::string sig = config_signature(config, {});
            if (!evaluated.insert(sig).second) continue;
            Trial trial = evaluate(config);
            trial.config = std::move(config);
            result.trajectory.push_back(std::move(trial));
          }
        }
        break;
      }
    } else {
      stale_rounds = 0;
    }
  }

  if (result.trajectory.empty()) {
    throw Error(ErrorCode::EmptySpace, "no trial evaluated");
  }

  // Validation-selected incumbent.
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.trajectory.size(); ++i) {
    if (score_better(result.trajectory[i].objective, result.trajectory[best].objective,
                     result.trajectory[i].higher_is_better)) {
      best = i;
    }
  }
  result.best_config = result.trajectory[best].config;
  result.best_objective = result.trajectory[best].objective;
  result.best_test_score = result.trajectory[best].test_score;
  result.selected_config = result.best_config;

  // Landscape refinement among the top-3 validation trials when all carry
  // metrics.
  std::vector<std::size_t> order(result.trajectory.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return score_better(result.trajectory[a].objective, result.trajectory[b].objective,
                        result.trajectory[a].higher_is_better);
  });
  std::vector<landscape::Candidate> candidates;
  for (std::size_t r = 0; r < std::min<std::size_t>(3, order.size()); ++r) {
    const Trial& trial = result.trajectory[order[r]];
    if (!trial.metrics) {
      candidates.clear();
      break;
    }
    landscape::Candidate candidate;
    candidate.id = std::to_string(order[r]);
    candidate.family = "trial";
    candidate.val_score = trial.objective;
    candidate.higher_is_better = trial.higher_is_better;
    candidate.metrics = *trial.metrics;
    candidates.push_back(std::move(candidate));
  }
  if (!candidates.empty()) {
    const std::size_t chosen =
        static_cast<std::size_t>(std::stoul(landscape::post_select(candidates)));
    result.selected_config = result.trajectory[chosen].config;
    result.post_selected = true;
  }
  return result;
}

SearchSpace space_from_bank(const Bank& bank, const std::string& task,
                            const std::optional<std::string>& family) {
  std::map<std::string, std::set<std::string>> seen;  // key -> value dumps
  std::map<std::string, std::vector<json>> values;
  for (const BankRecord& record : bank.records) {
    if (record.task != task) continue;
    if (family && record.family != *family) continue;
    for (const auto& [key, value] : record.config.items()) {
      if (seen[key].insert(value.dump()).second) {
        values[key].push_back(value);
      }
    }
  }
  if (values.empty()) {
    throw Error(ErrorCode::EmptySpace,
                task + (family ? " (" + *family + ")" : "") + " has no recorded configs");
  }
  SearchSpace space;
  for (auto& [key, vals] : values) {
    Dimension dim;
    dim.name = key;
    dim.kind = Dimension::Kind::Categorical;
    std::sort(vals.begin(), vals.end(),
              [](const json& a, const json& b) { return a.dump() < b.dump(); });
    dim.values = vals;
    space.dimensions.push_back(std::move(dim));
  }
  return space;
}

Evaluator bank_evaluator(const Bank& bank, const std::string& task,
                         const std::optional<std::string>& family) {
  // Snapshot of matching records.
  auto records = std::make_shared<std::vector<BankRecord>>();
  for (const BankRecord& record : bank.records) {
    if (record.task != task) continue;
    if (family && record.family != *family) continue;
    records->push_back(record);
  }
  if (records->empty()) {
    throw Error(ErrorCode::EmptySpace, task + " has no bank records");
  }
  return [records](const json& config) {
    const std::string wanted = config_signature(config, {});
    const BankRecord* best = nullptr;
    std::size_t best_distance = ~std::size_t{0};
    for (const BankRecord& record : *records) {
      if (config_signature(record.config, {}) == wanted) {
        best = &record;
        break;
      }
      // Nearest by number of differing keys.
      std::size_t distance = 0;
      for (const auto& [key, value] : config.items()) {
        if (!record.config.contains(key) || record.config.at(key) != value) ++distance;
      }
      for (const auto& [key, value] : record.config.items()) {
        if (!config.contains(key)) ++distance;
      }
      if (distance < best_distance) {
        best_distance = distance;
        best = &record;
      }
    }
    Trial trial;
    trial.config = config;
    trial.objective = best->val_score;
    trial.higher_is_better = best->higher_is_better;
    trial.test_score = best->test_score;
    return trial;
  };
}

}  // namespace relatron
