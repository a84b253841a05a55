#include "relatron/landscape.hpp"

#include <algorithm>
#include <cmath>

#include "relatron/error.hpp"

namespace relatron {
namespace landscape {

namespace {

int find_zero(const std::vector<double>& xs, double scale) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i]) <= 1e-12 * std::max(1.0, scale)) return static_cast<int>(i);
  }
  return -1;
}

// Bilinear interpolation on the (s, t) grid; clamps to the hull.
double interp(const LossSurfaceGrid& grid, double x, double y) {
  const auto locate = [](const std::vector<double>& xs, double v) {
    std::size_t lo = 0;
    if (v <= xs.front()) return lo;
    if (v >= xs.back()) return xs.size() - 2;
    while (lo + 2 < xs.size() && xs[lo + 1] <= v) ++lo;
    return lo;
  };
  const std::size_t i = locate(grid.s, x);
  const std::size_t j = locate(grid.t, y);
  const double u = std::clamp((x - grid.s[i]) / (grid.s[i + 1] - grid.s[i]), 0.0, 1.0);
  const double v = std::clamp((y - grid.t[j]) / (grid.t[j + 1] - grid.t[j]), 0.0, 1.0);
  return (1 - u) * (1 - v) * grid.losses[i][j] + u * (1 - v) * grid.losses[i + 1][j] +
         (1 - u) * v * grid.losses[i][j + 1] + u * v * grid.losses[i + 1][j + 1];
}

}  // namespace

void LossSurfaceGrid::validate() {
  if (s.size() < 3 || t.size() < 3) {
    throw Error(ErrorCode::IrregularGrid, "grid needs >= 3 points per axis");
  }
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1])) {
      throw Error(ErrorCode::NonMonotoneGrid, "s coordinates not strictly increasing");
    }
  }
  for (std::size_t j = 1; j < t.size(); ++j) {
    if (!(t[j] > t[j - 1])) {
      throw Error(ErrorCode::NonMonotoneGrid, "t coordinates not strictly increasing");
    }
  }
  center_i = find_zero(s, std::abs(s.back()));
  center_j = find_zero(t, std::abs(t.back()));
  if (center_i < 0 || center_j < 0) {
    throw Error(ErrorCode::MissingCenter, "grid does not contain (0, 0)");
  }
  if (losses.size() != s.size()) {
    throw Error(ErrorCode::ParseError, "loss matrix rows != |s|");
  }
  for (const auto& row : losses) {
    if (row.size() != t.size()) {
      throw Error(ErrorCode::ParseError, "loss matrix cols != |t|");
    }
    for (double L : row) {
      if (!std::isfinite(L)) {
        throw Error(ErrorCode::NonFiniteLoss, "NaN/inf loss value");
      }
    }
  }
  const double center =
      losses[static_cast<std::size_t>(center_i)][static_cast<std::size_t>(center_j)];
  if (std::abs(center - base_loss) > 1e-9 * std::max(1.0, std::abs(base_loss))) {
    throw Error(ErrorCode::InconsistentRay, "loss at (0,0) disagrees with base loss");
  }
  for (const Ray& ray : rays) {
    if (ray.i < 0 || ray.i >= static_cast<int>(s.size()) || ray.j < 0 ||
        ray.j >= static_cast<int>(t.size())) {
      throw Error(ErrorCode::InconsistentRay, "ray endpoint outside grid");
    }
    if (ray.ts.size() != ray.losses.size() || ray.ts.size() < 2) {
      throw Error(ErrorCode::InconsistentRay, "ray needs matched ts/losses with >= 2 samples");
    }
    bool has0 = false, has1 = false;
    for (std::size_t k = 0; k < ray.ts.size(); ++k) {
      if (!std::isfinite(ray.losses[k])) {
        throw Error(ErrorCode::NonFiniteLoss, "NaN/inf ray loss");
      }
      const double tol = 1e-9 * std::max(1.0, std::abs(base_loss));
      if (std::abs(ray.ts[k]) <= 1e-12) {
        has0 = true;
        if (std::abs(ray.losses[k] - base_loss) > tol) {
          throw Error(ErrorCode::InconsistentRay, "ray start disagrees with base loss");
        }
      }
      if (std::abs(ray.ts[k] - 1.0) <= 1e-12) {
        has1 = true;
        const double grid_loss =
            losses[static_cast<std::size_t>(ray.i)][static_cast<std::size_t>(ray.j)];
        if (std::abs(ray.losses[k] - grid_loss) > tol) {
          throw Error(ErrorCode::InconsistentRay, "ray end disagrees with grid loss");
        }
      }
    }
    if (!has0 || !has1) {
      throw Error(ErrorCode::InconsistentRay, "ray must sample t = 0 and t = 1");
    }
  }
}

LossSurfaceGrid surface_from_json(const json& doc) {
  check_format_version(doc, "surface");
  LossSurfaceGrid grid;
  grid.rho = doc.value("rho", 0.0);
  grid.s = doc.at("s").get<std::vector<double>>();
  grid.t = doc.at("t").get<std::vector<double>>();
  grid.losses = doc.at("L").get<std::vector<std::vector<double>>>();
  if (doc.at("base_loss").is_null()) {
    throw Error(ErrorCode::NonFiniteLoss, "null base loss");
  }
  grid.base_loss = doc.at("base_loss").get<double>();
  grid.family = doc.value("family", std::string("rdl"));
  if (doc.contains("rays")) {
    for (const auto& r : doc["rays"]) {
      Ray ray;
      ray.i = r.at("i").get<int>();
      ray.j = r.at("j").get<int>();
      ray.ts = r.at("ts").get<std::vector<double>>();
      ray.losses = r.at("Ls").get<std::vector<double>>();
      grid.rays.push_back(std::move(ray));
    }
  }
  grid.validate();
  return grid;
}

LossSurfaceGrid load_surface(const std::string& path) {
  json doc = load_json(path);
  // JSON null loss values parse as NaN only via explicit handling; reject early.
  if (doc.contains("L")) {
    for (const auto& row : doc["L"]) {
      for (const auto& cell : row) {
        if (cell.is_null()) {
          throw Error(ErrorCode::NonFiniteLoss, path + ": null loss cell");
        }
      }
    }
  }
  return surface_from_json(doc);
}

double p1(const LossSurfaceGrid& grid) {
  double worst = 0.0;
  const int ni = static_cast<int>(grid.s.size());
  const int nj = static_cast<int>(grid.t.size());
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < nj; ++j) {
      if (i + 1 < ni) {
        const double dist = grid.s[static_cast<std::size_t>(i + 1)] -
                            grid.s[static_cast<std::size_t>(i)];
        worst = std::max(worst, std::abs(grid.losses[static_cast<std::size_t>(i + 1)]
                                                    [static_cast<std::size_t>(j)] -
                                         grid.losses[static_cast<std::size_t>(i)]
                                                    [static_cast<std::size_t>(j)]) /
                                    dist);
      }
      if (j + 1 < nj) {
        const double dist = grid.t[static_cast<std::size_t>(j + 1)] -
                            grid.t[static_cast<std::size_t>(j)];
        worst = std::max(worst, std::abs(grid.losses[static_cast<std::size_t>(i)]
                                                    [static_cast<std::size_t>(j + 1)] -
                                         grid.losses[static_cast<std::size_t>(i)]
                                                    [static_cast<std::size_t>(j)]) /
                                    dist);
      }
    }
  }
  return worst;
}

double p2(const LossSurfaceGrid& grid) {
  const int i0 = grid.center_i;
  const int j0 = grid.center_j;
  if (i0 < 1 || i0 + 1 >= static_cast<int>(grid.s.size()) || j0 < 1 ||
      j0 + 1 >= static_cast<int>(grid.t.size())) {
    throw Error(ErrorCode::IrregularGrid, "center must have neighbors on both sides");
  }
  const double hs_lo = grid.s[static_cast<std::size_t>(i0)] -
                       grid.s[static_cast<std::size_t>(i0 - 1)];
  const double hs_hi = grid.s[static_cast<std::size_t>(i0 + 1)] -
                       grid.s[static_cast<std::size_t>(i0)];
  const double ht_lo = grid.t[static_cast<std::size_t>(j0)] -
                       grid.t[static_cast<std::size_t>(j0 - 1)];
  const double ht_hi = grid.t[static_cast<std::size_t>(j0 + 1)] -
                       grid.t[static_cast<std::size_t>(j0)];
  if (std::abs(hs_lo - hs_hi) > 1e-9 * std::max(hs_lo, hs_hi) ||
      std::abs(ht_lo - ht_hi) > 1e-9 * std::max(ht_lo, ht_hi)) {
    throw Error(ErrorCode::IrregularGrid, "non-uniform spacing near center");
  }
  const double hs = hs_hi;
  const double ht = ht_hi;
  auto L = [&](int i, int j) {
    return grid.losses[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  };
  const double l_ss = (L(i0 + 1, j0) - 2.0 * L(i0, j0) + L(i0 - 1, j0)) / (hs * hs);
  const double l_tt = (L(i0, j0 + 1) - 2.0 * L(i0, j0) + L(i0, j0 - 1)) / (ht * ht);
  const double l_st =
      (L(i0 + 1, j0 + 1) - L(i0 + 1, j0 - 1) - L(i0 - 1, j0 + 1) + L(i0 - 1, j0 - 1)) /
      (4.0 * hs * ht);
  const double trace = l_ss + l_tt;
  const double disc = std::sqrt((l_ss - l_tt) * (l_ss - l_tt) + 4.0 * l_st * l_st);
  return 0.5 * (trace + disc);
}

double pbar(const LossSurfaceGrid& grid, bool interpolation_fallback, bool* interpolated) {
  const int ni = static_cast<int>(grid.s.size());
  const int nj = static_cast<int>(grid.t.size());
  std::vector<const Ray*> ray_at(static_cast<std::size_t>(ni * nj), nullptr);
  for (const Ray& ray : grid.rays) {
    ray_at[static_cast<std::size_t>(ray.i * nj + ray.j)] = &ray;
  }

  bool used_interp = false;
  double barrier = 0.0;
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < nj; ++j) {
      if (i == grid.center_i && j == grid.center_j) continue;
      const double endpoint =
          grid.losses[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double cap = std::max(grid.base_loss, endpoint);
      double peak = cap;
      if (const Ray* ray = ray_at[static_cast<std::size_t>(i * nj + j)]) {
        for (double L : ray->losses) peak = std::max(peak, L);
      } else if (interpolation_fallback) {
        used_interp = true;
        constexpr int kSamples = 64;
        for (int k = 1; k < kSamples; ++k) {
          const double t = static_cast<double>(k) / kSamples;
          peak = std::max(peak, interp(grid, t * grid.s[static_cast<std::size_t>(i)],
                                       t * grid.t[static_cast<std::size_t>(j)]));
        }
      } else {
        throw Error(ErrorCode::MissingRays,
                    "no ray for grid point (" + std::to_string(i) + ", " +
                        std::to_string(j) + ")");
      }
      barrier = std::max(barrier, peak - cap);
    }
  }
  if (interpolated != nullptr) *interpolated = used_interp;
  return barrier;
}

LandscapeMetrics compute_metrics(const LossSurfaceGrid& grid, bool interpolation_fallback) {
  LandscapeMetrics out;
  out.p1 = p1(grid);
  out.p2 = p2(grid);
  out.pbar = pbar(grid, interpolation_fallback, &out.pbar_interpolated);
  return out;
}

std::string post_select(const std::vector<Candidate>& candidates) {
  if (candidates.empty() || candidates.size() > 3) {
    throw Error(ErrorCode::InvalidArgument, "post_select expects 1-3 candidates");
  }
  for (const Candidate& c : candidates) {
    if (c.family != candidates.front().family) {
      throw Error(ErrorCode::CrossFamilyComparison,
                  c.family + " vs " + candidates.front().family);
    }
  }
  std::vector<int> votes(candidates.size(), 0);
  const auto metric_vote = [&](auto&& value) {
    double best = value(candidates.front());
    for (const Candidate& c : candidates) best = std::min(best, value(c));
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (value(candidates[k]) == best) ++votes[k];
    }
  };
  metric_vote([](const Candidate& c) { return c.metrics.p1; });
  metric_vote([](const Candidate& c) { return c.metrics.p2; });
  metric_vote([](const Candidate& c) { return c.metrics.pbar; });

  std::size_t chosen = 0;
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    if (votes[k] > votes[chosen]) {
      chosen = k;
      continue;
    }
    if (votes[k] < votes[chosen]) continue;
    const Candidate& a = candidates[k];
    const Candidate& b = candidates[chosen];
    const double va = a.higher_is_better ? a.val_score : -a.val_score;
    const double vb = b.higher_is_better ? b.val_score : -b.val_score;
    if (va > vb || (va == vb && a.metrics.pbar < b.metrics.pbar)) {
      chosen = k;
    }
  }
  return candidates[chosen].id;
}

LossSurfaceGrid demo_surface(DemoKind kind, double a, double b, double spacing,
                             double radius) {
  if (spacing <= 0.0 || radius < spacing) {
    throw Error(ErrorCode::InvalidArgument, "need spacing > 0 and radius >= spacing");
  }
  const int m = static_cast<int>(std::floor(radius / spacing + 1e-9));
  LossSurfaceGrid grid;
  grid.rho = m * spacing;
  for (int k = -m; k <= m; ++k) {
    grid.s.push_back(k == 0 ? 0.0 : k * spacing);
  }
  grid.t = grid.s;

  const double bump_r0 = b * radius;
  const double bump_width = 0.15 * radius;
  auto value = [&](double x, double y) {
    switch (kind) {
      case DemoKind::Quadratic:
        return a * x * x + b * y * y;
      case DemoKind::Plane:
        return a * x;
      case DemoKind::Bump: {
        const double r = std::sqrt(x * x + y * y);
        const double z = (r - bump_r0) / bump_width;
        return r * r + a * std::exp(-z * z);
      }
    }
    return 0.0;
  };

  grid.losses.assign(grid.s.size(), std::vector<double>(grid.t.size(), 0.0));
  for (std::size_t i = 0; i < grid.s.size(); ++i) {
    for (std::size_t j = 0; j < grid.t.size(); ++j) {
      grid.losses[i][j] = value(grid.s[i], grid.t[j]);
    }
  }
  grid.base_loss = value(0.0, 0.0);

  constexpr int kRaySamples = 64;
  for (std::size_t i = 0; i < grid.s.size(); ++i) {
    for (std::size_t j = 0; j < grid.t.size(); ++j) {
      if (grid.s[i] == 0.0 && grid.t[j] == 0.0) continue;
      Ray ray;
      ray.i = static_cast<int>(i);
      ray.j = static_cast<int>(j);
      for (int k = 0; k <= kRaySamples; ++k) {
        const double t = static_cast<double>(k) / kRaySamples;
        ray.ts.push_back(t);
        ray.losses.push_back(value(t * grid.s[i], t * grid.t[j]));
      }
      grid.rays.push_back(std::move(ray));
    }
  }
  grid.validate();
  return grid;
}

ordered_json surface_to_json(const LossSurfaceGrid& grid) {
  ordered_json doc;
  doc["format_version"] = 1;
  doc["rho"] = grid.rho;
  doc["s"] = grid.s;
  doc["t"] = grid.t;
  doc["L"] = grid.losses;
  doc["base_loss"] = grid.base_loss;
  doc["family"] = grid.family;
  ordered_json rays = ordered_json::array();
  for (const Ray& ray : grid.rays) {
    ordered_json r;
    r["i"] = ray.i;
    r["j"] = ray.j;
    r["ts"] = ray.ts;
    r["Ls"] = ray.losses;
    rays.push_back(std::move(r));
  }
  doc["rays"] = std::move(rays);
  return doc;
}

}  // namespace landscape
}  // namespace relatron
