#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relatron/io.hpp"

namespace relatron {
namespace landscape {

struct Ray {
  int i = 0;  // grid indices of the ray endpoint w_ij
  int j = 0;
  std::vector<double> ts;      // in [0,1], containing 0 and 1
  std::vector<double> losses;  // L(w0 + t (w_ij - w0))
};

struct LossSurfaceGrid {
  double rho = 0.0;
  std::vector<double> s;  // strictly increasing, containing 0
  std::vector<double> t;
  std::vector<std::vector<double>> losses;  // losses[i][j] over (s_i, t_j)
  double base_loss = 0.0;
  std::string family = "rdl";
  std::vector<Ray> rays;

  int center_i = 0;
  int center_j = 0;

  void validate();  // fills center indices, checks invariants
};

LossSurfaceGrid surface_from_json(const json& doc);
LossSurfaceGrid load_surface(const std::string& path);

struct LandscapeMetrics {
  double p1 = 0.0;
  double p2 = 0.0;
  double pbar = 0.0;
  bool pbar_interpolated = false;  // rays missing, bilinear fallback used
};

// Worst finite-difference slope over 4-neighbor grid pairs.
double p1(const LossSurfaceGrid& grid);

// Largest eigenvalue of the central-difference 2x2 Hessian at the center.
double p2(const LossSurfaceGrid& grid);

// Maximal ray energy barrier, clamped at zero. Grid points without a stored
// ray fall back to bilinear interpolation along the segment when
// `interpolation_fallback` is set, otherwise MissingRays is thrown.
double pbar(const LossSurfaceGrid& grid, bool interpolation_fallback = true,
            bool* interpolated = nullptr);

LandscapeMetrics compute_metrics(const LossSurfaceGrid& grid,
                                 bool interpolation_fallback = true);

struct Candidate {
  std::string id;
  std::string family;
  double val_score = 0.0;
  bool higher_is_better = true;
  LandscapeMetrics metrics;
};

// Hard vote over P1, P2, Pbar (smallest value per metric gets the vote; exact
// ties share it). Ties in votes break by validation score, then lowest Pbar,
// then input order. Candidates must share one family.
std::string post_select(const std::vector<Candidate>& candidates);

// Analytic fixtures with exact rays for tests and demos.
enum class DemoKind { Quadratic, Bump, Plane };
LossSurfaceGrid demo_surface(DemoKind kind, double a, double b, double spacing,
                             double radius);

ordered_json surface_to_json(const LossSurfaceGrid& grid);

}  // namespace landscape
}  // namespace relatron
