#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfs/errors.hpp"
#include "mfs/golden.hpp"
#include "mfs/planar.hpp"

namespace mfs {

namespace {

// sup over phi of |f(phi)|, where f is known on the grid and evaluable
// everywhere. Grid maxima of |f| within half of the largest are refined by
// golden-section search between their neighbours.
template <class F>
double refined_sup(const std::vector<double>& fk, F&& f, int n) {
  const double h = 2.0 * std::numbers::pi / n;
  double top = 0.0;
  for (double v : fk) top = std::max(top, std::abs(v));
  if (top == 0.0) return 0.0;

  std::vector<std::pair<double, int>> peaks;
  for (int k = 0; k < n; ++k) {
    const double a = std::abs(fk[static_cast<std::size_t>(k)]);
    const double ap = std::abs(fk[static_cast<std::size_t>((k + n - 1) % n)]);
    const double an = std::abs(fk[static_cast<std::size_t>((k + 1) % n)]);
    if (a >= ap && a > an && a >= 0.5 * top) peaks.emplace_back(a, k);
  }
  std::sort(peaks.begin(), peaks.end(), std::greater<>());
  if (peaks.size() > 8) peaks.resize(8);

  double best = top;
  for (const auto& [val, k] : peaks) {
    const double t0 = h * k;
    auto [t, v] = detail::golden_maximize([&](double t) { return std::abs(f(t)); }, t0 - h,
                                          t0 + h, 1e-12, 100);
    best = std::max(best, v);
  }
  return best;
}

Matrix2d flip(int sigma) { return sigma > 0 ? Matrix2d::Identity() : Matrix2d(Vector2d(1.0, -1.0).asDiagonal()); }

}  // namespace

NormalizedNorm normalize_norm(const PlanarNorm& pn, int n) {
  const Matrix2d S = ellipse_gauge(min_circumscribed_ellipse(pn, n));
  NormalizedNorm g{pn.compose(S.inverse()), S, {}};
  g.r = radial_profile(g.norm, n).r;
  return g;
}

EquivalenceResult equivalence_defect(const PlanarNorm& pn1, const PlanarNorm& pn2, int n) {
  if (n < 256) throw DomainError("equivalence_defect needs n >= 256");
  return equivalence_defect(normalize_norm(pn1, n), normalize_norm(pn2, n));
}

EquivalenceResult equivalence_defect(const NormalizedNorm& g1, const NormalizedNorm& g2) {
  const int n = static_cast<int>(g1.r.size());
  if (n < 256 || g2.r.size() != g1.r.size())
    throw DomainError("equivalence_defect needs two profiles of one size n >= 256");
  const double h = 2.0 * std::numbers::pi / n;

  // f(phi) = r2(phi) - r1(sigma phi + theta). r2 is cached on the grid;
  // r1 is always evaluated exactly.
  auto mismatch_fn = [&](double theta, int sigma) {
    return [&g1, &g2, theta, sigma](double phi) {
      return 1.0 / g2.norm.eval_at_angle(phi) - 1.0 / g1.norm.eval_at_angle(sigma * phi + theta);
    };
  };
  auto grid_values = [&](double theta, int sigma) {
    std::vector<double> fk(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
      fk[static_cast<std::size_t>(k)] =
          g2.r[static_cast<std::size_t>(k)] - 1.0 / g1.norm.eval_at_angle(sigma * h * k + theta);
    return fk;
  };
  auto grid_sup = [&](double theta, int sigma) {
    double worst = 0.0;
    for (double v : grid_values(theta, sigma)) worst = std::max(worst, std::abs(v));
    return worst;
  };
  auto full_sup = [&](double theta, int sigma) {
    return refined_sup(grid_values(theta, sigma), mismatch_fn(theta, sigma), n);
  };

  // Coarse stage: integer grid shifts need no new evaluations.
  struct Cand {
    double d;
    int j;
    int sigma;
  };
  std::vector<Cand> cands;
  double coarse_min = std::numeric_limits<double>::infinity();
  for (int sigma : {1, -1}) {
    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
      double worst = 0.0;
      for (int k = 0; k < n; ++k) {
        const int idx = (((sigma * k + j) % n) + n) % n;
        worst = std::max(worst, std::abs(g2.r[static_cast<std::size_t>(k)] -
                                         g1.r[static_cast<std::size_t>(idx)]));
      }
      d[static_cast<std::size_t>(j)] = worst;
    }
    std::vector<Cand> local;
    // The global minimiser always competes, even on a flat coarse profile.
    const auto jmin = std::min_element(d.begin(), d.end()) - d.begin();
    local.push_back({d[static_cast<std::size_t>(jmin)], static_cast<int>(jmin), sigma});
    for (int j = 0; j < n; ++j) {
      if (j == jmin) continue;
      const double dj = d[static_cast<std::size_t>(j)];
      if (dj <= d[static_cast<std::size_t>((j + n - 1) % n)] &&
          dj < d[static_cast<std::size_t>((j + 1) % n)])
        local.push_back({dj, j, sigma});
    }
    std::sort(local.begin(), local.end(), [](const Cand& a, const Cand& b) { return a.d < b.d; });
    for (std::size_t i = 0; i < std::min<std::size_t>(3, local.size()); ++i) cands.push_back(local[i]);
    coarse_min = std::min(coarse_min, local.front().d);
  }

  // Within one grid cell the mismatch cannot move by more than the largest
  // jump of r1 between neighbouring samples, so coarser candidates are
  // dropped.
  double slack = 0.0;
  for (int k = 0; k < n; ++k)
    slack = std::max(slack, std::abs(g1.r[static_cast<std::size_t>((k + 1) % n)] -
                                     g1.r[static_cast<std::size_t>(k)]));
  std::erase_if(cands, [&](const Cand& c) { return c.d > coarse_min + 2.0 * slack; });
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.d < b.d; });

  EquivalenceResult best;
  best.defect = std::numeric_limits<double>::infinity();
  auto consider = [&](double theta, int sigma, double value) {
    if (value < best.defect) {
      best.defect = value;
      best.best_angle = std::remainder(theta, 2.0 * std::numbers::pi);
      best.reflected = sigma < 0;
    }
  };
  for (const Cand& c : cands) {
    const double t0 = h * c.j;
    const double at_grid = full_sup(t0, c.sigma);
    consider(t0, c.sigma, at_grid);
    // Nothing left to polish below roundoff.
    if (at_grid <= 1e-14) break;
    const auto [theta, unused] = detail::golden_minimize(
        [&](double t) { return grid_sup(t, c.sigma); }, t0 - h, t0 + h, 1e-10, 80);
    (void)unused;
    consider(theta, c.sigma, full_sup(theta, c.sigma));
  }

  const Matrix2d G = rotation2(best.best_angle) * flip(best.reflected ? -1 : 1);
  best.best_map = g2.S.inverse() * G.inverse() * g1.S;
  return best;
}

double ellipse_defect(const PlanarNorm& pn, int n) {
  if (n < 256) throw DomainError("ellipse_defect needs n >= 256");
  return ellipse_defect(normalize_norm(pn, n));
}

double ellipse_defect(const NormalizedNorm& g) {
  const int n = static_cast<int>(g.r.size());
  std::vector<double> fk(g.r.size());
  for (std::size_t k = 0; k < fk.size(); ++k) fk[k] = g.r[k] - 1.0;
  return refined_sup(fk, [&](double t) { return 1.0 / g.norm.eval_at_angle(t) - 1.0; }, n);
}

std::vector<std::pair<double, double>> self_rotation_defect(const PlanarNorm& pn, int n_angles) {
  if (n_angles < 64) throw DomainError("self_rotation_defect needs n_angles >= 64");
  const NormalizedNorm g = normalize_norm(pn, n_angles);
  const double h = 2.0 * std::numbers::pi / n_angles;
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(n_angles));
  for (int j = 0; j < n_angles; ++j) {
    double worst = 0.0;
    for (int k = 0; k < n_angles; ++k)
      worst = std::max(worst, std::abs(g.r[static_cast<std::size_t>((k + j) % n_angles)] -
                                       g.r[static_cast<std::size_t>(k)]));
    out.emplace_back(h * j, worst);
  }
  return out;
}

}  // namespace mfs
