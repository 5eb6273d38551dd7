#include "energy/energy.hpp"

#include <algorithm>
#include <cmath>

namespace sogtrack {

double color_kernel(const Vec3& c1, const Vec3& c2, double sigma_c) {
  return std::exp(-(c1 - c2).squaredNorm() / (sigma_c * sigma_c));
}

double gaussian_overlap(const Gaussian2D& g1, const Gaussian2D& g2) {
  const double s1 = g1.sigma * g1.sigma, s2 = g2.sigma * g2.sigma;
  const double s = s1 + s2;
  return 2.0 * M_PI * s1 * s2 / s * std::exp(-(g1.mu - g2.mu).squaredNorm() / s);
}

double pair_energy(const Gaussian2D& img_g, const Gaussian2D& mdl_g, const EnergyParams& params) {
  return img_g.weight * mdl_g.weight * color_kernel(img_g.color, mdl_g.color, params.sigma_c) *
         gaussian_overlap(img_g, mdl_g);
}

VisibilityFlags visibility_gate(const std::vector<Gaussian2D>& projected, const Mask& hand_mask) {
  VisibilityFlags out;
  out.flags.resize(projected.size());
  for (size_t j = 0; j < projected.size(); ++j) {
    const long col = std::lround(projected[j].mu.x());
    const long row = std::lround(projected[j].mu.y());
    const bool inside =
        col >= 0 && row >= 0 && col < hand_mask.width && row < hand_mask.height;
    out.flags[j] = (inside && !hand_mask.at(static_cast<int>(row), static_cast<int>(col))) ? 1 : 0;
  }
  return out;
}

namespace {

struct Candidate {
  double value;
  int index;
};

struct RowResult {
  std::vector<Candidate> chosen;  // ascending model index
  bool clamped = false;
  double sum = 0.0;
};

// Uniform grid over visible projected centers. Pairs beyond the exponent
// cutoff contribute nothing, so each row only needs model Gaussians within
// sqrt(cutoff * (sigma1^2 + sigma2_max^2)) of its center; the grid makes that
// neighborhood query cheap. Selection is order-independent (the comparator is
// total), so pruning does not affect determinism.
struct SpatialGrid {
  bool active = false;
  double cell = 1.0;
  double x0 = 0.0, y0 = 0.0;
  int nx = 0, ny = 0;
  double sigma2_max = 0.0;
  std::vector<int> offsets;  // CSR buckets
  std::vector<int> entries;

  void build(const std::vector<Gaussian2D>& projected, const VisibilityFlags& flags) {
    std::vector<int> visible;
    double lo_x = 0, lo_y = 0, hi_x = 0, hi_y = 0;
    for (int j = 0; j < static_cast<int>(projected.size()); ++j) {
      if (!flags.visible(j)) continue;
      const Vec2& mu = projected[j].mu;
      if (visible.empty()) {
        lo_x = hi_x = mu.x();
        lo_y = hi_y = mu.y();
      } else {
        lo_x = std::min(lo_x, mu.x());
        hi_x = std::max(hi_x, mu.x());
        lo_y = std::min(lo_y, mu.y());
        hi_y = std::max(hi_y, mu.y());
      }
      sigma2_max = std::max(sigma2_max, projected[j].sigma);
      visible.push_back(j);
    }
    if (visible.size() < 256) return;  // full scan is cheaper
    cell = std::max(1.0, std::sqrt(kEnergyExponentCutoff) * sigma2_max);
    x0 = lo_x;
    y0 = lo_y;
    nx = static_cast<int>((hi_x - lo_x) / cell) + 1;
    ny = static_cast<int>((hi_y - lo_y) / cell) + 1;
    if (static_cast<long>(nx) * ny > 16L * static_cast<long>(visible.size())) return;
    std::vector<int> counts(static_cast<size_t>(nx) * ny + 1, 0);
    const auto cell_of = [&](const Vec2& mu) {
      const int cx = std::clamp(static_cast<int>((mu.x() - x0) / cell), 0, nx - 1);
      const int cy = std::clamp(static_cast<int>((mu.y() - y0) / cell), 0, ny - 1);
      return cy * nx + cx;
    };
    for (int j : visible) ++counts[cell_of(projected[j].mu) + 1];
    for (size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
    entries.resize(visible.size());
    std::vector<int> cursor(counts.begin(), counts.end() - 1);
    for (int j : visible) entries[cursor[cell_of(projected[j].mu)]++] = j;
    offsets = std::move(counts);
    active = true;
  }
};

RowResult energy_row(const Gaussian2D& gi, const std::vector<Gaussian2D>& projected,
                     const VisibilityFlags& flags, const EnergyParams& params,
                     const SpatialGrid& grid) {
  const double inv_sigma_c2 = 1.0 / (params.sigma_c * params.sigma_c);
  const double s1 = gi.sigma * gi.sigma;
  std::vector<Candidate> cand;
  const auto consider = [&](int j) {
    const Gaussian2D& gj = projected[j];
    const double s2 = gj.sigma * gj.sigma;
    const double s = s1 + s2;
    const double expo =
        (gi.mu - gj.mu).squaredNorm() / s + (gi.color - gj.color).squaredNorm() * inv_sigma_c2;
    if (expo > kEnergyExponentCutoff) return;
    const double e = gi.weight * gj.weight * 2.0 * M_PI * s1 * s2 / s * std::exp(-expo);
    cand.push_back({e, j});
  };
  if (grid.active) {
    const double radius =
        std::sqrt(kEnergyExponentCutoff * (s1 + grid.sigma2_max * grid.sigma2_max));
    const int cx0 = std::clamp(static_cast<int>((gi.mu.x() - radius - grid.x0) / grid.cell), 0,
                               grid.nx - 1);
    const int cx1 = std::clamp(static_cast<int>((gi.mu.x() + radius - grid.x0) / grid.cell), 0,
                               grid.nx - 1);
    const int cy0 = std::clamp(static_cast<int>((gi.mu.y() - radius - grid.y0) / grid.cell), 0,
                               grid.ny - 1);
    const int cy1 = std::clamp(static_cast<int>((gi.mu.y() + radius - grid.y0) / grid.cell), 0,
                               grid.ny - 1);
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx) {
        const int b = cy * grid.nx + cx;
        for (int p = grid.offsets[b]; p < grid.offsets[b + 1]; ++p) consider(grid.entries[p]);
      }
  } else {
    for (int j = 0; j < static_cast<int>(projected.size()); ++j)
      if (flags.visible(j)) consider(j);
  }
  if (static_cast<int>(cand.size()) > params.top_k) {
    auto better = [](const Candidate& a, const Candidate& b) {
      return a.value > b.value || (a.value == b.value && a.index < b.index);
    };
    std::nth_element(cand.begin(), cand.begin() + params.top_k - 1, cand.end(), better);
    cand.resize(params.top_k);
  }
  std::sort(cand.begin(), cand.end(),
            [](const Candidate& a, const Candidate& b) { return a.index < b.index; });

  RowResult row;
  double sum = 0.0;
  for (const Candidate& c : cand) sum += c.value;
  const double self = gi.weight * gi.weight * M_PI * s1;
  if (sum < self) {
    row.sum = sum;
    row.chosen = std::move(cand);
  } else {
    row.sum = self;
    row.clamped = true;
  }
  return row;
}

}  // namespace

EnergyActiveSet select_active_pairs(const ImageSoG& image_sog,
                                    const std::vector<Gaussian2D>& projected,
                                    const VisibilityFlags& flags, const EnergyParams& params) {
  const int n = static_cast<int>(image_sog.gaussians.size());
  SpatialGrid grid;
  grid.build(projected, flags);
  std::vector<RowResult> rows(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    rows[i] = energy_row(image_sog.gaussians[i], projected, flags, params, grid);

  EnergyActiveSet out;
  out.offsets.reserve(n + 1);
  out.offsets.push_back(0);
  out.clamped.resize(n);
  double total = 0.0;  // fixed-order reduction: deterministic for any schedule
  for (int i = 0; i < n; ++i) {
    total += rows[i].sum;
    out.clamped[i] = rows[i].clamped ? 1 : 0;
    for (const Candidate& c : rows[i].chosen) out.model_index.push_back(c.index);
    out.offsets.push_back(static_cast<int>(out.model_index.size()));
  }
  out.value = total;
  return out;
}

double alignment_energy(const ImageSoG& image_sog, const std::vector<Gaussian2D>& projected,
                        const VisibilityFlags& flags, const EnergyParams& params) {
  return select_active_pairs(image_sog, projected, flags, params).value;
}

}  // namespace sogtrack
