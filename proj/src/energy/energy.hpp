#pragma once

#include "core/image.hpp"
#include "image/image_sog.hpp"

namespace sogtrack {

struct EnergyParams {
  double sigma_c = 0.15;  // color-kernel bandwidth
  int top_k = 96;         // per-image-Gaussian contribution cap
};

// Per-projected-Gaussian visibility for one frame (hand-occlusion gate).
struct VisibilityFlags {
  std::vector<std::uint8_t> flags;
  bool visible(size_t j) const { return flags[j] != 0; }
  size_t size() const { return flags.size(); }
};

// exp(-||c1-c2||^2 / sigma_c^2), in (0, 1].
double color_kernel(const Vec3& c1, const Vec3& c2, double sigma_c);

// Closed-form overlap of two isotropic 2D Gaussians:
// 2*pi * s1^2 s2^2 / (s1^2 + s2^2) * exp(-||mu1-mu2||^2 / (s1^2 + s2^2)).
double gaussian_overlap(const Gaussian2D& g1, const Gaussian2D& g2);

// Color-weighted overlap including the weight product w1*w2. The self energy
// pair_energy(g, g) equals w^2 * pi * sigma^2.
double pair_energy(const Gaussian2D& img_g, const Gaussian2D& mdl_g, const EnergyParams& params);

// flag_j = true iff the hand mask at round(mu_j) is zero; means outside the
// image bounds are flagged false (treated as not contributing).
VisibilityFlags visibility_gate(const std::vector<Gaussian2D>& projected, const Mask& hand_mask);

// Gated, clamped alignment energy:
//   sum_i min( sum over the top_k visible j of E_ij , E_ii ).
double alignment_energy(const ImageSoG& image_sog, const std::vector<Gaussian2D>& projected,
                        const VisibilityFlags& flags, const EnergyParams& params);

// Active pair set of the energy at the evaluation point, in CSR form over
// image Gaussians. Freezing it makes the energy smooth in the projected
// parameters; the optimizer refreshes it every iteration.
struct EnergyActiveSet {
  std::vector<int> offsets;           // image-Gaussian ranges; size n_img + 1
  std::vector<int> model_index;       // into the projected list
  std::vector<std::uint8_t> clamped;  // per image Gaussian: min() took E_ii
  double value = 0.0;                 // energy at the freeze point
};
EnergyActiveSet select_active_pairs(const ImageSoG& image_sog,
                                    const std::vector<Gaussian2D>& projected,
                                    const VisibilityFlags& flags, const EnergyParams& params);

// Pairs whose combined color+spatial exponent exceeds this contribute less
// than exp(-30) of their prefactor and are skipped; keeps sweeps cheap while
// staying far inside every stated tolerance.
inline constexpr double kEnergyExponentCutoff = 30.0;

}  // namespace sogtrack
