///
/// \file aniso_blocks.hpp
///
/// Anisotropic Littlewood-Paley blocks on the periodic box [-pi, pi)^3 standing in
/// for the Heisenberg group with d = 2. The dual variable xi = (tau, zeta) is scaled
/// by 2^{-j}.xi = (2^{-2j} tau, 2^{-j} zeta), so the window size is measured with the
/// homogeneous length rho(xi) = (tau^2 + |zeta|^4)^{1/4}.
///
#ifndef HEISLAB_ANISO_BLOCKS_HPP
#define HEISLAB_ANISO_BLOCKS_HPP

#include "heislab/heis_core.hpp"

#include <json.hpp>

#include <functional>
#include <vector>

namespace heislab
{

/// Row-major samples f[(it * n + i1) * n + i2] at (t, z1, z2) = (-pi + h it, -pi + h i1, -pi + h i2).
struct BoxFunction
{
    int n = 0;
    std::vector<double> values;

    HeisPoint point(int it, int i1, int i2) const;
};

/// Samples fn on the n^3 box. n must be a power of two >= 4.
BoxFunction sample_box(int n, const std::function<double(const HeisPoint&)>& fn);

struct AnisoBlocksReport
{
    int n = 0;
    double s = 0.0;
    int blocks = 0;
    std::vector<double> block_sup;    ///< ||Phi_j f||_inf
    int dominant_block = -1;
    double identity_residual = 0.0;   ///< sup_j sup_x |(Phi_{j-1}+Phi_j+Phi_{j+1}) Phi_j f - Phi_j f|
    double reconstruction_residual = 0.0;
    double besov_sup = 0.0;           ///< sup_j 2^{js} ||Phi_j f||_inf
    double holder_seminorm = 0.0;     ///< sampled, anisotropic quasi-metric
    double holder_norm = 0.0;         ///< ||f||_inf + holder_seminorm
    double ratio = 0.0;               ///< besov_sup / holder_norm
};

nlohmann::json to_json(const AnisoBlocksReport& r);

///
/// Builds the blocks by 3-d FFT, checks the three-term identity and the
/// reconstruction, and compares the Besov sup with the Hölder seminorm of exponent s
/// for quasi_metric(anisotropic). Hölder pairs use dyadic offsets along each axis and
/// the diagonal, without wrap-around. Throws InputError unless cfg.dim() == 2,
/// f.n is a power of two >= 4, and 0 < s < 1.
///
AnisoBlocksReport aniso_blocks_check(const HeisConfig& cfg, const BoxFunction& f, double s);

} // namespace heislab

#endif
