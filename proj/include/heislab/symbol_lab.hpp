///
/// \file symbol_lab.hpp
///
/// Hölder seminorms, Littlewood-Paley blocks and Besov norms for symbols on S^1.
///
/// Hölder exponents here are classical (arc-length metric). On S^1 the CC exponent
/// is twice the classical one; reports carry both.
///
#ifndef HEISLAB_SYMBOL_LAB_HPP
#define HEISLAB_SYMBOL_LAB_HPP

#include "heislab/circle_symbol.hpp"

#include <json.hpp>

#include <vector>

namespace heislab
{

/// Smooth bump: 1 on [0,1], 0 on [2,inf), C^infinity in between.
double lp_bump(double r);

///
/// Dyadic window phi_j evaluated at a frequency of size r >= 0:
///   phi_0(r) = psi(r),  phi_j(r) = psi(r / 2^j) - psi(r / 2^{j-1}).
/// phi_j vanishes outside 2^{j-1} < r < 2^{j+1}; the windows sum to 1.
///
double lp_window(int j, double r);

/// Smallest J with sum_{j <= J} phi_j = 1 on all frequencies |k| <= top.
int lp_top_block(int top);

struct BlockDecomposition
{
    std::vector<CircleSymbol> blocks;  ///< block j has cutoff min(N, 2^{j+1})
    nlohmann::json window;

    /// Sum of all blocks with cutoff N.
    CircleSymbol reconstruct(int N) const;
};

BlockDecomposition lp_blocks(const CircleSymbol& f);

/// Sampled sup norm on a uniform grid; grid = 0 picks max(64, next_pow2(4 (top+1))).
double sup_norm(const CircleSymbol& f, int grid = 0);

/// Sampled sup |f'| on a uniform grid, the Lipschitz constant for the arc-length metric.
double lipschitz_norm(const CircleSymbol& f, int grid = 0);

struct HolderReport
{
    double alpha = 0.0;        ///< classical exponent
    double cc_exponent = 0.0;  ///< 2 alpha
    double seminorm_estimate = 0.0;
    double witness_x = 0.0;
    double witness_y = 0.0;
    int grid = 0;
};

nlohmann::json to_json(const HolderReport& r);

///
/// max |f(x) - f(y)| / dist(x, y)^alpha over grid pairs at dyadic separations 1, 2, 4, ..
/// grid/2 steps. The pair set grows under grid doubling, so the estimate is a
/// nondecreasing lower bound for the true seminorm. Requires grid >= 8, 0 < alpha <= 1.
///
HolderReport holder_seminorm(const CircleSymbol& f, double alpha, int grid);

/// Default grid for Hölder measurements: max(1024, next_pow2(16 (top+1))).
int default_holder_grid(const CircleSymbol& f);

enum class BesovQ
{
    one,
    infinity
};

/// 2^{js} ||Phi_j f||_inf for j = 0..J.
std::vector<double> besov_block_values(const CircleSymbol& f, double s);

double besov_norm(const CircleSymbol& f, double s, BesovQ q);

struct EquivRow
{
    std::size_t index = 0;
    double besov = 0.0;
    double holder_norm = 0.0;  ///< ||f||_inf + |f|_{C^s}
    double ratio = 0.0;
};

struct EquivReport
{
    double s = 0.0;
    std::vector<EquivRow> rows;
    std::size_t excluded = 0;  ///< constants, where both sides vanish modulo the mean
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double band() const { return max_ratio / min_ratio; }
    bool finite() const;
};

nlohmann::json to_json(const EquivReport& r);

///
/// besov_norm(f, s, inf) / (||f||_inf + |f|_{C^s}) for each corpus member.
/// Constant symbols are skipped. holder_grid = 0 uses default_holder_grid per symbol.
///
EquivReport besov_holder_equiv_check(const std::vector<CircleSymbol>& corpus, double s,
                                     int holder_grid = 0, int jobs = 1);

struct KFunctionalRow
{
    double t = 0.0;
    double khat = 0.0;          ///< min over J of both Lipschitz estimates
    int level = -1;             ///< minimizing J (-1: g = 0)
    double khat_blocks = 0.0;   ///< using only the block bound C sum 2^j ||Phi_j f||
};

struct KFunctionalReport
{
    double theta = 0.0;
    double block_constant = 2.0;
    std::vector<KFunctionalRow> rows;
    double sup_scaled = 0.0;         ///< sup_t t^{-theta} khat
    double sup_scaled_blocks = 0.0;
    double holder_norm = 0.0;        ///< ||f||_inf + |f|_{C^theta}
    double ratio = 0.0;              ///< sup_scaled / holder_norm
};

nlohmann::json to_json(const KFunctionalReport& r);

///
/// Upper bound for the K-functional of the pair (BC, Lip):
///   K(t) <= min_J  sum_{j > J} ||Phi_j f||_inf + t ||S_J f||_Lip,
/// with ||S_J f||_Lip taken as the smaller of its sampled value and the Bernstein
/// block bound 2 sum_{j <= J} 2^j ||Phi_j f||_inf.
///
KFunctionalReport k_functional_probe(const CircleSymbol& f, double theta,
                                     const std::vector<double>& t_grid);

} // namespace heislab

#endif
