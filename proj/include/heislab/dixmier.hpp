///
/// \file dixmier.hpp
///
/// Log-Cesaro functionals on the circle: the xi/zeta diagonal estimators, the
/// lattice sums for ||P g_l||^2 with g_l = [P, W] W e_l, and the bound-chain report.
///
#ifndef HEISLAB_DIXMIER_HPP
#define HEISLAB_DIXMIER_HPP

#include "heislab/circle_symbol.hpp"
#include "heislab/error.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace heislab
{

/// Lambda_N = (sum_{k <= N} x_k) / log(N + 2) for each requested N.
struct LogCesaroSeries
{
    std::vector<std::int64_t> N;
    std::vector<double> partial;
    nlohmann::json source;

    /// Extremes over the entries whose N is a power of two; NaN when there are none.
    double dyadic_min() const;
    double dyadic_max() const;
};

nlohmann::json to_json(const LogCesaroSeries& s);

/// CSV with header "N,Lambda".
void write_log_cesaro_csv(std::ostream& os, const LogCesaroSeries& s);

///
/// Throws InputError on a negative entry or an N outside [0, x.size()). Signed
/// sequences are split by the caller, see signed_log_cesaro.
///
LogCesaroSeries log_cesaro(const std::vector<double>& x, const std::vector<std::int64_t>& N_list,
                           nlohmann::json source = {});

/// Lambda(x+) - Lambda(x-), each part through log_cesaro.
LogCesaroSeries signed_log_cesaro(const std::vector<double>& x, const std::vector<std::int64_t>& N_list,
                                  nlohmann::json source = {});

/// 1, 2, 4, ... up to N, followed by N itself when it is not a power of two.
std::vector<std::int64_t> dyadic_checkpoints(std::int64_t N);

///
/// Which index set the lattice sum runs over.
///   printed: 2^n - l >= 2^m >= l + 1 on both pairs, the set as displayed with the
///            norm formula;
///   exact:   2^m >= l + 1 and 2^n >= 2^m - l, the set that a direct expansion of
///            P W (1 - P) W e_l produces.
/// The two agree at l = 0 and the printed set is a strict subset for l >= 1.
///
enum class LatticeVariant
{
    printed,
    exact
};

std::string to_string(LatticeVariant v);
LatticeVariant lattice_variant_from_string(const std::string& s);

/// Largest truncation accepted by the lattice and the sparse oracle (keys are 128-bit).
inline constexpr int lattice_n_max_limit = 120;

struct GammaLatticeSum
{
    std::int64_t l = 0;
    double beta = 0.25;
    int n_max = 0;
    LatticeVariant variant = LatticeVariant::exact;
    double value = 0.0;
    double tail_bound = 0.0;      ///< upper bound on the mass with some index > n_max
    std::uint64_t term_count = 0; ///< quadruples in the truncated set
};

nlohmann::json to_json(const GammaLatticeSum& g);

///
/// sum over quadruples (n, m, n', m') of 2^{-(n+n'+m+m') beta} with both pairs in
/// the index set, equal differences 2^n - 2^m = 2^n' - 2^m', and all indices <= n_max.
/// Pairs are grouped by their difference in a hash map; groups are reduced in
/// ascending order of the difference.
///
GammaLatticeSum gamma_lattice_sum(std::int64_t l, double beta, int n_max,
                                  LatticeVariant variant = LatticeVariant::exact);

///
/// Rigorous bound on value(infinity) - value(n_max). Nonzero differences have one
/// representation 2^n - 2^m, so only the zero-difference group is squared; every
/// discarded pair has n > n_max once n_max >= log2(l + 1).
///
double lattice_tail_bound(std::int64_t l, double beta, int n_max, LatticeVariant variant);

///
/// ||P g_l||^2 with W truncated at n_max, by sparse convolution on the integer
/// lattice: x = W e_l, then P g = P(W x) - P(W P x) = P W (1 - P) x. Independent of
/// the lattice enumeration; agrees with the exact variant.
///
double pgl_matrix_oracle(std::int64_t l, double beta, int n_max);

struct XiEstimate
{
    std::string functional;          ///< "xi", "zeta" or "xi-lattice"
    int k = 0;
    std::int64_t N = 0;
    std::vector<cplx> diagonal;      ///< d_l for l = 0..N
    LogCesaroSeries real_part;       ///< signed log-Cesaro of Re d_l
    LogCesaroSeries imag_part;       ///< same for Im d_l
    nlohmann::json symbols;          ///< metadata of the 2k symbols
    double identity_residual = 0.0;  ///< zeta only: max |zeta_l - alternating xi sum|
};

nlohmann::json to_json(const XiEstimate& e, bool with_diagonal = false);

///
/// Diagonal estimator of xi_k: d_l = < P a_1 (1-P) a_2 P ... a_2k P e_l, e_l >, 0 <= l <= N,
/// computed as (-1)^k < P [P,a_1] ... [P,a_2k] P e_l, e_l >. Arithmetic is exact on the frequency lattice (sparse vectors, no window), so no
/// aliasing can occur. Each d_l meets in the middle: the right half acts on e_l and
/// the adjoint of the left half acts on e_l. This is a lower bound for the
/// eigenvalue log-Cesaro when the operator is positive; it is reported as the
/// diagonal functional otherwise.
///
XiEstimate xi_diagonal_estimate(const std::vector<CircleSymbol>& symbols, std::int64_t N, int k, int jobs = 1);

///
/// Diagonal estimator of zeta_k built from the brackets [[P,a_{2j-1}],[P,a_{2j}]],
/// applied directly; P-sandwiched they equal [P a P, P b P]. The alternating sum
/// sum_s (-1)^{k - |s|} xi(swapped pairs s) is computed alongside; a relative mismatch
/// above 1e-8 throws NumericError.
///
XiEstimate zeta_estimate(const std::vector<CircleSymbol>& symbols, std::int64_t N, int k, int jobs = 1);

/// xi_2(W, W, W, W) with d_l from the exact lattice sum at truncation n_max.
XiEstimate xi_lattice_estimate(double beta, std::int64_t N, int n_max, int jobs = 1);

struct BoundRow
{
    std::int64_t l = 0;
    double lattice = 0.0;          ///< exact variant
    double lattice_printed = 0.0;
    double oracle = 0.0;           ///< pgl_matrix_oracle
    double tail_bound = 0.0;       ///< the larger of the two variants' bounds
    double claimed_bound = 0.0;    ///< 2 / (l log 2)
    double sqrt6_bound = 0.0;      ///< sqrt 6 / (l log 2)
    double subsum = 0.0;           ///< sum_{2^n >= 2l+1} 2^{-n/2} (2^n - l)^{-1/2}
    double integral = 0.0;         ///< adaptive quadrature
    double integral_closed_form = 0.0;
    double claimed_integral_form = 0.0;  ///< (2 / (l log 2)) (1 + l/(2l+2))^{1/2}
    std::map<std::string, bool> flags; ///< true = HOLDS
};

/// The chain concerns W = lacunary(1/4); the lattice columns use beta = 1/4.
struct BoundReport
{
    int n_max = 0;
    std::vector<BoundRow> rows;
    std::map<std::string, std::int64_t> failures;      ///< per flag
    std::map<std::string, std::int64_t> first_failure; ///< smallest failing l per flag

    bool holds(const std::string& flag) const { return failures.count(flag) && failures.at(flag) == 0; }
};

nlohmann::json to_json(const BoundReport& r, bool with_rows = true);
void write_bound_csv(std::ostream& os, const BoundReport& r);

struct BoundOptions
{
    double relative_tail = 1e-8;
    int jobs = 1;
};

///
/// The inequality chain for 1 <= l <= l_max. Flags:
///   lattice>=subsum, lattice_printed>=subsum, subsum>=integral,
///   lattice>=claimed, lattice_printed>=claimed, lattice>=sqrt6, lattice_printed>=sqrt6,
///   claimed_integral<=subsum, quadrature==closed_form (1e-10), oracle==lattice (1e-12).
/// Refuses with InputError naming the required n_max when a tail bound exceeds
/// relative_tail times its value.
///
BoundReport bound_report(std::int64_t l_max, int n_max, const BoundOptions& opts = {});

/// Quadrature of int_{log2(2l+2)}^inf 2^{-x/2} (2^x - l)^{-1/2} dx.
double bound_integral(std::int64_t l);

/// (2 / (l ln 2)) (1 - sqrt(1 - l/(2l+2))), from the substitution y = 2^{-x}.
double bound_integral_closed_form(std::int64_t l);

/// sum_{2^n >= 2l+1} 2^{-n/2} (2^n - l)^{-1/2}, summed to double precision.
double bound_subsum(std::int64_t l);

} // namespace heislab

#endif
