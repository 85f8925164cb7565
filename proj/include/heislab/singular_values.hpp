///
/// \file singular_values.hpp
///
/// Top singular values of truncated operators and weak-Schatten diagnostics.
///
#ifndef HEISLAB_SINGULAR_VALUES_HPP
#define HEISLAB_SINGULAR_VALUES_HPP

#include "heislab/hardy_spectra.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace heislab
{

enum class SvdMethod
{
    automatic,  ///< dense when 2N+1 <= dense_limit, otherwise lanczos
    dense,
    lanczos
};

struct SvdOptions
{
    SvdMethod method = SvdMethod::automatic;
    int dense_limit = 1024;
    double tol = 1e-10;        ///< Ritz residual bound, relative to the largest value
    std::uint64_t seed = 0;
    int max_restarts = 3;      ///< consecutive failures to draw a fresh start vector
};

struct SingularSpectrum
{
    std::vector<double> values;  ///< nonincreasing
    std::string method;
    int N = 0;
    int lanczos_steps = 0;       ///< 0 for dense
    double max_residual = 0.0;   ///< largest Ritz residual among the returned values

    std::size_t count() const noexcept { return values.size(); }
};

nlohmann::json to_json(const SingularSpectrum& s);

/// Top-k singular values. k must not exceed 2N+1.
SingularSpectrum singular_values(const TruncatedOperator& op, int k, const SvdOptions& opts = {});

/// All singular values of a dense matrix, nonincreasing (LAPACK gesdd).
std::vector<double> dense_singular_values(const MatrixXc& a);

/// sup_k (k+1)^{1/p} mu_k
double weak_schatten_quasinorm(const SingularSpectrum& s, double p);

struct SchattenFit
{
    int k_min = 0;
    int k_max = 0;
    int points = 0;
    double slope = 0.0;     ///< of log mu_k against log k
    double exponent = 0.0;  ///< -slope, the decay exponent of mu_k
    double p_hat = 0.0;     ///< -1 / slope
    double intercept = 0.0;
    double residual = 0.0;  ///< rms of the log-log fit
};

nlohmann::json to_json(const SchattenFit& f);

///
/// Least squares of log mu_k on log k for k in [k_min, k_max]. Values below
/// 1e-13 mu_0 are dropped as numerically zero; fewer than 8 remaining points is an
/// InputError, as is k_min < 1 or k_max beyond the computed range.
///
SchattenFit decay_fit(const SingularSpectrum& s, int k_min, int k_max);

/// CSV with header "k,mu".
void write_spectrum_csv(std::ostream& os, const SingularSpectrum& s);

} // namespace heislab

#endif
