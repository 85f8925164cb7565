///
/// \file hardy_spectra.hpp
///
/// Operators on the Hardy space of S^1 in the Fourier basis, truncated to the
/// frequency window -N..N. Vectors are indexed by k + N.
///
#ifndef HEISLAB_HARDY_SPECTRA_HPP
#define HEISLAB_HARDY_SPECTRA_HPP

#include "heislab/circle_symbol.hpp"
#include "heislab/error.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace heislab
{

using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

/// Zeroes the negative frequencies of a centered coefficient vector.
VectorXc szego_project(const VectorXc& v);

struct MultiplyResult
{
    VectorXc coeffs;         ///< window -N..N of a * v
    bool truncated = false;  ///< true if a * v had mass outside the window
};

///
/// Coefficients of a * v on the window of v. The sparse path convolves over the
/// support of a; the FFT path uses a zero-padded linear convolution.
///
MultiplyResult multiply(const CircleSymbol& a, const VectorXc& v);
MultiplyResult multiply_sparse(const CircleSymbol& a, const VectorXc& v);
MultiplyResult multiply_fft(const CircleSymbol& a, const VectorXc& v);

///
/// Matrix-free operator on the window -N..N. The domain and range masks mark the
/// coordinates that can carry a nonzero column or row; dense SVDs are taken on the
/// compressed block.
///
class TruncatedOperator
{
public:
    using Apply = std::function<VectorXc(const VectorXc&)>;

    TruncatedOperator(int N, Apply apply, Apply adjoint, std::vector<char> domain_mask,
                      std::vector<char> range_mask, nlohmann::json descriptor);

    int cutoff() const noexcept { return N_; }
    int size() const noexcept { return 2 * N_ + 1; }
    VectorXc apply(const VectorXc& v) const;
    VectorXc apply_adjoint(const VectorXc& v) const;
    MatrixXc dense() const;

    const std::vector<char>& domain_mask() const noexcept { return domain_; }
    const std::vector<char>& range_mask() const noexcept { return range_; }
    const nlohmann::json& descriptor() const noexcept { return descriptor_; }

private:
    int N_;
    Apply apply_, adjoint_;
    std::vector<char> domain_, range_;
    nlohmann::json descriptor_;
};

/// Multiplication by a compressed to the window.
TruncatedOperator multiplication_op(const CircleSymbol& a, int N);

/// H_a = (1 - P) a P on the window.
TruncatedOperator hankel_op(const CircleSymbol& a, int N);

/// [P, a] = P a - a P on the window.
TruncatedOperator commutator_P(const CircleSymbol& a, int N);

///
/// Rebuilds an operator from its descriptor. Works when the symbol metadata is
/// itself a symbol spec; throws InputError otherwise or on a hash mismatch.
///
TruncatedOperator operator_from_descriptor(const nlohmann::json& descriptor);

/// Stable cache key of a descriptor: FNV-1a of its canonical dump.
std::uint64_t descriptor_hash(const nlohmann::json& descriptor);

class PowerIterationStagnation : public NumericError
{
public:
    PowerIterationStagnation(const std::string& what, double estimate, VectorXc iterate)
        : NumericError(what), estimate_(estimate), iterate_(std::move(iterate))
    {
    }
    double estimate() const noexcept { return estimate_; }
    const VectorXc& iterate() const noexcept { return iterate_; }

private:
    double estimate_;
    VectorXc iterate_;
};

struct PowerIterationOptions
{
    double tol = 1e-6;
    int max_iterations = 10000;
    std::uint64_t seed = 0;
};

struct NormEstimate
{
    double value = 0.0;
    int iterations = 0;
};

///
/// ||A|| by power iteration on A*A; stops when successive Rayleigh quotients agree to
/// tol relative. Throws PowerIterationStagnation after max_iterations.
///
NormEstimate operator_norm(const TruncatedOperator& op, const PowerIterationOptions& opts = {});

/// Same with the roles of A and A* exchanged, i.e. iteration on A A*.
NormEstimate operator_norm_adjoint(const TruncatedOperator& op, const PowerIterationOptions& opts = {});

///
/// The commutator [D, f] for D = (2P - 1)(-i d/dtheta) = diag(|j|):
/// matrix entries (|j| - |k|) f^(j - k).
///
TruncatedOperator calderon_commutator(const CircleSymbol& f, int N);

struct CalderonRow
{
    int N = 0;
    double norm = 0.0;
    double norm_adjoint = 0.0;  ///< from M M*
    int iterations = 0;
};

struct CalderonReport
{
    std::vector<CalderonRow> rows;
    double growth_exponent = 0.0;  ///< least-squares slope of log norm against log N
    double top_variation = 0.0;    ///< |norm(N_last) - norm(N_prev)| / norm(N_last)
    std::uint64_t seed = 0;
};

nlohmann::json to_json(const CalderonReport& r);

CalderonReport calderon_norm_probe(const CircleSymbol& f, const std::vector<int>& N_list,
                                   const PowerIterationOptions& opts = {}, int jobs = 1);

} // namespace heislab

#endif
