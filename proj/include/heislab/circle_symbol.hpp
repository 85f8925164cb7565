///
/// \file circle_symbol.hpp
///
/// Functions on the circle stored as two-sided finite Fourier sequences
/// f(theta) = sum_{|k| <= N} c_k e^{i k theta}.
///
#ifndef HEISLAB_CIRCLE_SYMBOL_HPP
#define HEISLAB_CIRCLE_SYMBOL_HPP

#include "heislab/fourier.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace heislab
{

class CircleSymbol
{
public:
    CircleSymbol() : CircleSymbol(0) {}
    explicit CircleSymbol(int cutoff, nlohmann::json meta = {});
    CircleSymbol(std::vector<cplx> centered_coeffs, nlohmann::json meta);

    int cutoff() const noexcept { return cutoff_; }
    const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
    const nlohmann::json& meta() const noexcept { return meta_; }
    void set_meta(nlohmann::json meta) { meta_ = std::move(meta); }

    /// Zero outside the stored window.
    cplx coeff(std::int64_t k) const noexcept;
    void set_coeff(int k, cplx c);

    /// Largest |k| with a nonzero coefficient; 0 for constants and zero.
    int top_frequency() const noexcept;

    /// Frequencies with nonzero coefficients, ascending.
    std::vector<int> support() const;

    /// Number of nonzero coefficients.
    std::size_t nonzeros() const;

    bool is_real_valued(double tol = 0.0) const;
    bool is_zero() const noexcept;

    cplx evaluate(double theta) const;

    /// Stable hash of the coefficient bits and the metadata.
    std::uint64_t content_hash() const;

    /// Same symbol stored with a larger (or smaller, if lossless) cutoff.
    CircleSymbol with_cutoff(int cutoff) const;

    /// Complex conjugate function: c_k -> conj(c_{-k}).
    CircleSymbol conjugate() const;

    CircleSymbol operator+(const CircleSymbol& other) const;
    CircleSymbol operator*(cplx scale) const;
    CircleSymbol plus_constant(cplx c) const;

private:
    int cutoff_ = 0;
    std::vector<cplx> coeffs_;
    nlohmann::json meta_;
};

/// e_m(theta) = e^{i m theta}
CircleSymbol monomial(int m);
CircleSymbol constant_symbol(cplx c);

///
/// Lacunary series sum_{n=0}^{n_max} 2^{-n beta} (e_{2^n} + e_{-2^n});
/// beta = 1/4 is the truncated Weierstrass-type function W.
/// Throws InputError unless 0 < beta <= 1 and 0 <= n_max <= 24.
///
CircleSymbol make_lacunary(double beta, int n_max);

/// Triangle wave |theta| on [-pi, pi], coefficients up to |k| <= N.
CircleSymbol make_triangle_wave(int N);

///
/// Real random symbol: c_k = xi_k |k|^{-beta - 1/2} for 1 <= |k| <= N,
/// xi_k = (g1 + i g2)/sqrt 2 with c_{-k} = conj(c_k), c_0 = 0. Deterministic in seed.
///
CircleSymbol make_random_symbol(double beta, int N, std::uint64_t seed);

///
/// Builds a symbol from a JSON spec or a shorthand string:
///   {"kind":"lacunary","beta":0.25,"n_max":12}
///   {"kind":"trig","coeffs":{"1":0.5,"-1":[0.5,0.0]}}
///   {"kind":"random","beta":0.5,"seed":7,"N":256}
///   {"kind":"monomial","k":3} | {"kind":"constant","value":2} | {"kind":"triangle","N":4096}
///   "e1", "e-2", "cos", "sin", "triangle", "W"
/// Unknown kinds or keys are rejected with InputError.
///
CircleSymbol make_symbol(const nlohmann::json& spec);

} // namespace heislab

#endif
