///
/// \file fourier.hpp
///
/// Thin FFTW wrappers. Plans are created per call with FFTW_ESTIMATE under a
/// process-wide planner lock; execution is lock-free.
///
#ifndef HEISLAB_FOURIER_HPP
#define HEISLAB_FOURIER_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace heislab
{

using cplx = std::complex<double>;

/// out[j] = sum_k in[k] exp(sign * 2 pi i j k / n), unnormalized.
std::vector<cplx> dft(std::span<const cplx> in, int sign);

/// 3-d transform of an n0 x n1 x n2 row-major array, unnormalized.
std::vector<cplx> dft3(std::span<const cplx> in, int n0, int n1, int n2, int sign);

///
/// Samples f(theta_j) = sum_{|k| <= N} c_k e^{i k theta_j} at theta_j = 2 pi j / grid.
/// Frequencies are folded modulo grid, so the samples are exact for any grid size.
///
std::vector<cplx> evaluate_on_grid(std::span<const cplx> coeffs_centered, int grid);

/// Same for the derivative f'(theta) = sum i k c_k e^{i k theta}.
std::vector<cplx> evaluate_derivative_on_grid(std::span<const cplx> coeffs_centered, int grid);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

} // namespace heislab

#endif
