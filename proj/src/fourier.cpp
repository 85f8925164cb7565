#include "heislab/fourier.hpp"

#include "heislab/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace heislab
{

namespace
{

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct Plan
{
    fftw_plan p = nullptr;
    ~Plan()
    {
        if (p)
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(p);
        }
    }
};

fftw_complex* as_fftw(cplx* p)
{
    return reinterpret_cast<fftw_complex*>(p);
}

} // namespace

std::vector<cplx> dft(std::span<const cplx> in, int sign)
{
    const int n = static_cast<int>(in.size());
    std::vector<cplx> buf(in.begin(), in.end());
    if (n == 0)
        return buf;
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.p = fftw_plan_dft_1d(n, as_fftw(buf.data()), as_fftw(buf.data()),
                                  sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan.p);
    return buf;
}

std::vector<cplx> dft3(std::span<const cplx> in, int n0, int n1, int n2, int sign)
{
    if (static_cast<std::size_t>(n0) * n1 * n2 != in.size())
        throw InputError("dft3: size mismatch");
    std::vector<cplx> buf(in.begin(), in.end());
    Plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.p = fftw_plan_dft_3d(n0, n1, n2, as_fftw(buf.data()), as_fftw(buf.data()),
                                  sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan.p);
    return buf;
}

namespace
{

std::vector<cplx> evaluate_weighted(std::span<const cplx> coeffs, int grid, bool derivative)
{
    const int N = (static_cast<int>(coeffs.size()) - 1) / 2;
    if (static_cast<int>(coeffs.size()) != 2 * N + 1)
        throw InputError("evaluate_on_grid: coefficient vector must have odd length 2N+1");
    if (grid < 1)
        throw InputError("evaluate_on_grid: grid must be positive");
    std::vector<cplx> buf(grid, cplx{});
    for (int k = -N; k <= N; ++k)
    {
        const cplx c = coeffs[k + N];
        buf[(k % grid + grid) % grid] += derivative ? cplx(0.0, k) * c : c;
    }
    return dft(buf, +1);
}

} // namespace

std::vector<cplx> evaluate_on_grid(std::span<const cplx> coeffs_centered, int grid)
{
    return evaluate_weighted(coeffs_centered, grid, false);
}

std::vector<cplx> evaluate_derivative_on_grid(std::span<const cplx> coeffs_centered, int grid)
{
    return evaluate_weighted(coeffs_centered, grid, true);
}

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

} // namespace heislab
