///
/// Independent closed forms used as test oracles. Nothing here calls the library solvers.
///
#ifndef HEISLAB_TEST_ORACLES_HPP
#define HEISLAB_TEST_ORACLES_HPP

#include <cmath>
#include <numbers>

namespace oracle
{

///
/// CC distance from e to (t, z) in the standard H^1 with the signed-area convention:
/// geodesics are circular arcs whose segment over the chord z encloses area |t|.
///
inline double h1_cc_distance(double t, double z1, double z2)
{
    const double r = std::hypot(z1, z2);
    t = std::abs(t);
    if (r == 0.0)
        return 2.0 * std::sqrt(std::numbers::pi * t);
    if (t == 0.0)
        return r;
    const double target = t / (r * r);
    auto g = [](double th) { return (th - std::sin(th)) / (8.0 * std::pow(std::sin(th / 2), 2)); };
    double lo = 0.0, hi = 2.0 * std::numbers::pi - 1e-15;
    for (int i = 0; i < 200; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < target ? lo : hi) = mid;
    }
    const double th = 0.5 * (lo + hi);
    return th < 1e-8 ? r : r * th / (2.0 * std::sin(th / 2));
}

/// sup_theta |sum_{n<=n_max} 2 w^n cos(2^n theta)| is attained at theta = 0.
inline double lacunary_at_zero(double beta, int n_max)
{
    double s = 0.0;
    for (int n = 0; n <= n_max; ++n)
        s += 2.0 * std::exp2(-n * beta);
    return s;
}

///
/// Printed-set lattice sum by direct double summation. Nonzero differences 2^n - 2^m
/// have a unique representation (binary expansion), so for l >= 1 every group is a
/// single pair; for l = 0 the zero-difference group is the diagonal n = m.
///
inline double printed_lattice(long long l, double beta, int n_max)
{
    const double q2 = std::exp2(-2.0 * beta);
    double s = 0.0, diag = 0.0;
    for (int m = 0; m <= n_max; ++m)
        for (int n = 0; n <= n_max; ++n)
        {
            const double pm = std::ldexp(1.0, m), pn = std::ldexp(1.0, n);
            if (!(pn - l >= pm && pm >= l + 1))
                continue;
            if (n == m)
                diag += std::pow(q2, m);
            else
                s += std::pow(q2, n + m);
        }
    return s + diag * diag;
}

/// int_0^{1/(2l+2)} (1 - l y)^{-1/2} dy / ln 2 by composite Simpson on 2^16 panels.
inline double bound_integral_simpson(long long l)
{
    const int panels = 1 << 16;
    const double b = 1.0 / (2.0 * l + 2.0), h = b / panels;
    auto f = [l](double y) { return 1.0 / std::sqrt(1.0 - l * y); };
    double s = f(0.0) + f(b);
    for (int i = 1; i < panels; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0 / std::numbers::ln2;
}

} // namespace oracle

#endif
