#include "heislab/aniso_blocks.hpp"

#include "heislab/error.hpp"
#include "heislab/fourier.hpp"
#include "heislab/symbol_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace heislab
{

namespace
{

bool is_pow2(int n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

int signed_freq(int a, int n)
{
    return a < n / 2 ? a : a - n;
}

double sup_abs(const std::vector<cplx>& v)
{
    double m = 0.0;
    for (const auto& x : v)
        m = std::max(m, std::abs(x));
    return m;
}

} // namespace

HeisPoint BoxFunction::point(int it, int i1, int i2) const
{
    const double h = 2.0 * std::numbers::pi / n;
    HeisPoint p;
    p.t = -std::numbers::pi + h * it;
    p.z = Eigen::Vector2d(-std::numbers::pi + h * i1, -std::numbers::pi + h * i2);
    return p;
}

BoxFunction sample_box(int n, const std::function<double(const HeisPoint&)>& fn)
{
    if (!is_pow2(n) || n < 4)
        throw InputError("sample_box: resolution must be a power of two >= 4");
    BoxFunction f;
    f.n = n;
    f.values.resize(static_cast<std::size_t>(n) * n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                f.values[(static_cast<std::size_t>(a) * n + b) * n + c] = fn(f.point(a, b, c));
    return f;
}

nlohmann::json to_json(const AnisoBlocksReport& r)
{
    return {{"n", r.n},
            {"s", r.s},
            {"blocks", r.blocks},
            {"block_sup", r.block_sup},
            {"dominant_block", r.dominant_block},
            {"identity_residual", r.identity_residual},
            {"reconstruction_residual", r.reconstruction_residual},
            {"besov_sup", r.besov_sup},
            {"holder_seminorm", r.holder_seminorm},
            {"holder_norm", r.holder_norm},
            {"ratio", r.ratio}};
}

AnisoBlocksReport aniso_blocks_check(const HeisConfig& cfg, const BoxFunction& f, double s)
{
    if (cfg.dim() != 2)
        throw InputError("aniso_blocks_check: the box model needs d = 2");
    const int n = f.n;
    if (!is_pow2(n) || n < 4)
        throw InputError("aniso_blocks_check: resolution must be a power of two >= 4");
    if (f.values.size() != static_cast<std::size_t>(n) * n * n)
        throw InputError("aniso_blocks_check: sample count does not match n^3");
    if (!(s > 0.0 && s < 1.0))
        throw InputError("aniso_blocks_check: s must lie in (0, 1)");

    const std::size_t total = f.values.size();
    std::vector<cplx> spec(f.values.begin(), f.values.end());
    spec = dft3(spec, n, n, n, -1);
    for (auto& c : spec)
        c /= static_cast<double>(total);

    std::vector<double> rho(total);
    double rho_max = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
            {
                const double tau = signed_freq(a, n);
                const double z2 = std::pow(signed_freq(b, n), 2) + std::pow(signed_freq(c, n), 2);
                const double r = std::pow(tau * tau + z2 * z2, 0.25);
                rho[(static_cast<std::size_t>(a) * n + b) * n + c] = r;
                rho_max = std::max(rho_max, r);
            }
    int J = 0;
    while (std::exp2(J) < rho_max)
        ++J;

    AnisoBlocksReport r;
    r.n = n;
    r.s = s;
    r.blocks = J + 1;

    std::vector<cplx> recon(total, cplx{});
    std::vector<cplx> buf(total), buf3(total);
    double best = -1.0;
    for (int j = 0; j <= J; ++j)
    {
        for (std::size_t i = 0; i < total; ++i)
        {
            const double w = lp_window(j, rho[i]);
            const double w3 = lp_window(j - 1, rho[i]) + w + lp_window(j + 1, rho[i]);
            buf[i] = w * spec[i];
            buf3[i] = w3 * w * spec[i] - buf[i];
        }
        const auto block = dft3(buf, n, n, n, +1);
        const auto resid = dft3(buf3, n, n, n, +1);
        const double sup = sup_abs(block);
        r.block_sup.push_back(sup);
        r.identity_residual = std::max(r.identity_residual, sup_abs(resid));
        for (std::size_t i = 0; i < total; ++i)
            recon[i] += block[i];
        const double scaled = std::exp2(s * j) * sup;
        r.besov_sup = std::max(r.besov_sup, scaled);
        if (sup > best)
        {
            best = sup;
            r.dominant_block = j;
        }
    }
    double fsup = 0.0;
    for (std::size_t i = 0; i < total; ++i)
    {
        r.reconstruction_residual = std::max(r.reconstruction_residual, std::abs(recon[i] - f.values[i]));
        fsup = std::max(fsup, std::abs(f.values[i]));
    }

    // dyadic offsets along t, z1, z2 and the main diagonal, no wrap-around
    const int dirs[4][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
    auto at = [&](int a, int b, int c) { return f.values[(static_cast<std::size_t>(a) * n + b) * n + c]; };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
            {
                const HeisPoint x = f.point(a, b, c);
                for (const auto& d : dirs)
                    for (int step = 1; step < n; step *= 2)
                    {
                        const int a2 = a + d[0] * step, b2 = b + d[1] * step, c2 = c + d[2] * step;
                        if (a2 >= n || b2 >= n || c2 >= n)
                            break;
                        const double dist =
                            quasi_metric(QuasiMetricKind::anisotropic, x, f.point(a2, b2, c2), cfg);
                        const double q = std::abs(at(a2, b2, c2) - at(a, b, c)) / std::pow(dist, s);
                        r.holder_seminorm = std::max(r.holder_seminorm, q);
                    }
            }
    r.holder_norm = fsup + r.holder_seminorm;
    r.ratio = r.holder_norm > 0.0 ? r.besov_sup / r.holder_norm : 0.0;
    return r;
}

} // namespace heislab
