#include "heislab/symbol_lab.hpp"

#include "heislab/error.hpp"
#include "heislab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace heislab
{

namespace
{

double smooth_step_factor(double x)
{
    return x > 0.0 ? std::exp(-1.0 / x) : 0.0;
}

int auto_grid(const CircleSymbol& f, int oversample)
{
    return static_cast<int>(std::max<std::size_t>(
        64, next_pow2(static_cast<std::size_t>(oversample) * (f.top_frequency() + 1))));
}

} // namespace

double lp_bump(double r)
{
    r = std::abs(r);
    if (r <= 1.0)
        return 1.0;
    if (r >= 2.0)
        return 0.0;
    const double a = smooth_step_factor(2.0 - r);
    const double b = smooth_step_factor(r - 1.0);
    return a / (a + b);
}

double lp_window(int j, double r)
{
    if (j < 0)
        return 0.0;
    if (j == 0)
        return lp_bump(r);
    return lp_bump(std::ldexp(r, -j)) - lp_bump(std::ldexp(r, -(j - 1)));
}

int lp_top_block(int top)
{
    int J = 0;
    while ((std::int64_t{1} << J) < top)
        ++J;
    return J;
}

CircleSymbol BlockDecomposition::reconstruct(int N) const
{
    CircleSymbol out(N, {{"kind", "lp_reconstruction"}});
    for (const auto& b : blocks)
    {
        const int n = std::min(N, b.cutoff());
        for (int k = -n; k <= n; ++k)
            if (b.coeff(k) != cplx{})
                out.set_coeff(k, out.coeff(k) + b.coeff(k));
    }
    return out;
}

BlockDecomposition lp_blocks(const CircleSymbol& f)
{
    BlockDecomposition out;
    out.window = {{"bump", "exp(-1/(2-r)) / (exp(-1/(2-r)) + exp(-1/(r-1)))"},
                  {"support", "2^(j-1) < |k| < 2^(j+1)"}};
    const int J = lp_top_block(f.top_frequency());
    const int N = f.cutoff();
    for (int j = 0; j <= J; ++j)
    {
        const int cut = static_cast<int>(std::min<std::int64_t>(N, std::int64_t{2} << j));
        CircleSymbol b(cut, {{"kind", "lp_block"}, {"j", j}});
        const int lo = j == 0 ? 0 : (1 << (j - 1)) + 1;
        for (int k = lo; k <= cut; ++k)
        {
            const double w = lp_window(j, k);
            if (w == 0.0)
                continue;
            b.set_coeff(k, w * f.coeff(k));
            b.set_coeff(-k, w * f.coeff(-k));
        }
        out.blocks.push_back(std::move(b));
    }
    return out;
}

double sup_norm(const CircleSymbol& f, int grid)
{
    if (f.is_zero())
        return 0.0;
    if (grid <= 0)
        grid = auto_grid(f, 4);
    const auto v = evaluate_on_grid(f.coeffs(), grid);
    double m = 0.0;
    for (const auto& x : v)
        m = std::max(m, std::abs(x));
    return m;
}

double lipschitz_norm(const CircleSymbol& f, int grid)
{
    if (f.top_frequency() == 0)
        return 0.0;
    if (grid <= 0)
        grid = auto_grid(f, 16);
    const auto v = evaluate_derivative_on_grid(f.coeffs(), grid);
    double m = 0.0;
    for (const auto& x : v)
        m = std::max(m, std::abs(x));
    return m;
}

nlohmann::json to_json(const HolderReport& r)
{
    return {{"alpha", r.alpha},
            {"cc_exponent", r.cc_exponent},
            {"seminorm", r.seminorm_estimate},
            {"witness", {r.witness_x, r.witness_y}},
            {"grid", r.grid}};
}

int default_holder_grid(const CircleSymbol& f)
{
    return static_cast<int>(
        std::max<std::size_t>(1024, next_pow2(16 * static_cast<std::size_t>(f.top_frequency() + 1))));
}

HolderReport holder_seminorm(const CircleSymbol& f, double alpha, int grid)
{
    if (grid < 8)
        throw InputError("holder_seminorm: grid must be >= 8");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InputError("holder_seminorm: alpha must lie in (0, 1]");
    HolderReport r;
    r.alpha = alpha;
    r.cc_exponent = 2.0 * alpha;
    r.grid = grid;
    if (f.top_frequency() == 0)
        return r;

    const auto v = evaluate_on_grid(f.coeffs(), grid);
    const double h = 2.0 * std::numbers::pi / grid;
    for (int s = 1; s <= grid / 2; s *= 2)
    {
        const double scale = std::pow(h * s, -alpha);
        for (int i = 0; i < grid; ++i)
        {
            const double q = std::abs(v[(i + s) % grid] - v[i]) * scale;
            if (q > r.seminorm_estimate)
            {
                r.seminorm_estimate = q;
                r.witness_x = h * i;
                r.witness_y = h * (i + s);
            }
        }
    }
    return r;
}

std::vector<double> besov_block_values(const CircleSymbol& f, double s)
{
    if (!(s >= 0.0))
        throw InputError("besov_norm: s must be >= 0");
    const auto dec = lp_blocks(f);
    std::vector<double> out;
    out.reserve(dec.blocks.size());
    for (std::size_t j = 0; j < dec.blocks.size(); ++j)
        out.push_back(std::exp2(s * static_cast<double>(j)) * sup_norm(dec.blocks[j]));
    return out;
}

double besov_norm(const CircleSymbol& f, double s, BesovQ q)
{
    const auto v = besov_block_values(f, s);
    double acc = 0.0;
    for (double x : v)
        acc = q == BesovQ::infinity ? std::max(acc, x) : acc + x;
    return acc;
}

bool EquivReport::finite() const
{
    return !rows.empty() && std::isfinite(min_ratio) && std::isfinite(max_ratio) && min_ratio > 0.0;
}

nlohmann::json to_json(const EquivReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"index", row.index},
                        {"besov", row.besov},
                        {"holder_norm", row.holder_norm},
                        {"ratio", row.ratio}});
    return {{"s", r.s},
            {"cc_exponent", 2.0 * r.s},
            {"min_ratio", r.min_ratio},
            {"max_ratio", r.max_ratio},
            {"band", r.rows.empty() ? 0.0 : r.band()},
            {"excluded", r.excluded},
            {"rows", rows}};
}

EquivReport besov_holder_equiv_check(const std::vector<CircleSymbol>& corpus, double s,
                                     int holder_grid, int jobs)
{
    if (corpus.empty())
        throw InputError("besov_holder_equiv_check: corpus is empty");
    if (!(s > 0.0 && s < 1.0))
        throw InputError("besov_holder_equiv_check: s must lie in (0, 1)");

    std::vector<EquivRow> rows(corpus.size());
    std::vector<char> keep(corpus.size(), 0);
    parallel_for(corpus.size(), jobs, [&](std::size_t i) {
        const auto& f = corpus[i];
        if (f.top_frequency() == 0)
            return;
        const int grid = holder_grid > 0 ? holder_grid : default_holder_grid(f);
        EquivRow& row = rows[i];
        row.index = i;
        row.besov = besov_norm(f, s, BesovQ::infinity);
        row.holder_norm = sup_norm(f) + holder_seminorm(f, s, grid).seminorm_estimate;
        row.ratio = row.besov / row.holder_norm;
        keep[i] = 1;
    });

    EquivReport r;
    r.s = s;
    r.min_ratio = std::numeric_limits<double>::infinity();
    r.max_ratio = 0.0;
    for (std::size_t i = 0; i < corpus.size(); ++i)
    {
        if (!keep[i])
        {
            ++r.excluded;
            continue;
        }
        r.rows.push_back(rows[i]);
        r.min_ratio = std::min(r.min_ratio, rows[i].ratio);
        r.max_ratio = std::max(r.max_ratio, rows[i].ratio);
    }
    if (r.rows.empty())
        throw InputError("besov_holder_equiv_check: every corpus member is constant");
    return r;
}

nlohmann::json to_json(const KFunctionalReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back(
            {{"t", row.t}, {"khat", row.khat}, {"J", row.level}, {"khat_blocks", row.khat_blocks}});
    return {{"theta", r.theta},
            {"block_constant", r.block_constant},
            {"sup_scaled", r.sup_scaled},
            {"sup_scaled_blocks", r.sup_scaled_blocks},
            {"holder_norm", r.holder_norm},
            {"ratio", r.ratio},
            {"rows", rows}};
}

KFunctionalReport k_functional_probe(const CircleSymbol& f, double theta,
                                     const std::vector<double>& t_grid)
{
    if (!(theta > 0.0 && theta < 1.0))
        throw InputError("k_functional_probe: theta must lie in (0, 1)");
    for (double t : t_grid)
        if (!(t > 0.0) || !std::isfinite(t))
            throw InputError("k_functional_probe: t values must be positive and finite");

    KFunctionalReport r;
    r.theta = theta;
    const auto dec = lp_blocks(f);
    const std::size_t nb = dec.blocks.size();

    std::vector<double> b(nb);
    for (std::size_t j = 0; j < nb; ++j)
        b[j] = sup_norm(dec.blocks[j]);

    // level J = -1 .. nb-1 stored at index J+1
    std::vector<double> tail(nb + 1, 0.0), lip_direct(nb + 1, 0.0), lip_blocks(nb + 1, 0.0);
    for (std::size_t J = nb; J-- > 0;)
        tail[J] = tail[J + 1] + b[J];
    CircleSymbol partial(f.cutoff(), {{"kind", "lp_partial_sum"}});
    for (std::size_t j = 0; j < nb; ++j)
    {
        const auto& blk = dec.blocks[j];
        for (int k = -blk.cutoff(); k <= blk.cutoff(); ++k)
            if (blk.coeff(k) != cplx{})
                partial.set_coeff(k, partial.coeff(k) + blk.coeff(k));
        lip_direct[j + 1] = lipschitz_norm(partial);
        lip_blocks[j + 1] = lip_blocks[j] + r.block_constant * std::exp2(static_cast<double>(j)) * b[j];
    }

    for (double t : t_grid)
    {
        KFunctionalRow row;
        row.t = t;
        row.khat = std::numeric_limits<double>::infinity();
        row.khat_blocks = std::numeric_limits<double>::infinity();
        for (std::size_t J = 0; J <= nb; ++J)
        {
            const double lip = std::min(lip_direct[J], lip_blocks[J]);
            const double k = tail[J] + t * lip;
            if (k < row.khat)
            {
                row.khat = k;
                row.level = static_cast<int>(J) - 1;
            }
            row.khat_blocks = std::min(row.khat_blocks, tail[J] + t * lip_blocks[J]);
        }
        r.sup_scaled = std::max(r.sup_scaled, std::pow(t, -theta) * row.khat);
        r.sup_scaled_blocks = std::max(r.sup_scaled_blocks, std::pow(t, -theta) * row.khat_blocks);
        r.rows.push_back(row);
    }

    r.holder_norm = sup_norm(f) + holder_seminorm(f, theta, default_holder_grid(f)).seminorm_estimate;
    r.ratio = r.holder_norm > 0.0 ? r.sup_scaled / r.holder_norm : 0.0;
    return r;
}

} // namespace heislab
