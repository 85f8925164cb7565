#include "heislab/dixmier.hpp"
#include "heislab/parallel.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <unordered_map>

namespace heislab
{

namespace
{

using i128 = __int128;

struct I128Hash
{
    std::size_t operator()(i128 x) const noexcept
    {
        const auto u = static_cast<unsigned __int128>(x);
        const auto lo = static_cast<std::uint64_t>(u), hi = static_cast<std::uint64_t>(u >> 64);
        return std::hash<std::uint64_t>{}(lo ^ (hi * 0x9E3779B97F4A7C15ull));
    }
};

i128 pow2(int n) { return static_cast<i128>(1) << n; }

/// Smallest m with 2^m >= l + 1.
int first_m(std::int64_t l)
{
    int m = 0;
    while (pow2(m) < static_cast<i128>(l) + 1)
        ++m;
    return m;
}

void check_lattice_args(const char* who, std::int64_t l, double beta, int n_max)
{
    if (l < 0)
        throw InputError(std::string(who) + ": l must be >= 0");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw InputError(std::string(who) + ": beta must be positive");
    if (n_max < 1 || n_max > lattice_n_max_limit)
        throw InputError(std::string(who) + ": n_max must lie in [1, " + std::to_string(lattice_n_max_limit) + "]");
}

bool in_set(LatticeVariant v, std::int64_t l, i128 pn, i128 pm)
{
    if (pm < static_cast<i128>(l) + 1)
        return false;
    return v == LatticeVariant::printed ? pn - l >= pm : pn >= pm - l;
}

// ---- sparse vectors on the frequency lattice ----

using SparseVec = std::map<std::int64_t, cplx>;
using Terms = std::vector<std::pair<std::int64_t, cplx>>;  // ascending frequency, no k = 0

Terms nonconstant_terms(const CircleSymbol& a)
{
    Terms t;
    for (int k : a.support())
        if (k != 0)
            t.emplace_back(k, a.coeff(k));
    return t;
}

/// [P, a] v. The constant term of a commutes with P and is never read.
SparseVec commute(const Terms& a, const SparseVec& v)
{
    SparseVec out;
    for (const auto& [j, c] : v)
    {
        if (j >= 0)
        {
            // -(1 - P)(a e_j): frequencies j + k < 0
            for (auto it = a.begin(); it != a.end() && it->first < -j; ++it)
                out[j + it->first] -= it->second * c;
        }
        else
        {
            // P(a e_j): frequencies j + k >= 0
            for (auto it = a.rbegin(); it != a.rend() && it->first >= -j; ++it)
                out[j + it->first] += it->second * c;
        }
    }
    return out;
}

struct Chain
{
    std::vector<Terms> a;        // a_1 .. a_2k
    std::vector<Terms> a_conj;   // conj(a_j), for [P,a]^* = -[P, conj a]
};

Chain make_chain(const std::vector<CircleSymbol>& symbols)
{
    Chain c;
    for (const auto& s : symbols)
    {
        c.a.push_back(nonconstant_terms(s));
        c.a_conj.push_back(nonconstant_terms(s.conjugate()));
    }
    return c;
}

///
/// < P a_{o(1)} (1-P) a_{o(2)} P ... a_{o(2k)} P e_l, e_l >, through the identity
/// P a_1 (1-P) a_2 P ... = (-1)^k P [P,a_1] ... [P,a_2k] P, meeting in the middle.
///
cplx xi_entry(const Chain& ch, const std::vector<int>& order, std::int64_t l)
{
    const int two_k = static_cast<int>(order.size()), k = two_k / 2;
    SparseVec right{{l, 1.0}}, left{{l, 1.0}};
    for (int j = two_k - 1; j >= k; --j)
        right = commute(ch.a[order[j]], right);
    for (int j = 0; j < k; ++j)
    {
        left = commute(ch.a_conj[order[j]], left);
        for (auto& [f, c] : left)
            c = -c;
    }
    cplx d = 0.0;
    for (const auto& [f, c] : right)
        if (auto it = left.find(f); it != left.end())
            d += c * std::conj(it->second);
    return k % 2 ? -d : d;
}

cplx zeta_entry(const Chain& ch, std::int64_t l)
{
    const int k = static_cast<int>(ch.a.size()) / 2;
    SparseVec v{{l, 1.0}};
    for (int j = k - 1; j >= 0; --j)
    {
        const Terms& x = ch.a[2 * j];
        const Terms& y = ch.a[2 * j + 1];
        SparseVec xy = commute(x, commute(y, v));
        const SparseVec yx = commute(y, commute(x, v));
        for (const auto& [f, c] : yx)
            xy[f] -= c;
        v = std::move(xy);
    }
    auto it = v.find(l);
    return it == v.end() ? cplx(0.0) : it->second;
}

void check_tuple(const char* who, const std::vector<CircleSymbol>& symbols, std::int64_t N, int k)
{
    if (k < 1)
        throw InputError(std::string(who) + ": k must be >= 1");
    if (symbols.size() != static_cast<std::size_t>(2 * k))
        throw InputError(std::string(who) + ": expected 2k symbols");
    if (N < 0)
        throw InputError(std::string(who) + ": N must be >= 0");
}

void fill_series(XiEstimate& e)
{
    std::vector<double> re(e.diagonal.size()), im(e.diagonal.size());
    for (std::size_t i = 0; i < e.diagonal.size(); ++i)
    {
        re[i] = e.diagonal[i].real();
        im[i] = e.diagonal[i].imag();
    }
    const auto cps = dyadic_checkpoints(e.N);
    const nlohmann::json src = {{"functional", e.functional}, {"k", e.k}, {"symbols", e.symbols}};
    e.real_part = signed_log_cesaro(re, cps, src);
    e.imag_part = signed_log_cesaro(im, cps, src);
}

nlohmann::json symbols_meta(const std::vector<CircleSymbol>& symbols)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : symbols)
        out.push_back(s.meta());
    return out;
}

const char* const flag_names[] = {"lattice>=subsum",       "lattice_printed>=subsum", "subsum>=integral",
                                  "lattice>=claimed",      "lattice_printed>=claimed", "lattice>=sqrt6",
                                  "lattice_printed>=sqrt6", "claimed_integral<=subsum",  "quadrature==closed_form",
                                  "oracle==lattice"};

} // namespace

// ---- log-Cesaro ----

double LogCesaroSeries::dyadic_min() const
{
    double m = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < N.size(); ++i)
        if (N[i] > 0 && (N[i] & (N[i] - 1)) == 0)
            m = std::isnan(m) ? partial[i] : std::min(m, partial[i]);
    return m;
}

double LogCesaroSeries::dyadic_max() const
{
    double m = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < N.size(); ++i)
        if (N[i] > 0 && (N[i] & (N[i] - 1)) == 0)
            m = std::isnan(m) ? partial[i] : std::max(m, partial[i]);
    return m;
}

nlohmann::json to_json(const LogCesaroSeries& s)
{
    auto nan_to_null = [](double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); };
    return {{"N", s.N},
            {"Lambda", s.partial},
            {"dyadic_min", nan_to_null(s.dyadic_min())},
            {"dyadic_max", nan_to_null(s.dyadic_max())},
            {"source", s.source}};
}

void write_log_cesaro_csv(std::ostream& os, const LogCesaroSeries& s)
{
    os << "N,Lambda\n";
    os.precision(17);
    for (std::size_t i = 0; i < s.N.size(); ++i)
        os << s.N[i] << ',' << s.partial[i] << '\n';
}

LogCesaroSeries log_cesaro(const std::vector<double>& x, const std::vector<std::int64_t>& N_list,
                           nlohmann::json source)
{
    for (double v : x)
        if (!(v >= 0.0))
            throw InputError("log_cesaro: entries must be nonnegative");
    for (auto N : N_list)
        if (N < 0 || static_cast<std::size_t>(N) >= x.size())
            throw InputError("log_cesaro: N outside the sequence");

    std::vector<std::int64_t> order(N_list);
    std::sort(order.begin(), order.end());
    std::map<std::int64_t, double> at;
    double running = 0.0;
    std::size_t next = 0;
    for (auto N : order)
    {
        for (; next <= static_cast<std::size_t>(N); ++next)
            running += x[next];
        at[N] = running / std::log(static_cast<double>(N) + 2.0);
    }
    LogCesaroSeries s;
    s.N = N_list;
    s.source = std::move(source);
    for (auto N : N_list)
        s.partial.push_back(at[N]);
    return s;
}

LogCesaroSeries signed_log_cesaro(const std::vector<double>& x, const std::vector<std::int64_t>& N_list,
                                  nlohmann::json source)
{
    std::vector<double> pos(x.size()), neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        pos[i] = std::max(x[i], 0.0);
        neg[i] = std::max(-x[i], 0.0);
    }
    auto s = log_cesaro(pos, N_list, std::move(source));
    const auto m = log_cesaro(neg, N_list);
    for (std::size_t i = 0; i < s.partial.size(); ++i)
        s.partial[i] -= m.partial[i];
    return s;
}

std::vector<std::int64_t> dyadic_checkpoints(std::int64_t N)
{
    std::vector<std::int64_t> out;
    for (std::int64_t p = 1; p <= N && p > 0; p *= 2)
        out.push_back(p);
    if (N >= 0 && (out.empty() || out.back() != N))
        out.push_back(N);
    return out;
}

// ---- lattice sums ----

std::string to_string(LatticeVariant v) { return v == LatticeVariant::printed ? "printed" : "exact"; }

LatticeVariant lattice_variant_from_string(const std::string& s)
{
    if (s == "printed")
        return LatticeVariant::printed;
    if (s == "exact")
        return LatticeVariant::exact;
    throw InputError("unknown lattice variant '" + s + "' (expected printed or exact)");
}

nlohmann::json to_json(const GammaLatticeSum& g)
{
    return {{"l", g.l},         {"beta", g.beta},           {"n_max", g.n_max},
            {"variant", to_string(g.variant)}, {"value", g.value}, {"tail_bound", g.tail_bound},
            {"term_count", g.term_count}};
}

GammaLatticeSum gamma_lattice_sum(std::int64_t l, double beta, int n_max, LatticeVariant variant)
{
    check_lattice_args("gamma_lattice_sum", l, beta, n_max);
    struct Group
    {
        double weight = 0.0;
        std::uint64_t count = 0;
    };
    std::unordered_map<i128, Group, I128Hash> groups;
    groups.reserve(static_cast<std::size_t>(n_max + 1) * (n_max + 1) / 2);
    for (int m = first_m(l); m <= n_max; ++m)
    {
        const i128 pm = pow2(m);
        for (int n = 0; n <= n_max; ++n)
        {
            const i128 pn = pow2(n);
            if (!in_set(variant, l, pn, pm))
                continue;
            Group& g = groups[pn - pm];
            g.weight += std::exp2(-(n + m) * beta);
            ++g.count;
        }
    }
    std::vector<std::pair<i128, Group>> sorted(groups.begin(), groups.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

    GammaLatticeSum out;
    out.l = l;
    out.beta = beta;
    out.n_max = n_max;
    out.variant = variant;
    for (const auto& [d, g] : sorted)
    {
        out.value += g.weight * g.weight;
        out.term_count += g.count * g.count;
    }
    out.tail_bound = lattice_tail_bound(l, beta, n_max, variant);
    return out;
}

double lattice_tail_bound(std::int64_t l, double beta, int n_max, LatticeVariant variant)
{
    check_lattice_args("lattice_tail_bound", l, beta, n_max);
    const double q2 = std::exp2(-2.0 * beta);
    const int m0 = first_m(l);
    const bool diagonal = variant == LatticeVariant::exact || l == 0;
    const double from_m0 = std::pow(q2, m0) / (1.0 - q2);  // sum_{m >= m0} q^{2m}
    if (n_max < m0)
        return from_m0 / (1.0 - q2) + (diagonal ? from_m0 * from_m0 : 0.0);
    const double beyond = std::pow(q2, n_max + 1) / (1.0 - q2);  // sum_{n > n_max} q^{2n}
    double t = beyond * from_m0;
    if (diagonal)
    {
        const double kept = from_m0 - beyond;
        t += beyond * (2.0 * kept + beyond);
    }
    return t;
}

double pgl_matrix_oracle(std::int64_t l, double beta, int n_max)
{
    check_lattice_args("pgl_matrix_oracle", l, beta, n_max);
    using Sparse = std::unordered_map<i128, double, I128Hash>;
    std::vector<std::pair<i128, double>> W;
    for (int n = 0; n <= n_max; ++n)
    {
        const double w = std::exp2(-n * beta);
        W.emplace_back(pow2(n), w);
        W.emplace_back(-pow2(n), w);
    }
    // x = W e_l, then (1 - P) x
    Sparse x, Qx;
    for (const auto& [k, w] : W)
        x[k + l] += w;
    for (const auto& [f, c] : x)
        if (f < 0)
            Qx[f] = c;

    // P g = P(W x) - P(W P x) = P(W (1 - P) x); the projection is applied as terms
    // are produced, which keeps exact zeros exact
    Sparse Pg;
    Pg.reserve(Qx.size() * W.size());
    for (const auto& [f, c] : Qx)
        for (const auto& [k, w] : W)
            if (f + k >= 0)
                Pg[f + k] += w * c;

    std::vector<std::pair<i128, double>> sorted(Pg.begin(), Pg.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double norm2 = 0.0;
    for (const auto& [f, c] : sorted)
        norm2 += c * c;
    return norm2;
}

// ---- xi / zeta ----

nlohmann::json to_json(const XiEstimate& e, bool with_diagonal)
{
    nlohmann::json j = {{"functional", e.functional},
                        {"k", e.k},
                        {"N", e.N},
                        {"symbols", e.symbols},
                        {"Lambda_real", to_json(e.real_part)},
                        {"Lambda_imag", to_json(e.imag_part)},
                        {"identity_residual", e.identity_residual},
                        {"estimator", "diagonal (lower bound for positive operators)"}};
    if (with_diagonal)
    {
        nlohmann::json d = nlohmann::json::array();
        for (const auto& c : e.diagonal)
            d.push_back({c.real(), c.imag()});
        j["diagonal"] = std::move(d);
    }
    return j;
}

XiEstimate xi_diagonal_estimate(const std::vector<CircleSymbol>& symbols, std::int64_t N, int k, int jobs)
{
    check_tuple("xi_diagonal_estimate", symbols, N, k);
    const Chain ch = make_chain(symbols);
    std::vector<int> order(2 * k);
    for (int i = 0; i < 2 * k; ++i)
        order[i] = i;

    XiEstimate e;
    e.functional = "xi";
    e.k = k;
    e.N = N;
    e.symbols = symbols_meta(symbols);
    e.diagonal.assign(static_cast<std::size_t>(N) + 1, 0.0);
    parallel_for(e.diagonal.size(), jobs, [&](std::size_t l) {
        e.diagonal[l] = xi_entry(ch, order, static_cast<std::int64_t>(l));
    });
    fill_series(e);
    return e;
}

XiEstimate zeta_estimate(const std::vector<CircleSymbol>& symbols, std::int64_t N, int k, int jobs)
{
    check_tuple("zeta_estimate", symbols, N, k);
    const Chain ch = make_chain(symbols);

    XiEstimate e;
    e.functional = "zeta";
    e.k = k;
    e.N = N;
    e.symbols = symbols_meta(symbols);
    const std::size_t L = static_cast<std::size_t>(N) + 1;
    e.diagonal.assign(L, 0.0);
    std::vector<cplx> alternating(L, 0.0);
    parallel_for(L, jobs, [&](std::size_t l) {
        const auto ll = static_cast<std::int64_t>(l);
        e.diagonal[l] = zeta_entry(ch, ll);
        // [PaP, PbP] = P b (1-P) a P - P a (1-P) b P, so the unswapped pair carries -1
        cplx sum = 0.0;
        for (unsigned mask = 0; mask < (1u << k); ++mask)
        {
            std::vector<int> order(2 * k);
            int sign = 1;
            for (int j = 0; j < k; ++j)
            {
                const bool swap = (mask >> j) & 1u;
                order[2 * j] = 2 * j + (swap ? 1 : 0);
                order[2 * j + 1] = 2 * j + (swap ? 0 : 1);
                if (!swap)
                    sign = -sign;
            }
            sum += static_cast<double>(sign) * xi_entry(ch, order, ll);
        }
        alternating[l] = sum;
    });

    double diff = 0.0, scale = 0.0;
    for (std::size_t l = 0; l < L; ++l)
    {
        diff = std::max(diff, std::abs(e.diagonal[l] - alternating[l]));
        scale = std::max({scale, std::abs(e.diagonal[l]), std::abs(alternating[l])});
    }
    e.identity_residual = scale > 0.0 ? diff / scale : diff;
    if (e.identity_residual > 1e-8)
        throw NumericError("zeta_estimate: alternating-sum identity residual " + std::to_string(e.identity_residual) +
                           " exceeds 1e-8");
    fill_series(e);
    return e;
}

XiEstimate xi_lattice_estimate(double beta, std::int64_t N, int n_max, int jobs)
{
    if (N < 0)
        throw InputError("xi_lattice_estimate: N must be >= 0");
    check_lattice_args("xi_lattice_estimate", 0, beta, n_max);
    XiEstimate e;
    e.functional = "xi-lattice";
    e.k = 2;
    e.N = N;
    const nlohmann::json w = {{"kind", "lacunary"}, {"beta", beta}, {"n_max", n_max}};
    e.symbols = nlohmann::json::array({w, w, w, w});
    e.diagonal.assign(static_cast<std::size_t>(N) + 1, 0.0);
    parallel_for(e.diagonal.size(), jobs, [&](std::size_t l) {
        e.diagonal[l] = gamma_lattice_sum(static_cast<std::int64_t>(l), beta, n_max, LatticeVariant::exact).value;
    });
    fill_series(e);
    return e;
}

// ---- bound chain ----

double bound_integral(std::int64_t l)
{
    if (l < 1)
        throw InputError("bound_integral: l must be >= 1");
    const double ld = static_cast<double>(l);
    // 2^{-x/2} (2^x - l)^{-1/2} = 2^{-x} (1 - l 2^{-x})^{-1/2}, overflow-free
    auto f = [ld](double x) {
        const double y = std::exp2(-x);
        return y / std::sqrt(1.0 - ld * y);
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    return integrator.integrate(f, std::log2(2.0 * ld + 2.0), std::numeric_limits<double>::infinity(), 1e-14, &err);
}

double bound_integral_closed_form(std::int64_t l)
{
    if (l < 1)
        throw InputError("bound_integral_closed_form: l must be >= 1");
    const double ld = static_cast<double>(l);
    const double u = ld / (2.0 * ld + 2.0);
    // 1 - sqrt(1 - u) written without cancellation
    return 2.0 / (ld * std::numbers::ln2) * (u / (1.0 + std::sqrt(1.0 - u)));
}

double bound_subsum(std::int64_t l)
{
    if (l < 1)
        throw InputError("bound_subsum: l must be >= 1");
    const double ld = static_cast<double>(l);
    int n = 0;
    while (pow2(n) < 2 * static_cast<i128>(l) + 1)
        ++n;
    double sum = 0.0;
    for (; n < 1074; ++n)
    {
        const double y = std::exp2(-n);
        const double term = y / std::sqrt(1.0 - ld * y);
        sum += term;
        if (term < 1e-18 * sum)
            break;
    }
    return sum;
}

nlohmann::json to_json(const BoundReport& r, bool with_rows)
{
    nlohmann::json flags = nlohmann::json::object();
    for (const auto& [name, count] : r.failures)
    {
        flags[name] = {{"status", count == 0 ? "HOLDS" : "FAILS"}, {"failures", count}};
        if (count > 0)
            flags[name]["first_failure_l"] = r.first_failure.at(name);
    }
    nlohmann::json j = {{"beta", 0.25},
                        {"n_max", r.n_max},
                        {"l_max", r.rows.empty() ? 0 : r.rows.back().l},
                        {"flags", flags}};
    if (with_rows)
    {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : r.rows)
        {
            nlohmann::json f = nlohmann::json::object();
            for (const auto& [name, ok] : row.flags)
                f[name] = ok ? "HOLDS" : "FAILS";
            rows.push_back({{"l", row.l},
                            {"lattice", row.lattice},
                            {"lattice_printed", row.lattice_printed},
                            {"oracle", row.oracle},
                            {"tail_bound", row.tail_bound},
                            {"claimed_bound", row.claimed_bound},
                            {"sqrt6_bound", row.sqrt6_bound},
                            {"subsum", row.subsum},
                            {"integral", row.integral},
                            {"integral_closed_form", row.integral_closed_form},
                            {"claimed_integral_form", row.claimed_integral_form},
                            {"flags", f}});
        }
        j["rows"] = std::move(rows);
    }
    return j;
}

void write_bound_csv(std::ostream& os, const BoundReport& r)
{
    os << "l,lattice,lattice_printed,oracle,tail_bound,claimed_bound,sqrt6_bound,subsum,integral,"
          "integral_closed_form,claimed_integral_form";
    for (const char* name : flag_names)
        os << ',' << name;
    os << '\n';
    os.precision(17);
    for (const auto& row : r.rows)
    {
        os << row.l << ',' << row.lattice << ',' << row.lattice_printed << ',' << row.oracle << ',' << row.tail_bound
           << ',' << row.claimed_bound << ',' << row.sqrt6_bound << ',' << row.subsum << ',' << row.integral << ','
           << row.integral_closed_form << ',' << row.claimed_integral_form;
        for (const char* name : flag_names)
            os << ',' << (row.flags.at(name) ? "HOLDS" : "FAILS");
        os << '\n';
    }
}

BoundReport bound_report(std::int64_t l_max, int n_max, const BoundOptions& opts)
{
    constexpr double beta = 0.25;
    if (l_max < 1)
        throw InputError("bound_report: l_max must be >= 1");
    check_lattice_args("bound_report", 0, beta, n_max);

    BoundReport r;
    r.n_max = n_max;
    r.rows.resize(static_cast<std::size_t>(l_max));
    parallel_for(r.rows.size(), opts.jobs, [&](std::size_t i) {
        BoundRow& row = r.rows[i];
        row.l = static_cast<std::int64_t>(i) + 1;
        const auto ex = gamma_lattice_sum(row.l, beta, n_max, LatticeVariant::exact);
        const auto pr = gamma_lattice_sum(row.l, beta, n_max, LatticeVariant::printed);
        row.lattice = ex.value;
        row.lattice_printed = pr.value;
        row.tail_bound = std::max(ex.tail_bound, pr.tail_bound);
    });

    // refuse before the expensive columns if any tail is too heavy
    const double q2 = std::exp2(-2.0 * beta);
    auto needed = [&](std::int64_t l, LatticeVariant v, double value) {
        if (value == 0.0)
            return std::max(n_max + 1, first_m(l) + 1);
        // beyond the supported range the bound keeps shrinking by q^2 per step
        auto tail = [&](int K) {
            return lattice_tail_bound(l, beta, std::min(K, lattice_n_max_limit), v) *
                   std::pow(q2, std::max(0, K - lattice_n_max_limit));
        };
        int K = n_max;
        while (tail(K) > opts.relative_tail * value && K < 10 * lattice_n_max_limit)
            ++K;
        return K;
    };
    int required = n_max;
    std::int64_t worst_l = 0;
    for (const auto& row : r.rows)
        for (auto [variant, value] : {std::pair{LatticeVariant::exact, row.lattice},
                                      std::pair{LatticeVariant::printed, row.lattice_printed}})
            if (const int K = needed(row.l, variant, value); K > required)
            {
                required = K;
                worst_l = row.l;
            }
    if (required > n_max)
        throw InputError("bound_report: tail bound exceeds " + nlohmann::json(opts.relative_tail).dump() +
                         " relative at l = " + std::to_string(worst_l) + "; requires n_max >= " +
                         std::to_string(required) +
                         (required > lattice_n_max_limit
                              ? " (beyond the supported " + std::to_string(lattice_n_max_limit) + ")"
                              : std::string()));

    parallel_for(r.rows.size(), opts.jobs, [&](std::size_t i) {
        BoundRow& row = r.rows[i];
        const double ld = static_cast<double>(row.l);
        row.oracle = pgl_matrix_oracle(row.l, beta, n_max);
        row.claimed_bound = 2.0 / (ld * std::numbers::ln2);
        row.sqrt6_bound = std::sqrt(6.0) / (ld * std::numbers::ln2);
        row.subsum = bound_subsum(row.l);
        row.integral = bound_integral(row.l);
        row.integral_closed_form = bound_integral_closed_form(row.l);
        row.claimed_integral_form = 2.0 / (ld * std::numbers::ln2) * std::sqrt(1.0 + ld / (2.0 * ld + 2.0));

        auto& f = row.flags;
        f["lattice>=subsum"] = row.lattice >= row.subsum;
        f["lattice_printed>=subsum"] = row.lattice_printed >= row.subsum;
        f["subsum>=integral"] = row.subsum >= row.integral;
        f["lattice>=claimed"] = row.lattice >= row.claimed_bound;
        f["lattice_printed>=claimed"] = row.lattice_printed >= row.claimed_bound;
        f["lattice>=sqrt6"] = row.lattice >= row.sqrt6_bound;
        f["lattice_printed>=sqrt6"] = row.lattice_printed >= row.sqrt6_bound;
        f["claimed_integral<=subsum"] = row.claimed_integral_form <= row.subsum;
        f["quadrature==closed_form"] =
            std::abs(row.integral - row.integral_closed_form) <= 1e-10 * row.integral_closed_form;
        f["oracle==lattice"] = std::abs(row.oracle - row.lattice) <= 1e-12 * row.lattice;
    });

    for (const char* name : flag_names)
    {
        r.failures[name] = 0;
        for (const auto& row : r.rows)
            if (!row.flags.at(name) && r.failures[name]++ == 0)
                r.first_failure[name] = row.l;
    }
    return r;
}

} // namespace heislab
