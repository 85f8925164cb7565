// Acceptance suite: one PASS/FAIL line per criterion, details indented below it.
// Usage: heislab_acceptance [id ...]   (no ids: all of 1..9)
// Exit status is nonzero if any selected criterion fails.
#include "heislab/aniso_blocks.hpp"
#include "heislab/cc_geodesic.hpp"
#include "heislab/circle_symbol.hpp"
#include "heislab/dixmier.hpp"
#include "heislab/hardy_spectra.hpp"
#include "heislab/heis_core.hpp"
#include "heislab/singular_values.hpp"
#include "heislab/symbol_lab.hpp"

#include "../unit/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace heislab;

namespace
{

struct Outcome
{
    bool pass = true;
    std::string summary;
    std::vector<std::string> details;

    void info(const std::string& s) { details.push_back(s); }

    /// Records a sub-check; the criterion fails if any sub-check fails.
    void check(bool ok, const std::string& s)
    {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + s);
    }
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// 1 ------------------------------------------------------------------------------

Outcome criterion_1()
{
    Outcome o;
    o.summary = "lattice sum == sparse operator oracle, l <= 64, n_max = 14, 1e-12 relative";
    double worst = 0.0, worst_printed = 0.0;
    std::int64_t worst_l = 0;
    for (std::int64_t l = 0; l <= 64; ++l)
    {
        const double lat = gamma_lattice_sum(l, 0.25, 14).value;
        const double orc = pgl_matrix_oracle(l, 0.25, 14);
        if (rel(lat, orc) > worst)
        {
            worst = rel(lat, orc);
            worst_l = l;
        }
        worst_printed = std::max(worst_printed, rel(gamma_lattice_sum(l, 0.25, 14, LatticeVariant::printed).value, orc));
    }
    o.check(worst <= 1e-12, fmt("max relative mismatch %.3e (at l = %lld)", worst, static_cast<long long>(worst_l)));
    o.info(fmt("printed index set vs oracle: max relative mismatch %.3e (not asserted)", worst_printed));
    return o;
}

// 2 ------------------------------------------------------------------------------

Outcome criterion_2()
{
    Outcome o;
    o.summary = "doubling law to 1e-12 for l in [1,512]; closed forms within the tail bound at n_max = 18";
    const int n = 18;
    for (auto v : {LatticeVariant::exact, LatticeVariant::printed})
    {
        double worst = 0.0;
        for (std::int64_t l = 1; l <= 512; ++l)
        {
            // value(2l) at truncation n+1 sees exactly the shifted index set of value(l) at n
            const double a = gamma_lattice_sum(2 * l, 0.25, n + 1, v).value;
            const double b = gamma_lattice_sum(l, 0.25, n, v).value / 2.0;
            worst = std::max(worst, rel(a, b));
        }
        o.check(worst <= 1e-12, fmt("%s set: max |value(2l) - value(l)/2| / value = %.3e", to_string(v).c_str(), worst));
    }

    const double s2 = std::numbers::sqrt2;
    const struct
    {
        std::int64_t l;
        double closed;
        const char* text;
    } forms[] = {{1, 1.0 + s2, "||Pg_1||^2 = 1 + sqrt2"}, {0, (2 + s2) * (2 + s2) + s2 * (2 + s2), "||Pg_0||^2 = (2+sqrt2)^2 + sqrt2(2+sqrt2)"}};
    for (const auto& f : forms)
    {
        const auto g = gamma_lattice_sum(f.l, 0.25, n, LatticeVariant::printed);
        const double gap = f.closed - g.value;
        // truncation only removes nonnegative terms: 0 <= closed - value <= tail
        o.check(gap >= -1e-12 * f.closed && gap <= g.tail_bound + 1e-12 * f.closed,
                fmt("%s: value %.15f, closed %.15f, gap %.3e, tail bound %.3e", f.text, g.value, f.closed, gap,
                    g.tail_bound));
        o.info(fmt("  independent double-sum oracle at l = %lld: %.15f", static_cast<long long>(f.l),
                   oracle::printed_lattice(f.l, 0.25, n)));
    }
    return o;
}

// 3 ------------------------------------------------------------------------------

Outcome criterion_3()
{
    Outcome o;
    o.summary = "bound chain for l in [1,4096]: exact >= sub-sum >= integral";
    const BoundReport r = bound_report(4096, 96);
    auto line = [&](const std::string& flag) {
        const auto f = r.failures.at(flag);
        std::string s = flag + ": " + (f == 0 ? "HOLDS" : "FAILS") + fmt(" (%lld failures", static_cast<long long>(f));
        if (f > 0)
            s += fmt(", first at l = %lld", static_cast<long long>(r.first_failure.at(flag)));
        return s + ")";
    };
    o.check(r.holds("lattice>=subsum"), line("lattice>=subsum"));
    o.check(r.holds("subsum>=integral"), line("subsum>=integral"));
    if (!r.holds("subsum>=integral"))
    {
        const auto& row = r.rows.at(static_cast<std::size_t>(r.first_failure.at("subsum>=integral") - 1));
        o.info(fmt("  at l = %lld: sub-sum %.6f, integral %.6f (closed form %.6f)", static_cast<long long>(row.l),
                   row.subsum, row.integral, row.integral_closed_form));
    }
    o.check(r.holds("oracle==lattice"), line("oracle==lattice"));
    o.check(r.holds("quadrature==closed_form"), line("quadrature==closed_form"));
    for (const char* flag : {"lattice>=claimed", "lattice>=sqrt6", "lattice_printed>=subsum", "lattice_printed>=claimed",
                             "lattice_printed>=sqrt6", "claimed_integral<=subsum"})
        o.info("recorded, not asserted: " + line(flag));
    return o;
}

// 4 ------------------------------------------------------------------------------

Outcome criterion_4()
{
    Outcome o;
    o.summary = "xi_2 diagonal: Lambda >= 0.1 for W at N = 2^16; <= 1e-3 for trig tuples at N = 2^14";
    const XiEstimate w = xi_lattice_estimate(0.25, 1 << 16, 64);
    const double lw = w.real_part.partial.back();
    o.check(lw >= 0.1, fmt("W (exact lattice, n_max = 64): Lambda_{2^16} = %.4f", lw));

    std::mt19937_64 rng(41);
    std::normal_distribution<double> g;
    auto random_trig = [&](int degree) {
        CircleSymbol s(degree, {{"kind", "random-trig"}, {"degree", degree}});
        for (int k = -degree; k <= degree; ++k)
            s.set_coeff(k, cplx(g(rng), g(rng)) / static_cast<double>(degree + 1));
        return s;
    };
    const std::vector<std::pair<std::string, std::vector<CircleSymbol>>> corpus = {
        {"(cos,cos,cos,cos)", std::vector<CircleSymbol>(4, make_symbol("cos"))},
        {"(sin,sin,sin,sin)", std::vector<CircleSymbol>(4, make_symbol("sin"))},
        {"(e1,e-1,e1,e-1)", {monomial(1), monomial(-1), monomial(1), monomial(-1)}},
        {"(e-1,e1,e-1,e1)", {monomial(-1), monomial(1), monomial(-1), monomial(1)}},
        {"(cos,sin,e2,e-3)", {make_symbol("cos"), make_symbol("sin"), monomial(2), monomial(-3)}},
        {"random degree-3 tuple", {random_trig(3), random_trig(3), random_trig(3), random_trig(3)}},
    };
    for (const auto& [name, syms] : corpus)
    {
        const XiEstimate e = xi_diagonal_estimate(syms, 1 << 14, 2);
        const double lam = std::hypot(e.real_part.partial.back(), e.imag_part.partial.back());
        double mass = 0.0;
        for (const auto& d : e.diagonal)
            mass += std::abs(d);
        o.check(lam <= 1e-3, fmt("%s: |Lambda_{2^14}| = %.3e (sum |d_l| = %.4f)", name.c_str(), lam, mass));
    }
    return o;
}

// 5 ------------------------------------------------------------------------------

Outcome criterion_5()
{
    Outcome o;
    o.summary = "Hankel mu_k decay exponent of W_beta = beta +- 0.1, k in [16,512], N = 2^12";
    for (double beta : {0.25, 0.5})
    {
        SvdOptions opts;
        opts.method = SvdMethod::lanczos;
        const SingularSpectrum s = singular_values(hankel_op(make_lacunary(beta, 12), 4096), 600, opts);
        const SchattenFit f = decay_fit(s, 16, 512);
        o.check(std::abs(f.exponent - beta) <= 0.1,
                fmt("beta = %.2f: exponent %.4f (fit rms %.3f, %d Lanczos steps, max Ritz residual %.1e)", beta,
                    f.exponent, f.residual, s.lanczos_steps, s.max_residual));
    }
    return o;
}

// 6 ------------------------------------------------------------------------------

Outcome criterion_6()
{
    Outcome o;
    o.summary = "Calderon commutator: triangle-wave plateau < 5%; W_{1/2} growth exponent 0.5 +- 0.15";
    const std::vector<int> Ns = {256, 512, 1024, 2048, 4096, 8192};
    const CalderonReport tri = calderon_norm_probe(make_triangle_wave(8192), Ns);
    std::string norms;
    for (const auto& r : tri.rows)
        norms += fmt(" %.4f", r.norm);
    o.info("triangle norms:" + norms);
    o.check(tri.top_variation < 0.05, fmt("triangle: top-two variation %.4f", tri.top_variation));
    const CalderonReport w = calderon_norm_probe(make_lacunary(0.5, 12), Ns);
    norms.clear();
    for (const auto& r : w.rows)
        norms += fmt(" %.3f", r.norm);
    o.info("W_{1/2} norms:" + norms);
    o.check(std::abs(w.growth_exponent - 0.5) <= 0.15, fmt("W_{1/2}: growth exponent %.4f", w.growth_exponent));
    return o;
}

// 7 ------------------------------------------------------------------------------

Outcome criterion_7()
{
    Outcome o;
    o.summary = "CC distances: horizontal 1e-3, vertical circle-lift 1e-2, dilation homogeneity 1e-3";
    const auto cfg = HeisConfig::standard(1);
    const auto e = HeisPoint::identity(2);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);

    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
    {
        HeisPoint y(0.0, Eigen::Vector2d(u(rng), u(rng)));
        worst = std::max(worst, rel(cc_distance(e, y, cfg).value, y.z.norm()));
    }
    o.check(worst <= 1e-3, fmt("d(e,(0,z)) vs |z| over 20 random z: max relative error %.2e", worst));

    for (double T : {0.1, 1.0, 4.0})
    {
        const double want = 2.0 * std::sqrt(std::numbers::pi * T);
        const double got = cc_distance(e, HeisPoint(T, Eigen::Vector2d::Zero()), cfg).value;
        o.check(rel(got, want) <= 1e-2, fmt("vertical T = %.1f: %.6f vs 2 sqrt(pi T) = %.6f (rel %.2e)", T, got, want,
                                            rel(got, want)));
    }

    worst = 0.0;
    for (int i = 0; i < 3; ++i)
    {
        const HeisPoint y(0.5 * u(rng), Eigen::Vector2d(u(rng), u(rng)));
        const double d1 = cc_distance(e, y, cfg).value;
        for (double lam : {0.5, 2.0, 3.0})
            worst = std::max(worst, rel(cc_distance(e, dilate(lam, y), cfg).value, lam * d1));
    }
    o.check(worst <= 1e-3, fmt("d(e, lambda.y) vs lambda d(e,y), 3 points x 3 scales: max relative error %.2e", worst));
    return o;
}

// 8 ------------------------------------------------------------------------------

/// sup_j sup_k |(phi_{j-1} + phi_j + phi_{j+1})(k) (Phi_j f)^(k) - (Phi_j f)^(k)|
double three_term_residual(const CircleSymbol& f)
{
    const auto dec = lp_blocks(f);
    double r = 0.0;
    const int J = static_cast<int>(dec.blocks.size());
    for (int j = 0; j < J; ++j)
        for (int k : dec.blocks[j].support())
        {
            double w = 0.0;
            for (int i = std::max(0, j - 1); i <= j + 1; ++i)
                w += lp_window(i, std::abs(k));
            r = std::max(r, std::abs((w - 1.0) * dec.blocks[j].coeff(k)));
        }
    return r;
}

Outcome criterion_8()
{
    Outcome o;
    o.summary = "Besov/Holder band max/min < 50 over 20 symbols at s in {1/4,1/2}; block identity <= 1e-8 (1-d and 64^3)";
    std::vector<CircleSymbol> corpus;
    for (int i = 0; i < 8; ++i)
        corpus.push_back(make_random_symbol(0.75, 256, 500 + i));
    for (double beta : {0.5, 0.75, 1.0})
        for (int n : {8, 10, 12})
            corpus.push_back(make_lacunary(beta, n));
    corpus.push_back(make_triangle_wave(1024));
    corpus.push_back(make_symbol("cos"));
    corpus.push_back(monomial(3) + monomial(-3));

    for (double s : {0.25, 0.5})
    {
        const EquivReport r = besov_holder_equiv_check(corpus, s);
        o.check(r.finite() && r.rows.size() == 20 && r.band() < 50.0,
                fmt("s = %.2f: %zu symbols, ratio in [%.3f, %.3f], band %.2f", s, r.rows.size(), r.min_ratio,
                    r.max_ratio, r.band()));
    }

    double worst = 0.0;
    for (const auto& f : corpus)
        worst = std::max(worst, three_term_residual(f));
    o.check(worst <= 1e-8, fmt("1-d three-term identity over the corpus: %.2e", worst));

    const auto cfg = HeisConfig::standard(1);
    const auto box = sample_box(64, [](const HeisPoint& p) {
        const double env = std::exp(-(1 - std::cos(p.t)) - (2 - std::cos(p.z(0)) - std::cos(p.z(1))));
        return std::sqrt(koranyi_gauge(p)) * env;
    });
    for (double s : {0.25, 0.5})
    {
        const AnisoBlocksReport a = aniso_blocks_check(cfg, box, s);
        o.check(a.identity_residual <= 1e-8,
                fmt("64^3 anisotropic, s = %.2f: identity residual %.2e, reconstruction %.2e, besov/holder %.3f", s,
                    a.identity_residual, a.reconstruction_residual, a.ratio));
    }
    return o;
}

// 9 ------------------------------------------------------------------------------

Outcome criterion_9()
{
    Outcome o;
    o.summary = "structural invariants";
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    {
        const auto cfg = HeisConfig::standard(2);
        auto draw = [&] {
            HeisPoint x(u(rng), Eigen::VectorXd(4));
            for (int i = 0; i < 4; ++i)
                x.z[i] = u(rng);
            return x;
        };
        auto dist = [](const HeisPoint& a, const HeisPoint& b) {
            return std::max(std::abs(a.t - b.t), (a.z - b.z).cwiseAbs().maxCoeff());
        };
        const HeisPoint e = HeisPoint::identity(4);
        double assoc = 0.0, inv = 0.0, unit = 0.0, gauge = 0.0;
        for (int i = 0; i < 1000; ++i)
        {
            const auto x = draw(), y = draw(), z = draw();
            assoc = std::max(assoc, dist(group_mul(group_mul(x, y, cfg), z, cfg), group_mul(x, group_mul(y, z, cfg), cfg)));
            inv = std::max({inv, dist(group_mul(x, group_inv(x), cfg), e), dist(group_mul(group_inv(x), x, cfg), e)});
            unit = std::max({unit, dist(group_mul(e, x, cfg), x), dist(group_mul(x, e, cfg), x)});
            const double lam = std::exp(2.0 * u(rng));
            gauge = std::max(gauge, rel(koranyi_gauge(dilate(lam, x)), lam * koranyi_gauge(x)));
        }
        o.check(assoc <= 1e-12 && inv <= 1e-12 && unit <= 1e-12,
                fmt("group axioms on R^4 x R, 1000 triples: assoc %.1e, inverse %.1e, identity %.1e", assoc, inv, unit));
        o.check(gauge <= 1e-12, fmt("gauge homogeneity |lambda.x|_H = lambda |x|_H: %.1e", gauge));
    }

    {
        double worst = 0.0;
        for (const auto& f : {make_lacunary(0.25, 12), make_triangle_wave(1000), make_random_symbol(0.4, 300, 3)})
        {
            const auto rec = lp_blocks(f).reconstruct(f.cutoff());
            for (int k = -f.cutoff(); k <= f.cutoff(); ++k)
                worst = std::max(worst, std::abs(rec.coeff(k) - f.coeff(k)));
        }
        o.check(worst <= 1e-12, fmt("partition of unity: sum_j Phi_j f = f, max coefficient error %.1e", worst));
    }

    auto random_vec = [&](int N) {
        VectorXc v(2 * N + 1);
        for (auto& x : v)
            x = cplx(u(rng), u(rng));
        return v;
    };
    {
        const VectorXc v = random_vec(300);
        const VectorXc p = szego_project(v);
        o.check((szego_project(p) - p).norm() == 0.0, fmt("Szego idempotency: ||P P v - P v|| = %.1e", (szego_project(p) - p).norm()));
    }
    {
        const int N = 128;
        const auto a = make_random_symbol(0.5, 200, 11);
        const auto a_c = a.plus_constant(cplx(3.0, -2.0));
        const VectorXc v = random_vec(N);
        const double d = (commutator_P(a, N).apply(v) - commutator_P(a_c, N).apply(v)).norm() / v.norm();
        o.check(d <= 1e-12, fmt("[P, a + c] = [P, a]: relative difference %.1e", d));
    }
    {
        const auto a = make_random_symbol(0.3, 300, 21);
        std::vector<double> prev(40, 0.0);
        double worst = 0.0;
        for (int N : {32, 64, 128, 256, 512})
        {
            const auto s = singular_values(hankel_op(a, N), 40);
            for (int k = 0; k < 40; ++k)
                worst = std::max(worst, prev[k] - s.values[k]);
            prev = s.values;
        }
        o.check(worst <= 1e-10, fmt("mu_k(H_a, N) nondecreasing in N over 32..512: max decrease %.1e", worst));
    }
    {
        const auto rep = check_frame_commutators(HeisConfig::standard(2));
        o.check(rep.holds, fmt("[X_j, X_k] = L_jk X_0: max deviation %.1e", rep.max_deviation));
    }
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    const std::map<int, std::function<Outcome()>> criteria = {
        {1, criterion_1}, {2, criterion_2}, {3, criterion_3}, {4, criterion_4}, {5, criterion_5},
        {6, criterion_6}, {7, criterion_7}, {8, criterion_8}, {9, criterion_9}};
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i)
    {
        const int id = std::atoi(argv[i]);
        if (!criteria.count(id))
        {
            std::fprintf(stderr, "unknown criterion '%s' (expected 1..9)\n", argv[i]);
            return 2;
        }
        ids.push_back(id);
    }
    if (ids.empty())
        for (const auto& [id, _] : criteria)
            ids.push_back(id);

    int failed = 0;
    for (int id : ids)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = criteria.at(id)();
        }
        catch (const std::exception& ex)
        {
            o.pass = false;
            o.summary += std::string(" (threw: ") + ex.what() + ")";
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d: %s  %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.summary.c_str(), sec);
        for (const auto& d : o.details)
            std::printf("    %s\n", d.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
