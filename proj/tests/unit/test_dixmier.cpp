#include "heislab/dixmier.hpp"
#include "heislab/hardy_spectra.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace heislab;

namespace
{

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CircleSymbol random_trig(int degree, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    CircleSymbol s(degree, {{"kind", "random-trig"}, {"degree", degree}, {"seed", seed}});
    for (int k = -degree; k <= degree; ++k)
        s.set_coeff(k, cplx(g(rng), g(rng)) / static_cast<double>(degree + 1));
    return s;
}

} // namespace

TEST_CASE("log_cesaro on reference sequences")
{
    std::vector<double> delta(101, 0.0);
    delta[0] = 1.0;
    const auto s = log_cesaro(delta, {0, 10, 100});
    for (std::size_t i = 0; i < s.N.size(); ++i)
        CHECK(s.partial[i] == doctest::Approx(1.0 / std::log(s.N[i] + 2.0)).epsilon(1e-15));

    std::vector<double> harmonic(1 << 12);
    for (std::size_t k = 0; k < harmonic.size(); ++k)
        harmonic[k] = 1.0 / (k + 1.0);
    const auto h = log_cesaro(harmonic, dyadic_checkpoints(4095));
    // H_{N+1} / log(N+2) -> 1 from above, with the Euler constant as the offset
    for (std::size_t i = 0; i < h.N.size(); ++i)
    {
        const double L = std::log(h.N[i] + 2.0);
        CHECK(h.partial[i] > 1.0);
        CHECK(h.partial[i] - 1.0 < (std::numbers::egamma + 1.0) / L);
    }
    CHECK(h.dyadic_max() >= h.dyadic_min());

    CHECK_THROWS_AS(log_cesaro({1.0, -1e-3}, {1}), InputError);
    CHECK_THROWS_AS(log_cesaro({1.0, 1.0}, {2}), InputError);

    const auto sg = signed_log_cesaro({1.0, -3.0, 0.5}, {2});
    CHECK(sg.partial[0] == doctest::Approx(-1.5 / std::log(4.0)));

    std::ostringstream os;
    write_log_cesaro_csv(os, s);
    CHECK(os.str().rfind("N,Lambda\n", 0) == 0);
}

TEST_CASE("dyadic checkpoints")
{
    CHECK(dyadic_checkpoints(8) == std::vector<std::int64_t>{1, 2, 4, 8});
    CHECK(dyadic_checkpoints(10) == std::vector<std::int64_t>{1, 2, 4, 8, 10});
    CHECK(dyadic_checkpoints(0) == std::vector<std::int64_t>{0});
}

TEST_CASE("printed lattice against direct summation and its limits")
{
    for (long long l : {0LL, 1LL, 2LL, 3LL, 5LL, 17LL, 64LL})
        for (int n_max : {6, 14, 30})
            CHECK(rel(gamma_lattice_sum(l, 0.25, n_max, LatticeVariant::printed).value, oracle::printed_lattice(l, 0.25, n_max)) < 1e-13);

    const double c = 2.0 + std::sqrt(2.0);
    const auto g1 = gamma_lattice_sum(1, 0.25, 18, LatticeVariant::printed);
    const auto g0 = gamma_lattice_sum(0, 0.25, 18, LatticeVariant::printed);
    CHECK(1.0 + std::sqrt(2.0) - g1.value >= 0.0);
    CHECK(1.0 + std::sqrt(2.0) - g1.value <= g1.tail_bound);
    CHECK(c * c + std::sqrt(2.0) * c - g0.value >= 0.0);
    CHECK(c * c + std::sqrt(2.0) * c - g0.value <= g0.tail_bound);

    // deep truncation reaches the limits
    CHECK(rel(gamma_lattice_sum(1, 0.25, 120, LatticeVariant::printed).value, 1.0 + std::sqrt(2.0)) < 1e-13);
    CHECK(rel(gamma_lattice_sum(0, 0.25, 120, LatticeVariant::printed).value, c * c + std::sqrt(2.0) * c) < 1e-13);
}

TEST_CASE("lattice doubling law")
{
    for (auto v : {LatticeVariant::printed, LatticeVariant::exact})
        for (long long l = 1; l <= 512; ++l)
        {
            const double a = gamma_lattice_sum(l, 0.25, 120, v).value;
            const double b = gamma_lattice_sum(2 * l, 0.25, 120, v).value;
            REQUIRE(rel(b, a / 2.0) < 1e-12);
        }
}

TEST_CASE("tail bounds dominate the discarded mass")
{
    for (auto v : {LatticeVariant::printed, LatticeVariant::exact})
        for (long long l : {0LL, 1LL, 7LL, 100LL, 4096LL})
        {
            const double deep = gamma_lattice_sum(l, 0.25, 120, v).value;
            double prev = std::numeric_limits<double>::infinity();
            for (int n_max : {4, 10, 16, 24, 40})
            {
                const auto g = gamma_lattice_sum(l, 0.25, n_max, v);
                CHECK(g.value <= deep * (1 + 1e-14));
                CHECK(deep - g.value <= g.tail_bound * (1 + 1e-12));
                CHECK(g.tail_bound <= prev);
                prev = g.tail_bound;
            }
        }
}

TEST_CASE("sparse oracle equals the exact lattice, not the printed one")
{
    for (long long l = 0; l <= 64; ++l)
    {
        const double o = pgl_matrix_oracle(l, 0.25, 14);
        const auto ex = gamma_lattice_sum(l, 0.25, 14, LatticeVariant::exact);
        CHECK(rel(o, ex.value) <= 1e-12);
        const double pr = gamma_lattice_sum(l, 0.25, 14, LatticeVariant::printed).value;
        if (l == 0)
            CHECK(rel(o, pr) <= 1e-12);
        else
            CHECK(pr < o);
    }
    // empty constraint set
    CHECK(pgl_matrix_oracle(1 << 10, 0.25, 9) == 0.0);
    CHECK(gamma_lattice_sum(1 << 10, 0.25, 9, LatticeVariant::printed).value == 0.0);
    CHECK(gamma_lattice_sum(1 << 10, 0.25, 9, LatticeVariant::exact).term_count == 0);

    // term count: singleton groups plus the squared diagonal
    const auto t = gamma_lattice_sum(0, 0.25, 5);
    CHECK(t.term_count == 36 + 15);

    CHECK_THROWS_AS(gamma_lattice_sum(-1, 0.25, 5), InputError);
    CHECK_THROWS_AS(gamma_lattice_sum(1, 0.25, 0), InputError);
    CHECK_THROWS_AS(pgl_matrix_oracle(1, 0.25, lattice_n_max_limit + 1), InputError);
    CHECK(lattice_variant_from_string("exact") == LatticeVariant::exact);
    CHECK_THROWS_AS(lattice_variant_from_string("bogus"), InputError);
}

TEST_CASE("xi diagonal: hand-computed entries and constants")
{
    // [P,cos] e_0 = -e_{-1}/2 and [P,cos] e_{-1} = e_0/2, so d_0 = 1/16 and d_l = 0 for l >= 1
    const auto c = make_symbol("cos");
    const auto x = xi_diagonal_estimate({c, c, c, c}, 64, 2);
    CHECK(x.diagonal[0].real() == doctest::Approx(1.0 / 16).epsilon(1e-15));
    for (std::size_t l = 1; l < x.diagonal.size(); ++l)
        CHECK(x.diagonal[l] == cplx(0.0));
    CHECK(x.real_part.partial.back() == doctest::Approx(0.0625 / std::log(66.0)));

    const auto w = make_lacunary(0.25, 8);
    const auto z = xi_diagonal_estimate({w, constant_symbol(2.0), w, w}, 128, 2);
    for (const auto& d : z.diagonal)
        CHECK(d == cplx(0.0));

    const auto a = random_trig(5, 1), b = random_trig(3, 2), e = random_trig(4, 3), f = random_trig(2, 4);
    const auto base = xi_diagonal_estimate({a, b, e, f}, 40, 2);
    const auto shifted = xi_diagonal_estimate({a.plus_constant(3.0), b, e.plus_constant(cplx(0, -1)), f}, 40, 2);
    CHECK(base.diagonal == shifted.diagonal);

    CHECK_THROWS_AS(xi_diagonal_estimate({a, b, e}, 10, 2), InputError);
    CHECK_THROWS_AS(xi_diagonal_estimate({a, b}, 10, 0), InputError);
}

TEST_CASE("xi for W matches the exact lattice and is positive")
{
    const int n_max = 12;
    const auto w = make_lacunary(0.25, n_max);
    const auto x = xi_diagonal_estimate({w, w, w, w}, 1 << 10, 2);
    for (std::size_t l = 0; l < x.diagonal.size(); ++l)
    {
        CHECK(x.diagonal[l].real() >= -1e-12);
        CHECK(x.diagonal[l].imag() == 0.0);
        const double lat = gamma_lattice_sum(static_cast<long long>(l), 0.25, n_max, LatticeVariant::exact).value;
        CHECK(std::abs(x.diagonal[l].real() - lat) <= 1e-12 * std::max(1.0, lat));
    }
    const auto lat = xi_lattice_estimate(0.25, 1 << 10, n_max);
    for (std::size_t i = 0; i < lat.real_part.partial.size(); ++i)
        CHECK(rel(lat.real_part.partial[i], x.real_part.partial[i]) < 1e-12);
}

TEST_CASE("xi lattice path for W stays away from zero")
{
    const auto e = xi_lattice_estimate(0.25, 1 << 12, 60);
    CHECK(e.real_part.dyadic_min() > 0.1);
    // l ||Pg_l||^2 is invariant under doubling, so the dyadic partials settle
    const auto& p = e.real_part.partial;
    CHECK(std::abs(p[p.size() - 1] - p[p.size() - 2]) < 0.2 * p.back());
}

TEST_CASE("zeta: holomorphic pair and the alternating identity")
{
    // P e_1 (1-P) e_{-1} P = e_0 e_0^*, while [P e_1 P, P e_{-1} P] is its negative
    const auto e1 = monomial(1), em1 = monomial(-1);
    const auto xi = xi_diagonal_estimate({e1, em1}, 32, 1);
    const auto zeta = zeta_estimate({e1, em1}, 32, 1);
    CHECK(xi.diagonal[0] == cplx(1.0));
    for (std::size_t l = 0; l < xi.diagonal.size(); ++l)
        CHECK(zeta.diagonal[l] == -xi.diagonal[l]);
    const auto xi2 = xi_diagonal_estimate({e1, em1, e1, em1}, 32, 2);
    const auto zeta2 = zeta_estimate({e1, em1, e1, em1}, 32, 2);
    CHECK(xi2.diagonal == zeta2.diagonal);
    CHECK(xi2.diagonal[0] == cplx(1.0));

    const auto z0 = zeta_estimate({e1, constant_symbol(1.0), em1, e1}, 16, 2);
    for (const auto& d : z0.diagonal)
        CHECK(d == cplx(0.0));

    for (std::uint64_t seed = 10; seed < 13; ++seed)
    {
        const auto a = random_trig(4, seed), b = random_trig(3, seed + 100), c = random_trig(5, seed + 200),
                   d = random_trig(2, seed + 300);
        const auto z = zeta_estimate({a, b, c, d}, 256, 2);
        CHECK(z.identity_residual <= 1e-8);
    }
}

TEST_CASE("zeta against dense truncated operators")
{
    const auto a = random_trig(3, 41), b = random_trig(2, 42), c = random_trig(4, 43), d = random_trig(1, 44);
    const int N = 32, M = N + 3 + 2 + 4 + 1;
    const MatrixXc A = commutator_P(a, M).dense(), B = commutator_P(b, M).dense(), C = commutator_P(c, M).dense(),
                   D = commutator_P(d, M).dense();
    const MatrixXc Z = (A * B - B * A) * (C * D - D * C);
    const MatrixXc X = A * B * C * D;
    const auto z = zeta_estimate({a, b, c, d}, N, 2);
    const auto x = xi_diagonal_estimate({a, b, c, d}, N, 2);
    for (int l = 0; l <= N; ++l)
    {
        CHECK(std::abs(z.diagonal[l] - Z(l + M, l + M)) < 1e-12);
        CHECK(std::abs(x.diagonal[l] - X(l + M, l + M)) < 1e-12);
    }
}

TEST_CASE("bound chain pieces")
{
    for (long long l : {1LL, 2LL, 7LL, 33LL, 1000LL, 4096LL})
    {
        const double I = bound_integral(l), cf = bound_integral_closed_form(l);
        CHECK(rel(I, cf) < 1e-10);
        CHECK(rel(cf, oracle::bound_integral_simpson(l)) < 1e-10);
    }

    // sub-sum domination, termwise: each sub-sum term n has a diagonal printed pair
    // (n, m) with 2^n - l >= 2^m >= l + 1 whose weight 2^{-(n+m)/2} is at least as large
    for (long long l = 1; l <= 300; ++l)
    {
        int n = 0;
        while (std::ldexp(1.0, n) < 2.0 * l + 1)
            ++n;
        for (int k = n; k < n + 40; ++k)
        {
            const double pn = std::ldexp(1.0, k);
            const double term = std::exp2(-k / 2.0) / std::sqrt(pn - l);
            bool found = false;
            for (int m = 0; m < k && !found; ++m)
            {
                const double pm = std::ldexp(1.0, m);
                found = pn - l >= pm && pm >= l + 1 && std::exp2(-(k + m) / 2.0) >= term;
            }
            REQUIRE(found);
        }
    }

    CHECK(bound_subsum(1) == doctest::Approx(0.550019925159565).epsilon(1e-12));
}

TEST_CASE("bound report flags and refusal")
{
    const auto r = bound_report(64, 96);
    REQUIRE(r.rows.size() == 64);
    CHECK(r.holds("oracle==lattice"));
    CHECK(r.holds("quadrature==closed_form"));
    CHECK(r.holds("lattice>=subsum"));
    CHECK(r.holds("lattice_printed>=subsum"));
    CHECK_FALSE(r.holds("claimed_integral<=subsum"));
    CHECK(r.rows[0].lattice_printed == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
    CHECK(r.rows[0].claimed_bound == doctest::Approx(2.0 / std::numbers::ln2));

    const auto j = to_json(r);
    CHECK(j["rows"].size() == 64);
    CHECK(j["flags"]["subsum>=integral"]["status"].is_string());
    std::ostringstream os;
    write_bound_csv(os, r);
    const std::string csv = os.str();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 65);

    try
    {
        bound_report(64, 20);
        FAIL("expected refusal");
    }
    catch (const InputError& e)
    {
        CHECK(std::string(e.what()).find("requires n_max >= ") != std::string::npos);
    }
}
