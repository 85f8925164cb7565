#include "heislab/error.hpp"
#include "heislab/singular_values.hpp"
#include "heislab/symbol_lab.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace heislab;

namespace
{

VectorXc basis(int N, int k)
{
    VectorXc v = VectorXc::Zero(2 * N + 1);
    v(k + N) = 1.0;
    return v;
}

VectorXc random_vec(int N, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    VectorXc v(2 * N + 1);
    for (auto& x : v)
        x = cplx(g(rng), g(rng));
    return v;
}

/// Hankel matrix from its entry formula: rows j < 0, columns k >= 0, entry a^(j - k).
MatrixXc hankel_by_entries(const CircleSymbol& a, int N)
{
    MatrixXc m = MatrixXc::Zero(2 * N + 1, 2 * N + 1);
    for (int j = -N; j < 0; ++j)
        for (int k = 0; k <= N; ++k)
            m(j + N, k + N) = a.coeff(j - k);
    return m;
}

double norm_dense(const MatrixXc& m)
{
    return dense_singular_values(m).front();
}

} // namespace

TEST_CASE("szego projection")
{
    const int N = 8;
    CHECK(szego_project(basis(N, 3)) == basis(N, 3));
    CHECK(szego_project(basis(N, -2)).norm() == 0.0);
    const auto v = random_vec(N, 1);
    CHECK(szego_project(szego_project(v)) == szego_project(v));
}

TEST_CASE("multiplication")
{
    const int N = 40;
    const auto v = random_vec(N, 2);
    CHECK(multiply(constant_symbol(1.0), v).coeffs == v);
    const auto e = multiply(monomial(1), basis(N, 0));
    CHECK(e.coeffs == basis(N, 1));
    CHECK_FALSE(e.truncated);
    CHECK(multiply(monomial(1), basis(N, N)).truncated);

    for (const auto& a : {make_lacunary(0.3, 5), make_random_symbol(0.5, 30, 3), make_triangle_wave(25)})
    {
        const auto s = multiply_sparse(a, v), f = multiply_fft(a, v);
        CHECK((s.coeffs - f.coeffs).cwiseAbs().maxCoeff() <= 1e-12 * s.coeffs.cwiseAbs().maxCoeff());
        CHECK(s.truncated == f.truncated);
    }
}

TEST_CASE("hankel operators")
{
    const int N = 32;
    const auto zero = singular_values(hankel_op(constant_symbol(2.0), N), 5);
    for (double x : zero.values)
        CHECK(x == 0.0);

    const auto h = hankel_op(monomial(-1), N);
    CHECK(h.apply(basis(N, 0)) == basis(N, -1));
    CHECK(h.apply(basis(N, 1)).norm() == 0.0);
    const auto s = singular_values(h, 4);
    CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.values[1] == 0.0);
    SvdOptions lz;
    lz.method = SvdMethod::lanczos;
    const auto sl = singular_values(h, 4, lz);
    CHECK(sl.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sl.values[1] <= 1e-12);

    // entry formula, matvec, dense and adjoint agree
    for (const auto& a : {make_lacunary(0.25, 5), make_random_symbol(0.4, 64, 9)})
    {
        const auto op = hankel_op(a, N);
        const MatrixXc want = hankel_by_entries(a, N);
        CHECK((op.dense() - want).cwiseAbs().maxCoeff() <= 1e-10);
        const auto x = random_vec(N, 4), y = random_vec(N, 5);
        CHECK((op.apply(x) - want * x).norm() <= 1e-10 * x.norm());
        CHECK(std::abs(y.dot(op.apply(x)) - op.apply_adjoint(y).dot(x)) <= 1e-10 * x.norm() * y.norm());
    }
}

TEST_CASE("hankel top singular value, lanczos against dense")
{
    const auto op = hankel_op(make_lacunary(0.25, 10), 1 << 12);
    SvdOptions d;
    d.method = SvdMethod::dense;
    const auto dense = singular_values(op, 8, d);
    const auto lz = singular_values(op, 8);
    CHECK(lz.method == "lanczos");
    for (int i = 0; i < 8; ++i)
        CHECK(std::abs(lz.values[i] - dense.values[i]) <= 1e-8 * dense.values[0]);
}

TEST_CASE("hankel norm bounded by the sup norm")
{
    std::vector<CircleSymbol> corpus{make_lacunary(0.25, 8), make_triangle_wave(200), make_symbol("cos")};
    for (int i = 0; i < 6; ++i)
        corpus.push_back(make_random_symbol(0.3, 128, 40 + i));
    for (const auto& a : corpus)
    {
        const double h = singular_values(hankel_op(a, 256), 1).values[0];
        CHECK(h <= sup_norm(a, 1 << 14) + 1e-8);
    }
}

TEST_CASE("commutator with P")
{
    const int N = 16;
    const auto a = make_symbol("cos") * 2.0;  // e_1 + e_{-1}
    const auto c = commutator_P(a, N);
    CHECK(c.apply(basis(N, 0)) == -basis(N, -1));
    CHECK(c.apply(basis(N, -1)) == basis(N, 0));
    for (int k = -N; k <= N; ++k)
        if (k != 0 && k != -1)
            CHECK(c.apply(basis(N, k)).norm() == 0.0);
    const auto s = singular_values(c, 3);
    CHECK(s.values[0] == doctest::Approx(1.0));
    CHECK(s.values[1] == doctest::Approx(1.0));
    CHECK(s.values[2] == 0.0);

    CHECK(singular_values(commutator_P(constant_symbol(3.0), N), 1).values[0] == 0.0);

    // ||[P, a]|| = max(||H_a||, ||H_conj(a)||)
    for (std::uint64_t seed : {1u, 2u, 3u})
    {
        auto b = make_random_symbol(0.4, 100, seed);
        b.set_coeff(7, cplx(0.0, 0.8));  // break real-valuedness so H_a and H_conj(a) differ
        const int M = 1 << 9;
        const double nc = norm_dense(commutator_P(b, M).dense());
        const double h1 = norm_dense(hankel_op(b, M).dense());
        const double h2 = norm_dense(hankel_op(b.conjugate(), M).dense());
        CHECK(std::abs(nc - std::max(h1, h2)) <= 1e-8 * nc);
    }

    // constants drop out exactly
    const auto r = make_random_symbol(0.5, 200, 11);
    const auto s1 = singular_values(commutator_P(r, 128), 20);
    const auto s2 = singular_values(commutator_P(r.plus_constant(cplx(2.5, -1.0)), 128), 20);
    CHECK(s1.values == s2.values);

    const auto x = random_vec(N, 6), y = random_vec(N, 7);
    const auto cb = commutator_P(make_random_symbol(0.2, 10, 2), N);
    CHECK(std::abs(y.dot(cb.apply(x)) - cb.apply_adjoint(y).dot(x)) <= 1e-12 * x.norm() * y.norm());
}

TEST_CASE("singular values grow with the truncation")
{
    const auto a = make_random_symbol(0.3, 300, 21);
    std::vector<double> prev(40, 0.0);
    for (int N : {32, 64, 128, 256, 512})
    {
        const auto s = singular_values(hankel_op(a, N), 40);
        for (int k = 0; k < 40; ++k)
            CHECK(s.values[k] >= prev[k] - 1e-10);
        prev = s.values;
    }
}

TEST_CASE("lanczos matches dense on the stable head")
{
    // the Hankel of a degree-512 symbol only sees columns below 512, so its spectrum is final by N = 2^9
    const auto w = make_lacunary(0.25, 9);
    SvdOptions force_dense;
    force_dense.method = SvdMethod::dense;
    const auto dense = singular_values(hankel_op(w, 1 << 9), 64, force_dense);
    CHECK(dense.method == "dense");
    const auto lz = singular_values(hankel_op(w, 1 << 12), 64);
    CHECK(lz.method == "lanczos");
    for (int i = 0; i < 64; ++i)
        CHECK(lz.values[i] == doctest::Approx(dense.values[i]).epsilon(1e-6));

    // equal sizes agree to 1e-8
    const auto op = commutator_P(make_random_symbol(0.5, 300, 8), 300);
    SvdOptions d, l;
    d.method = SvdMethod::dense;
    l.method = SvdMethod::lanczos;
    const auto sd = singular_values(op, 30, d), sl = singular_values(op, 30, l);
    for (int i = 0; i < 30; ++i)
        CHECK(std::abs(sd.values[i] - sl.values[i]) <= 1e-8 * sd.values[0]);
    CHECK_THROWS_AS(singular_values(op, 0), InputError);
    CHECK_THROWS_AS(singular_values(op, 602), InputError);
}

TEST_CASE("weak schatten quasinorm")
{
    SingularSpectrum s;
    for (int k = 0; k < 100; ++k)
        s.values.push_back(1.0 / (k + 1));
    CHECK(weak_schatten_quasinorm(s, 1.0) == doctest::Approx(1.0));
    SingularSpectrum one;
    one.values = {1.0, 0.0, 0.0};
    for (double p : {0.5, 1.0, 4.0})
        CHECK(weak_schatten_quasinorm(one, p) == 1.0);
    CHECK_THROWS_AS(weak_schatten_quasinorm(s, 0.0), InputError);

    // H_{W_beta} with p = 1/beta: stable as N doubles
    for (double beta : {0.25, 0.5})
    {
        const auto w = make_lacunary(beta, 10);
        const double q1 = weak_schatten_quasinorm(singular_values(hankel_op(w, 1 << 9), 200), 1.0 / beta);
        const double q2 = weak_schatten_quasinorm(singular_values(hankel_op(w, 1 << 10), 200), 1.0 / beta);
        CHECK(std::isfinite(q2));
        CHECK(std::abs(q2 - q1) <= 0.1 * q1);
    }
}

TEST_CASE("decay fit")
{
    SingularSpectrum s;
    for (int k = 0; k < 600; ++k)
        s.values.push_back(k == 0 ? 1.0 : std::pow(k, -0.5));
    const auto f = decay_fit(s, 16, 512);
    CHECK(f.p_hat == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.exponent == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.points == 497);
    CHECK_THROWS_AS(decay_fit(s, 16, 20), InputError);
    CHECK_THROWS_AS(decay_fit(s, 0, 100), InputError);
    CHECK_THROWS_AS(decay_fit(s, 16, 600), InputError);

    // a C^3 trigonometric polynomial: the window sees polynomial decay of order about 3
    const auto smooth = make_random_symbol(3.0, 1024, 5);
    SvdOptions d;
    d.method = SvdMethod::dense;
    const auto ss = singular_values(hankel_op(smooth, 1024), 600, d);
    CHECK(decay_fit(ss, 16, 512).exponent >= 2.0);

    std::ostringstream os;
    write_spectrum_csv(os, ss);
    CHECK(os.str().rfind("k,mu\n0,", 0) == 0);
}

TEST_CASE("calderon commutator")
{
    const auto e1 = monomial(1);
    for (int N : {2, 8, 64})
    {
        const auto op = calderon_commutator(e1, N);
        CHECK(operator_norm(op).value == doctest::Approx(1.0).epsilon(1e-6));
    }

    // matvec against the entry formula (|j| - |k|) f^(j - k)
    const int N = 20;
    const auto f = make_random_symbol(0.7, 30, 12);
    const auto op = calderon_commutator(f, N);
    const MatrixXc m = op.dense();
    double err = 0.0;
    for (int j = -N; j <= N; ++j)
        for (int k = -N; k <= N; ++k)
            err = std::max(err, std::abs(m(j + N, k + N) - double(std::abs(j) - std::abs(k)) * f.coeff(j - k)));
    CHECK(err <= 1e-12);
    const auto x = random_vec(N, 1), y = random_vec(N, 2);
    CHECK(std::abs(y.dot(op.apply(x)) - op.apply_adjoint(y).dot(x)) <= 1e-10 * x.norm() * y.norm());

    const auto rep = calderon_norm_probe(make_triangle_wave(2048), {64, 128, 256, 512, 1024});
    for (const auto& row : rep.rows)
        CHECK(row.norm == doctest::Approx(row.norm_adjoint).epsilon(1e-4));
    CHECK(rep.top_variation < 0.05);
    CHECK(std::abs(rep.growth_exponent) < 0.15);

    PowerIterationOptions tight;
    tight.max_iterations = 2;
    CHECK_THROWS_AS(operator_norm(calderon_commutator(make_lacunary(0.5, 8), 256), tight), PowerIterationStagnation);
}

TEST_CASE("operator descriptors round-trip")
{
    const auto a = make_symbol({{"kind", "lacunary"}, {"beta", 0.5}, {"n_max", 6}});
    const auto op = hankel_op(a, 100);
    const auto back = operator_from_descriptor(op.descriptor());
    const auto x = random_vec(100, 3);
    CHECK(back.apply(x) == op.apply(x));
    CHECK(descriptor_hash(back.descriptor()) == descriptor_hash(op.descriptor()));
    CHECK(descriptor_hash(hankel_op(a, 101).descriptor()) != descriptor_hash(op.descriptor()));

    auto bad = op.descriptor();
    bad["symbol_hash"] = "0000000000000000";
    CHECK_THROWS_AS(operator_from_descriptor(bad), InputError);
    bad = op.descriptor();
    bad["op"] = "nope";
    CHECK_THROWS_AS(operator_from_descriptor(bad), InputError);
}
