#include "heislab/cc_geodesic.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace heislab;

namespace
{

HeisPoint pt(double t, double z1, double z2)
{
    return {t, Eigen::Vector2d(z1, z2)};
}

} // namespace

TEST_CASE("endpoint map")
{
    const auto cfg = HeisConfig::standard(1);
    HorizontalPath p{HeisPoint::identity(2), Eigen::MatrixXd::Zero(5, 2)};
    const auto e = endpoint_map(p, cfg);
    CHECK(e.t == 0.0);
    CHECK(e.z.norm() == 0.0);

    HorizontalPath seg{HeisPoint::identity(2), Eigen::MatrixXd(1, 2)};
    seg.controls << 0.3, -1.2;
    const auto s = endpoint_map(seg, cfg);
    CHECK(s.t == 0.0);
    CHECK(s.z(0) == doctest::Approx(0.3));
    CHECK(s.z(1) == doctest::Approx(-1.2));

    // counter-clockwise square of side a encloses area a^2
    const double a = 0.7;
    HorizontalPath sq{HeisPoint::identity(2), Eigen::MatrixXd(4, 2)};
    sq.controls << 4 * a, 0, 0, 4 * a, -4 * a, 0, 0, -4 * a;
    const auto q = endpoint_map(sq, cfg);
    CHECK(q.t == doctest::Approx(a * a).epsilon(1e-14));
    CHECK(q.z.norm() <= 1e-15);
    sq.controls.rowwise().reverseInPlace();
    CHECK(endpoint_map(sq, cfg).t == doctest::Approx(-a * a).epsilon(1e-14));

    // the endpoint of a path from x is x times the endpoint from e
    HorizontalPath from_x{pt(0.4, 1.0, -2.0), sq.controls};
    HorizontalPath from_e{HeisPoint::identity(2), sq.controls};
    const auto lhs = endpoint_map(from_x, cfg);
    const auto rhs = group_mul(from_x.start, endpoint_map(from_e, cfg), cfg);
    CHECK(lhs.t == doctest::Approx(rhs.t).epsilon(1e-14));
}

TEST_CASE("path energy")
{
    HorizontalPath p{HeisPoint::identity(2), Eigen::MatrixXd::Zero(3, 2)};
    CHECK(path_energy(p) == 0.0);
    p.controls.rowwise() = Eigen::RowVector2d(3.0, 4.0);
    CHECK(path_energy(p) == doctest::Approx(25.0));
    const double e = path_energy(p);
    p.controls *= 2.0;
    CHECK(path_energy(p) == doctest::Approx(4.0 * e));
}

TEST_CASE("cc distance: horizontal and degenerate")
{
    const auto cfg = HeisConfig::standard(1);
    const auto e = HeisPoint::identity(2);
    const auto zero = cc_distance(e, e, cfg);
    CHECK(zero.value == 0.0);
    CHECK(zero.path.steps() == 0);

    const auto r = cc_distance(e, pt(0.0, 0.6, -0.8), cfg);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.constraint_residual <= 1e-8);
    CHECK(std::sqrt(r.energy) == doctest::Approx(r.value).epsilon(1e-12));
    const auto end = endpoint_map(r.path, cfg);
    CHECK(std::abs(end.t) <= 1e-7);
    CHECK(std::sqrt(path_energy(r.path)) == doctest::Approx(r.value).epsilon(1e-12));
}

TEST_CASE("cc distance against the circular-arc oracle")
{
    const auto cfg = HeisConfig::standard(1);
    const auto e = HeisPoint::identity(2);
    for (const auto& y : {pt(1.0, 0, 0), pt(0.1, 0, 0), pt(-4.0, 0, 0), pt(0.3, 1.0, 0.5), pt(-2.0, 0.2, 0.1)})
    {
        const double want = oracle::h1_cc_distance(y.t, y.z(0), y.z(1));
        const auto got = cc_distance(e, y, cfg);
        CHECK(got.value == doctest::Approx(want).epsilon(1e-2));
        // the value is an energy upper bound of a feasible polygon, so it cannot undercut the oracle
        CHECK(got.value >= want * (1 - 1e-6));
        const auto end = endpoint_map(got.path, cfg);
        CHECK(end.t == doctest::Approx(y.t).epsilon(1e-7));
    }
}

TEST_CASE("cc distance invariances")
{
    const auto cfg = HeisConfig::standard(1);
    const auto e = HeisPoint::identity(2);
    const auto x = pt(0.5, 0.3, -0.2);
    const auto y = pt(-0.4, 1.1, 0.4);
    const double dxy = cc_distance(x, y, cfg).value;
    const double dyx = cc_distance(y, x, cfg).value;
    CHECK(std::abs(dxy - dyx) <= 2e-3 * dxy);

    const auto g = pt(2.0, -1.0, 3.0);
    const double dg = cc_distance(group_mul(g, x, cfg), group_mul(g, y, cfg), cfg).value;
    CHECK(std::abs(dg - dxy) <= 1e-3 * dxy);

    const auto w = pt(0.7, 0.2, 0.9);
    const double d1 = cc_distance(e, w, cfg).value;
    for (double lam : {0.5, 2.0})
    {
        const double dl = cc_distance(e, dilate(lam, w), cfg).value;
        CHECK(std::abs(dl - lam * d1) <= 1e-3 * lam * d1);
    }

    const auto m = pt(0.1, 0.5, 0.5);
    const double d_em = cc_distance(e, m, cfg).value;
    const double d_mw = cc_distance(m, w, cfg).value;
    CHECK(d1 <= (d_em + d_mw) * (1 + 2e-3));
}

TEST_CASE("cc distance in higher dimension")
{
    const auto cfg = HeisConfig::standard(2);
    Eigen::VectorXd z(4);
    z << 0.1, -0.2, 0.3, 0.4;
    const auto r = cc_distance(HeisPoint::identity(4), HeisPoint(0.0, z), cfg);
    CHECK(r.value == doctest::Approx(z.norm()).epsilon(1e-3));
    // vertical in H^2: the isoperimetric circle lives in one symplectic plane
    const auto v = cc_distance(HeisPoint::identity(4), HeisPoint(1.0, Eigen::VectorXd::Zero(4)), cfg);
    CHECK(v.value == doctest::Approx(2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-2));
}

TEST_CASE("cc results serialize and the certificate dumps as csv")
{
    const auto cfg = HeisConfig::standard(1);
    const auto e = HeisPoint::identity(2);
    const auto y = pt(0.2, 0.4, 0.0);
    CCSolverOptions opts;
    opts.seed = 9;
    const auto r = cc_distance(e, y, cfg, opts);
    const auto j = to_json(r, e, y, 9);
    for (const char* k : {"x", "y", "value", "energy", "residual", "m", "seed"})
        CHECK(j.contains(k));
    CHECK(j["m"].get<int>() == r.path.steps());

    const auto again = cc_distance(e, y, cfg, opts);
    CHECK(again.value == r.value);

    std::ostringstream os;
    write_path_csv(os, r.path, cfg);
    const std::string s = os.str();
    CHECK(s.rfind("step,", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == r.path.steps() + 1);
}

TEST_CASE("gauge comparison scan")
{
    const auto cfg = HeisConfig::standard(1);
    CCSolverOptions opts;
    opts.starts = 4;
    const auto rep = gauge_comparison_scan(cfg, 12, 1.0, opts);
    CHECK(rep.samples == 12);
    CHECK(rep.failures == 0);
    CHECK(rep.min_ratio > 0.0);
    CHECK(rep.max_ratio / rep.min_ratio < 10.0);
    // the vertical ratio 2 sqrt(pi) and the horizontal ratio 1 bound every sample up to discretization
    CHECK(rep.max_ratio <= 2.0 * std::sqrt(std::numbers::pi) * 1.01);
    CHECK(rep.min_ratio >= 1.0 - 1e-3);
}
