#include "heislab/cc_geodesic.hpp"
#include "heislab/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

namespace heislab
{

HeisPoint endpoint_map(const HorizontalPath& path, const HeisConfig& cfg)
{
    if (path.controls.cols() != cfg.dim() || path.start.dim() != cfg.dim())
        throw InputError("endpoint_map: dimension mismatch");
    if (!path.controls.allFinite())
        throw InputError("endpoint_map: controls must be finite");
    const int m = path.steps();
    HeisPoint x = path.start;
    if (m == 0)
        return x;
    const double h = 1.0 / m;
    for (int i = 0; i < m; ++i)
    {
        const Eigen::VectorXd u = path.controls.row(i).transpose();
        x.t += 0.5 * h * cfg.bilinear(x.z, u);
        x.z += h * u;
    }
    return x;
}

double path_energy(const HorizontalPath& path)
{
    const int m = path.steps();
    if (m == 0)
        return 0.0;
    return path.controls.squaredNorm() / m;
}

void write_path_csv(std::ostream& os, const HorizontalPath& path, const HeisConfig& cfg)
{
    const int d = cfg.dim();
    os << "step,s,t";
    for (int j = 0; j < d; ++j)
        os << ",z" << j + 1;
    for (int j = 0; j < d; ++j)
        os << ",u" << j + 1;
    os << '\n';
    const int m = path.steps();
    HeisPoint x = path.start;
    const double h = m > 0 ? 1.0 / m : 0.0;
    os.precision(17);
    for (int i = 0; i < m; ++i)
    {
        os << i << ',' << i * h << ',' << x.t;
        for (int j = 0; j < d; ++j)
            os << ',' << x.z(j);
        for (int j = 0; j < d; ++j)
            os << ',' << path.controls(i, j);
        os << '\n';
        const Eigen::VectorXd u = path.controls.row(i).transpose();
        x.t += 0.5 * h * cfg.bilinear(x.z, u);
        x.z += h * u;
    }
}

namespace
{

// Vertical displacement of the path from the identity with controls u:
// Q(u) = sum_i (h/2) w_i^T L u_i with w_i = h sum_{j<i} u_j.
double vertical_form(const Eigen::MatrixXd& u, const Eigen::MatrixXd& L)
{
    const auto m = u.rows();
    const double h = 1.0 / static_cast<double>(m);
    Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(u.cols());
    double q = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
    {
        q += 0.5 * h * (w * L * u.row(i).transpose())(0);
        w += h * u.row(i);
    }
    return q;
}

// Gradient of vertical_form: dQ/du_k = (h/2) L^T w_k + (h^2/2) L sum_{i>k} u_i.
Eigen::MatrixXd vertical_form_gradient(const Eigen::MatrixXd& u, const Eigen::MatrixXd& L)
{
    const auto m = u.rows();
    const double h = 1.0 / static_cast<double>(m);
    Eigen::MatrixXd g(u.rows(), u.cols());
    Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(u.cols());
    for (Eigen::Index k = 0; k < m; ++k)
    {
        g.row(k) = 0.5 * h * w * L;  // (L^T w)^T = w^T L
        w += h * u.row(k);
    }
    Eigen::RowVectorXd tail = Eigen::RowVectorXd::Zero(u.cols());
    for (Eigen::Index k = m - 1; k >= 0; --k)
    {
        g.row(k) += 0.5 * h * h * (L * tail.transpose()).transpose();
        tail += u.row(k);
    }
    return g;
}

Eigen::MatrixXd centered(const Eigen::MatrixXd& a)
{
    return a.rowwise() - a.colwise().mean();
}

// Normalized problem: reach (T, Z) from the identity with minimal energy.
struct NormalizedProblem
{
    const Eigen::MatrixXd& L;
    double T;
    Eigen::RowVectorXd Z;

    Eigen::MatrixXd controls(const Eigen::MatrixXd& v) const
    {
        return centered(v).rowwise() + Z;
    }
    double constraint(const Eigen::MatrixXd& u) const { return vertical_form(u, L) - T; }
    double energy(const Eigen::MatrixXd& u) const
    {
        return u.squaredNorm() / static_cast<double>(u.rows());
    }
    double residual(const Eigen::MatrixXd& u) const
    {
        const double h = 1.0 / static_cast<double>(u.rows());
        const Eigen::RowVectorXd zend = h * u.colwise().sum();
        return std::abs(constraint(u)) + (zend - Z).norm();
    }
};

struct InnerResult
{
    Eigen::MatrixXd v;
    int iterations = 0;
    bool converged = false;
};

// L-BFGS on the augmented Lagrangian E(u) - lambda c(u) + (rho/2) c(u)^2,
// u = Z + centered(v).
InnerResult minimize_augmented(const NormalizedProblem& prob, Eigen::MatrixXd v, double lambda,
                               double rho, int max_iter)
{
    const auto m = v.rows();
    const auto n = v.size();
    const double h = 1.0 / static_cast<double>(m);

    auto evaluate = [&](const Eigen::MatrixXd& vv, Eigen::MatrixXd& grad) {
        const Eigen::MatrixXd u = prob.controls(vv);
        const double c = prob.constraint(u);
        const double f = prob.energy(u) - lambda * c + 0.5 * rho * c * c;
        grad = centered(2.0 * h * u + (rho * c - lambda) * vertical_form_gradient(u, prob.L));
        return f;
    };

    constexpr int memory = 12;
    std::vector<Eigen::VectorXd> s_hist, y_hist;
    std::vector<double> rho_hist;

    Eigen::MatrixXd g;
    double f = evaluate(v, g);
    const double gtol = 1e-9 * h;

    InnerResult out;
    int stalled = 0;
    for (int it = 0; it < max_iter; ++it)
    {
        out.iterations = it;
        Eigen::Map<const Eigen::VectorXd> gv(g.data(), n);
        if (gv.lpNorm<Eigen::Infinity>() <= gtol)
        {
            out.converged = true;
            break;
        }
        // two-loop recursion
        Eigen::VectorXd q = gv;
        const auto k = s_hist.size();
        std::vector<double> alpha(k);
        for (std::size_t i = k; i-- > 0;)
        {
            alpha[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        if (k > 0)
            q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        for (std::size_t i = 0; i < k; ++i)
        {
            const double beta = rho_hist[i] * y_hist[i].dot(q);
            q += s_hist[i] * (alpha[i] - beta);
        }
        Eigen::VectorXd dir = -q;
        double slope = dir.dot(gv);
        if (!(slope < 0.0))
        {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            dir = -gv;
            slope = dir.dot(gv);
        }
        double step = (k == 0) ? std::min(1.0, 1.0 / gv.norm()) : 1.0;

        Eigen::MatrixXd v_new, g_new;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls)
        {
            v_new = v + step * Eigen::Map<const Eigen::MatrixXd>(dir.data(), m, v.cols());
            f_new = evaluate(v_new, g_new);
            if (f_new <= f + 1e-4 * step * slope)
            {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
        {
            // no further decrease representable; treat as converged at noise level
            out.converged = gv.lpNorm<Eigen::Infinity>() <= 1e-6 * h;
            break;
        }
        Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(v_new.data(), n) -
                            Eigen::Map<const Eigen::VectorXd>(v.data(), n);
        Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(g_new.data(), n) - gv;
        const double sy = s.dot(y);
        if (sy > 1e-14 * s.norm() * y.norm())
        {
            if (static_cast<int>(s_hist.size()) == memory)
            {
                s_hist.erase(s_hist.begin());
                y_hist.erase(y_hist.begin());
                rho_hist.erase(rho_hist.begin());
            }
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
        }
        const double df = f - f_new;
        v = std::move(v_new);
        g = std::move(g_new);
        f = f_new;
        stalled = (df <= 1e-15 * std::max(1.0, std::abs(f))) ? stalled + 1 : 0;
        if (stalled >= 5)
        {
            Eigen::Map<const Eigen::VectorXd> gnew(g.data(), n);
            out.converged = gnew.lpNorm<Eigen::Infinity>() <= 1e-6 * h;
            break;
        }
    }
    out.v = std::move(v);
    return out;
}

// Moves u along the centered constraint gradient to the nearest root of the
// (quadratic) constraint; z-endpoint is unaffected since the step is centered.
void polish_feasibility(const NormalizedProblem& prob, Eigen::MatrixXd& u)
{
    for (int pass = 0; pass < 3; ++pass)
    {
        const double c0 = prob.constraint(u);
        if (c0 == 0.0)
            return;
        const Eigen::MatrixXd dir = centered(vertical_form_gradient(u, prob.L));
        const double b = (dir.array() * vertical_form_gradient(u, prob.L).array()).sum();
        const double a = vertical_form(dir, prob.L);
        double s;
        if (b == 0.0 && a == 0.0)
            return;
        const double disc = b * b - 4.0 * a * c0;
        if (std::abs(a) <= 1e-14 * std::abs(b) || disc < 0.0)
            s = (b != 0.0) ? -c0 / b : 0.0;
        else
        {
            // root of smaller magnitude, stable form
            const double qq = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            s = c0 / qq;
        }
        const Eigen::MatrixXd trial = u + s * dir;
        if (std::abs(prob.constraint(trial)) < std::abs(c0))
            u = trial;
        else
            return;
    }
}

struct LevelCandidate
{
    Eigen::MatrixXd u;
    double energy = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
    bool feasible = false;
};

LevelCandidate solve_from(const NormalizedProblem& prob, Eigen::MatrixXd v,
                          const CCSolverOptions& opts, SolverTraceEntry& trace)
{
    double lambda = 0.0;
    double rho = opts.penalty_initial;
    LevelCandidate cand;
    int outer = 0;
    for (; outer < opts.max_outer; ++outer)
    {
        InnerResult inner = minimize_augmented(prob, std::move(v), lambda, rho, opts.max_inner);
        trace.inner_iterations += inner.iterations;
        v = std::move(inner.v);
        const Eigen::MatrixXd u = prob.controls(v);
        const double c = prob.constraint(u);
        if (std::abs(c) <= 1e-7 && (inner.converged || rho >= opts.penalty_max))
            break;
        lambda -= rho * c;
        rho = std::min(rho * opts.penalty_growth, opts.penalty_max);
    }
    trace.outer_iterations = outer;
    cand.u = prob.controls(v);
    polish_feasibility(prob, cand.u);
    cand.energy = prob.energy(cand.u);
    cand.residual = prob.residual(cand.u);
    cand.feasible = cand.residual <= opts.residual_tol;
    trace.value = std::sqrt(cand.energy);
    trace.residual = cand.residual;
    trace.feasible = cand.feasible;
    return cand;
}

Eigen::MatrixXd refine_controls(const Eigen::MatrixXd& u)
{
    Eigen::MatrixXd r(2 * u.rows(), u.cols());
    for (Eigen::Index i = 0; i < u.rows(); ++i)
    {
        r.row(2 * i) = u.row(i);
        r.row(2 * i + 1) = u.row(i);
    }
    return r;
}

} // namespace

CCDistanceResult cc_distance(const HeisPoint& x, const HeisPoint& y, const HeisConfig& cfg,
                             const CCSolverOptions& opts)
{
    if (x.dim() != cfg.dim() || y.dim() != cfg.dim())
        throw InputError("cc_distance: dimension mismatch");
    if (!x.is_finite() || !y.is_finite())
        throw InputError("cc_distance: points must be finite");
    if (opts.starts < 1 || opts.initial_steps < 1 || opts.rel_tol <= 0.0)
        throw InputError("cc_distance: invalid solver options");

    CCDistanceResult result;
    result.path.start = x;
    result.path.controls = Eigen::MatrixXd::Zero(0, cfg.dim());

    const HeisPoint g = group_mul(group_inv(x), y, cfg);
    const double scale = koranyi_gauge(g);
    if (scale == 0.0)
        return result;

    NormalizedProblem prob{cfg.form(), g.t / (scale * scale), g.z.transpose() / scale};

    auto finish = [&](const LevelCandidate& best) {
        result.value = scale * std::sqrt(best.energy);
        result.energy = result.value * result.value;
        result.path.controls = scale * best.u;
        result.constraint_residual = best.residual;
    };

    LevelCandidate previous;
    double previous_value = std::numeric_limits<double>::infinity();
    int steps = opts.initial_steps;
    for (int level = 0; level <= opts.max_refinements; ++level, steps *= 2)
    {
        LevelCandidate best;
        if (level > 0 && previous.feasible)
        {
            // the refined coarse optimum is admissible on the finer mesh
            best.u = refine_controls(previous.u);
            best.energy = prob.energy(best.u);
            best.residual = prob.residual(best.u);
            best.feasible = best.residual <= opts.residual_tol;
        }
        for (int start = 0; start < opts.starts; ++start)
        {
            Eigen::MatrixXd v;
            if (start == 0 && level > 0)
                v = refine_controls(previous.u).rowwise() - prob.Z;
            else if (start == 0)
                v = Eigen::MatrixXd::Zero(steps, cfg.dim());
            else
            {
                std::mt19937_64 rng(mix_seed({opts.seed, opts.sample_index, static_cast<std::uint64_t>(level),
                                              static_cast<std::uint64_t>(start)}));
                std::normal_distribution<double> normal(0.0, 1.0);
                v.resize(steps, cfg.dim());
                for (Eigen::Index i = 0; i < v.size(); ++i)
                    v.data()[i] = normal(rng);
            }
            SolverTraceEntry trace;
            trace.steps = steps;
            trace.start = start;
            LevelCandidate cand = solve_from(prob, std::move(v), opts, trace);
            result.solver_trace.push_back(trace);
            const bool better = cand.feasible && (!best.feasible || cand.energy < best.energy);
            if (better || (!best.feasible && cand.residual < best.residual))
                best = std::move(cand);
        }
        if (!best.feasible)
        {
            finish(best.u.size() > 0 ? best : previous);
            throw CCNonConvergence("cc_distance: no start satisfied the endpoint constraint at m = " +
                                       std::to_string(steps),
                                   result);
        }
        const double value = std::sqrt(best.energy);
        if (level > 0 && std::abs(previous_value - value) < opts.rel_tol * value)
        {
            finish(best);
            return result;
        }
        previous = std::move(best);
        previous_value = value;
    }
    finish(previous);
    throw CCNonConvergence("cc_distance: mesh refinement did not settle within rel_tol", result);
}

nlohmann::json to_json(const CCDistanceResult& r, const HeisPoint& x, const HeisPoint& y,
                       std::uint64_t seed)
{
    return {{"x", to_json(x)},
            {"y", to_json(y)},
            {"value", r.value},
            {"energy", r.energy},
            {"residual", r.constraint_residual},
            {"m", r.path.steps()},
            {"seed", seed}};
}

GaugeScanReport gauge_comparison_scan(const HeisConfig& cfg, int n_samples, double radius,
                                      const CCSolverOptions& opts)
{
    if (n_samples < 1)
        throw InputError("gauge_comparison_scan: n_samples must be >= 1");
    if (!(radius > 0.0))
        throw InputError("gauge_comparison_scan: radius must be positive");

    GaugeScanReport report;
    report.min_ratio = std::numeric_limits<double>::infinity();
    report.max_ratio = 0.0;
    std::mt19937_64 rng(mix_seed({opts.seed, std::uint64_t{0x5ca7}}));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int d = cfg.dim();

    for (int i = 0; i < n_samples; ++i)
    {
        HeisPoint y = HeisPoint::identity(d);
        double gauge = 0.0;
        do
        {
            y.t = radius * radius * unit(rng);
            for (int j = 0; j < d; ++j)
                y.z(j) = radius * unit(rng);
            gauge = koranyi_gauge(y);
        } while (gauge > radius || gauge < 1e-3 * radius);

        CCSolverOptions o = opts;
        o.sample_index = static_cast<std::uint64_t>(i);
        ++report.samples;
        try
        {
            const auto r = cc_distance(HeisPoint::identity(d), y, cfg, o);
            const double ratio = r.value / gauge;
            if (!std::isfinite(ratio) || ratio <= 0.0)
                throw NumericError("gauge_comparison_scan: non-positive ratio");
            report.rows.push_back({y, r.value, gauge, ratio});
            report.min_ratio = std::min(report.min_ratio, ratio);
            report.max_ratio = std::max(report.max_ratio, ratio);
        }
        catch (const CCNonConvergence&)
        {
            ++report.failures;
        }
    }
    return report;
}

} // namespace heislab
