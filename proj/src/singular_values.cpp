#include "heislab/singular_values.hpp"

#include <Eigen/SVD>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace heislab
{

namespace
{

std::vector<int> mask_indices(const std::vector<char>& mask)
{
    std::vector<int> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i])
            out.push_back(static_cast<int>(i));
    return out;
}

SingularSpectrum dense_path(const TruncatedOperator& op, int k)
{
    const auto rows = mask_indices(op.range_mask());
    const auto cols = mask_indices(op.domain_mask());
    const MatrixXc full = op.dense();
    MatrixXc block(rows.size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < rows.size(); ++i)
            block(i, j) = full(rows[i], cols[j]);

    SingularSpectrum s;
    s.method = "dense";
    s.N = op.cutoff();
    auto all = block.size() == 0 ? std::vector<double>{} : dense_singular_values(block);
    all.resize(std::max<std::size_t>(all.size(), k), 0.0);
    s.values.assign(all.begin(), all.begin() + k);
    return s;
}

class LanczosBasis
{
public:
    LanczosBasis(int n, int cap) : M(n, cap) {}

    int size() const noexcept { return used; }

    /// Classical Gram-Schmidt against the stored columns, repeated once when the
    /// first pass cancels most of the vector.
    void orthogonalize(VectorXc& w) const
    {
        if (used == 0)
            return;
        for (int pass = 0; pass < 2; ++pass)
        {
            const double before = w.norm();
            w.noalias() -= M.leftCols(used) * (M.leftCols(used).adjoint() * w);
            if (w.norm() > 0.7 * before)
                break;
        }
    }

    void push(const VectorXc& w)
    {
        if (used == M.cols())
            M.conservativeResize(Eigen::NoChange, std::max<Eigen::Index>(16, 2 * M.cols()));
        M.col(used++) = w;
    }

    const VectorXc col(int i) const { return M.col(i); }

private:
    MatrixXc M;
    int used = 0;
};

struct FreshVectorSource
{
    std::mt19937_64 rng;
    std::normal_distribution<double> g;
    int max_restarts;

    /// Random unit vector on the mask, orthogonal to the basis.
    VectorXc draw(const std::vector<char>& mask, const LanczosBasis& basis)
    {
        const int n = static_cast<int>(mask.size());
        for (int attempt = 0; attempt < max_restarts; ++attempt)
        {
            VectorXc w = VectorXc::Zero(n);
            for (int i = 0; i < n; ++i)
            {
                const double re = g(rng), im = g(rng);
                if (mask[i])
                    w(i) = cplx(re, im);
            }
            const double before = w.norm();
            basis.orthogonalize(w);
            const double after = w.norm();
            if (before > 0.0 && after > 1e-8 * before)
                return w / after;
        }
        throw NumericError("lanczos: no fresh start vector after " + std::to_string(max_restarts) + " restarts");
    }
};

SingularSpectrum lanczos_path(const TruncatedOperator& op, int k, const SvdOptions& opts)
{
    const int n = op.size();
    const int max_steps = static_cast<int>(
        std::min(std::count(op.domain_mask().begin(), op.domain_mask().end(), 1),
                 std::count(op.range_mask().begin(), op.range_mask().end(), 1)));
    SingularSpectrum s;
    s.method = "lanczos";
    s.N = op.cutoff();
    if (max_steps == 0)
    {
        s.values.assign(k, 0.0);
        return s;
    }

    FreshVectorSource fresh{std::mt19937_64(opts.seed), {}, std::max(1, opts.max_restarts)};
    int target = std::min(max_steps, 2 * k + 64);
    LanczosBasis U(n, target), V(n, target);
    std::vector<double> alpha, beta;
    double scale = 0.0;

    VectorXc v = fresh.draw(op.domain_mask(), V);
    VectorXc u_prev;
    for (;;)
    {
        while (static_cast<int>(alpha.size()) < target)
        {
            V.push(v);
            VectorXc w = op.apply(v);
            if (!alpha.empty())
                w -= beta.back() * u_prev;
            U.orthogonalize(w);
            double a = w.norm();
            VectorXc u;
            if (a <= 1e-13 * scale)
            {
                a = 0.0;
                u = fresh.draw(op.range_mask(), U);
            }
            else
                u = w / a;
            U.push(u);
            alpha.push_back(a);
            scale = std::max(scale, a);

            VectorXc z = op.apply_adjoint(u) - a * v;
            V.orthogonalize(z);
            double b = z.norm();
            if (V.size() == max_steps)
            {
                beta.push_back(0.0);
                break;
            }
            if (b <= 1e-13 * scale)
            {
                b = 0.0;
                v = fresh.draw(op.domain_mask(), V);
            }
            else
                v = z / b;
            beta.push_back(b);
            scale = std::max(scale, b);
            u_prev = u;
        }

        const int L = static_cast<int>(alpha.size());
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(L, L);
        for (int i = 0; i < L; ++i)
        {
            B(i, i) = alpha[i];
            if (i + 1 < L)
                B(i, i + 1) = beta[i];
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU);
        const auto& sig = svd.singularValues();
        const double coupling = beta[L - 1];
        const int kk = std::min(k, L);
        double worst = 0.0;
        for (int i = 0; i < kk; ++i)
            worst = std::max(worst, coupling * std::abs(svd.matrixU()(L - 1, i)));
        const bool converged = worst <= opts.tol * std::max(sig(0), 1e-300) || L >= max_steps;
        if (converged && (L >= k || L >= max_steps))
        {
            s.lanczos_steps = L;
            s.max_residual = worst;
            s.values.assign(k, 0.0);
            for (int i = 0; i < kk; ++i)
                s.values[i] = sig(i);
            return s;
        }
        target = std::min(max_steps, L + std::max(32, L / 2));
    }
}

} // namespace

std::vector<double> dense_singular_values(const MatrixXc& a)
{
    const lapack_int m = static_cast<lapack_int>(a.rows()), n = static_cast<lapack_int>(a.cols());
    const lapack_int mn = std::min(m, n);
    std::vector<double> s(mn);
    if (mn == 0)
        return s;
    lapack_int info = 0;
    if (a.imag().cwiseAbs().maxCoeff() == 0.0)
    {
        Eigen::MatrixXd re = a.real();
        info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, re.data(), m, s.data(), nullptr, 1, nullptr, 1);
    }
    else
    {
        MatrixXc c = a;
        info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, reinterpret_cast<lapack_complex_double*>(c.data()), m,
                              s.data(), nullptr, 1, nullptr, 1);
    }
    if (info != 0)
        throw NumericError("gesdd failed with info = " + std::to_string(info));
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

SingularSpectrum singular_values(const TruncatedOperator& op, int k, const SvdOptions& opts)
{
    if (k < 1 || k > op.size())
        throw InputError("singular_values: k must lie in [1, 2N+1]");
    const bool dense = opts.method == SvdMethod::dense ||
                       (opts.method == SvdMethod::automatic && op.size() <= opts.dense_limit);
    return dense ? dense_path(op, k) : lanczos_path(op, k, opts);
}

nlohmann::json to_json(const SingularSpectrum& s)
{
    return {{"method", s.method},
            {"N", s.N},
            {"count", s.count()},
            {"lanczos_steps", s.lanczos_steps},
            {"max_residual", s.max_residual},
            {"values", s.values}};
}

double weak_schatten_quasinorm(const SingularSpectrum& s, double p)
{
    if (!(p > 0.0))
        throw InputError("weak_schatten_quasinorm: p must be positive");
    double q = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k)
        q = std::max(q, std::pow(static_cast<double>(k + 1), 1.0 / p) * s.values[k]);
    return q;
}

nlohmann::json to_json(const SchattenFit& f)
{
    return {{"k_min", f.k_min},     {"k_max", f.k_max},         {"points", f.points},
            {"slope", f.slope},     {"exponent", f.exponent},   {"p_hat", f.p_hat},
            {"intercept", f.intercept}, {"residual", f.residual}};
}

SchattenFit decay_fit(const SingularSpectrum& s, int k_min, int k_max)
{
    if (k_min < 1 || k_max < k_min)
        throw InputError("decay_fit: window must satisfy 1 <= k_min <= k_max");
    if (static_cast<std::size_t>(k_max) >= s.values.size())
        throw InputError("decay_fit: window exceeds the computed spectrum");
    const double floor = 1e-13 * (s.values.empty() ? 0.0 : s.values[0]);
    std::vector<double> xs, ys;
    for (int k = k_min; k <= k_max; ++k)
        if (s.values[k] > floor && s.values[k] > 0.0)
        {
            xs.push_back(std::log(static_cast<double>(k)));
            ys.push_back(std::log(s.values[k]));
        }
    if (xs.size() < 8)
        throw InputError("decay_fit: fewer than 8 usable points in the window");

    const double m = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    SchattenFit f;
    f.k_min = k_min;
    f.k_max = k_max;
    f.points = static_cast<int>(xs.size());
    f.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / m;
    f.exponent = -f.slope;
    f.p_hat = f.slope != 0.0 ? -1.0 / f.slope : std::numeric_limits<double>::infinity();
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        rss += std::pow(ys[i] - (f.intercept + f.slope * xs[i]), 2);
    f.residual = std::sqrt(rss / m);
    return f;
}

void write_spectrum_csv(std::ostream& os, const SingularSpectrum& s)
{
    os << "k,mu\n";
    os.precision(17);
    for (std::size_t k = 0; k < s.values.size(); ++k)
        os << k << ',' << s.values[k] << '\n';
}

} // namespace heislab
