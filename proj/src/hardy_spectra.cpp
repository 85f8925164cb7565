#include "heislab/hardy_spectra.hpp"
#include "heislab/hashing.hpp"

#include "heislab/fourier.hpp"
#include "heislab/parallel.hpp"
#include "heislab/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace heislab
{

namespace
{

constexpr std::size_t sparse_limit = 64;

int half_width(const VectorXc& v)
{
    if (v.size() % 2 == 0)
        throw InputError("coefficient vector must have odd length 2N+1");
    return static_cast<int>(v.size() / 2);
}

/// Whether some product term of a * v lands outside the window of v.
bool product_leaves_window(const CircleSymbol& a, const VectorXc& v)
{
    const int N = half_width(v);
    int vlo = 0, vhi = -1;
    for (int i = 0; i < v.size(); ++i)
        if (v(i) != cplx{})
        {
            if (vhi < 0)
                vlo = i;
            vhi = i;
        }
    if (vhi < 0 || a.is_zero())
        return false;
    const auto supp = a.support();
    return (vlo - N) + supp.front() < -N || (vhi - N) + supp.back() > N;
}

///
/// Multiplication by a fixed symbol on a fixed window, with the symbol transform
/// cached for the FFT path.
///
class Convolver
{
public:
    Convolver(const CircleSymbol& a, int N) : N_(N)
    {
        for (int k : a.support())
            if (std::abs(k) <= 2 * N)
                terms_.emplace_back(k, a.coeff(k));
        sparse_ = terms_.size() <= sparse_limit;
        if (!sparse_)
        {
            Na_ = 0;
            for (const auto& t : terms_)
                Na_ = std::max(Na_, std::abs(t.first));
            const int n = 2 * N + 1;
            L_ = static_cast<int>(next_pow2(static_cast<std::size_t>(n + 2 * Na_)));
            std::vector<cplx> buf(L_, cplx{});
            for (const auto& [k, c] : terms_)
                buf[k + Na_] = c;
            hat_ = dft(buf, -1);
        }
    }

    VectorXc operator()(const VectorXc& v) const
    {
        const int n = 2 * N_ + 1;
        VectorXc out = VectorXc::Zero(n);
        if (sparse_)
        {
            for (const auto& [k, c] : terms_)
            {
                const int lo = std::max(0, -k), hi = std::min(n, n - k);
                for (int i = lo; i < hi; ++i)
                    out(i + k) += c * v(i);
            }
            return out;
        }
        std::vector<cplx> buf(L_, cplx{});
        for (int i = 0; i < n; ++i)
            buf[i] = v(i);
        auto vh = dft(buf, -1);
        for (int i = 0; i < L_; ++i)
            vh[i] *= hat_[i];
        const auto full = dft(vh, +1);
        const double scale = 1.0 / L_;
        for (int j = 0; j < n; ++j)
            out(j) = full[j + Na_] * scale;
        return out;
    }

private:
    int N_;
    int Na_ = 0;
    int L_ = 0;
    bool sparse_ = true;
    std::vector<std::pair<int, cplx>> terms_;
    std::vector<cplx> hat_;
};

nlohmann::json make_descriptor(const char* op, const CircleSymbol& a, int N)
{
    return {{"op", op},
            {"N", N},
            {"symbol", a.meta()},
            {"symbol_hash", hex64(a.content_hash())},
            {"window_covers_symbol", a.top_frequency() <= N}};
}

std::vector<char> mask_where(int N, bool nonnegative)
{
    std::vector<char> m(2 * N + 1);
    for (int k = -N; k <= N; ++k)
        m[k + N] = (k >= 0) == nonnegative;
    return m;
}

void random_unit(int n, const std::vector<char>& mask, std::uint64_t seed, VectorXc& v)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    v = VectorXc::Zero(n);
    for (int i = 0; i < n; ++i)
    {
        const double re = g(rng), im = g(rng);
        if (mask[i])
            v(i) = cplx(re, im);
    }
    const double nv = v.norm();
    if (nv > 0.0)
        v /= nv;
}

NormEstimate power_iterate(const TruncatedOperator::Apply& first, const TruncatedOperator::Apply& second,
                           const std::vector<char>& start_mask, int n, const PowerIterationOptions& opts)
{
    VectorXc v;
    random_unit(n, start_mask, opts.seed, v);
    NormEstimate est;
    if (v.norm() == 0.0)
        return est;
    double lambda = -1.0;
    for (int it = 1; it <= opts.max_iterations; ++it)
    {
        const VectorXc w = second(first(v));
        const double next = v.dot(w).real();
        const double nw = w.norm();
        est.iterations = it;
        if (nw == 0.0)
        {
            est.value = 0.0;
            return est;
        }
        v = w / nw;
        if (lambda >= 0.0 && std::abs(next - lambda) <= opts.tol * std::abs(next))
        {
            est.value = std::sqrt(std::max(next, 0.0));
            return est;
        }
        lambda = next;
    }
    throw PowerIterationStagnation("power iteration did not settle within " +
                                       std::to_string(opts.max_iterations) + " iterations",
                                   std::sqrt(std::max(lambda, 0.0)), v);
}

} // namespace

VectorXc szego_project(const VectorXc& v)
{
    const int N = half_width(v);
    VectorXc out = v;
    out.head(N).setZero();
    return out;
}

MultiplyResult multiply_sparse(const CircleSymbol& a, const VectorXc& v)
{
    const int N = half_width(v);
    const int n = 2 * N + 1;
    MultiplyResult r;
    r.coeffs = VectorXc::Zero(n);
    for (int k : a.support())
    {
        const cplx c = a.coeff(k);
        const int lo = std::max(0, -k), hi = std::min(n, n - k);
        for (int i = lo; i < hi; ++i)
            r.coeffs(i + k) += c * v(i);
    }
    r.truncated = product_leaves_window(a, v);
    return r;
}

MultiplyResult multiply_fft(const CircleSymbol& a, const VectorXc& v)
{
    const int N = half_width(v);
    MultiplyResult r;
    const int Na = a.top_frequency();
    const int n = 2 * N + 1;
    const int L = static_cast<int>(next_pow2(static_cast<std::size_t>(n + 2 * Na)));
    std::vector<cplx> ab(L, cplx{}), vb(L, cplx{});
    for (int k = -Na; k <= Na; ++k)
        ab[k + Na] = a.coeff(k);
    for (int i = 0; i < n; ++i)
        vb[i] = v(i);
    auto ah = dft(ab, -1);
    const auto vh = dft(vb, -1);
    for (int i = 0; i < L; ++i)
        ah[i] *= vh[i];
    const auto full = dft(ah, +1);
    r.coeffs.resize(n);
    for (int j = 0; j < n; ++j)
        r.coeffs(j) = full[j + Na] / static_cast<double>(L);
    r.truncated = product_leaves_window(a, v);
    return r;
}

MultiplyResult multiply(const CircleSymbol& a, const VectorXc& v)
{
    return a.nonzeros() <= sparse_limit ? multiply_sparse(a, v) : multiply_fft(a, v);
}

TruncatedOperator::TruncatedOperator(int N, Apply apply, Apply adjoint, std::vector<char> domain_mask,
                                     std::vector<char> range_mask, nlohmann::json descriptor)
    : N_(N), apply_(std::move(apply)), adjoint_(std::move(adjoint)), domain_(std::move(domain_mask)),
      range_(std::move(range_mask)), descriptor_(std::move(descriptor))
{
    if (N < 0)
        throw InputError("TruncatedOperator: N must be >= 0");
    if (domain_.size() != static_cast<std::size_t>(size()) || range_.size() != static_cast<std::size_t>(size()))
        throw InputError("TruncatedOperator: mask size mismatch");
}

VectorXc TruncatedOperator::apply(const VectorXc& v) const
{
    if (v.size() != size())
        throw InputError("TruncatedOperator::apply: vector size mismatch");
    return apply_(v);
}

VectorXc TruncatedOperator::apply_adjoint(const VectorXc& v) const
{
    if (v.size() != size())
        throw InputError("TruncatedOperator::apply_adjoint: vector size mismatch");
    return adjoint_(v);
}

MatrixXc TruncatedOperator::dense() const
{
    const int n = size();
    MatrixXc m = MatrixXc::Zero(n, n);
    VectorXc e = VectorXc::Zero(n);
    for (int k = 0; k < n; ++k)
    {
        if (!domain_[k])
            continue;
        e(k) = 1.0;
        m.col(k) = apply_(e);
        e(k) = 0.0;
    }
    return m;
}

TruncatedOperator multiplication_op(const CircleSymbol& a, int N)
{
    auto conv = std::make_shared<Convolver>(a, N);
    auto conv_bar = std::make_shared<Convolver>(a.conjugate(), N);
    std::vector<char> all(2 * N + 1, 1);
    return TruncatedOperator(
        N, [conv](const VectorXc& v) { return (*conv)(v); },
        [conv_bar](const VectorXc& v) { return (*conv_bar)(v); }, all, all,
        make_descriptor("multiplication", a, N));
}

TruncatedOperator hankel_op(const CircleSymbol& a, int N)
{
    auto conv = std::make_shared<Convolver>(a, N);
    auto conv_bar = std::make_shared<Convolver>(a.conjugate(), N);
    auto apply = [conv, N](const VectorXc& v) {
        VectorXc w = v;
        w.head(N).setZero();
        VectorXc out = (*conv)(w);
        out.tail(N + 1).setZero();
        return out;
    };
    // H_a^* = P conj(a) (1 - P)
    auto adjoint = [conv_bar, N](const VectorXc& v) {
        VectorXc w = v;
        w.tail(N + 1).setZero();
        VectorXc out = (*conv_bar)(w);
        out.head(N).setZero();
        return out;
    };
    return TruncatedOperator(N, apply, adjoint, mask_where(N, true), mask_where(N, false),
                             make_descriptor("hankel", a, N));
}

TruncatedOperator commutator_P(const CircleSymbol& a, int N)
{
    // constants commute with P, so the mean is dropped and [P, a + c] = [P, a] bit for bit
    CircleSymbol a0 = a;
    a0.set_coeff(0, 0.0);
    auto conv = std::make_shared<Convolver>(a0, N);
    auto conv_bar = std::make_shared<Convolver>(a0.conjugate(), N);
    auto commute = [N](const Convolver& c, const VectorXc& v) {
        VectorXc pv = v;
        pv.head(N).setZero();
        VectorXc av = c(v);
        av.head(N).setZero();
        return VectorXc(av - c(pv));
    };
    std::vector<char> all(2 * N + 1, 1);
    // [P, a]^* = -[P, conj(a)]
    return TruncatedOperator(
        N, [conv, commute](const VectorXc& v) { return commute(*conv, v); },
        [conv_bar, commute](const VectorXc& v) { return VectorXc(-commute(*conv_bar, v)); }, all, all,
        make_descriptor("commutator_P", a, N));
}

TruncatedOperator calderon_commutator(const CircleSymbol& f, int N)
{
    // the j = k diagonal carries the factor |j| - |k| = 0
    CircleSymbol f0 = f;
    f0.set_coeff(0, 0.0);
    auto conv = std::make_shared<Convolver>(f0, N);
    auto conv_tilde = std::make_shared<Convolver>(f0.conjugate(), N);
    auto dvec = std::make_shared<Eigen::VectorXd>(2 * N + 1);
    for (int k = -N; k <= N; ++k)
        (*dvec)(k + N) = std::abs(k);
    auto commute = [dvec](const Convolver& c, const VectorXc& v) {
        VectorXc dv = v.cwiseProduct(dvec->cast<cplx>());
        return VectorXc(c(v).cwiseProduct(dvec->cast<cplx>()) - c(dv));
    };
    std::vector<char> all(2 * N + 1, 1);
    // entries (|j| - |k|) f^(j - k); the adjoint has entries (|j| - |k|) (-conj f^(k - j))
    return TruncatedOperator(
        N, [conv, commute](const VectorXc& v) { return commute(*conv, v); },
        [conv_tilde, commute](const VectorXc& v) { return VectorXc(-commute(*conv_tilde, v)); }, all, all,
        make_descriptor("calderon", f, N));
}

std::uint64_t descriptor_hash(const nlohmann::json& descriptor)
{
    return fnv1a(descriptor.dump());
}

TruncatedOperator operator_from_descriptor(const nlohmann::json& d)
{
    if (!d.is_object() || !d.contains("op") || !d.contains("N") || !d.contains("symbol"))
        throw InputError("operator descriptor needs op, N and symbol");
    const auto a = make_symbol(d.at("symbol"));
    if (d.contains("symbol_hash") && d.at("symbol_hash").get<std::string>() != hex64(a.content_hash()))
        throw InputError("operator descriptor: symbol hash mismatch");
    const std::string op = d.at("op").get<std::string>();
    const int N = d.at("N").get<int>();
    if (op == "hankel")
        return hankel_op(a, N);
    if (op == "commutator_P")
        return commutator_P(a, N);
    if (op == "multiplication")
        return multiplication_op(a, N);
    if (op == "calderon")
        return calderon_commutator(a, N);
    throw InputError("operator descriptor: unknown op \"" + op + "\"");
}

NormEstimate operator_norm(const TruncatedOperator& op, const PowerIterationOptions& opts)
{
    return power_iterate([&op](const VectorXc& v) { return op.apply(v); },
                         [&op](const VectorXc& v) { return op.apply_adjoint(v); }, op.domain_mask(), op.size(),
                         opts);
}

NormEstimate operator_norm_adjoint(const TruncatedOperator& op, const PowerIterationOptions& opts)
{
    return power_iterate([&op](const VectorXc& v) { return op.apply_adjoint(v); },
                         [&op](const VectorXc& v) { return op.apply(v); }, op.range_mask(), op.size(), opts);
}

nlohmann::json to_json(const CalderonReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"N", row.N},
                        {"norm", row.norm},
                        {"norm_adjoint", row.norm_adjoint},
                        {"iterations", row.iterations}});
    return {{"rows", rows},
            {"growth_exponent", r.growth_exponent},
            {"top_variation", r.top_variation},
            {"seed", r.seed}};
}

CalderonReport calderon_norm_probe(const CircleSymbol& f, const std::vector<int>& N_list,
                                   const PowerIterationOptions& opts, int jobs)
{
    if (N_list.empty())
        throw InputError("calderon_norm_probe: N_list is empty");
    std::vector<int> Ns = N_list;
    std::sort(Ns.begin(), Ns.end());
    if (Ns.front() < 1)
        throw InputError("calderon_norm_probe: N must be >= 1");

    CalderonReport r;
    r.seed = opts.seed;
    r.rows.resize(Ns.size());
    parallel_for(Ns.size(), jobs, [&](std::size_t i) {
        PowerIterationOptions o = opts;
        o.seed = mix_seed({opts.seed, static_cast<std::uint64_t>(Ns[i])});
        const auto op = calderon_commutator(f, Ns[i]);
        const auto a = operator_norm(op, o);
        const auto b = operator_norm_adjoint(op, o);
        r.rows[i] = {Ns[i], a.value, b.value, a.iterations + b.iterations};
    });

    std::size_t positive = 0;
    for (const auto& row : r.rows)
        positive += row.norm > 0.0;
    if (positive >= 2)
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(positive);
        for (const auto& row : r.rows)
        {
            if (row.norm <= 0.0)
                continue;
            const double x = std::log(row.N), y = std::log(row.norm);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        r.growth_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    if (r.rows.size() >= 2 && r.rows.back().norm > 0.0)
    {
        const double last = r.rows.back().norm, prev = r.rows[r.rows.size() - 2].norm;
        r.top_variation = std::abs(last - prev) / last;
    }
    return r;
}

} // namespace heislab
