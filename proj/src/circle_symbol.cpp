#include "heislab/circle_symbol.hpp"
#include "heislab/hashing.hpp"

#include "heislab/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <set>

namespace heislab
{

CircleSymbol::CircleSymbol(int cutoff, nlohmann::json meta)
    : cutoff_(cutoff), coeffs_(2 * static_cast<std::size_t>(cutoff) + 1), meta_(std::move(meta))
{
    if (cutoff < 0)
        throw InputError("CircleSymbol: cutoff must be >= 0");
}

CircleSymbol::CircleSymbol(std::vector<cplx> centered_coeffs, nlohmann::json meta)
    : coeffs_(std::move(centered_coeffs)), meta_(std::move(meta))
{
    if (coeffs_.size() % 2 == 0)
        throw InputError("CircleSymbol: coefficient vector must have odd length 2N+1");
    cutoff_ = static_cast<int>(coeffs_.size() / 2);
}

cplx CircleSymbol::coeff(std::int64_t k) const noexcept
{
    if (k < -cutoff_ || k > cutoff_)
        return {};
    return coeffs_[static_cast<std::size_t>(k + cutoff_)];
}

void CircleSymbol::set_coeff(int k, cplx c)
{
    if (k < -cutoff_ || k > cutoff_)
        throw InputError("CircleSymbol::set_coeff: frequency outside window");
    coeffs_[static_cast<std::size_t>(k + cutoff_)] = c;
}

int CircleSymbol::top_frequency() const noexcept
{
    for (int k = cutoff_; k > 0; --k)
        if (coeffs_[cutoff_ + k] != cplx{} || coeffs_[cutoff_ - k] != cplx{})
            return k;
    return 0;
}

std::vector<int> CircleSymbol::support() const
{
    std::vector<int> out;
    for (int k = -cutoff_; k <= cutoff_; ++k)
        if (coeffs_[k + cutoff_] != cplx{})
            out.push_back(k);
    return out;
}

std::size_t CircleSymbol::nonzeros() const
{
    return static_cast<std::size_t>(
        std::count_if(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c != cplx{}; }));
}

bool CircleSymbol::is_real_valued(double tol) const
{
    for (int k = 0; k <= cutoff_; ++k)
        if (std::abs(coeff(k) - std::conj(coeff(-k))) > tol)
            return false;
    return true;
}

bool CircleSymbol::is_zero() const noexcept
{
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c == cplx{}; });
}

cplx CircleSymbol::evaluate(double theta) const
{
    cplx s{};
    for (int k = -cutoff_; k <= cutoff_; ++k)
    {
        const cplx c = coeffs_[k + cutoff_];
        if (c != cplx{})
            s += c * std::polar(1.0, k * theta);
    }
    return s;
}

std::uint64_t CircleSymbol::content_hash() const
{
    // FNV-1a over the raw coefficient bits and the canonical metadata dump
    std::uint64_t h = fnv1a(&cutoff_, sizeof(cutoff_));
    h = fnv1a(coeffs_.data(), coeffs_.size() * sizeof(cplx), h);
    return fnv1a(meta_.dump(), h);
}

CircleSymbol CircleSymbol::with_cutoff(int cutoff) const
{
    if (cutoff < top_frequency())
        throw InputError("CircleSymbol::with_cutoff: would drop nonzero coefficients");
    CircleSymbol out(cutoff, meta_);
    const int n = std::min(cutoff, cutoff_);
    for (int k = -n; k <= n; ++k)
        out.coeffs_[k + cutoff] = coeff(k);
    return out;
}

CircleSymbol CircleSymbol::conjugate() const
{
    CircleSymbol out(cutoff_, {{"kind", "conjugate"}, {"of", meta_}});
    for (int k = -cutoff_; k <= cutoff_; ++k)
        out.coeffs_[k + cutoff_] = std::conj(coeff(-k));
    return out;
}

CircleSymbol CircleSymbol::operator+(const CircleSymbol& other) const
{
    const int n = std::max(cutoff_, other.cutoff_);
    CircleSymbol out(n, {{"kind", "sum"}, {"terms", {meta_, other.meta_}}});
    for (int k = -n; k <= n; ++k)
        out.coeffs_[k + n] = coeff(k) + other.coeff(k);
    return out;
}

CircleSymbol CircleSymbol::operator*(cplx scale) const
{
    CircleSymbol out = *this;
    for (auto& c : out.coeffs_)
        c *= scale;
    out.meta_ = {{"kind", "scaled"}, {"scale", {scale.real(), scale.imag()}}, {"of", meta_}};
    return out;
}

CircleSymbol CircleSymbol::plus_constant(cplx c) const
{
    CircleSymbol out = *this;
    out.coeffs_[cutoff_] += c;
    out.meta_ = {{"kind", "shifted"}, {"constant", {c.real(), c.imag()}}, {"of", meta_}};
    return out;
}

CircleSymbol monomial(int m)
{
    CircleSymbol out(std::abs(m), {{"kind", "monomial"}, {"k", m}});
    out.set_coeff(m, 1.0);
    return out;
}

CircleSymbol constant_symbol(cplx c)
{
    CircleSymbol out(0, {{"kind", "constant"}, {"value", {c.real(), c.imag()}}});
    out.set_coeff(0, c);
    return out;
}

CircleSymbol make_lacunary(double beta, int n_max)
{
    if (!(beta > 0.0 && beta <= 1.0))
        throw InputError("make_lacunary: beta must lie in (0, 1]");
    if (n_max < 0 || n_max > 24)
        throw InputError("make_lacunary: n_max must lie in [0, 24]");
    const int N = 1 << n_max;
    CircleSymbol out(N, {{"kind", "lacunary"}, {"beta", beta}, {"n_max", n_max}});
    for (int n = 0; n <= n_max; ++n)
    {
        const double w = std::exp2(-n * beta);
        out.set_coeff(1 << n, w);
        out.set_coeff(-(1 << n), w);
    }
    return out;
}

CircleSymbol make_triangle_wave(int N)
{
    if (N < 1)
        throw InputError("make_triangle_wave: N must be >= 1");
    // |theta| = pi/2 - (4/pi) sum_{k odd} cos(k theta)/k^2
    CircleSymbol out(N, {{"kind", "triangle"}, {"N", N}});
    out.set_coeff(0, std::numbers::pi / 2);
    for (int k = 1; k <= N; k += 2)
    {
        const double c = -2.0 / (std::numbers::pi * k * k);
        out.set_coeff(k, c);
        out.set_coeff(-k, c);
    }
    return out;
}

CircleSymbol make_random_symbol(double beta, int N, std::uint64_t seed)
{
    if (N < 1)
        throw InputError("make_random_symbol: N must be >= 1");
    if (!std::isfinite(beta))
        throw InputError("make_random_symbol: beta must be finite");
    CircleSymbol out(N, {{"kind", "random"}, {"beta", beta}, {"seed", seed}, {"N", N}});
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 1; k <= N; ++k)
    {
        const double g1 = normal(rng);
        const double g2 = normal(rng);
        const cplx c = cplx(g1, g2) * (std::pow(static_cast<double>(k), -beta - 0.5) / std::sqrt(2.0));
        out.set_coeff(k, c);
        out.set_coeff(-k, std::conj(c));
    }
    return out;
}

namespace
{

void require_keys(const nlohmann::json& spec, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional = {})
{
    std::set<std::string> allowed{"kind"};
    for (const char* k : required)
    {
        if (!spec.contains(k))
            throw InputError(std::string("symbol spec: missing key \"") + k + "\"");
        allowed.insert(k);
    }
    for (const char* k : optional)
        allowed.insert(k);
    for (const auto& item : spec.items())
        if (!allowed.count(item.key()))
            throw InputError("symbol spec: unknown key \"" + item.key() + "\"");
}

cplx parse_complex(const nlohmann::json& v)
{
    if (v.is_number())
        return v.get<double>();
    if (v.is_array() && v.size() == 2)
        return {v[0].get<double>(), v[1].get<double>()};
    throw InputError("symbol spec: coefficient must be a number or [re, im]");
}

CircleSymbol from_shorthand(const std::string& s)
{
    if (s == "cos" || s == "sin")
    {
        CircleSymbol out(1, {{"kind", s}});
        if (s == "cos")
        {
            out.set_coeff(1, 0.5);
            out.set_coeff(-1, 0.5);
        }
        else
        {
            out.set_coeff(1, cplx(0.0, -0.5));
            out.set_coeff(-1, cplx(0.0, 0.5));
        }
        return out;
    }
    if (s == "triangle")
        return make_triangle_wave(4096);
    if (s == "W")
        return make_lacunary(0.25, 12);
    if (s.size() >= 2 && s[0] == 'e')
    {
        try
        {
            std::size_t pos = 0;
            const int m = std::stoi(s.substr(1), &pos);
            if (pos == s.size() - 1)
                return monomial(m);
        }
        catch (const std::exception&)
        {
        }
    }
    throw InputError("symbol spec: unknown shorthand \"" + s + "\"");
}

} // namespace

CircleSymbol make_symbol(const nlohmann::json& spec)
{
    if (spec.is_string())
        return from_shorthand(spec.get<std::string>());
    if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string())
        throw InputError("symbol spec must be a string or an object with a \"kind\"");
    const std::string kind = spec.at("kind").get<std::string>();
    try
    {
        if (kind == "lacunary")
        {
            require_keys(spec, {"beta", "n_max"});
            return make_lacunary(spec.at("beta").get<double>(), spec.at("n_max").get<int>());
        }
        if (kind == "random")
        {
            require_keys(spec, {"beta", "seed"}, {"N"});
            return make_random_symbol(spec.at("beta").get<double>(), spec.value("N", 256),
                                      spec.at("seed").get<std::uint64_t>());
        }
        if (kind == "trig")
        {
            require_keys(spec, {"coeffs"});
            const auto& c = spec.at("coeffs");
            if (!c.is_object())
                throw InputError("symbol spec: trig coeffs must be an object {\"k\": value}");
            int N = 0;
            std::vector<std::pair<int, cplx>> entries;
            for (const auto& item : c.items())
            {
                std::size_t pos = 0;
                const int k = std::stoi(item.key(), &pos);
                if (pos != item.key().size())
                    throw InputError("symbol spec: bad frequency \"" + item.key() + "\"");
                entries.emplace_back(k, parse_complex(item.value()));
                N = std::max(N, std::abs(k));
            }
            CircleSymbol out(N, spec);
            for (const auto& [k, v] : entries)
                out.set_coeff(k, v);
            return out;
        }
        if (kind == "monomial")
        {
            require_keys(spec, {"k"});
            return monomial(spec.at("k").get<int>());
        }
        if (kind == "constant")
        {
            require_keys(spec, {"value"});
            return constant_symbol(parse_complex(spec.at("value")));
        }
        if (kind == "triangle")
        {
            require_keys(spec, {}, {"N"});
            return make_triangle_wave(spec.value("N", 4096));
        }
        if (kind == "cos" || kind == "sin")
        {
            require_keys(spec, {});
            return from_shorthand(kind);
        }
    }
    catch (const nlohmann::json::exception& e)
    {
        throw InputError(std::string("symbol spec: ") + e.what());
    }
    catch (const std::invalid_argument& e)
    {
        if (dynamic_cast<const InputError*>(&e))
            throw;
        throw InputError(std::string("symbol spec: ") + e.what());
    }
    throw InputError("symbol spec: unknown kind \"" + kind + "\"");
}

} // namespace heislab
