#include "heislab/experiment.hpp"
#include "heislab/cc_geodesic.hpp"
#include "heislab/circle_symbol.hpp"
#include "heislab/dixmier.hpp"
#include "heislab/hardy_spectra.hpp"
#include "heislab/hashing.hpp"
#include "heislab/heis_core.hpp"
#include "heislab/seeding.hpp"
#include "heislab/singular_values.hpp"
#include "heislab/svg_plot.hpp"
#include "heislab/symbol_lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace heislab
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

// ---------------------------------------------------------------------------
// schemas

enum class Kind
{
    integer,
    number,
    string,
    symbol,
    symbol_list,
    number_list,
    integer_list,
    point
};

const char* kind_name(Kind k)
{
    switch (k)
    {
    case Kind::integer: return "integer";
    case Kind::number: return "number";
    case Kind::string: return "string";
    case Kind::symbol: return "symbol";
    case Kind::symbol_list: return "symbol list";
    case Kind::number_list: return "number list";
    case Kind::integer_list: return "integer list";
    case Kind::point: return "point";
    }
    return "?";
}

struct Field
{
    std::string name;
    Kind kind;
    json def;
    double lo = -HUGE_VAL, hi = HUGE_VAL;  // numeric range, applied elementwise to lists
    std::vector<std::string> choices;

    Field(std::string n, Kind k, json d, double lo_ = -HUGE_VAL, double hi_ = HUGE_VAL,
          std::vector<std::string> c = {})
        : name(std::move(n)), kind(k), def(std::move(d)), lo(lo_), hi(hi_), choices(std::move(c))
    {
    }
};

json logspace(double a, double b, int n)
{
    json out = json::array();
    for (int i = 0; i < n; ++i)
        out.push_back(std::pow(10.0, a + (b - a) * i / (n - 1)));
    return out;
}

const std::map<std::string, std::vector<Field>>& schemas()
{
    static const std::map<std::string, std::vector<Field>> s = [] {
        std::map<std::string, std::vector<Field>> m;
        const json origin = {{"t", 0.0}, {"z", {0.0, 0.0}}};
        m["heis check"] = {{"n", Kind::integer, 1, 1, 16},
                           {"samples", Kind::integer, 200, 1, 1e6},
                           {"radius", Kind::number, 1.0, 1e-12, 1e6}};
        m["cc dist"] = {{"n", Kind::integer, 1, 1, 16},
                        {"from", Kind::point, origin},
                        {"to", Kind::point, {{"t", 0.0}, {"z", {1.0, 0.0}}}},
                        {"starts", Kind::integer, 8, 1, 1000},
                        {"rel_tol", Kind::number, 1e-3, 1e-12, 1.0}};
        m["cc scan"] = {{"n", Kind::integer, 1, 1, 16},
                        {"samples", Kind::integer, 20, 1, 1e6},
                        {"radius", Kind::number, 1.0, 1e-12, 1e6},
                        {"starts", Kind::integer, 4, 1, 1000},
                        {"rel_tol", Kind::number, 1e-3, 1e-12, 1.0}};
        m["symbols holder"] = {{"symbol", Kind::symbol, "W"},
                               {"alpha", Kind::number, 0.25, 1e-6, 1.0},
                               {"grid", Kind::integer, 0, 0, 1 << 24}};
        m["symbols besov"] = {{"corpus", Kind::symbol_list, {"W", "cos", "sin", "triangle"}},
                              {"s", Kind::number, 0.25, 1e-6, 1.0 - 1e-6},
                              {"grid", Kind::integer, 0, 0, 1 << 24}};
        m["symbols kfun"] = {{"symbol", Kind::symbol, "W"},
                             {"theta", Kind::number, 0.25, 1e-6, 1.0 - 1e-6},
                             {"t_grid", Kind::number_list, logspace(-4.0, 0.0, 13), 1e-300, HUGE_VAL}};
        const Field op{"operator", Kind::string, "hankel", 0, 0, {"hankel", "commutator"}};
        const Field method{"method", Kind::string, "auto", 0, 0, {"auto", "dense", "lanczos"}};
        m["hardy hankel"] = {{"symbol", Kind::symbol, "W"}, op, {"cutoff", Kind::integer, 1024, 1, 1 << 22},
                             {"k", Kind::integer, 256, 1, 1 << 22}, method};
        m["hardy fit"] = {{"symbol", Kind::symbol, "W"}, op, {"cutoff", Kind::integer, 4096, 1, 1 << 22},
                          {"k", Kind::integer, 600, 1, 1 << 22}, method,
                          {"k_min", Kind::integer, 16, 1, 1 << 22}, {"k_max", Kind::integer, 512, 1, 1 << 22}};
        m["hardy calderon"] = {{"symbol", Kind::symbol, "triangle"},
                               {"cutoffs", Kind::integer_list, {256, 512, 1024, 2048, 4096, 8192}, 1, 1 << 22},
                               {"tol", Kind::number, 1e-6, 1e-14, 1e-1}};
        m["dixmier xi"] = {{"path", Kind::string, "lattice", 0, 0, {"lattice", "direct"}},
                           {"beta", Kind::number, 0.25, 1e-3, 4.0},
                           {"lmax", Kind::integer, 4096, 0, 1e12},
                           {"nmax", Kind::integer, 64, 0, lattice_n_max_limit},
                           {"symbols", Kind::symbol_list, {"W", "W", "W", "W"}}};
        m["dixmier zeta"] = {{"symbols", Kind::symbol_list, {"e1", "e-1", "e1", "e-1"}},
                             {"lmax", Kind::integer, 1024, 0, 1e12}};
        m["dixmier bounds"] = {{"lmax", Kind::integer, 64, 1, 1e9},
                               {"nmax", Kind::integer, 96, 0, lattice_n_max_limit},
                               {"tail_tol", Kind::number, 1e-8, 1e-16, 1.0}};
        return m;
    }();
    return s;
}

const std::vector<Field>& schema(const std::string& command)
{
    const auto it = schemas().find(command);
    if (it == schemas().end())
        throw InputError("unknown command '" + command + "'");
    return it->second;
}

void check_range(const Field& f, double v)
{
    if (!(v >= f.lo && v <= f.hi))
    {
        std::ostringstream os;
        os << f.name << ": value " << v << " outside [" << f.lo << ", " << f.hi << "]";
        throw InputError(os.str());
    }
}

json point_value(const Field& f, const json& v)
{
    json p = v;
    if (v.is_array())
    {
        // [t, z_1, ..., z_d]
        if (v.size() < 3)
            throw InputError(f.name + ": point array needs t and at least two z components");
        std::vector<double> z;
        for (std::size_t i = 1; i < v.size(); ++i)
        {
            if (!v[i].is_number())
                throw InputError(f.name + ": point components must be numbers");
            z.push_back(v[i].get<double>());
        }
        if (!v[0].is_number())
            throw InputError(f.name + ": point components must be numbers");
        p = {{"t", v[0].get<double>()}, {"z", z}};
    }
    if (!p.is_object())
        throw InputError(f.name + ": expected a point {\"t\":..,\"z\":[..]} or [t, z...]");
    for (const auto& [k, _] : p.items())
        if (k != "t" && k != "z")
            throw InputError(f.name + ": unknown point key '" + k + "'");
    try
    {
        return to_json(point_from_json(p));
    }
    catch (const nlohmann::json::exception& e)
    {
        throw InputError(f.name + ": " + e.what());
    }
}

json field_value(const Field& f, const json& v)
{
    switch (f.kind)
    {
    case Kind::integer:
        if (!v.is_number_integer())
            throw InputError(f.name + ": expected an integer");
        check_range(f, v.get<double>());
        return v.get<std::int64_t>();
    case Kind::number:
        if (!v.is_number())
            throw InputError(f.name + ": expected a number");
        check_range(f, v.get<double>());
        return v.get<double>();
    case Kind::string:
        if (!v.is_string())
            throw InputError(f.name + ": expected a string");
        if (!f.choices.empty() && std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end())
            throw InputError(f.name + ": '" + v.get<std::string>() + "' is not one of the allowed values");
        return v;
    case Kind::symbol:
        make_symbol(v);  // validates
        return v;
    case Kind::symbol_list:
        if (!v.is_array() || v.empty())
            throw InputError(f.name + ": expected a nonempty list of symbols");
        for (const auto& s : v)
            make_symbol(s);
        return v;
    case Kind::number_list:
    case Kind::integer_list: {
        if (!v.is_array() || v.empty())
            throw InputError(f.name + ": expected a nonempty list");
        json out = json::array();
        for (const auto& x : v)
        {
            const bool ok = f.kind == Kind::integer_list ? x.is_number_integer() : x.is_number();
            if (!ok)
                throw InputError(f.name + ": expected a list of " +
                                 (f.kind == Kind::integer_list ? "integers" : "numbers"));
            check_range(f, x.get<double>());
            if (f.kind == Kind::integer_list)
                out.push_back(x.get<std::int64_t>());
            else
                out.push_back(x.get<double>());
        }
        return out;
    }
    case Kind::point:
        return point_value(f, v);
    }
    return v;
}

// ---------------------------------------------------------------------------
// run plumbing

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw InputError("cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& p, const std::string& content)
{
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw InputError("cannot write " + tmp.string());
        out << content;
        if (!out)
            throw InputError("write failed for " + tmp.string());
    }
    fs::rename(tmp, p);
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

struct Run
{
    const ExperimentConfig& cfg;
    const json& p;
    std::string slug, hash8;
    fs::path cache_dir;
    std::vector<std::pair<std::string, std::string>> pending;  // name, content
    std::vector<TaskStatus> tasks;

    void emit(const std::string& suffix, const std::string& ext, std::string content)
    {
        pending.emplace_back(slug + "-" + hash8 + (suffix.empty() ? "" : "-" + suffix) + "." + ext,
                             std::move(content));
    }

    void emit_plot(const std::string& suffix, const PlotSpec& spec)
    {
        try
        {
            emit(suffix, "svg", render_svg(spec));
        }
        catch (const InputError&)
        {
            // nothing plottable (e.g. an all-zero spectrum); the CSV still stands
        }
    }

    void task(const std::string& name, const std::function<void(TaskStatus&)>& fn)
    {
        TaskStatus ts{name, "ok", 0.0, "", ""};
        const auto t0 = std::chrono::steady_clock::now();
        try
        {
            fn(ts);
        }
        catch (const InputError&)
        {
            throw;
        }
        catch (const std::exception& e)
        {
            ts.status = "failed";
            ts.message = e.what();
        }
        ts.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        tasks.push_back(std::move(ts));
    }
};

std::string csv_of(const std::function<void(std::ostream&)>& fn)
{
    std::ostringstream os;
    os.precision(17);
    fn(os);
    return os.str();
}

std::vector<CircleSymbol> symbols_of(const json& list)
{
    std::vector<CircleSymbol> out;
    for (const auto& s : list)
        out.push_back(make_symbol(s));
    return out;
}

HeisPoint point_of(const json& j, int d, const char* what)
{
    HeisPoint x = point_from_json(j);
    if (x.dim() != d)
        throw InputError(std::string(what) + ": point has " + std::to_string(x.dim()) +
                         " horizontal components, the group has " + std::to_string(d));
    return x;
}

CCSolverOptions solver_options(const ExperimentConfig& cfg)
{
    CCSolverOptions o;
    o.starts = cfg.params.at("starts").get<int>();
    o.rel_tol = cfg.params.at("rel_tol").get<double>();
    o.seed = cfg.seed;
    return o;
}

// heis check ---------------------------------------------------------------

void run_heis_check(Run& r)
{
    r.task("invariants", [&](TaskStatus&) {
        const HeisConfig g = HeisConfig::standard(r.p.at("n").get<int>());
        const int d = g.dim();
        const int samples = r.p.at("samples").get<int>();
        const double radius = r.p.at("radius").get<double>();
        std::mt19937_64 rng(mix_seed({r.cfg.seed, std::uint64_t{0x4e15}}));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        auto draw = [&] {
            HeisPoint x = HeisPoint::identity(d);
            x.t = radius * radius * unit(rng);
            for (int i = 0; i < d; ++i)
                x.z[i] = radius * unit(rng);
            return x;
        };
        auto dist = [](const HeisPoint& a, const HeisPoint& b) {
            return std::abs(a.t - b.t) + (a.z - b.z).cwiseAbs().maxCoeff();
        };
        double assoc = 0.0, inverse = 0.0, identity = 0.0, homog = 0.0, dil_hom = 0.0, left_inv = 0.0;
        const HeisPoint e = HeisPoint::identity(d);
        for (int s = 0; s < samples; ++s)
        {
            const HeisPoint x = draw(), y = draw(), z = draw();
            const double lambda = std::exp(2.0 * unit(rng));
            assoc = std::max(assoc, dist(group_mul(group_mul(x, y, g), z, g), group_mul(x, group_mul(y, z, g), g)));
            inverse = std::max(inverse, dist(group_mul(x, group_inv(x), g), e));
            identity = std::max(identity, dist(group_mul(e, x, g), x));
            const double gx = koranyi_gauge(x);
            homog = std::max(homog, std::abs(koranyi_gauge(dilate(lambda, x)) - lambda * gx) / (lambda * gx));
            dil_hom = std::max(dil_hom, dist(dilate(lambda, group_mul(x, y, g)),
                                             group_mul(dilate(lambda, x), dilate(lambda, y), g)) /
                                            std::max(1.0, lambda * lambda));
            const double qd = quasi_metric(QuasiMetricKind::koranyi, x, y, g);
            const double qs = quasi_metric(QuasiMetricKind::koranyi, group_mul(z, x, g), group_mul(z, y, g), g);
            left_inv = std::max(left_inv, std::abs(qd - qs) / std::max(qd, 1e-300));
        }
        const CommutatorReport comm = check_frame_commutators(g);
        const double tol = 1e-12 * std::max(1.0, radius * radius * radius * radius);
        json rep = {{"form", g.to_json()},
                    {"samples", samples},
                    {"radius", radius},
                    {"seed", r.cfg.seed},
                    {"associativity", assoc},
                    {"inverse", inverse},
                    {"identity", identity},
                    {"gauge_homogeneity", homog},
                    {"dilation_homomorphism", dil_hom},
                    {"quasi_metric_left_invariance", left_inv},
                    {"frame_commutator_deviation", comm.max_deviation},
                    {"frame_commutators_hold", comm.holds},
                    {"tolerance", tol}};
        const bool ok = assoc <= tol && inverse <= tol && identity <= tol && homog <= 1e-12 && dil_hom <= tol &&
                        left_inv <= 1e-12 && comm.holds;
        rep["holds"] = ok;
        r.emit("", "json", pretty(rep));
        if (!ok)
            throw NumericError("heis check: an invariant exceeded its tolerance");
    });
}

// cc ---------------------------------------------------------------------------

void run_cc_dist(Run& r)
{
    r.task("distance", [&](TaskStatus&) {
        const HeisConfig g = HeisConfig::standard(r.p.at("n").get<int>());
        const HeisPoint x = point_of(r.p.at("from"), g.dim(), "from");
        const HeisPoint y = point_of(r.p.at("to"), g.dim(), "to");
        try
        {
            const CCDistanceResult res = cc_distance(x, y, g, solver_options(r.cfg));
            json rec = to_json(res, x, y, r.cfg.seed);
            rec["converged"] = true;
            r.emit("", "json", pretty(rec));
            r.emit("path", "csv", csv_of([&](std::ostream& os) { write_path_csv(os, res.path, g); }));
        }
        catch (const CCNonConvergence& e)
        {
            json rec = to_json(e.best_so_far(), x, y, r.cfg.seed);
            rec["converged"] = false;
            rec["error"] = e.what();
            r.emit("", "json", pretty(rec));
            throw;
        }
    });
}

void run_cc_scan(Run& r)
{
    r.task("scan", [&](TaskStatus&) {
        const HeisConfig g = HeisConfig::standard(r.p.at("n").get<int>());
        const GaugeScanReport rep =
            gauge_comparison_scan(g, r.p.at("samples").get<int>(), r.p.at("radius").get<double>(), solver_options(r.cfg));
        std::string jsonl;
        for (std::size_t i = 0; i < rep.rows.size(); ++i)
        {
            const auto& s = rep.rows[i];
            jsonl += json{{"index", i}, {"y", to_json(s.y)}, {"cc", s.cc}, {"gauge", s.gauge}, {"ratio", s.ratio}}
                         .dump() +
                     "\n";
        }
        r.emit("", "jsonl", jsonl);
        r.emit("", "csv", csv_of([&](std::ostream& os) {
                   os << "index,gauge,cc,ratio\n";
                   for (std::size_t i = 0; i < rep.rows.size(); ++i)
                       os << i << ',' << rep.rows[i].gauge << ',' << rep.rows[i].cc << ',' << rep.rows[i].ratio << '\n';
               }));
        r.emit("summary", "json",
               pretty({{"samples", rep.samples},
                       {"failures", rep.failures},
                       {"min_ratio", rep.min_ratio},
                       {"max_ratio", rep.max_ratio},
                       {"seed", r.cfg.seed}}));
        PlotSpec spec;
        spec.title = "d_CC / Koranyi gauge";
        spec.xlabel = "gauge";
        spec.ylabel = "ratio";
        PlotSeries pts{"ratio", {}, {}, false};
        for (const auto& s : rep.rows)
        {
            pts.x.push_back(s.gauge);
            pts.y.push_back(s.ratio);
        }
        spec.series.push_back(pts);
        r.emit_plot("", spec);
        if (rep.failures > 0)
            throw NumericError("cc scan: " + std::to_string(rep.failures) + " samples did not converge");
    });
}

// symbols ----------------------------------------------------------------------

void run_symbols_holder(Run& r)
{
    r.task("holder", [&](TaskStatus&) {
        const CircleSymbol f = make_symbol(r.p.at("symbol"));
        int grid = r.p.at("grid").get<int>();
        if (grid == 0)
            grid = default_holder_grid(f);
        json rec = to_json(holder_seminorm(f, r.p.at("alpha").get<double>(), grid));
        rec["symbol"] = f.meta();
        r.emit("", "json", pretty(rec));
    });
}

void run_symbols_besov(Run& r)
{
    r.task("equivalence", [&](TaskStatus&) {
        const EquivReport rep = besov_holder_equiv_check(symbols_of(r.p.at("corpus")), r.p.at("s").get<double>(),
                                                         r.p.at("grid").get<int>(), r.cfg.jobs);
        r.emit("", "json", pretty(to_json(rep)));
        r.emit("", "csv", csv_of([&](std::ostream& os) {
                   os << "index,besov,holder_norm,ratio\n";
                   for (const auto& row : rep.rows)
                       os << row.index << ',' << row.besov << ',' << row.holder_norm << ',' << row.ratio << '\n';
               }));
        PlotSpec spec;
        spec.title = "Besov / Holder ratio";
        spec.xlabel = "corpus index";
        spec.ylabel = "ratio";
        PlotSeries pts{"ratio", {}, {}, false};
        for (const auto& row : rep.rows)
        {
            pts.x.push_back(static_cast<double>(row.index));
            pts.y.push_back(row.ratio);
        }
        spec.series.push_back(pts);
        r.emit_plot("", spec);
    });
}

void run_symbols_kfun(Run& r)
{
    r.task("k-functional", [&](TaskStatus&) {
        const CircleSymbol f = make_symbol(r.p.at("symbol"));
        const KFunctionalReport rep =
            k_functional_probe(f, r.p.at("theta").get<double>(), r.p.at("t_grid").get<std::vector<double>>());
        json rec = to_json(rep);
        rec["symbol"] = f.meta();
        r.emit("", "json", pretty(rec));
        r.emit("", "csv", csv_of([&](std::ostream& os) {
                   os << "t,khat,level,khat_blocks\n";
                   for (const auto& row : rep.rows)
                       os << row.t << ',' << row.khat << ',' << row.level << ',' << row.khat_blocks << '\n';
               }));
        PlotSpec spec;
        spec.title = "K-functional";
        spec.xlabel = "t";
        spec.ylabel = "K(t)";
        spec.logx = spec.logy = true;
        PlotSeries a{"K(t)", {}, {}, true}, b{"blocks only", {}, {}, true};
        for (const auto& row : rep.rows)
        {
            a.x.push_back(row.t);
            a.y.push_back(row.khat);
            b.x.push_back(row.t);
            b.y.push_back(row.khat_blocks);
        }
        spec.series = {a, b};
        r.emit_plot("", spec);
    });
}

// hardy --------------------------------------------------------------------------

SvdMethod svd_method(const std::string& s)
{
    if (s == "dense")
        return SvdMethod::dense;
    if (s == "lanczos")
        return SvdMethod::lanczos;
    return SvdMethod::automatic;
}

SingularSpectrum spectrum_from_json(const json& j)
{
    SingularSpectrum s;
    s.values = j.at("values").get<std::vector<double>>();
    s.method = j.at("method").get<std::string>();
    s.N = j.at("N").get<int>();
    s.lanczos_steps = j.at("lanczos_steps").get<int>();
    s.max_residual = j.at("max_residual").get<double>();
    return s;
}

///
/// Spectra keyed by the operator's construction hash plus the solver settings. A
/// cache file whose stored key differs (hash collision, manual edit) is recomputed.
///
SingularSpectrum cached_spectrum(const TruncatedOperator& op, int k, const SvdOptions& o, const fs::path& dir,
                                 TaskStatus& ts)
{
    const json key = {{"descriptor", hex64(descriptor_hash(op.descriptor()))},
                      {"k", k},
                      {"method", static_cast<int>(o.method)},
                      {"dense_limit", o.dense_limit},
                      {"tol", o.tol},
                      {"seed", o.seed},
                      {"max_restarts", o.max_restarts}};
    const fs::path file = dir / ("spectrum-" + hex64(fnv1a(key.dump())) + ".json");
    std::error_code ec;
    if (fs::exists(file, ec))
    {
        try
        {
            const json j = json::parse(read_file(file));
            if (j.at("key") == key)
            {
                ts.cache = "hit";
                return spectrum_from_json(j.at("spectrum"));
            }
        }
        catch (const std::exception&)
        {
            // unreadable entry: fall through and overwrite
        }
    }
    ts.cache = "miss";
    const SingularSpectrum s = singular_values(op, k, o);
    fs::create_directories(dir, ec);
    if (!ec)
        write_file(file, json{{"key", key}, {"descriptor", op.descriptor()}, {"spectrum", to_json(s)}}.dump() + "\n");
    return s;
}

void run_hardy_spectrum(Run& r, bool fit_required)
{
    r.task("spectrum", [&](TaskStatus& ts) {
        const CircleSymbol f = make_symbol(r.p.at("symbol"));
        const int N = r.p.at("cutoff").get<int>();
        const int k = r.p.at("k").get<int>();
        if (k > 2 * N + 1)
            throw InputError("k = " + std::to_string(k) + " exceeds 2*cutoff+1 = " + std::to_string(2 * N + 1));
        const TruncatedOperator op = r.p.at("operator") == "hankel" ? hankel_op(f, N) : commutator_P(f, N);
        SvdOptions o;
        o.method = svd_method(r.p.at("method").get<std::string>());
        o.seed = r.cfg.seed;
        const SingularSpectrum s = cached_spectrum(op, k, o, r.cache_dir, ts);

        json rec = {{"descriptor", op.descriptor()}, {"spectrum", to_json(s)}};
        int k_min = 16, k_max = std::min(512, k - 1);
        if (fit_required)
        {
            k_min = r.p.at("k_min").get<int>();
            k_max = r.p.at("k_max").get<int>();
            if (k_max >= k)
                throw InputError("k_max must be below k");
        }
        try
        {
            rec["fit"] = to_json(decay_fit(s, k_min, k_max));
        }
        catch (const InputError& e)
        {
            if (fit_required)
                throw;
            rec["fit"] = nullptr;
            rec["fit_skipped"] = e.what();
        }
        r.emit("", "json", pretty(rec));
        const std::string csv = csv_of([&](std::ostream& os) { write_spectrum_csv(os, s); });
        r.emit("", "csv", csv);
        std::istringstream in(csv);
        r.emit_plot("", spectrum_plot(read_csv(in), (r.p.at("operator") == "hankel" ? "H_a" : "[P,a]") +
                                                         std::string(" singular values, N = ") + std::to_string(N)));
    });
}

void run_hardy_calderon(Run& r)
{
    r.task("calderon", [&](TaskStatus&) {
        PowerIterationOptions o;
        o.tol = r.p.at("tol").get<double>();
        o.seed = r.cfg.seed;
        const CalderonReport rep = calderon_norm_probe(make_symbol(r.p.at("symbol")),
                                                       r.p.at("cutoffs").get<std::vector<int>>(), o, r.cfg.jobs);
        r.emit("", "json", pretty(to_json(rep)));
        r.emit("", "csv", csv_of([&](std::ostream& os) {
                   os << "N,norm,norm_adjoint,iterations\n";
                   for (const auto& row : rep.rows)
                       os << row.N << ',' << row.norm << ',' << row.norm_adjoint << ',' << row.iterations << '\n';
               }));
        PlotSpec spec;
        spec.title = "Calderon commutator norm";
        spec.xlabel = "N";
        spec.ylabel = "||M||";
        spec.logx = spec.logy = true;
        PlotSeries line{"||M||", {}, {}, true};
        for (const auto& row : rep.rows)
        {
            line.x.push_back(row.N);
            line.y.push_back(row.norm);
        }
        spec.series.push_back(line);
        spec.notes.push_back("growth exponent " + json(rep.growth_exponent).dump());
        r.emit_plot("", spec);
    });
}

// dixmier ------------------------------------------------------------------------

void emit_xi(Run& r, const XiEstimate& e)
{
    r.emit("", "json", pretty(to_json(e, false)));
    r.emit("", "csv", csv_of([&](std::ostream& os) { write_log_cesaro_csv(os, e.real_part); }));
    r.emit("diagonal", "csv", csv_of([&](std::ostream& os) {
               os << "l,re,im\n";
               for (std::size_t l = 0; l < e.diagonal.size(); ++l)
                   os << l << ',' << e.diagonal[l].real() << ',' << e.diagonal[l].imag() << '\n';
           }));
    const std::string csv = csv_of([&](std::ostream& os) { write_log_cesaro_csv(os, e.real_part); });
    std::istringstream in(csv);
    r.emit_plot("", lambda_plot(read_csv(in), e.functional + " diagonal log-Cesaro mean"));
}

void run_dixmier_xi(Run& r)
{
    r.task("xi", [&](TaskStatus&) {
        const auto N = r.p.at("lmax").get<std::int64_t>();
        if (r.p.at("path") == "lattice")
            emit_xi(r, xi_lattice_estimate(r.p.at("beta").get<double>(), N, r.p.at("nmax").get<int>(), r.cfg.jobs));
        else
        {
            const auto syms = symbols_of(r.p.at("symbols"));
            if (syms.size() % 2)
                throw InputError("symbols: xi needs an even number (2k) of symbols");
            emit_xi(r, xi_diagonal_estimate(syms, N, static_cast<int>(syms.size() / 2), r.cfg.jobs));
        }
    });
}

void run_dixmier_zeta(Run& r)
{
    r.task("zeta", [&](TaskStatus&) {
        const auto syms = symbols_of(r.p.at("symbols"));
        if (syms.size() % 2)
            throw InputError("symbols: zeta needs an even number (2k) of symbols");
        emit_xi(r, zeta_estimate(syms, r.p.at("lmax").get<std::int64_t>(), static_cast<int>(syms.size() / 2),
                                 r.cfg.jobs));
    });
}

void run_dixmier_bounds(Run& r)
{
    r.task("bounds", [&](TaskStatus&) {
        BoundOptions o;
        o.relative_tail = r.p.at("tail_tol").get<double>();
        o.jobs = r.cfg.jobs;
        const BoundReport rep = bound_report(r.p.at("lmax").get<std::int64_t>(), r.p.at("nmax").get<int>(), o);
        r.emit("", "json", pretty(to_json(rep, false)));
        r.emit("", "csv", csv_of([&](std::ostream& os) { write_bound_csv(os, rep); }));
    });
}

const std::map<std::string, std::function<void(Run&)>>& runners()
{
    static const std::map<std::string, std::function<void(Run&)>> m = {
        {"heis check", run_heis_check},
        {"cc dist", run_cc_dist},
        {"cc scan", run_cc_scan},
        {"symbols holder", run_symbols_holder},
        {"symbols besov", run_symbols_besov},
        {"symbols kfun", run_symbols_kfun},
        {"hardy hankel", [](Run& r) { run_hardy_spectrum(r, false); }},
        {"hardy fit", [](Run& r) { run_hardy_spectrum(r, true); }},
        {"hardy calderon", run_hardy_calderon},
        {"dixmier xi", run_dixmier_xi},
        {"dixmier zeta", run_dixmier_zeta},
        {"dixmier bounds", run_dixmier_bounds},
    };
    return m;
}

std::string slug_of(const std::string& command)
{
    std::string s = command;
    std::replace(s.begin(), s.end(), ' ', '-');
    return s;
}

// plotting -------------------------------------------------------------------------

PlotSpec auto_plot(const CsvTable& t, const PlotRequest& req, const std::string& title)
{
    std::string kind = req.kind;
    if (kind == "auto")
    {
        if (t.has("k") && t.has("mu"))
            kind = "spectrum";
        else if (t.has("N") && t.has("Lambda"))
            kind = "lambda";
        else if (!req.x.empty() && !req.y.empty())
            kind = "scatter";
        else if (t.has("N") && t.has("norm"))
            return scatter_plot(t, "N", "norm", true, true, title);
        else if (t.has("t") && t.has("khat"))
            return scatter_plot(t, "t", "khat", true, true, title);
        else if (t.has("ratio") && !t.header.empty())
            return scatter_plot(t, t.has("gauge") ? "gauge" : t.header.front(), "ratio", false, false, title);
        else
            throw InputError("plot: cannot detect the table kind; pass --kind scatter with --x and --y");
    }
    if (kind == "spectrum")
        return spectrum_plot(t, title);
    if (kind == "lambda")
        return lambda_plot(t, title);
    if (kind == "scatter")
    {
        if (req.x.empty() || req.y.empty())
            throw InputError("plot: scatter needs x and y columns");
        return scatter_plot(t, req.x, req.y, req.logx, req.logy, title);
    }
    throw InputError("plot: unknown kind '" + kind + "'");
}

} // namespace

// ---------------------------------------------------------------------------------
// config

const std::vector<std::string>& experiment_commands()
{
    static const std::vector<std::string> c = {"heis check",     "cc dist",        "cc scan",      "symbols holder",
                                               "symbols besov",  "symbols kfun",   "hardy hankel", "hardy fit",
                                               "hardy calderon", "dixmier xi",     "dixmier zeta", "dixmier bounds"};
    return c;
}

json command_defaults(const std::string& command)
{
    json out = json::object();
    for (const auto& f : schema(command))
        out[f.name] = f.def;
    return out;
}

std::string command_help(const std::string& command)
{
    std::ostringstream os;
    for (const auto& f : schema(command))
    {
        os << "  " << f.name << " (" << kind_name(f.kind);
        if (!f.choices.empty())
        {
            os << ":";
            for (const auto& c : f.choices)
                os << ' ' << c;
        }
        os << ") default " << f.def.dump() << '\n';
    }
    return os.str();
}

json normalize_params(const std::string& command, const json& params)
{
    const auto& fields = schema(command);
    if (!params.is_null() && !params.is_object())
        throw InputError("params must be a JSON object");
    json out = json::object();
    if (params.is_object())
        for (const auto& [k, v] : params.items())
        {
            const auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) { return f.name == k; });
            if (it == fields.end())
                throw InputError("unknown parameter '" + k + "' for '" + command + "'");
            out[k] = field_value(*it, v);
        }
    for (const auto& f : fields)
        if (!out.contains(f.name))
            out[f.name] = field_value(f, f.def);
    return out;
}

ExperimentConfig config_from_json(const json& j)
{
    if (!j.is_object())
        throw InputError("config must be a JSON object");
    static const std::vector<std::string> keys = {"command", "params", "seed", "out", "jobs", "cache"};
    for (const auto& [k, _] : j.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw InputError("unknown config key '" + k + "'");
    if (!j.contains("command") || !j.at("command").is_string())
        throw InputError("config: 'command' (string) is required");
    ExperimentConfig c;
    c.command = j.at("command").get<std::string>();
    c.params = normalize_params(c.command, j.value("params", json::object()));
    if (j.contains("seed"))
    {
        if (!j.at("seed").is_number_unsigned())
            throw InputError("config: 'seed' must be a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("out"))
    {
        if (!j.at("out").is_string())
            throw InputError("config: 'out' must be a string");
        c.out = j.at("out").get<std::string>();
    }
    if (j.contains("jobs"))
    {
        if (!j.at("jobs").is_number_integer() || j.at("jobs").get<int>() < 1)
            throw InputError("config: 'jobs' must be a positive integer");
        c.jobs = j.at("jobs").get<int>();
    }
    if (j.contains("cache"))
    {
        if (!j.at("cache").is_string())
            throw InputError("config: 'cache' must be a string");
        c.cache = j.at("cache").get<std::string>();
    }
    return c;
}

json to_json(const ExperimentConfig& c)
{
    return {{"command", c.command},
            {"params", c.params},
            {"seed", c.seed},
            {"out", c.out.string()},
            {"jobs", c.jobs},
            {"cache", c.cache.string()}};
}

json hashed_part(const ExperimentConfig& c)
{
    return {{"command", c.command}, {"params", normalize_params(c.command, c.params)}, {"seed", c.seed}};
}

std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a(hashed_part(c).dump()); }

// ---------------------------------------------------------------------------------
// manifests

bool RunManifest::ok() const
{
    return std::all_of(tasks.begin(), tasks.end(), [](const TaskStatus& t) { return t.status == "ok"; });
}

json to_json(const RunManifest& m)
{
    json tasks = json::array();
    for (const auto& t : m.tasks)
    {
        json tj = {{"name", t.name}, {"status", t.status}, {"seconds", t.seconds}};
        if (!t.message.empty())
            tj["message"] = t.message;
        if (!t.cache.empty())
            tj["cache"] = t.cache;
        tasks.push_back(tj);
    }
    return {{"hash", m.hash},
            {"config", m.config},
            {"version", m.version},
            {"tasks", tasks},
            {"artifacts", m.artifacts},
            {"started", m.started},
            {"wall_seconds", m.wall_seconds}};
}

RunManifest manifest_from_json(const json& j)
{
    RunManifest m;
    try
    {
        m.hash = j.at("hash").get<std::string>();
        m.config = j.at("config");
        m.version = j.at("version").get<std::string>();
        for (const auto& t : j.at("tasks"))
            m.tasks.push_back({t.at("name").get<std::string>(), t.at("status").get<std::string>(),
                               t.at("seconds").get<double>(), t.value("message", ""), t.value("cache", "")});
        m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
        m.started = j.at("started").get<std::string>();
        m.wall_seconds = j.at("wall_seconds").get<double>();
    }
    catch (const json::exception& e)
    {
        throw InputError(std::string("manifest: ") + e.what());
    }
    if (hex64(config_hash(config_from_json(m.config))) != m.hash)
        throw InputError("manifest: stored hash does not match its config");
    return m;
}

RunManifest run(const ExperimentConfig& config)
{
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = config;
    cfg.params = normalize_params(cfg.command, cfg.params);
    if (cfg.jobs < 1)
        throw InputError("jobs must be >= 1");

    RunManifest m;
    m.started = utc_now();
    m.version = heislab_version;
    m.config = to_json(cfg);
    const std::uint64_t h = config_hash(cfg);
    m.hash = hex64(h);

    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec || !fs::is_directory(cfg.out))
        throw InputError("output directory " + cfg.out.string() + " is not writable");

    Run r{cfg, cfg.params, slug_of(cfg.command), m.hash.substr(0, 8),
          cfg.cache.empty() ? cfg.out / "cache" : cfg.cache, {}, {}};
    runners().at(cfg.command)(r);

    for (const auto& [name, content] : r.pending)
    {
        write_file(cfg.out / name, content);
        m.artifacts.push_back(name);
    }
    m.tasks = std::move(r.tasks);
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.path = cfg.out / ("manifest-" + m.hash + ".json");
    write_file(m.path, pretty(to_json(m)));
    return m;
}

std::vector<RunManifest> manifest_query(const fs::path& dir, const ManifestFilter& filter,
                                        std::vector<std::string>* rejected)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw InputError("cannot read directory " + dir.string());
    fs::directory_iterator it(dir, ec), end;
    if (ec)
        throw InputError("cannot read directory " + dir.string() + ": " + ec.message());

    std::vector<RunManifest> out;
    for (; it != end; it.increment(ec))
    {
        if (ec)
            throw InputError("cannot read directory " + dir.string() + ": " + ec.message());
        const std::string name = it->path().filename().string();
        if (name.rfind("manifest-", 0) != 0 || it->path().extension() != ".json")
            continue;
        try
        {
            RunManifest m = manifest_from_json(json::parse(read_file(it->path())));
            m.path = it->path();
            const std::string command = m.config.value("command", "");
            if (!filter.command.empty() && command != filter.command)
                continue;
            if (!filter.hash_prefix.empty() && m.hash.rfind(filter.hash_prefix, 0) != 0)
                continue;
            if (!filter.since.empty() && m.started < filter.since)
                continue;
            if (!filter.until.empty() && m.started.substr(0, filter.until.size()) > filter.until)
                continue;
            out.push_back(std::move(m));
        }
        catch (const std::exception& e)
        {
            if (rejected)
                rejected->push_back(name + ": " + e.what());
        }
    }
    std::sort(out.begin(), out.end(), [](const RunManifest& a, const RunManifest& b) {
        return std::tie(a.started, a.hash) < std::tie(b.started, b.hash);
    });
    return out;
}

fs::path plot_csv(const fs::path& csv, const PlotRequest& req)
{
    std::ifstream in(csv);
    if (!in)
        throw InputError("plot: cannot read " + csv.string());
    const CsvTable t = read_csv(in);
    if (t.rows.empty())
        throw InputError("plot: " + csv.string() + " has no data rows");
    const PlotSpec spec = auto_plot(t, req, csv.stem().string());
    const std::string text = req.gnuplot ? render_gnuplot(spec) : render_svg(spec);
    fs::path target = req.output;
    if (target.empty())
    {
        target = csv;
        target.replace_extension(req.gnuplot ? ".gp" : ".svg");
    }
    write_file(target, text);
    return target;
}

std::vector<fs::path> plot_manifest(const fs::path& manifest, const PlotRequest& req)
{
    const RunManifest m = manifest_from_json(json::parse(read_file(manifest), nullptr, true));
    std::vector<fs::path> out;
    const fs::path dir = manifest.parent_path();
    for (const auto& a : m.artifacts)
    {
        if (fs::path(a).extension() != ".csv")
            continue;
        PlotRequest r = req;
        r.output.clear();
        try
        {
            out.push_back(plot_csv(dir / a, r));
        }
        catch (const InputError&)
        {
            // tables without a known layout are skipped
        }
    }
    if (out.empty())
        throw InputError("plot: no plottable CSV artifacts in " + manifest.string());
    return out;
}

} // namespace heislab
