#include "heislab/svg_plot.hpp"
#include "heislab/singular_values.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <sstream>

namespace heislab
{

namespace
{

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_cell(const std::string& s)
{
    if (s.empty())
        return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() ? v : std::numeric_limits<double>::quiet_NaN();
}

std::string esc(const std::string& s)
{
    std::string o;
    for (char c : s)
    {
        if (c == '<')
            o += "&lt;";
        else if (c == '>')
            o += "&gt;";
        else if (c == '&')
            o += "&amp;";
        else
            o += c;
    }
    return o;
}

std::string fmt(double v, const char* f = "%.4g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

struct Axis
{
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double map(double v) const
    {
        const double a = log ? std::log10(v) : v;
        return (a - lo) / (hi - lo);
    }

    std::vector<double> ticks() const
    {
        std::vector<double> t;
        if (log)
        {
            // 1-2-5 subdivisions when fewer than three decades are visible
            const bool fine = hi - lo < 3.0;
            for (double e = std::floor(lo); e <= hi + 1e-9; ++e)
                for (double m : {1.0, 2.0, 5.0})
                {
                    if (m != 1.0 && !fine)
                        continue;
                    const double v = m * std::pow(10.0, e);
                    const double a = std::log10(v);
                    if (a >= lo - 1e-9 && a <= hi + 1e-9)
                        t.push_back(v);
                }
            return t;
        }
        const double span = hi - lo;
        const double raw = span / 6.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0})
            if (m * mag >= raw)
            {
                step = m * mag;
                break;
            }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
            t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
        return t;
    }
};

Axis make_axis(const PlotSpec& spec, bool is_x)
{
    Axis ax;
    ax.log = is_x ? spec.logx : spec.logy;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : spec.series)
        for (std::size_t i = 0; i < s.x.size(); ++i)
        {
            if (!usable(s.x[i], spec.logx) || !usable(s.y[i], spec.logy))
                continue;
            double v = is_x ? s.x[i] : s.y[i];
            if (ax.log)
                v = std::log10(v);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!std::isfinite(lo))
        throw InputError("plot: nothing to draw (empty or non-positive data on a log axis)");
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi)))
    {
        lo -= ax.log ? 0.5 : std::max(0.5, 0.1 * std::abs(lo));
        hi += ax.log ? 0.5 : std::max(0.5, 0.1 * std::abs(hi));
    }
    else
    {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    ax.lo = lo;
    ax.hi = hi;
    return ax;
}

const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

} // namespace

bool CsvTable::has(const std::string& name) const
{
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<double> CsvTable::column(const std::string& name) const
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw InputError("csv: no column named '" + name + "'");
    const auto j = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back(j < r.size() ? r[j] : std::numeric_limits<double>::quiet_NaN());
    return out;
}

CsvTable read_csv(std::istream& is)
{
    CsvTable t;
    std::string line;
    if (!std::getline(is, line) || line.empty())
        throw InputError("csv: missing header line");
    t.header = split(line);
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        std::vector<double> row;
        for (const auto& cell : split(line))
            row.push_back(parse_cell(cell));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string render_svg(const PlotSpec& spec)
{
    const double W = 720, H = 480, left = 80, right = 24, top = 48, bottom = 64;
    const double pw = W - left - right, ph = H - top - bottom;
    const Axis ax = make_axis(spec, true), ay = make_axis(spec, false);
    auto X = [&](double v) { return left + pw * ax.map(v); };
    auto Y = [&](double v) { return top + ph * (1.0 - ay.map(v)); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << esc(spec.title)
      << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double v : ax.ticks())
    {
        const double x = X(v);
        o << "<line x1=\"" << fmt(x) << "\" y1=\"" << top + ph << "\" x2=\"" << fmt(x) << "\" y2=\"" << top
          << "\" stroke=\"#e5e5e5\"/>\n";
        o << "<text x=\"" << fmt(x) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << fmt(v)
          << "</text>\n";
    }
    for (double v : ay.ticks())
    {
        const double y = Y(v);
        o << "<line x1=\"" << left << "\" y1=\"" << fmt(y) << "\" x2=\"" << left + pw << "\" y2=\"" << fmt(y)
          << "\" stroke=\"#e5e5e5\"/>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">" << fmt(v)
          << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 20 << "\" text-anchor=\"middle\">" << esc(spec.xlabel)
      << "</text>\n";
    o << "<text x=\"20\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << top + ph / 2 << ")\">" << esc(spec.ylabel) << "</text>\n";

    for (std::size_t si = 0; si < spec.series.size(); ++si)
    {
        const auto& s = spec.series[si];
        const char* color = palette[si % std::size(palette)];
        if (s.line)
        {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (usable(s.x[i], spec.logx) && usable(s.y[i], spec.logy))
                    o << fmt(X(s.x[i]), "%.2f") << ',' << fmt(Y(s.y[i]), "%.2f") << ' ';
            o << "\"/>\n";
        }
        if (!s.line || s.x.size() <= 64)
        {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (usable(s.x[i], spec.logx) && usable(s.y[i], spec.logy))
                    o << "<circle cx=\"" << fmt(X(s.x[i]), "%.2f") << "\" cy=\"" << fmt(Y(s.y[i]), "%.2f")
                      << "\" r=\"2\" fill=\"" << color << "\"/>\n";
        }
        if (s.label.empty())
            continue;
        const double ly = top + 16 + 16.0 * static_cast<double>(si);
        o << "<rect x=\"" << left + pw - 170 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\"" << color
          << "\"/>\n";
        o << "<text x=\"" << left + pw - 154 << "\" y=\"" << ly << "\">" << esc(s.label) << "</text>\n";
    }
    for (std::size_t i = 0; i < spec.notes.size(); ++i)
        o << "<text x=\"" << left + 10 << "\" y=\"" << top + 18 + 16.0 * static_cast<double>(i) << "\">"
          << esc(spec.notes[i]) << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

std::string render_gnuplot(const PlotSpec& spec)
{
    make_axis(spec, true);  // same emptiness check as the SVG path
    std::ostringstream o;
    o.precision(17);
    o << "set terminal svg size 720,480\n";
    o << "set title \"" << spec.title << "\"\n";
    o << "set xlabel \"" << spec.xlabel << "\"\nset ylabel \"" << spec.ylabel << "\"\n";
    if (spec.logx)
        o << "set logscale x\n";
    if (spec.logy)
        o << "set logscale y\n";
    for (std::size_t i = 0; i < spec.notes.size(); ++i)
        o << "set label " << i + 1 << " \"" << spec.notes[i] << "\" at graph 0.02, graph " << 0.95 - 0.05 * i << "\n";
    for (std::size_t si = 0; si < spec.series.size(); ++si)
    {
        o << "$s" << si << " << EOD\n";
        for (std::size_t i = 0; i < spec.series[si].x.size(); ++i)
            o << spec.series[si].x[i] << ' ' << spec.series[si].y[i] << '\n';
        o << "EOD\n";
    }
    o << "plot ";
    for (std::size_t si = 0; si < spec.series.size(); ++si)
        o << (si ? ", " : "") << "$s" << si << " with " << (spec.series[si].line ? "lines" : "points")
          << " title \"" << spec.series[si].label << "\"";
    o << '\n';
    return o.str();
}

PlotSpec spectrum_plot(const CsvTable& t, const std::string& title)
{
    const auto k = t.column("k"), mu = t.column("mu");
    PlotSpec p;
    p.title = title;
    p.xlabel = "k";
    p.ylabel = "mu_k";
    p.logx = p.logy = true;
    PlotSeries data{"mu_k", {}, {}, false};
    for (std::size_t i = 0; i < k.size(); ++i)
        if (k[i] >= 1.0)
        {
            data.x.push_back(k[i]);
            data.y.push_back(mu[i]);
        }
    p.series.push_back(data);

    SingularSpectrum s;
    s.values = mu;
    const int n = static_cast<int>(mu.size());
    const int k_min = std::min(16, std::max(1, n / 4)), k_max = std::min(512, n - 1);
    try
    {
        const auto fit = decay_fit(s, k_min, k_max);
        PlotSeries line{"fit", {}, {}, true};
        for (int kk : {k_min, k_max})
        {
            line.x.push_back(kk);
            line.y.push_back(std::exp(fit.intercept + fit.slope * std::log(static_cast<double>(kk))));
        }
        p.series.push_back(line);
        p.notes.push_back("slope " + fmt(fit.slope, "%.4f") + " on k in [" + std::to_string(k_min) + ", " +
                          std::to_string(k_max) + "]");
    }
    catch (const InputError&)
    {
        p.notes.push_back("no decay fit: too few positive values");
    }
    return p;
}

PlotSpec lambda_plot(const CsvTable& t, const std::string& title)
{
    PlotSpec p;
    p.title = title;
    p.xlabel = "N";
    p.ylabel = "Lambda_N";
    p.logx = true;
    p.series.push_back({"Lambda_N", t.column("N"), t.column("Lambda"), true});
    return p;
}

PlotSpec scatter_plot(const CsvTable& t, const std::string& xcol, const std::string& ycol, bool logx, bool logy,
                      const std::string& title)
{
    PlotSpec p;
    p.title = title;
    p.xlabel = xcol;
    p.ylabel = ycol;
    p.logx = logx;
    p.logy = logy;
    p.series.push_back({ycol, t.column(xcol), t.column(ycol), false});
    return p;
}

} // namespace heislab
