///
/// \file svg_plot.hpp
///
/// Standalone SVG (and gnuplot script) rendering of the CSV tables the CLI writes.
///
#ifndef HEISLAB_SVG_PLOT_HPP
#define HEISLAB_SVG_PLOT_HPP

#include "heislab/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace heislab
{

/// Header plus rows; non-numeric cells are stored as NaN.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Throws InputError for an unknown column.
    std::vector<double> column(const std::string& name) const;
    bool has(const std::string& name) const;
};

/// Throws InputError when there is no header line.
CsvTable read_csv(std::istream& is);

struct PlotSeries
{
    std::string label;
    std::vector<double> x, y;
    bool line = false;  ///< polyline instead of markers
};

struct PlotSpec
{
    std::string title, xlabel, ylabel;
    bool logx = false, logy = false;
    std::vector<PlotSeries> series;
    std::vector<std::string> notes;  ///< annotation lines, top left
};

/// Throws InputError if no series has a plottable point.
std::string render_svg(const PlotSpec& spec);
std::string render_gnuplot(const PlotSpec& spec);

/// Log-log mu_k against k from a "k,mu" table, with the decay fit on [16, 512]
/// (clipped to the table) drawn and annotated.
PlotSpec spectrum_plot(const CsvTable& t, const std::string& title);

/// Lambda_N against N (log N axis) from an "N,Lambda" table.
PlotSpec lambda_plot(const CsvTable& t, const std::string& title);

/// y against x for two named columns.
PlotSpec scatter_plot(const CsvTable& t, const std::string& xcol, const std::string& ycol, bool logx, bool logy,
                      const std::string& title);

} // namespace heislab

#endif
