///
/// \file cc_geodesic.hpp
///
/// Carnot-Caratheodory distances on the model Heisenberg group.
///
/// Horizontal paths are represented by piecewise-constant controls on m equal
/// subintervals of [0, 1]. For such controls the endpoint is available in
/// closed form: z moves linearly and, along the left-invariant frame, the
/// vertical coordinate advances by (h/2) z_i^T L u_i on step i (the u^T L u
/// contribution vanishes by antisymmetry). The distance is the square root of
/// the minimal energy h sum |u_i|^2 over controls that reach the target; the
/// energy infimum over unit-time paths equals the squared length infimum.
///
#ifndef HEISLAB_CC_GEODESIC_HPP
#define HEISLAB_CC_GEODESIC_HPP

#include "heislab/error.hpp"
#include "heislab/heis_core.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace heislab
{

struct HorizontalPath
{
    HeisPoint start;
    Eigen::MatrixXd controls;  ///< m x d, row i is the velocity on step i

    int steps() const noexcept { return static_cast<int>(controls.rows()); }
};

HeisPoint endpoint_map(const HorizontalPath& path, const HeisConfig& cfg);

/// h * sum_i |u_i|^2
double path_energy(const HorizontalPath& path);

/// Writes one row per step: step, s_begin, t, z_1..z_d, u_1..u_d.
void write_path_csv(std::ostream& os, const HorizontalPath& path, const HeisConfig& cfg);

struct CCSolverOptions
{
    double rel_tol = 1e-3;        ///< refinement stops when the value moves less than this
    double residual_tol = 1e-8;   ///< endpoint residual, normalized units
    int starts = 8;               ///< multi-start count per mesh level
    int initial_steps = 8;
    int max_refinements = 8;
    double penalty_initial = 10.0;
    double penalty_growth = 10.0;
    double penalty_max = 1e9;
    int max_outer = 20;
    int max_inner = 3000;
    std::uint64_t seed = 0;
    std::uint64_t sample_index = 0;
};

struct SolverTraceEntry
{
    int steps = 0;
    int start = 0;
    int outer_iterations = 0;
    int inner_iterations = 0;
    double value = 0.0;
    double residual = 0.0;
    bool feasible = false;
};

struct CCDistanceResult
{
    double value = 0.0;
    HorizontalPath path;
    double energy = 0.0;
    ///
    /// |t_end - t_target| + |z_end - z_target| after normalizing the target by
    /// the dilation that gives x^{-1} y unit Koranyi gauge.
    ///
    double constraint_residual = 0.0;
    std::vector<SolverTraceEntry> solver_trace;
};

/// Thrown when mesh refinement or the constraint solve does not settle.
class CCNonConvergence : public NumericError
{
public:
    CCNonConvergence(const std::string& what, CCDistanceResult best)
        : NumericError(what), best_(std::move(best))
    {
    }
    const CCDistanceResult& best_so_far() const noexcept { return best_; }

private:
    CCDistanceResult best_;
};

///
/// d_CC(x, y) by augmented-Lagrangian minimization of the path energy.
///
/// The problem is left-translated to start at the identity and dilated so that
/// the target has unit gauge; both maps conjugate the problem exactly and the
/// returned certificate starts at x.
///
CCDistanceResult cc_distance(const HeisPoint& x, const HeisPoint& y, const HeisConfig& cfg,
                             const CCSolverOptions& opts = {});

nlohmann::json to_json(const CCDistanceResult& r, const HeisPoint& x, const HeisPoint& y,
                       std::uint64_t seed);

struct GaugeScanSample
{
    HeisPoint y;
    double cc = 0.0;
    double gauge = 0.0;
    double ratio = 0.0;
};

struct GaugeScanReport
{
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    int samples = 0;
    int failures = 0;
    std::vector<GaugeScanSample> rows;
};

///
/// Samples y uniformly (rejection from a box) in the Koranyi ball of the given
/// radius and records d_CC(e, y) / |y|_H. Samples whose solve does not converge
/// are counted and excluded from the extremes.
///
GaugeScanReport gauge_comparison_scan(const HeisConfig& cfg, int n_samples, double radius,
                                      const CCSolverOptions& opts = {});

} // namespace heislab

#endif
