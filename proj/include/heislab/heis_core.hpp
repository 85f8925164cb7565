///
/// \file heis_core.hpp
///
/// Algebra of the model Heisenberg group R x R^d with product
///
///   (t, z) . (t', z') = (t + t' + L(z, z') / 2, z + z'),   L(z, z') = z^T L z'
///
/// for an antisymmetric form L, together with the anisotropic dilations
/// lambda.(t, z) = (lambda^2 t, lambda z), the Koranyi gauge and the
/// left-invariant horizontal frame.
///
#ifndef HEISLAB_HEIS_CORE_HPP
#define HEISLAB_HEIS_CORE_HPP

#include <Eigen/Dense>
#include <json.hpp>

#include <string>
#include <vector>

namespace heislab
{

/// Horizontal dimension and antisymmetric form; fixes the group.
class HeisConfig
{
public:
    /// Throws InputError unless d >= 2, L is d x d, antisymmetric and nonzero.
    explicit HeisConfig(Eigen::MatrixXd form);

    /// Standard form on R^{2n}: L = [[0, I], [-I, 0]] (n = 1 gives [[0,1],[-1,0]]).
    static HeisConfig standard(int n);

    int dim() const noexcept { return static_cast<int>(form_.rows()); }
    const Eigen::MatrixXd& form() const noexcept { return form_; }

    /// L(z, w) = z^T L w
    double bilinear(const Eigen::VectorXd& z, const Eigen::VectorXd& w) const;

    nlohmann::json to_json() const;
    static HeisConfig from_json(const nlohmann::json& j);

private:
    Eigen::MatrixXd form_;
};

struct HeisPoint
{
    double t = 0.0;
    Eigen::VectorXd z;

    HeisPoint() = default;
    HeisPoint(double t_, Eigen::VectorXd z_) : t(t_), z(std::move(z_)) {}

    static HeisPoint identity(int d) { return {0.0, Eigen::VectorXd::Zero(d)}; }
    int dim() const noexcept { return static_cast<int>(z.size()); }
    bool is_finite() const;
};

nlohmann::json to_json(const HeisPoint& x);
HeisPoint point_from_json(const nlohmann::json& j);

HeisPoint group_mul(const HeisPoint& x, const HeisPoint& y, const HeisConfig& cfg);
HeisPoint group_inv(const HeisPoint& x);

/// Throws InputError for lambda <= 0.
HeisPoint dilate(double lambda, const HeisPoint& x);

/// (t^2 + |z|^4)^{1/4}
double koranyi_gauge(const HeisPoint& x);

enum class QuasiMetricKind
{
    koranyi,     ///< |x^{-1} y|_H, left-invariant
    anisotropic  ///< |y - x|_H on componentwise differences
};

double quasi_metric(QuasiMetricKind kind, const HeisPoint& x, const HeisPoint& y,
                    const HeisConfig& cfg);

///
/// Coefficients of the horizontal frame at a point. The frame is
///
///   X_j = d/dz_j + c_j(z) d/dt,   c_j(z) = -(1/2) sum_k L_jk z_k,
///
/// which is the left translate of the coordinate direction e_j, and X_0 = d/dt.
/// The d/dz part is the identity, so only the vertical coefficients are stored.
///
struct FrameCoefficients
{
    Eigen::VectorXd vertical;  ///< c_j(z), j = 0..d-1

    /// Coefficients of X_j in the basis (d/dt, d/dz_1, ..., d/dz_d).
    Eigen::VectorXd field(int j) const;
};

FrameCoefficients frame_coefficients(const HeisConfig& cfg, const HeisPoint& x);

///
/// Result of the bracket check: each [X_j, X_k] is a multiple of X_0 whose
/// coefficient is read off from the affine-in-z frame coefficients.
///
struct CommutatorReport
{
    Eigen::MatrixXd bracket;  ///< bracket(j, k) = coefficient of X_0 in [X_j, X_k]
    double max_deviation = 0.0;  ///< max |bracket(j,k) - L_jk|
    bool holds = false;
};

CommutatorReport check_frame_commutators(const HeisConfig& cfg);

} // namespace heislab

#endif
