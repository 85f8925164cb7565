#include "heislab/heis_core.hpp"

#include "heislab/error.hpp"

#include <cmath>

namespace heislab
{

HeisConfig::HeisConfig(Eigen::MatrixXd form) : form_(std::move(form))
{
    if (form_.rows() != form_.cols())
        throw InputError("HeisConfig: L must be square");
    if (form_.rows() < 2)
        throw InputError("HeisConfig: horizontal dimension d must be >= 2");
    if (!form_.allFinite())
        throw InputError("HeisConfig: L has non-finite entries");
    if ((form_ + form_.transpose()).cwiseAbs().maxCoeff() != 0.0)
        throw InputError("HeisConfig: L must be antisymmetric (L + L^T = 0)");
    if (form_.cwiseAbs().maxCoeff() == 0.0)
        throw InputError("HeisConfig: L = 0 is not bracket-generating");
}

HeisConfig HeisConfig::standard(int n)
{
    if (n < 1)
        throw InputError("HeisConfig::standard: n must be >= 1");
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    L.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    L.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return HeisConfig(std::move(L));
}

double HeisConfig::bilinear(const Eigen::VectorXd& z, const Eigen::VectorXd& w) const
{
    return z.dot(form_ * w);
}

nlohmann::json HeisConfig::to_json() const
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < form_.rows(); ++i)
    {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < form_.cols(); ++j)
            row.push_back(form_(i, j));
        rows.push_back(row);
    }
    return {{"d", dim()}, {"L", rows}};
}

HeisConfig HeisConfig::from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("d") || !j.contains("L"))
        throw InputError("HeisConfig JSON must have keys \"d\" and \"L\"");
    for (const auto& item : j.items())
        if (item.key() != "d" && item.key() != "L")
            throw InputError("HeisConfig JSON: unknown key \"" + item.key() + "\"");
    const int d = j.at("d").get<int>();
    const auto& rows = j.at("L");
    if (d < 2 || !rows.is_array() || static_cast<int>(rows.size()) != d)
        throw InputError("HeisConfig JSON: L must be a d x d array with d >= 2");
    Eigen::MatrixXd L(d, d);
    for (int r = 0; r < d; ++r)
    {
        if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != d)
            throw InputError("HeisConfig JSON: L must be a d x d array");
        for (int c = 0; c < d; ++c)
            L(r, c) = rows[r][c].get<double>();
    }
    return HeisConfig(std::move(L));
}

bool HeisPoint::is_finite() const
{
    return std::isfinite(t) && z.allFinite();
}

nlohmann::json to_json(const HeisPoint& x)
{
    return {{"t", x.t}, {"z", std::vector<double>(x.z.data(), x.z.data() + x.z.size())}};
}

HeisPoint point_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("t") || !j.contains("z"))
        throw InputError("HeisPoint JSON must have keys \"t\" and \"z\"");
    const auto z = j.at("z").get<std::vector<double>>();
    return {j.at("t").get<double>(), Eigen::Map<const Eigen::VectorXd>(z.data(), z.size())};
}

namespace
{

void require_dim(const HeisPoint& x, const HeisConfig& cfg, const char* what)
{
    if (x.dim() != cfg.dim())
        throw InputError(std::string(what) + ": point dimension " + std::to_string(x.dim()) +
                         " does not match d = " + std::to_string(cfg.dim()));
}

} // namespace

HeisPoint group_mul(const HeisPoint& x, const HeisPoint& y, const HeisConfig& cfg)
{
    require_dim(x, cfg, "group_mul");
    require_dim(y, cfg, "group_mul");
    return {x.t + y.t + 0.5 * cfg.bilinear(x.z, y.z), x.z + y.z};
}

HeisPoint group_inv(const HeisPoint& x)
{
    return {-x.t, -x.z};
}

HeisPoint dilate(double lambda, const HeisPoint& x)
{
    if (!(lambda > 0.0))
        throw InputError("dilate: lambda must be positive");
    return {lambda * lambda * x.t, lambda * x.z};
}

double koranyi_gauge(const HeisPoint& x)
{
    // sqrt(hypot(t, |z|^2)) avoids overflow in t^2 + |z|^4
    return std::sqrt(std::hypot(x.t, x.z.squaredNorm()));
}

double quasi_metric(QuasiMetricKind kind, const HeisPoint& x, const HeisPoint& y,
                    const HeisConfig& cfg)
{
    require_dim(x, cfg, "quasi_metric");
    require_dim(y, cfg, "quasi_metric");
    switch (kind)
    {
    case QuasiMetricKind::koranyi:
        return koranyi_gauge(group_mul(group_inv(x), y, cfg));
    case QuasiMetricKind::anisotropic:
        return koranyi_gauge({y.t - x.t, y.z - x.z});
    }
    return 0.0;
}

Eigen::VectorXd FrameCoefficients::field(int j) const
{
    const auto d = vertical.size();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 1);
    v(0) = vertical(j);
    v(1 + j) = 1.0;
    return v;
}

FrameCoefficients frame_coefficients(const HeisConfig& cfg, const HeisPoint& x)
{
    require_dim(x, cfg, "frame_coefficients");
    return {-0.5 * cfg.form() * x.z};
}

namespace
{

// f(t, z) = value + grad . (t, z)
struct AffineFunction
{
    double value = 0.0;
    Eigen::VectorXd grad;
};

// Vector field with affine coefficients over the basis (d/dt, d/dz_1..d/dz_d).
using AffineField = std::vector<AffineFunction>;

AffineField frame_field(const HeisConfig& cfg, int j)
{
    const int n = cfg.dim() + 1;
    AffineField X(n, AffineFunction{0.0, Eigen::VectorXd::Zero(n)});
    // vertical coefficient -(1/2) sum_k L_jk z_k
    for (int k = 0; k < cfg.dim(); ++k)
        X[0].grad(1 + k) = -0.5 * cfg.form()(j, k);
    X[1 + j].value = 1.0;
    return X;
}

// [X, Y]^i = sum_m X^m d_m Y^i - Y^m d_m X^i. The derivatives of affine
// coefficients are constants, so the bracket is again affine.
AffineField bracket(const AffineField& X, const AffineField& Y)
{
    const auto n = static_cast<int>(X.size());
    AffineField out(n, AffineFunction{0.0, Eigen::VectorXd::Zero(n)});
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m)
        {
            const double dY = Y[i].grad(m);
            const double dX = X[i].grad(m);
            out[i].value += X[m].value * dY - Y[m].value * dX;
            out[i].grad += X[m].grad * dY - Y[m].grad * dX;
        }
    return out;
}

} // namespace

CommutatorReport check_frame_commutators(const HeisConfig& cfg)
{
    const int d = cfg.dim();
    CommutatorReport report;
    report.bracket = Eigen::MatrixXd::Zero(d, d);
    bool vertical_constant = true;

    std::vector<AffineField> frame;
    for (int j = 0; j < d; ++j)
        frame.push_back(frame_field(cfg, j));

    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
        {
            const AffineField B = bracket(frame[j], frame[k]);
            // must be a constant multiple of X_0 = d/dt
            if (B[0].grad.cwiseAbs().maxCoeff() != 0.0)
                vertical_constant = false;
            for (int i = 1; i <= d; ++i)
                if (B[i].value != 0.0 || B[i].grad.cwiseAbs().maxCoeff() != 0.0)
                    vertical_constant = false;
            report.bracket(j, k) = B[0].value;
        }
    report.max_deviation = (report.bracket - cfg.form()).cwiseAbs().maxCoeff();
    report.holds = vertical_constant && report.max_deviation == 0.0;
    return report;
}

} // namespace heislab
