#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "surfacc/geom.hpp"

namespace surfacc {

// Radius returned by the medial ball search when the ball grows into a half-space.
inline constexpr double kUnboundedRadius = std::numeric_limits<double>::infinity();

// Surface points whose pairwise covering radius is at most `covering_radius`.
struct SurfaceGrid {
    Eigen::MatrixXd points;  // d x n
    double covering_radius = 0.0;
};

struct MedialSearchOptions {
    double grid_spacing = 0.0;  // 0 picks bounding_radius / 100
    double max_radius = 0.0;    // 0 picks 1000 * bounding_radius; beyond it the ball is unbounded
    int refine_seeds = 6;
};

// A smooth closed k-manifold in R^d. Implementations are immutable and safe to share across threads.
class SurfaceModel {
public:
    virtual ~SurfaceModel() = default;

    virtual std::string name() const = 0;
    virtual std::vector<std::pair<std::string, std::string>> parameters() const = 0;
    virtual int intrinsic_dim() const = 0;
    virtual int ambient_dim() const = 0;
    int codim() const { return ambient_dim() - intrinsic_dim(); }
    // The surface lies in the closed ball of this radius around the origin.
    virtual double bounding_radius() const = 0;

    // Critical points of the distance to x, sorted nearest first.
    virtual std::vector<Point> projection_candidates(const PointRef& x) const = 0;
    // Orthonormal d x k tangent basis at a surface point.
    virtual Eigen::MatrixXd tangent_basis(const PointRef& p) const = 0;
    virtual double lfs(const PointRef& p) const = 0;
    virtual double ebs(const PointRef& p) const = 0;
    virtual SurfaceGrid grid(double spacing) const = 0;
    virtual Point random_point(std::mt19937_64& rng) const = 0;

    // Codimension 1 only: a function that vanishes exactly on the surface, negative inside.
    virtual double level(const PointRef& x) const;
    // Codimension 1 only: unit normal pointing out of the enclosed region.
    virtual Point outward_normal(const PointRef& p) const;

    // Nearest surface point. Throws AmbiguityError when two distinct candidates (> 1e-6 apart)
    // are within 1e-9 in distance.
    Point project(const PointRef& x) const;
    // Distance from p to the surface; 0 on the surface.
    double residual(const PointRef& p) const;
    Flat tangent_space(const PointRef& p) const;
    Flat normal_space(const PointRef& p) const;
    // Radius of the largest surface-free ball touching p with center on the ray p + t dir.
    double grow_medial_ball(const PointRef& p, const PointRef& dir, const MedialSearchOptions& opts = {}) const;

protected:
    void require_on_surface(const PointRef& p) const;
};

// Round k-sphere of radius L in the first k+1 coordinates of R^d, centered at the origin.
class SphereModel : public SurfaceModel {
public:
    SphereModel(double radius, int k, int d);

    std::string name() const override { return "sphere"; }
    std::vector<std::pair<std::string, std::string>> parameters() const override;
    int intrinsic_dim() const override { return k_; }
    int ambient_dim() const override { return d_; }
    double bounding_radius() const override { return radius_; }
    std::vector<Point> projection_candidates(const PointRef& x) const override;
    Eigen::MatrixXd tangent_basis(const PointRef& p) const override;
    double lfs(const PointRef&) const override { return radius_; }
    double ebs(const PointRef&) const override { return radius_; }
    SurfaceGrid grid(double spacing) const override;
    Point random_point(std::mt19937_64& rng) const override;
    double level(const PointRef& x) const override;
    Point outward_normal(const PointRef& p) const override;

    double radius() const { return radius_; }

private:
    double radius_;
    int k_;
    int d_;
};

// Torus of revolution around the z-axis: core circle radius R0, tube radius r0 < R0.
class TorusModel : public SurfaceModel {
public:
    TorusModel(double major, double minor);

    std::string name() const override { return "torus"; }
    std::vector<std::pair<std::string, std::string>> parameters() const override;
    int intrinsic_dim() const override { return 2; }
    int ambient_dim() const override { return 3; }
    double bounding_radius() const override { return major_ + minor_; }
    std::vector<Point> projection_candidates(const PointRef& x) const override;
    Eigen::MatrixXd tangent_basis(const PointRef& p) const override;
    // The medial axis is the core circle plus the z-axis.
    double lfs(const PointRef& p) const override;
    double ebs(const PointRef& p) const override;
    SurfaceGrid grid(double spacing) const override;
    Point random_point(std::mt19937_64& rng) const override;
    double level(const PointRef& x) const override;
    Point outward_normal(const PointRef& p) const override;

    Point at(double u, double v) const;
    double major() const { return major_; }
    double minor() const { return minor_; }

private:
    double major_;
    double minor_;
};

// Flat torus {|x12| = rho, |x34| = rho} in R^4 (codimension 2). Medial axis: {x12 = 0} and {x34 = 0}.
class CliffordTorusModel : public SurfaceModel {
public:
    explicit CliffordTorusModel(double rho);

    std::string name() const override { return "clifford"; }
    std::vector<std::pair<std::string, std::string>> parameters() const override;
    int intrinsic_dim() const override { return 2; }
    int ambient_dim() const override { return 4; }
    double bounding_radius() const override { return std::sqrt(2.0) * rho_; }
    std::vector<Point> projection_candidates(const PointRef& x) const override;
    Eigen::MatrixXd tangent_basis(const PointRef& p) const override;
    double lfs(const PointRef&) const override { return rho_; }
    double ebs(const PointRef&) const override { return rho_; }
    SurfaceGrid grid(double spacing) const override;
    Point random_point(std::mt19937_64& rng) const override;

    Point at(double alpha, double beta) const;
    double rho() const { return rho_; }

private:
    double rho_;
};

// Zero set of a smooth function on R^d with nonvanishing gradient there; projection by Newton
// iteration on the Lagrange conditions. lfs is a supplied lower bound since no closed form exists.
class ImplicitSurfaceModel : public SurfaceModel {
public:
    struct Function {
        std::function<double(const Point&)> value;
        std::function<Point(const Point&)> gradient;
        std::function<Eigen::MatrixXd(const Point&)> hessian;  // optional; finite differences otherwise
    };

    ImplicitSurfaceModel(std::string name, std::vector<std::pair<std::string, std::string>> params, int d,
                         Function fn, double bounding_radius, std::function<double(const Point&)> lfs_lower_bound,
                         double seed_spacing);

    // x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 with lfs bounded below by the reach min(a,b,c)^2 / max(a,b,c).
    static std::shared_ptr<ImplicitSurfaceModel> ellipsoid(double a, double b, double c);

    std::string name() const override { return name_; }
    std::vector<std::pair<std::string, std::string>> parameters() const override { return params_; }
    int intrinsic_dim() const override { return d_ - 1; }
    int ambient_dim() const override { return d_; }
    double bounding_radius() const override { return bounding_radius_; }
    std::vector<Point> projection_candidates(const PointRef& x) const override;
    Eigen::MatrixXd tangent_basis(const PointRef& p) const override;
    double lfs(const PointRef& p) const override;
    // Numeric: smallest empty tangent ball over a cached surface grid, refined by descent and capped
    // by the principal curvatures at p.
    double ebs(const PointRef& p) const override;
    // Lattice points near the zero set, pushed onto it. Covering radius is the lattice-derived estimate sqrt(d) * spacing.
    SurfaceGrid grid(double spacing) const override;
    Point random_point(std::mt19937_64& rng) const override;
    double level(const PointRef& x) const override;
    Point outward_normal(const PointRef& p) const override;

private:
    Point foot_point(Point y) const;
    bool newton_critical_point(const Point& x, Point y, Point& out) const;
    Eigen::MatrixXd hessian(const Point& y) const;

    std::string name_;
    std::vector<std::pair<std::string, std::string>> params_;
    int d_;
    Function fn_;
    double bounding_radius_;
    std::function<double(const Point&)> lfs_lower_;
    Eigen::MatrixXd seeds_;
    mutable std::once_flag ebs_grid_once_;
    mutable Eigen::MatrixXd ebs_grid_;
};

// Largest violation of the 1-Lipschitz property of lfs over random pairs: max(lfs(p) - lfs(q) - |pq|).
double lipschitz_check(const SurfaceModel& s, int trials, std::uint64_t seed);

}  // namespace surfacc
