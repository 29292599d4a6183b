#include "surfacc/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "surfacc/errors.hpp"

namespace surfacc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void sort_by_distance(std::vector<Point>& cands, const PointRef& x) {
    std::sort(cands.begin(), cands.end(),
              [&](const Point& a, const Point& b) { return (a - x).squaredNorm() < (b - x).squaredNorm(); });
}

void require_dim(const PointRef& x, int d) {
    if (x.size() != d) throw PreconditionError("point has dimension " + std::to_string(x.size()) + ", expected " +
                                               std::to_string(d));
    if (!x.allFinite()) throw PreconditionError("point has non-finite coordinates");
}

void require_spacing(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("grid spacing must be positive");
}

// Columns spanning the orthogonal complement of the unit vector n inside the first m coordinates of R^d.
Eigen::MatrixXd complement_in(const Eigen::VectorXd& n, int m, int d) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(n.head(m));
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, m - 1);
    out.topRows(m) = q.rightCols(m - 1);
    return out;
}

std::size_t ring_count(double circumference, double h) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(circumference / h - 1e-12)));
}

// Smallest clearance min_s |c - s| found from the grid, refined by descent along the surface.
class ClearanceProbe {
public:
    ClearanceProbe(const SurfaceModel& s, const SurfaceGrid& g, int seeds) : s_(s), g_(g), seeds_(seeds) {}

    double min_distance(const Point& c) const {
        const Eigen::Index n = g_.points.cols();
        std::vector<double> d2(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (g_.points.col(i) - c).squaredNorm();
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(seeds_), idx.size());
        std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                          [&](Eigen::Index a, Eigen::Index b) { return d2[static_cast<std::size_t>(a)] < d2[static_cast<std::size_t>(b)]; });
        double best = std::sqrt(d2[static_cast<std::size_t>(idx[0])]);
        for (std::size_t j = 0; j < k; ++j) best = std::min(best, descend(c, g_.points.col(idx[j])));
        return best;
    }

private:
    double descend(const Point& c, Point s) const {
        double d = (c - s).norm();
        for (int it = 0; it < 200; ++it) {
            const Eigen::MatrixXd t = s_.tangent_basis(s);
            const Eigen::VectorXd w = t.transpose() * (c - s);
            if (w.norm() <= 1e-15 * (1.0 + d)) break;
            bool improved = false;
            double alpha = 1.0;
            for (int bt = 0; bt < 40 && !improved; ++bt, alpha *= 0.5) {
                Point trial;
                try {
                    trial = s_.project(s + alpha * (t * w));
                } catch (const AmbiguityError&) {
                    continue;
                }
                const double dt = (c - trial).norm();
                if (dt < d) {
                    s = trial;
                    d = dt;
                    improved = true;
                }
            }
            if (!improved) break;
        }
        return d;
    }

    const SurfaceModel& s_;
    const SurfaceGrid& g_;
    int seeds_;
};

}  // namespace

// ---- SurfaceModel --------------------------------------------------------------------------

double SurfaceModel::level(const PointRef&) const {
    throw PreconditionError(name() + ": level function exists only in codimension 1");
}

Point SurfaceModel::outward_normal(const PointRef&) const {
    throw PreconditionError(name() + ": outward normal exists only in codimension 1");
}

Point SurfaceModel::project(const PointRef& x) const {
    require_dim(x, ambient_dim());
    const std::vector<Point> cands = projection_candidates(x);
    if (cands.empty()) throw ConvergenceError(name() + ": no projection candidate found");
    const Point& best = cands.front();
    const double dbest = (x - best).norm();
    for (std::size_t i = 1; i < cands.size(); ++i) {
        if ((cands[i] - best).norm() > 1e-6 && (x - cands[i]).norm() - dbest <= 1e-9)
            throw AmbiguityError(name() + ": query point has two nearest surface points");
    }
    return best;
}

double SurfaceModel::residual(const PointRef& p) const {
    require_dim(p, ambient_dim());
    const std::vector<Point> cands = projection_candidates(p);
    if (cands.empty()) throw ConvergenceError(name() + ": no projection candidate found");
    return (p - cands.front()).norm();
}

void SurfaceModel::require_on_surface(const PointRef& p) const {
    if (residual(p) > 1e-8 * std::max(1.0, bounding_radius()))
        throw PreconditionError(name() + ": point is not on the surface");
}

Flat SurfaceModel::tangent_space(const PointRef& p) const {
    require_on_surface(p);
    return Flat(p, tangent_basis(p));
}

Flat SurfaceModel::normal_space(const PointRef& p) const { return orthogonal_complement(tangent_space(p)); }

double SurfaceModel::grow_medial_ball(const PointRef& p, const PointRef& dir, const MedialSearchOptions& opts) const {
    require_on_surface(p);
    require_dim(dir, ambient_dim());
    if (!(dir.norm() > 0.0)) throw PreconditionError("medial ball direction is zero");
    const Point n = dir.normalized();
    if ((tangent_basis(p).transpose() * n).norm() > 1e-8)
        throw PreconditionError("medial ball direction is not normal to the surface");

    const double spacing = opts.grid_spacing > 0.0 ? opts.grid_spacing : bounding_radius() / 100.0;
    const double max_radius = opts.max_radius > 0.0 ? opts.max_radius : 1000.0 * bounding_radius();
    const SurfaceGrid g = grid(spacing);
    const ClearanceProbe probe(*this, g, opts.refine_seeds);
    const Point base = p;
    auto violated = [&](double rho) {
        return probe.min_distance(base + rho * n) - rho < -1e-12 * std::max(1.0, rho);
    };

    double lo = 0.0;
    double hi = bounding_radius() / 16.0;
    while (!violated(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > max_radius) return kUnboundedRadius;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (violated(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double lipschitz_check(const SurfaceModel& s, int trials, std::uint64_t seed) {
    if (trials < 1) throw PreconditionError("lipschitz_check needs at least one trial");
    std::mt19937_64 rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < trials; ++i) {
        const Point p = s.random_point(rng);
        const Point q = s.random_point(rng);
        worst = std::max(worst, s.lfs(p) - s.lfs(q) - (p - q).norm());
    }
    return worst;
}

// ---- SphereModel ---------------------------------------------------------------------------

SphereModel::SphereModel(double radius, int k, int d) : radius_(radius), k_(k), d_(d) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw PreconditionError("sphere radius must be positive");
    if (k < 1 || k >= d) throw PreconditionError("sphere needs 1 <= k < d");
}

std::vector<std::pair<std::string, std::string>> SphereModel::parameters() const {
    return {{"radius", num(radius_)}, {"k", std::to_string(k_)}, {"d", std::to_string(d_)}};
}

std::vector<Point> SphereModel::projection_candidates(const PointRef& x) const {
    require_dim(x, d_);
    Point dir = Point::Zero(d_);
    const double len = x.head(k_ + 1).norm();
    if (len > 0.0)
        dir.head(k_ + 1) = x.head(k_ + 1) / len;
    else
        dir(0) = 1.0;
    std::vector<Point> c{radius_ * dir, -radius_ * dir};
    sort_by_distance(c, x);
    return c;
}

Eigen::MatrixXd SphereModel::tangent_basis(const PointRef& p) const {
    require_dim(p, d_);
    const double len = p.head(k_ + 1).norm();
    if (!(len > 0.0)) throw PreconditionError("sphere tangent basis at the center");
    return complement_in(p / len, k_ + 1, d_);
}

SurfaceGrid SphereModel::grid(double h) const {
    require_spacing(h);
    std::vector<Point> pts;
    if (k_ == 1) {
        const std::size_t n = ring_count(std::numbers::pi * radius_, h);
        for (std::size_t i = 0; i < n; ++i) {
            Point p = Point::Zero(d_);
            const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
            p(0) = radius_ * std::cos(t);
            p(1) = radius_ * std::sin(t);
            pts.push_back(p);
        }
    } else if (k_ == 2) {
        // Latitude rings h apart; points on each ring at most h apart. Covering radius <= h.
        const std::size_t rings = ring_count(std::numbers::pi * radius_, h);
        for (std::size_t i = 0; i <= rings; ++i) {
            const double th = std::numbers::pi * static_cast<double>(i) / static_cast<double>(rings);
            const double rr = radius_ * std::sin(th);
            const std::size_t m = (i == 0 || i == rings) ? 1 : ring_count(kTwoPi * rr, h);
            for (std::size_t j = 0; j < m; ++j) {
                const double ph = kTwoPi * static_cast<double>(j) / static_cast<double>(m);
                Point p = Point::Zero(d_);
                p(0) = rr * std::cos(ph);
                p(1) = rr * std::sin(ph);
                p(2) = radius_ * std::cos(th);
                pts.push_back(p);
            }
        }
    } else {
        throw ConfigError("sphere grids are implemented for k <= 2");
    }
    SurfaceGrid g{Eigen::MatrixXd(d_, static_cast<Eigen::Index>(pts.size())), h};
    for (std::size_t i = 0; i < pts.size(); ++i) g.points.col(static_cast<Eigen::Index>(i)) = pts[i];
    return g;
}

Point SphereModel::random_point(std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss;
    Point p = Point::Zero(d_);
    do {
        for (int i = 0; i <= k_; ++i) p(i) = gauss(rng);
    } while (p.norm() < 1e-12);
    return radius_ * p / p.norm();
}

double SphereModel::level(const PointRef& x) const {
    if (k_ != d_ - 1) return SurfaceModel::level(x);
    require_dim(x, d_);
    return x.norm() - radius_;
}

Point SphereModel::outward_normal(const PointRef& p) const {
    if (k_ != d_ - 1) return SurfaceModel::outward_normal(p);
    require_dim(p, d_);
    return p.normalized();
}

// ---- TorusModel ----------------------------------------------------------------------------

TorusModel::TorusModel(double major, double minor) : major_(major), minor_(minor) {
    if (!(minor > 0.0) || !(major > minor) || !std::isfinite(major))
        throw PreconditionError("torus needs 0 < r0 < R0");
}

std::vector<std::pair<std::string, std::string>> TorusModel::parameters() const {
    return {{"R0", num(major_)}, {"r0", num(minor_)}};
}

Point TorusModel::at(double u, double v) const {
    const double rho = major_ + minor_ * std::cos(v);
    return Eigen::Vector3d(rho * std::cos(u), rho * std::sin(u), minor_ * std::sin(v));
}

std::vector<Point> TorusModel::projection_candidates(const PointRef& x) const {
    require_dim(x, 3);
    const double rho = std::hypot(x(0), x(1));
    const double u = rho > 0.0 ? std::atan2(x(1), x(0)) : 0.0;
    const Point c = Eigen::Vector3d(major_ * std::cos(u), major_ * std::sin(u), 0.0);
    const Point w = x - c;
    std::vector<Point> out;
    if (w.norm() > 0.0) {
        out.push_back(c + minor_ * w.normalized());
        out.push_back(c - minor_ * w.normalized());
    } else {
        // On the core circle: every point of the meridian circle is nearest.
        const Point radial = c.normalized();
        out.push_back(c + minor_ * radial);
        out.push_back(c + minor_ * Eigen::Vector3d(0.0, 0.0, 1.0));
    }
    const Point w2 = x + c;  // meridian circle on the opposite side of the axis
    out.push_back(-c + minor_ * (w2.norm() > 0.0 ? Point(w2.normalized()) : Point(-c.normalized())));
    sort_by_distance(out, x);
    return out;
}

Eigen::MatrixXd TorusModel::tangent_basis(const PointRef& p) const {
    require_dim(p, 3);
    const double rho = std::hypot(p(0), p(1));
    if (!(rho > 0.0)) throw PreconditionError("torus tangent basis on the axis");
    const double u = std::atan2(p(1), p(0));
    const double v = std::atan2(p(2), rho - major_);
    Eigen::MatrixXd t(3, 2);
    t.col(0) = Eigen::Vector3d(-std::sin(u), std::cos(u), 0.0);
    t.col(1) = Eigen::Vector3d(-std::sin(v) * std::cos(u), -std::sin(v) * std::sin(u), std::cos(v));
    return t;
}

double TorusModel::lfs(const PointRef& p) const {
    require_dim(p, 3);
    return std::min(minor_, std::hypot(p(0), p(1)));
}

double TorusModel::ebs(const PointRef& p) const {
    require_dim(p, 3);
    const double rho = std::hypot(p(0), p(1));
    const double cv = (rho - major_) / minor_;
    // Inward balls stop at the core circle; outward balls on the inner half stop at the axis.
    if (cv < 0.0) return std::min(minor_, rho / -cv);
    return minor_;
}

SurfaceGrid TorusModel::grid(double h) const {
    require_spacing(h);
    const std::size_t nv = ring_count(kTwoPi * minor_, h);
    std::vector<Point> pts;
    for (std::size_t j = 0; j < nv; ++j) {
        const double v = kTwoPi * static_cast<double>(j) / static_cast<double>(nv);
        const std::size_t nu = ring_count(kTwoPi * (major_ + minor_ * std::cos(v)), h);
        for (std::size_t i = 0; i < nu; ++i) pts.push_back(at(kTwoPi * static_cast<double>(i) / static_cast<double>(nu), v));
    }
    SurfaceGrid g{Eigen::MatrixXd(3, static_cast<Eigen::Index>(pts.size())), h};
    for (std::size_t i = 0; i < pts.size(); ++i) g.points.col(static_cast<Eigen::Index>(i)) = pts[i];
    return g;
}

Point TorusModel::random_point(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
        const double u = ang(rng);
        const double v = ang(rng);
        if (unit(rng) * (major_ + minor_) <= major_ + minor_ * std::cos(v)) return at(u, v);
    }
}

double TorusModel::level(const PointRef& x) const {
    require_dim(x, 3);
    return std::hypot(std::hypot(x(0), x(1)) - major_, x(2)) - minor_;
}

Point TorusModel::outward_normal(const PointRef& p) const {
    require_dim(p, 3);
    const double rho = std::hypot(p(0), p(1));
    if (!(rho > 0.0)) throw PreconditionError("torus normal on the axis");
    const Point c = Eigen::Vector3d(p(0) / rho * major_, p(1) / rho * major_, 0.0);
    return (p - c).normalized();
}

// ---- CliffordTorusModel --------------------------------------------------------------------

CliffordTorusModel::CliffordTorusModel(double rho) : rho_(rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw PreconditionError("Clifford torus radius must be positive");
}

std::vector<std::pair<std::string, std::string>> CliffordTorusModel::parameters() const { return {{"rho", num(rho_)}}; }

Point CliffordTorusModel::at(double alpha, double beta) const {
    return Eigen::Vector4d(rho_ * std::cos(alpha), rho_ * std::sin(alpha), rho_ * std::cos(beta), rho_ * std::sin(beta));
}

std::vector<Point> CliffordTorusModel::projection_candidates(const PointRef& x) const {
    require_dim(x, 4);
    auto unit2 = [](const Eigen::Vector2d& a) -> Eigen::Vector2d {
        return a.norm() > 0.0 ? Eigen::Vector2d(a.normalized()) : Eigen::Vector2d(1.0, 0.0);
    };
    const Eigen::Vector2d a = unit2(x.head(2));
    const Eigen::Vector2d b = unit2(x.tail(2));
    std::vector<Point> out;
    for (double sa : {1.0, -1.0})
        for (double sb : {1.0, -1.0}) {
            Point p(4);
            p << rho_ * sa * a, rho_ * sb * b;
            out.push_back(p);
        }
    sort_by_distance(out, x);
    return out;
}

Eigen::MatrixXd CliffordTorusModel::tangent_basis(const PointRef& p) const {
    require_dim(p, 4);
    if (!(p.head(2).norm() > 0.0) || !(p.tail(2).norm() > 0.0))
        throw PreconditionError("Clifford torus tangent basis on the medial axis");
    const double al = std::atan2(p(1), p(0));
    const double be = std::atan2(p(3), p(2));
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 2);
    t(0, 0) = -std::sin(al);
    t(1, 0) = std::cos(al);
    t(2, 1) = -std::sin(be);
    t(3, 1) = std::cos(be);
    return t;
}

SurfaceGrid CliffordTorusModel::grid(double h) const {
    require_spacing(h);
    const std::size_t n = ring_count(kTwoPi * rho_, h);
    SurfaceGrid g{Eigen::MatrixXd(4, static_cast<Eigen::Index>(n * n)), h};
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            g.points.col(col++) = at(kTwoPi * static_cast<double>(i) / static_cast<double>(n),
                                     kTwoPi * static_cast<double>(j) / static_cast<double>(n));
    return g;
}

Point CliffordTorusModel::random_point(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    const double a = ang(rng);
    return at(a, ang(rng));
}

// ---- ImplicitSurfaceModel ------------------------------------------------------------------

ImplicitSurfaceModel::ImplicitSurfaceModel(std::string name, std::vector<std::pair<std::string, std::string>> params,
                                           int d, Function fn, double bounding_radius,
                                           std::function<double(const Point&)> lfs_lower_bound, double seed_spacing)
    : name_(std::move(name)),
      params_(std::move(params)),
      d_(d),
      fn_(std::move(fn)),
      bounding_radius_(bounding_radius),
      lfs_lower_(std::move(lfs_lower_bound)) {
    if (d < 2) throw PreconditionError("implicit surfaces need d >= 2");
    if (!fn_.value || !fn_.gradient) throw PreconditionError("implicit surface needs value and gradient");
    if (!(bounding_radius > 0.0)) throw PreconditionError("bounding radius must be positive");
    if (!lfs_lower_) throw PreconditionError("implicit surface needs an lfs lower bound");
    seeds_ = grid(seed_spacing).points;
    if (seeds_.cols() == 0) throw ConfigError(name_ + ": no surface points found in the bounding ball");
}

std::shared_ptr<ImplicitSurfaceModel> ImplicitSurfaceModel::ellipsoid(double a, double b, double c) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw PreconditionError("ellipsoid semi-axes must be positive");
    const Eigen::Vector3d inv2(1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c));
    Function fn;
    fn.value = [inv2](const Point& x) { return x.cwiseProduct(x).dot(inv2) - 1.0; };
    fn.gradient = [inv2](const Point& x) -> Point { return 2.0 * x.cwiseProduct(inv2); };
    fn.hessian = [inv2](const Point&) -> Eigen::MatrixXd { return (2.0 * inv2).asDiagonal(); };
    const double lo = std::min({a, b, c});
    const double hi = std::max({a, b, c});
    const double reach = lo * lo / hi;
    return std::make_shared<ImplicitSurfaceModel>(
        "ellipsoid", std::vector<std::pair<std::string, std::string>>{{"a", num(a)}, {"b", num(b)}, {"c", num(c)}}, 3,
        std::move(fn), hi, [reach](const Point&) { return reach; }, hi / 12.0);
}

Eigen::MatrixXd ImplicitSurfaceModel::hessian(const Point& y) const {
    if (fn_.hessian) return fn_.hessian(y);
    const double h = 1e-5 * std::max(1.0, bounding_radius_);
    Eigen::MatrixXd hm(d_, d_);
    for (int i = 0; i < d_; ++i) {
        Point e = Point::Zero(d_);
        e(i) = h;
        hm.col(i) = (fn_.gradient(y + e) - fn_.gradient(y - e)) / (2.0 * h);
    }
    return 0.5 * (hm + hm.transpose());
}

Point ImplicitSurfaceModel::foot_point(Point y) const {
    const double tol = 1e-15 * std::max(1.0, bounding_radius_);
    for (int it = 0; it < 100; ++it) {
        const Point g = fn_.gradient(y);
        const double g2 = g.squaredNorm();
        if (!(g2 > 0.0)) throw ConvergenceError(name_ + ": vanishing gradient");
        const double f = fn_.value(y);
        y -= f / g2 * g;
        if (std::abs(f) / std::sqrt(g2) <= tol) break;
    }
    return y;
}

bool ImplicitSurfaceModel::newton_critical_point(const Point& x, Point y, Point& out) const {
    const double scale = std::max(1.0, bounding_radius_);
    Point g = fn_.gradient(y);
    double lambda = (x - y).dot(g) / g.squaredNorm();
    for (int it = 0; it < 60; ++it) {
        g = fn_.gradient(y);
        const double f = fn_.value(y);
        Eigen::VectorXd r(d_ + 1);
        r.head(d_) = y - x + lambda * g;
        r(d_) = f;
        const double gn = g.norm();
        if (r.head(d_).norm() <= 1e-13 * scale && std::abs(f) / gn <= 1e-14 * scale) {
            out = y;
            return true;
        }
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(d_ + 1, d_ + 1);
        j.topLeftCorner(d_, d_) = Eigen::MatrixXd::Identity(d_, d_) + lambda * hessian(y);
        j.topRightCorner(d_, 1) = g;
        j.bottomLeftCorner(1, d_) = g.transpose();
        const Eigen::VectorXd step = j.fullPivLu().solve(r);
        if (!step.allFinite()) return false;
        y -= step.head(d_);
        lambda -= step(d_);
        if (!y.allFinite() || y.norm() > 10.0 * bounding_radius_ + (x.norm())) return false;
    }
    return false;
}

std::vector<Point> ImplicitSurfaceModel::projection_candidates(const PointRef& x) const {
    require_dim(x, d_);
    const Point xp = x;
    std::vector<Point> starts;
    starts.push_back(foot_point(xp));
    std::vector<std::pair<double, Eigen::Index>> near;
    near.reserve(static_cast<std::size_t>(seeds_.cols()));
    for (Eigen::Index i = 0; i < seeds_.cols(); ++i) near.emplace_back((seeds_.col(i) - xp).squaredNorm(), i);
    const auto k = std::min<std::size_t>(4, near.size());
    std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(k), near.end());
    for (std::size_t i = 0; i < k; ++i) starts.push_back(seeds_.col(near[i].second));

    std::vector<Point> out;
    for (const auto& s : starts) {
        Point y;
        if (!newton_critical_point(xp, s, y)) continue;
        const bool dup = std::any_of(out.begin(), out.end(), [&](const Point& o) { return (o - y).norm() <= 1e-9; });
        if (!dup) out.push_back(y);
    }
    if (out.empty()) throw ConvergenceError(name_ + ": projection did not converge");
    sort_by_distance(out, x);
    return out;
}

Eigen::MatrixXd ImplicitSurfaceModel::tangent_basis(const PointRef& p) const {
    require_dim(p, d_);
    const Point g = fn_.gradient(p);
    if (!(g.norm() > 0.0)) throw ConvergenceError(name_ + ": vanishing gradient");
    return complement_in(g.normalized(), d_, d_);
}

double ImplicitSurfaceModel::lfs(const PointRef& p) const {
    require_dim(p, d_);
    return lfs_lower_(p);
}

double ImplicitSurfaceModel::ebs(const PointRef& p) const {
    require_on_surface(p);
    std::call_once(ebs_grid_once_, [this] { ebs_grid_ = grid(bounding_radius_ / 100.0).points; });
    const Point pp = p;
    const Point g = fn_.gradient(pp);
    const Point n = g.normalized();
    const Eigen::MatrixXd t = tangent_basis(pp);
    // Normal curvatures n . s'' of surface curves through p, as a quadratic form on the tangent space.
    const Eigen::MatrixXd shape = -(t.transpose() * hessian(pp) * t) / g.norm();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shape);

    double best = std::numeric_limits<double>::infinity();
    for (const double sign : {1.0, -1.0}) {
        const Point sigma = sign * n;
        const double bend = sign > 0.0 ? es.eigenvalues().maxCoeff() : -es.eigenvalues().minCoeff();
        double side = bend > 0.0 ? 1.0 / bend : std::numeric_limits<double>::infinity();
        // The ball centered at p + rho sigma avoids s iff rho <= |s - p|^2 / (2 sigma . (s - p)).
        auto ratio = [&](const Point& q) {
            const Point d = q - pp;
            const double lift = sigma.dot(d);
            return lift > 0.0 ? d.squaredNorm() / (2.0 * lift) : std::numeric_limits<double>::infinity();
        };
        const Eigen::MatrixXd diff = ebs_grid_.colwise() - pp;
        const Eigen::RowVectorXd lift = sigma.transpose() * diff;
        const Eigen::RowVectorXd sq = diff.colwise().squaredNorm();
        std::vector<std::pair<double, Eigen::Index>> cand;
        for (Eigen::Index i = 0; i < ebs_grid_.cols(); ++i)
            if (lift(i) > 0.0) cand.emplace_back(sq(i) / (2.0 * lift(i)), i);
        const auto k = std::min<std::size_t>(4, cand.size());
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
        for (std::size_t j = 0; j < k; ++j) {
            Point q = ebs_grid_.col(cand[j].second);
            double r = cand[j].first;
            double alpha = 0.0;
            for (int it = 0; it < 200; ++it) {
                const Point d = q - pp;
                const double lift = 2.0 * sigma.dot(d);
                const Point grad = (2.0 * d * lift - d.squaredNorm() * 2.0 * sigma) / (lift * lift);
                const Eigen::MatrixXd tq = tangent_basis(q);
                const Point step = tq * (tq.transpose() * grad);
                if (step.norm() <= 1e-15) break;
                bool improved = false;
                alpha = alpha > 0.0 ? 4.0 * alpha : 0.25 * r / step.norm();
                for (int bt = 0; bt < 60 && !improved; ++bt, alpha *= 0.5) {
                    Point trial;
                    try {
                        trial = project(q - alpha * step);
                    } catch (const AmbiguityError&) {
                        continue;
                    }
                    const double rt = ratio(trial);
                    if (rt < r) {
                        improved = r - rt > 1e-14 * r;
                        q = trial;
                        r = rt;
                        if (!improved) break;
                    }
                }
                if (!improved) break;
                alpha *= 2.0;
            }
            side = std::min(side, r);
        }
        best = std::min(best, side);
    }
    return best;
}

SurfaceGrid ImplicitSurfaceModel::grid(double h) const {
    require_spacing(h);
    // Coarse cells that may meet the zero set are refined to the lattice of spacing h.
    const double extent = 1.05 * bounding_radius_;
    const auto per_axis = static_cast<long>(std::ceil(2.0 * extent / h)) + 1;
    const long block = std::max<long>(1, std::min<long>(per_axis, 16));
    const long blocks = (per_axis + block - 1) / block;
    const double coarse = static_cast<double>(block) * h;
    std::vector<Point> pts;
    std::vector<long> bidx(static_cast<std::size_t>(d_), 0);
    auto lattice = [&](const std::vector<long>& idx) {
        Point y(d_);
        for (int i = 0; i < d_; ++i) y(i) = -extent + h * static_cast<double>(idx[static_cast<std::size_t>(i)]);
        return y;
    };
    auto near_surface = [&](const Point& y, double radius) {
        const Point g = fn_.gradient(y);
        const double gn = g.norm();
        return gn > 0.0 && std::abs(fn_.value(y)) / gn <= radius;
    };
    for (;;) {
        std::vector<long> lo(static_cast<std::size_t>(d_));
        Point center(d_);
        for (int i = 0; i < d_; ++i) {
            lo[static_cast<std::size_t>(i)] = bidx[static_cast<std::size_t>(i)] * block;
            center(i) = -extent + h * static_cast<double>(lo[static_cast<std::size_t>(i)]) + 0.5 * coarse;
        }
        if (near_surface(center, 2.0 * coarse * std::sqrt(static_cast<double>(d_)))) {
            std::vector<long> off(static_cast<std::size_t>(d_), 0);
            for (;;) {
                std::vector<long> idx(static_cast<std::size_t>(d_));
                bool inside = true;
                for (int i = 0; i < d_; ++i) {
                    idx[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + off[static_cast<std::size_t>(i)];
                    inside = inside && idx[static_cast<std::size_t>(i)] < per_axis;
                }
                if (inside) {
                    const Point y = lattice(idx);
                    if (near_surface(y, h)) pts.push_back(foot_point(y));
                }
                int i = 0;
                while (i < d_ && ++off[static_cast<std::size_t>(i)] == block) off[static_cast<std::size_t>(i++)] = 0;
                if (i == d_) break;
            }
        }
        int i = 0;
        while (i < d_ && ++bidx[static_cast<std::size_t>(i)] == blocks) bidx[static_cast<std::size_t>(i++)] = 0;
        if (i == d_) break;
    }
    SurfaceGrid g{Eigen::MatrixXd(d_, static_cast<Eigen::Index>(pts.size())), std::sqrt(static_cast<double>(d_)) * h};
    for (std::size_t i = 0; i < pts.size(); ++i) g.points.col(static_cast<Eigen::Index>(i)) = pts[i];
    return g;
}

Point ImplicitSurfaceModel::random_point(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> coord(-bounding_radius_, bounding_radius_);
    for (;;) {
        Point y(d_);
        for (int i = 0; i < d_; ++i) y(i) = coord(rng);
        if (fn_.gradient(y).norm() < 1e-8) continue;
        return project(foot_point(y));
    }
}

double ImplicitSurfaceModel::level(const PointRef& x) const {
    require_dim(x, d_);
    return fn_.value(x);
}

Point ImplicitSurfaceModel::outward_normal(const PointRef& p) const {
    require_dim(p, d_);
    const Point g = fn_.gradient(p);
    if (!(g.norm() > 0.0)) throw ConvergenceError(name_ + ": vanishing gradient");
    return g.normalized();
}

}  // namespace surfacc
