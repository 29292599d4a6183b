#include "surfacc/rdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "predicates.hpp"
#include "surfacc/errors.hpp"

namespace surfacc {

namespace {

using detail::insphere;
using detail::orient3d;

constexpr double kBoundingScale = 1e6;

Vec3 triangle_circumcenter(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 u = b - a;
    const Vec3 v = c - a;
    const Vec3 w = u.cross(v);
    return a + (u.squaredNorm() * v.cross(w) + v.squaredNorm() * w.cross(u)) / (2.0 * w.squaredNorm());
}

Vec3 tet_circumcenter(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const Vec3 u = b - a;
    const Vec3 v = c - a;
    const Vec3 t = d - a;
    return a + (u.squaredNorm() * v.cross(t) + v.squaredNorm() * t.cross(u) + t.squaredNorm() * u.cross(v)) /
                   (2.0 * u.dot(v.cross(t)));
}

}  // namespace

// ---- Delaunay3 -----------------------------------------------------------------------------

Delaunay3::Delaunay3(std::vector<Vec3> points) : n_(points.size()), pts_(std::move(points)) {
    if (n_ < 4) throw PreconditionError("Delaunay triangulation needs at least 4 points");
    if (n_ > static_cast<std::size_t>(std::numeric_limits<int>::max() / 8)) throw PreconditionError("too many points");
    for (const auto& p : pts_)
        if (!p.allFinite()) throw PreconditionError("Delaunay input has non-finite coordinates");

    // Reject inputs without four affinely independent points.
    std::size_t b = 1;
    while (b < n_ && pts_[b] == pts_[0]) ++b;
    std::size_t c = b + 1;
    while (c < n_ && detail::collinear(pts_[0], pts_[b], pts_[c])) ++c;
    std::size_t d = c + 1;
    while (d < n_ && orient3d(pts_[0], pts_[b], pts_[c], pts_[d]) == 0) ++d;
    if (b >= n_ || c >= n_ || d >= n_) throw DegeneracyError("all points are coplanar");

    Vec3 lo = pts_[0];
    Vec3 hi = pts_[0];
    for (const auto& p : pts_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec3 center = 0.5 * (lo + hi);
    double radius = 0.0;
    for (const auto& p : pts_) radius = std::max(radius, (p - center).norm());
    const double far = kBoundingScale * radius;
    const Vec3 dirs[4] = {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
    for (const auto& dv : dirs) pts_.push_back(center + far * dv.normalized());
    const int s = static_cast<int>(n_);
    Tet root{{s, s + 1, s + 2, s + 3}, {-1, -1, -1, -1}};
    if (orient3d(pts_[root.v[0]], pts_[root.v[1]], pts_[root.v[2]], pts_[root.v[3]]) < 0) std::swap(root.v[2], root.v[3]);
    tets_.push_back(root);
    alive_.push_back(1);
    mark_.push_back(0);

    for (int p = 0; p < s; ++p) insert(p);
}

bool Delaunay3::conflict(const Tet& t, int p) const {
    const int s = insphere(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], pts_[t.v[3]], pts_[p]);
    if (s != 0) return s > 0;
    // Cospherical: raise the lift of each point by an infinitesimal that grows with its index and
    // take the sign of the dominant term.
    std::array<int, 5> ids{t.v[0], t.v[1], t.v[2], t.v[3], p};
    std::sort(ids.begin(), ids.end(), std::greater<int>());
    for (int id : ids) {
        if (id == p) return false;
        const int i = static_cast<int>(std::find(t.v.begin(), t.v.end(), id) - t.v.begin());
        std::array<int, 4> v = t.v;
        v[static_cast<std::size_t>(i)] = p;
        const int o = orient3d(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[v[3]]);
        if (o != 0) return o > 0;
    }
    return false;
}

int Delaunay3::locate(int p) {
    int t = last_;
    const std::size_t max_steps = 4 * tets_.size() + 16;
    for (std::size_t step = 0; step < max_steps; ++step) {
        walk_state_ = walk_state_ * 1664525u + 1013904223u;
        const int start = static_cast<int>(walk_state_ >> 30);
        bool moved = false;
        for (int k = 0; k < 4; ++k) {
            const int i = (start + k) & 3;
            std::array<int, 4> v = tets_[static_cast<std::size_t>(t)].v;
            v[static_cast<std::size_t>(i)] = p;
            if (orient3d(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[v[3]]) < 0) {
                const int nb = tets_[static_cast<std::size_t>(t)].n[static_cast<std::size_t>(i)];
                if (nb < 0) break;
                t = nb;
                moved = true;
                break;
            }
        }
        if (!moved) {
            bool inside = true;
            for (int i = 0; i < 4 && inside; ++i) {
                std::array<int, 4> v = tets_[static_cast<std::size_t>(t)].v;
                v[static_cast<std::size_t>(i)] = p;
                inside = orient3d(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[v[3]]) >= 0;
            }
            if (inside) return t;
            break;
        }
    }
    for (std::size_t k = 0; k < tets_.size(); ++k) {
        if (!alive_[k]) continue;
        bool inside = true;
        for (int i = 0; i < 4 && inside; ++i) {
            std::array<int, 4> v = tets_[k].v;
            v[static_cast<std::size_t>(i)] = p;
            inside = orient3d(pts_[v[0]], pts_[v[1]], pts_[v[2]], pts_[v[3]]) >= 0;
        }
        if (inside) return static_cast<int>(k);
    }
    throw ConsistencyError("Delaunay point location failed");
}

void Delaunay3::insert(int p) {
    const int t0 = locate(p);
    for (int v : tets_[static_cast<std::size_t>(t0)].v)
        if (pts_[static_cast<std::size_t>(v)] == pts_[static_cast<std::size_t>(p)])
            throw DuplicatePointError("duplicate point: index " + std::to_string(p) + " repeats index " + std::to_string(v));

    ++epoch_;
    const std::uint32_t in = 2 * epoch_;
    const std::uint32_t out = 2 * epoch_ + 1;
    std::vector<int> cavity{t0};
    mark_[static_cast<std::size_t>(t0)] = in;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
        const Tet& c = tets_[static_cast<std::size_t>(cavity[k])];
        for (int nb : c.n) {
            if (nb < 0) continue;
            auto& m = mark_[static_cast<std::size_t>(nb)];
            if (m == in || m == out) continue;
            if (conflict(tets_[static_cast<std::size_t>(nb)], p)) {
                m = in;
                cavity.push_back(nb);
            } else {
                m = out;
            }
        }
    }

    std::map<std::pair<int, int>, std::pair<int, int>> open_faces;
    int any_new = -1;
    for (int ci : cavity) {
        const Tet c = tets_[static_cast<std::size_t>(ci)];
        for (int i = 0; i < 4; ++i) {
            const int nb = c.n[static_cast<std::size_t>(i)];
            if (nb >= 0 && mark_[static_cast<std::size_t>(nb)] == in) continue;
            Tet t{c.v, {-1, -1, -1, -1}};
            t.v[static_cast<std::size_t>(i)] = p;
            t.n[static_cast<std::size_t>(i)] = nb;
            if (orient3d(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], pts_[t.v[3]]) <= 0)
                throw ConsistencyError("Delaunay cavity is not star-shaped");
            const int ti = static_cast<int>(tets_.size());
            tets_.push_back(t);
            alive_.push_back(1);
            mark_.push_back(0);
            any_new = ti;
            if (nb >= 0) {
                for (int& back : tets_[static_cast<std::size_t>(nb)].n)
                    if (back == ci) back = ti;
            }
            for (int j = 0; j < 4; ++j) {
                if (j == i) continue;
                int a = -1;
                int b = -1;
                for (int k = 0; k < 4; ++k) {
                    if (k == i || k == j) continue;
                    (a < 0 ? a : b) = t.v[static_cast<std::size_t>(k)];
                }
                const auto key = std::minmax(a, b);
                const auto it = open_faces.find(key);
                if (it == open_faces.end()) {
                    open_faces.emplace(key, std::make_pair(ti, j));
                } else {
                    tets_[static_cast<std::size_t>(ti)].n[static_cast<std::size_t>(j)] = it->second.first;
                    tets_[static_cast<std::size_t>(it->second.first)].n[static_cast<std::size_t>(it->second.second)] = ti;
                    open_faces.erase(it);
                }
            }
        }
    }
    if (!open_faces.empty()) throw ConsistencyError("Delaunay cavity boundary is not closed");
    for (int ci : cavity) alive_[static_cast<std::size_t>(ci)] = 0;
    last_ = any_new;
}

std::vector<std::array<int, 4>> Delaunay3::tetrahedra() const {
    std::vector<std::array<int, 4>> out;
    for (std::size_t k = 0; k < tets_.size(); ++k) {
        if (!alive_[k]) continue;
        const auto& v = tets_[k].v;
        if (std::none_of(v.begin(), v.end(), [&](int x) { return is_bounding(x); })) out.push_back(v);
    }
    return out;
}

std::vector<Delaunay3::Face> Delaunay3::faces() const {
    std::map<std::array<int, 3>, Face> acc;
    for (std::size_t k = 0; k < tets_.size(); ++k) {
        if (!alive_[k]) continue;
        const auto& v = tets_[k].v;
        for (int i = 0; i < 4; ++i) {
            std::array<int, 3> f{};
            int m = 0;
            for (int j = 0; j < 4; ++j)
                if (j != i) f[static_cast<std::size_t>(m++)] = v[static_cast<std::size_t>(j)];
            if (std::any_of(f.begin(), f.end(), [&](int x) { return is_bounding(x); })) continue;
            std::sort(f.begin(), f.end());
            auto [it, fresh] = acc.try_emplace(f, Face{f, {-1, -1}});
            it->second.opposite[fresh ? 0 : 1] = v[static_cast<std::size_t>(i)];
        }
    }
    std::vector<Face> out;
    out.reserve(acc.size());
    for (auto& [key, face] : acc) out.push_back(face);
    return out;
}

// ---- restricted Delaunay -------------------------------------------------------------------

RestrictedDelaunay restricted_delaunay(const SurfaceModel& s, const std::vector<Point>& vertices, const RdtOptions& opts) {
    if (s.ambient_dim() != 3 || s.codim() != 1) throw PreconditionError("restricted Delaunay needs a surface in R^3");
    if (opts.subdivisions < 1) throw ConfigError("need at least one subdivision");
    RestrictedDelaunay out;
    for (const auto& v : vertices) {
        if (v.size() != 3) throw PreconditionError("sample vertices must be in R^3");
        out.vertices.emplace_back(v);
    }
    const Delaunay3 del(out.vertices);
    const auto& pts = del.points();
    const double trunc = opts.ray_truncation * s.bounding_radius();
    const double scale = s.bounding_radius();
    auto level = [&](const Vec3& x) { return s.level(x); };

    for (const auto& face : del.faces()) {
        const Vec3& a = pts[static_cast<std::size_t>(face.v[0])];
        const Vec3& b = pts[static_cast<std::size_t>(face.v[1])];
        const Vec3& c = pts[static_cast<std::size_t>(face.v[2])];
        const Vec3 w = (b - a).cross(c - a);
        if (!(w.norm() > 0.0)) continue;
        const Vec3 n = w.normalized();
        const Vec3 cc = triangle_circumcenter(a, b, c);

        double params[2];
        for (int k = 0; k < 2; ++k) {
            const int apex = face.opposite[static_cast<std::size_t>(k)];
            if (apex < 0) {
                params[k] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const Vec3& q = pts[static_cast<std::size_t>(apex)];
            if (del.is_bounding(apex)) {
                params[k] = (q - cc).dot(n) > 0.0 ? std::numeric_limits<double>::infinity()
                                                  : -std::numeric_limits<double>::infinity();
            } else {
                params[k] = (tet_circumcenter(a, b, c, q) - cc).dot(n);
            }
        }
        if (std::isnan(params[0]) || std::isnan(params[1])) continue;
        double lo = std::min(params[0], params[1]);
        double hi = std::max(params[0], params[1]);
        const double bn = cc.dot(n);
        const double disc = bn * bn - (cc.squaredNorm() - trunc * trunc);
        if (disc <= 0.0) continue;
        lo = std::max(lo, -bn - std::sqrt(disc));
        hi = std::min(hi, -bn + std::sqrt(disc));
        if (!(hi > lo)) continue;

        auto at = [&](double t) -> Vec3 { return cc + t * n; };
        auto f = [&](double t) { return level(at(t)); };
        auto bisect = [&](double ta, double fa, double tb) {
            for (int it = 0; it < 200 && tb - ta > opts.bisection_tol; ++it) {
                const double tm = 0.5 * (ta + tb);
                const double fm = f(tm);
                if (fm == 0.0) return tm;
                if ((fm < 0.0) == (fa < 0.0)) {
                    ta = tm;
                    fa = fm;
                } else {
                    tb = tm;
                }
            }
            return 0.5 * (ta + tb);
        };

        const int m = opts.subdivisions;
        std::vector<double> ts(static_cast<std::size_t>(m) + 1);
        std::vector<double> fs(static_cast<std::size_t>(m) + 1);
        for (int j = 0; j <= m; ++j) {
            ts[static_cast<std::size_t>(j)] = lo + (hi - lo) * j / m;
            fs[static_cast<std::size_t>(j)] = f(ts[static_cast<std::size_t>(j)]);
        }
        std::vector<double> roots;
        for (int j = 0; j <= m; ++j) {
            const auto k = static_cast<std::size_t>(j);
            if (fs[k] == 0.0) roots.push_back(ts[k]);
            if (j == m) break;
            if (fs[k] != 0.0 && fs[k + 1] != 0.0 && (fs[k] < 0.0) != (fs[k + 1] < 0.0))
                roots.push_back(bisect(ts[k], fs[k], ts[k + 1]));
            // A dip of |f| between same-signed samples may hide two crossings or a tangency.
            if (j >= 1 && fs[k] != 0.0 && (fs[k - 1] < 0.0) == (fs[k] < 0.0) && (fs[k] < 0.0) == (fs[k + 1] < 0.0) &&
                std::abs(fs[k]) < std::abs(fs[k - 1]) && std::abs(fs[k]) <= std::abs(fs[k + 1])) {
                const double sg = fs[k] < 0.0 ? -1.0 : 1.0;
                double x0 = ts[k - 1];
                double x1 = ts[k + 1];
                const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
                for (int it = 0; it < 100 && x1 - x0 > opts.bisection_tol; ++it) {
                    const double xa = x1 - gr * (x1 - x0);
                    const double xb = x0 + gr * (x1 - x0);
                    if (sg * f(xa) < sg * f(xb))
                        x1 = xb;
                    else
                        x0 = xa;
                }
                const double tmin = 0.5 * (x0 + x1);
                const double gmin = sg * f(tmin);
                if (gmin < 0.0) {
                    roots.push_back(bisect(ts[k - 1], fs[k - 1], tmin));
                    roots.push_back(bisect(tmin, -fs[k - 1], ts[k + 1]));
                } else if (gmin <= 1e-9 * scale) {
                    std::ostringstream os;
                    os << "grazing Voronoi edge for triangle (" << face.v[0] << ", " << face.v[1] << ", " << face.v[2]
                       << "): excluded";
                    out.warnings.push_back(os.str());
                }
            }
        }
        if (roots.empty()) continue;

        RestrictedTriangle tri{face.v, {}};
        for (double t : roots) {
            const Vec3 u = at(t);
            const double sa = (u - a).norm();
            const double sb = (u - b).norm();
            const double sc = (u - c).norm();
            if (std::max({std::abs(sa - sb), std::abs(sa - sc)}) > 1e-8 * std::max(1.0, sa)) {
                out.warnings.push_back("dual point is not equidistant to its triangle");
                continue;
            }
            tri.duals.push_back({u, sa});
        }
        if (tri.duals.empty()) continue;
        const Point outward = s.outward_normal(s.project(tri.duals.front().u));
        if (n.dot(outward) < 0.0) std::swap(tri.v[1], tri.v[2]);
        out.triangles.push_back(std::move(tri));
    }
    return out;
}

bool is_closed_mesh(const RestrictedDelaunay& rdt) {
    if (rdt.triangles.empty()) return false;
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : rdt.triangles)
        for (int i = 0; i < 3; ++i) ++count[std::minmax(t.v[static_cast<std::size_t>(i)], t.v[static_cast<std::size_t>((i + 1) % 3)])];
    return std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 2; });
}

void write_off(std::ostream& out, const RestrictedDelaunay& rdt, const std::vector<std::string>& comments) {
    out << "OFF\n";
    for (const auto& c : comments) out << "# " << c << "\n";
    out << rdt.vertices.size() << " " << rdt.triangles.size() << " 0\n";
    out.precision(17);
    for (const auto& v : rdt.vertices) out << v(0) << " " << v(1) << " " << v(2) << "\n";
    for (const auto& t : rdt.triangles) out << "3 " << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
}

void write_dual_table(std::ostream& out, const RestrictedDelaunay& rdt, const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << "\n";
    out << "# triangle ux uy uz s\n";
    out.precision(17);
    for (std::size_t i = 0; i < rdt.triangles.size(); ++i)
        for (const auto& d : rdt.triangles[i].duals)
            out << i << " " << d.u(0) << " " << d.u(1) << " " << d.u(2) << " " << d.s << "\n";
}

}  // namespace surfacc
