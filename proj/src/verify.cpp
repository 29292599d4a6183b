#include "surfacc/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "lemmas_conf.hpp"
#include "surfacc/errors.hpp"
#include "surfacc/rdt.hpp"
#include "surfacc/sampling.hpp"
#include "surfacc/spatial.hpp"

namespace surfacc {

// ---- CheckStats / LemmaReport --------------------------------------------------------------

void CheckStats::record(double measured, const BoundResult& bound, double slack) {
    if (!bound.valid) {
        ++trials;
        ++vacuous;
        max_measured = std::max(max_measured, measured);
        return;
    }
    record(measured, bound.value, slack);
}

void CheckStats::record(double measured, double bound, double slack) {
    ++trials;
    max_measured = std::max(max_measured, measured);
    min_bound = std::min(min_bound, bound);
    const double margin = bound - measured;
    worst_margin = std::min(worst_margin, margin);
    if (!(margin >= -slack)) ++violations;
}

void CheckStats::merge(const CheckStats& other) {
    trials += other.trials;
    violations += other.violations;
    vacuous += other.vacuous;
    max_measured = std::max(max_measured, other.max_measured);
    min_bound = std::min(min_bound, other.min_bound);
    worst_margin = std::min(worst_margin, other.worst_margin);
}

std::size_t LemmaReport::trials() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.trials;
    return n;
}

std::size_t LemmaReport::violations() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.violations;
    return n;
}

double LemmaReport::max_measured() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& c : checks) m = std::max(m, c.max_measured);
    return m;
}

double LemmaReport::min_bound() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) m = std::min(m, c.min_bound);
    return m;
}

double LemmaReport::worst_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : checks) m = std::min(m, c.worst_margin);
    return m;
}

const CheckStats& LemmaReport::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw PreconditionError("report has no check '" + name + "'");
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double in_units(const CheckStats& c, double v) { return c.quantity == Quantity::angle ? to_degrees(v) : v; }

}  // namespace

nlohmann::json LemmaReport::to_json(bool include_runtime) const {
    nlohmann::json j;
    j["lemma"] = lemma;
    j["model"] = model;
    j["seed"] = seed;
    j["trials"] = trials();
    j["violations"] = violations();
    j["skipped"] = skipped;
    j["pass"] = pass();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json cj;
        cj["name"] = c.name;
        cj["unit"] = c.quantity == Quantity::angle ? "deg" : "length";
        cj["trials"] = c.trials;
        cj["violations"] = c.violations;
        cj["vacuous"] = c.vacuous;
        cj["max_measured"] = finite_or_null(in_units(c, c.max_measured));
        cj["min_bound"] = finite_or_null(in_units(c, c.min_bound));
        cj["worst_margin"] = finite_or_null(in_units(c, c.worst_margin));
        arr.push_back(std::move(cj));
    }
    j["checks"] = std::move(arr);
    if (!facts.empty()) {
        nlohmann::json fj = nlohmann::json::object();
        for (const auto& [k, v] : facts) fj[k] = v;
        j["facts"] = std::move(fj);
    }
    if (include_runtime) j["runtime_seconds"] = runtime_seconds;
    return j;
}

std::string LemmaReport::summary() const {
    std::ostringstream os;
    os.precision(6);
    os << (pass() ? "PASS" : "FAIL") << " " << lemma << " on " << model << ": " << trials() << " comparisons, "
       << violations() << " violations, " << skipped << " skipped";
    for (const auto& [k, v] : facts) os << ", " << k << " " << v;
    for (const auto& c : checks) {
        if (c.trials == c.vacuous) continue;
        os << "; " << c.name << " margin " << in_units(c, c.worst_margin) << (c.quantity == Quantity::angle ? " deg" : "");
    }
    return os.str();
}

// ---- measurements --------------------------------------------------------------------------

Point random_barycentric_point(const Simplex& s, std::mt19937_64& rng) {
    std::exponential_distribution<double> ex(1.0);
    Eigen::VectorXd b(s.dim() + 1);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = ex(rng);
    return s.at(b / b.sum());
}

namespace {

std::optional<Point> try_project(const SurfaceModel& s, const PointRef& x) {
    try {
        return s.project(x);
    } catch (const AmbiguityError&) {
        return std::nullopt;
    }
}

}  // namespace

InterpMeasurement measure_interp(const SurfaceModel& s, const Simplex& simplex, int n, std::mt19937_64& rng) {
    if (n < 1) throw PreconditionError("measure_interp needs at least one sample point");
    InterpMeasurement out;
    bool any = false;
    for (int i = 0; i < n; ++i) {
        const Point x = random_barycentric_point(simplex, rng);
        const auto xt = try_project(s, x);
        if (!xt) {
            ++out.skipped;
            continue;
        }
        const double d = (x - *xt).norm();
        if (!any || d > out.max_distance) {
            out.max_distance = d;
            out.argmax = x;
        }
        any = true;
    }
    if (!any) throw AmbiguityError("every sample point of the simplex projects ambiguously");
    return out;
}

double measure_triangle_normal(const SurfaceModel& s, const Simplex& triangle, int n, std::mt19937_64& rng) {
    if (triangle.dim() != 2) throw PreconditionError("measure_triangle_normal needs a triangle");
    if (n < 1) throw PreconditionError("measure_triangle_normal needs at least one sample point");
    const Flat aff = affine_hull(triangle);
    double worst = -1.0;
    for (int i = 0; i < n; ++i) {
        const auto xt = try_project(s, random_barycentric_point(triangle, rng));
        if (xt) worst = std::max(worst, flat_angle(aff, s.tangent_space(*xt)));
    }
    if (worst < 0.0) throw AmbiguityError("every sample point of the triangle projects ambiguously");
    return worst;
}

NormalVariation measure_normal_variation(const SurfaceModel& s, const PointRef& p, const PointRef& q) {
    NormalVariation out{flat_angle(s.normal_space(p), s.normal_space(q)), std::numeric_limits<double>::quiet_NaN()};
    if (s.codim() == 1) {
        const double c = std::clamp(s.outward_normal(p).dot(s.outward_normal(q)), -1.0, 1.0);
        out.directed_angle = std::acos(c);
    }
    return out;
}

// ---- trial driver --------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Independent stream per (seed, lemma, trial), so results do not depend on the thread count.
std::mt19937_64 trial_rng(std::uint64_t seed, std::string_view stream, std::uint64_t trial) {
    const std::uint64_t h = fnv1a(stream);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return std::mt19937_64(seq);
}

struct Accumulator {
    std::vector<CheckStats> checks;
    std::size_t skipped = 0;

    CheckStats& operator[](std::size_t i) { return checks[i]; }
    void merge(const Accumulator& o) {
        for (std::size_t i = 0; i < checks.size(); ++i) checks[i].merge(o.checks[i]);
        skipped += o.skipped;
    }
};

using CheckSpec = std::vector<std::pair<std::string, Quantity>>;

Accumulator make_accumulator(const CheckSpec& spec) {
    Accumulator a;
    for (const auto& [name, q] : spec) {
        CheckStats c;
        c.name = name;
        c.quantity = q;
        a.checks.push_back(c);
    }
    return a;
}

// Calls fn(trial, acc) for trial = 0..n-1 on up to `threads` workers. Reductions are
// order-independent, so the merged result is the same for any schedule.
Accumulator run_trials(std::size_t n, int threads, const CheckSpec& spec,
                       const std::function<void(std::size_t, Accumulator&)>& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n));
    std::vector<Accumulator> parts(workers, make_accumulator(spec));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&](std::size_t w) {
        try {
            for (std::size_t t = next++; t < n; t = next++) {
                try {
                    fn(t, parts[w]);
                } catch (const AmbiguityError&) {
                    ++parts[w].skipped;
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    Accumulator total = make_accumulator(spec);
    for (const auto& p : parts) total.merge(p);
    return total;
}

Point random_unit(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Point v(dim);
    do {
        for (int i = 0; i < dim; ++i) v(i) = g(rng);
    } while (v.norm() < 1e-12);
    return v.normalized();
}

// Triangle with vertices on the surface: three points on a circle of radius size * lfs(p) in the
// tangent plane at a random p, each projected onto the surface.
std::optional<Simplex> tangent_circle_triangle(const SurfaceModel& s, std::mt19937_64& rng, double size) {
    const Point p = s.random_point(rng);
    const Eigen::MatrixXd t = s.tangent_basis(p);
    Point e1 = t.col(0);
    Point e2 = t.col(1);
    if (t.cols() > 2) {
        // A random tangent 2-plane.
        e1 = t * random_unit(static_cast<int>(t.cols()), rng);
        e2 = t * random_unit(static_cast<int>(t.cols()), rng);
        e2 -= e2.dot(e1) * e1;
        if (e2.norm() < 1e-6) return std::nullopt;
        e2.normalize();
    }
    const double rad = size * s.lfs(p);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    std::vector<Point> v;
    for (int i = 0; i < 3; ++i) {
        const double a = ang(rng);
        const auto q = try_project(s, p + rad * (std::cos(a) * e1 + std::sin(a) * e2));
        if (!q) return std::nullopt;
        v.push_back(*q);
    }
    Simplex tri(std::move(v));
    if (tri.is_degenerate()) return std::nullopt;
    return tri;
}

// Retries until a nondegenerate triangle comes out.
Simplex local_triangle(const SurfaceModel& s, std::mt19937_64& rng, double size_min, double size_max) {
    std::uniform_real_distribution<double> size(size_min, size_max);
    for (int attempt = 0; attempt < 1000; ++attempt)
        if (auto t = tangent_circle_triangle(s, rng, size(rng))) return *t;
    throw ConvergenceError("could not construct a nondegenerate surface triangle");
}

struct LemmaContext {
    const SurfaceModel& model;
    const KeyValueConfig& cfg;
    std::string lemma;
    SuiteOptions opts;

    double num(const std::string& key) const { return cfg.get_double(lemma + "." + key); }
    std::size_t count(const std::string& key) const {
        const long v = cfg.get_int(lemma + "." + key);
        if (v < 0) throw ConfigError(lemma + "." + key + " must be nonnegative");
        return static_cast<std::size_t>(v);
    }
    std::mt19937_64 rng(std::size_t trial) const { return trial_rng(opts.seed, lemma, trial); }
    std::vector<double> phis(double fallback_deg) const {
        std::vector<double> deg = cfg.get_doubles(lemma + ".phi");
        if (deg.empty()) deg.push_back(fallback_deg);
        std::vector<double> rad;
        for (double d : deg) {
            if (!(d > 0.0 && d <= 60.0)) throw ConfigError(lemma + ".phi must lie in (0, 60] degrees");
            rad.push_back(to_radians(d));
        }
        return rad;
    }
};

void require_sizes(const LemmaContext& c) {
    const double lo = c.num("size_min");
    const double hi = c.num("size_max");
    if (!(lo > 0.0 && hi >= lo)) throw ConfigError(c.lemma + ": need 0 < size_min <= size_max");
}

void require_k2(const LemmaContext& c) {
    if (c.model.intrinsic_dim() < 2) throw ConfigError(c.lemma + " needs a surface of dimension at least 2");
}

Accumulator lemma_sharpness(const LemmaContext& c) {
    const auto* sphere = dynamic_cast<const SphereModel*>(&c.model);
    if (!sphere) throw ConfigError("sharpness runs on the sphere model only");
    const double L = sphere->radius();
    const std::size_t points = c.count("points");
    const CheckSpec spec{{"interp-circumball", Quantity::length}, {"equality-gap", Quantity::length}};
    return run_trials(c.count("trials"), c.opts.threads, spec, [&](std::size_t t, Accumulator& acc) {
        auto rng = c.rng(t);
        std::vector<Point> v;
        for (int i = 0; i < 3; ++i) v.push_back(c.model.random_point(rng));
        const Simplex tri(v);
        if (tri.is_degenerate()) throw AmbiguityError("degenerate inscribed triangle");
        const Ball b = circumball(tri);
        for (std::size_t i = 0; i < points; ++i) {
            const Point x = random_barycentric_point(tri, rng);
            const auto xt = try_project(c.model, x);
            if (!xt) {
                ++acc.skipped;
                continue;
            }
            const double measured = (x - *xt).norm();
            const BoundResult bound = interp_bound(b.radius, std::min((x - b.center).norm(), b.radius), L);
            acc[0].record(measured, bound);
            if (bound.valid) acc[1].record(std::abs(measured - bound.value), 1e-9, 0.0);
        }
    });
}

Accumulator lemma_interp(const LemmaContext& c) {
    require_sizes(c);
    const std::size_t points = c.count("points");
    const CheckSpec spec{{"ebs-min-ball", Quantity::length},
                         {"lfs-min-ball", Quantity::length},
                         {"ebs-circumball", Quantity::length},
                         {"ebs-min-ball-centerless", Quantity::length}};
    return run_trials(c.count("trials"), c.opts.threads, spec, [&](std::size_t t, Accumulator& acc) {
        auto rng = c.rng(t);
        const Simplex tri = local_triangle(c.model, rng, c.num("size_min"), c.num("size_max"));
        const Ball seb = min_enclosing_ball(tri);
        const Ball cb = circumball(tri);
        for (std::size_t i = 0; i < points; ++i) {
            const Point x = random_barycentric_point(tri, rng);
            const auto xt = try_project(c.model, x);
            if (!xt) {
                ++acc.skipped;
                continue;
            }
            const double measured = (x - *xt).norm();
            const double e = c.model.ebs(*xt);
            const double l = c.model.lfs(*xt);
            const double xc_seb = std::min((x - seb.center).norm(), seb.radius);
            const double xc_cb = std::min((x - cb.center).norm(), cb.radius);
            acc[0].record(measured, interp_bound(seb.radius, xc_seb, e));
            acc[1].record(measured, interp_bound(seb.radius, xc_seb, l));
            acc[2].record(measured, interp_bound(cb.radius, xc_cb, e));
            acc[3].record(measured, interp_bound(seb.radius, 0.0, e));
        }
    });
}

Accumulator lemma_proj_inside(const LemmaContext& c) {
    require_sizes(c);
    const std::size_t points = c.count("points");
    const CheckSpec spec{{"min-ball", Quantity::length}, {"circumball", Quantity::length}};
    return run_trials(c.count("trials"), c.opts.threads, spec, [&](std::size_t t, Accumulator& acc) {
        auto rng = c.rng(t);
        const Simplex tri = local_triangle(c.model, rng, c.num("size_min"), c.num("size_max"));
        double lfs_max = 0.0;
        for (const auto& v : tri.vertices()) lfs_max = std::max(lfs_max, c.model.lfs(v));
        const Ball balls[2] = {min_enclosing_ball(tri), circumball(tri)};
        for (std::size_t i = 0; i < points; ++i) {
            const Point x = random_barycentric_point(tri, rng);
            const auto xt = try_project(c.model, x);
            if (!xt) {
                ++acc.skipped;
                continue;
            }
            for (int k = 0; k < 2; ++k) {
                const double measured = (*xt - balls[k].center).norm();
                if (balls[k].radius <= lfs_max / 2.0)
                    acc[static_cast<std::size_t>(k)].record(measured, balls[k].radius);
                else
                    acc[static_cast<std::size_t>(k)].record(measured, BoundResult::none(Formula::interp));
            }
        }
    });
}

Accumulator lemma_proj_nearest(const LemmaContext& c) {
    require_sizes(c);
    const std::size_t points = c.count("points");
    const CheckSpec spec{{"sqrt2-r", Quantity::length},
                         {"refined", Quantity::length},
                         {"refined-at-least-r", Quantity::length},
                         {"refined-below-sqrt2-r", Quantity::length}};
    return run_trials(c.count("trials"), c.opts.threads, spec, [&](std::size_t t, Accumulator& acc) {
        auto rng = c.rng(t);
        const Simplex tri = local_triangle(c.model, rng, c.num("size_min"), c.num("size_max"));
        const double r = min_enclosing_ball(tri).radius;
        for (std::size_t i = 0; i < points; ++i) {
            const Point x = random_barycentric_point(tri, rng);
            const auto xt = try_project(c.model, x);
            if (!xt) {
                ++acc.skipped;
                continue;
            }
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& v : tri.vertices()) nearest = std::min(nearest, (*xt - v).norm());
            acc[0].record(nearest, std::sqrt(2.0) * r);
            const NearestVertexBound b = proj_nearest_vertex_bound(r, c.model.ebs(*xt));
            if (b.fallback) {
                acc[1].record(nearest, BoundResult::none(Formula::proj_nearest));
                continue;
            }
            acc[1].record(nearest, b.bound);
            // The refined value lies in [r, sqrt2 r); the upper end is strict.
            acc[2].record(r, b.bound.value, 1e-12 * std::max(1.0, r));
            acc[3].record(b.bound.value, std::sqrt(2.0) * r, 0.0);
        }
    });
}

Accumulator lemma_tnl(const LemmaContext& c) {
    require_k2(c);
    require_sizes(c);
    const CheckSpec spec{{"tnl", Quantity::angle}, {"sqrt3-largest-angle", Quantity::angle}};
    return run_trials(c.count("trials"), c.opts.threads, spec, [&](std::size_t t, Accumulator& acc) {
        auto rng = c.rng(t);
        const Simplex tri = local_triangle(c.model, rng, c.num("size_min"), c.num("size_max"));
        const double R = circumball(tri).radius;
        const Flat aff = affine_hull(tri);
        int largest = 0;
        double largest_angle = -1.0;
        for (int i = 0; i < 3; ++i) {
            const Point& v = tri.vertex(i);
            const double phi = plane_angle(tri, i);
            const double measured = flat_angle(aff, c.model.tangent_space(v));
            acc[0].record(measured, tnl_bound(R, c.model.ebs(v), phi));
            if (phi > largest_angle) {
                largest_angle = phi;
                largest = i;
            }
        }
        const Point& v = tri.vertex(largest);
        acc[1].record(flat_angle(aff, c.model.tangent_space(v)), prior_tnl_bounds(R, c.model.lfs(v)).sqrt3);
    });
}

struct SurfacePair {
    Point p;
    Point q;
    double lfs_p;
};

// q is the projection of a tangent step from p whose length spreads delta evenly over (0, delta_max).
SurfacePair pair_at(const LemmaContext& c, std::size_t t, std::size_t n, std::mt19937_64& rng) {
    const double delta_max = c.num("delta_max");
    if (!(delta_max > 0.0)) throw ConfigError(c.lemma + ".delta_max must be positive");
    const double target = delta_max * (static_cast<double>(t) + 0.5) / static_cast<double>(n);
    const Point p = c.model.random_point(rng);
    const double l = c.model.lfs(p);
    const Eigen::MatrixXd tb = c.model.tangent_basis(p);
    const Point dir = tb * random_unit(static_cast<int>(tb.cols()), rng);
    const Point q = c.model.project(p + target * l * dir);
    return {p, q, l};
}

Accumulator lemma_nvl1(const LemmaContext& c) {
    if (c.model.codim() != 1) throw ConfigError("nvl1 needs a codimension-1 model");
    const std::size_t n = c.count("trials");
    const CheckSpec spec{{"eta1", Quantity::angle}, {"eta1-full", Quantity::angle}, {"delta-n-cap", Quantity::length}};
    return run_trials(n, c.opts.threads, spec, [&](std::size_t t, Accumulator& acc) {
        auto rng = c.rng(t);
        const SurfacePair sp = pair_at(c, t, n, rng);
        const double delta = (sp.q - sp.p).norm() / sp.lfs_p;
        const double measured = measure_normal_variation(c.model, sp.p, sp.q).directed_angle;
        const double delta_n = std::abs((sp.q - sp.p).dot(c.model.outward_normal(sp.p))) / sp.lfs_p;
        const double cap = delta * delta / 2.0;
        acc[2].record(delta_n, cap, 1e-12);
        acc[0].record(measured, eta1(delta));
        acc[1].record(measured, eta1_full({delta, std::min({delta_n, cap, delta})}));
    });
}

Accumulator lemma_nvl2(const LemmaContext& c) {
    const std::size_t n = c.count("trials");
    const CheckSpec spec{{"eta2", Quantity::angle}, {"eta2-full", Quantity::angle}, {"delta-n-cap", Quantity::length}};
    return run_trials(n, c.opts.threads, spec, [&](std::size_t t, Accumulator& acc) {
        auto rng = c.rng(t);
        const SurfacePair sp = pair_at(c, t, n, rng);
        const double delta = (sp.q - sp.p).norm() / sp.lfs_p;
        const double measured = flat_angle(c.model.tangent_space(sp.p), c.model.tangent_space(sp.q));
        const Eigen::MatrixXd tb = c.model.tangent_basis(sp.p);
        const Point d = sp.q - sp.p;
        const double delta_n = (d - tb * (tb.transpose() * d)).norm() / sp.lfs_p;
        const double cap = delta * delta / 2.0;
        acc[2].record(delta_n, cap, 1e-12);
        acc[0].record(measured, eta2(delta));
        acc[1].record(measured, eta2_full({delta, std::min({delta_n, cap, delta})}));
    });
}

Accumulator lemma_etnl(const LemmaContext& c) {
    require_k2(c);
    const double kappa_max = c.num("kappa_max");
    if (!(kappa_max > 0.0 && kappa_max <= 0.5)) throw ConfigError("etnl.kappa_max must lie in (0, 1/2]");
    const auto phis = c.phis(c.model.codim() == 1 ? kEtnlPhiCodim1 : kEtnlPhiCodimHigh);
    const std::size_t points = c.count("points");
    const CheckSpec spec{{"etnl", Quantity::angle}, {"kappa", Quantity::length}};
    return run_trials(c.count("trials"), c.opts.threads, spec, [&](std::size_t t, Accumulator& acc) {
        auto rng = c.rng(t);
        for (int attempt = 0; attempt < 100; ++attempt) {
            const Simplex tri = local_triangle(c.model, rng, 0.01 * kappa_max, kappa_max);
            const double R = circumball(tri).radius;
            double kappa = 0.0;
            for (const auto& v : tri.vertices()) kappa = std::max(kappa, R / c.model.lfs(v));
            if (kappa > kappa_max) continue;
            acc[1].record(kappa, kappa_max, 0.0);
            double bound = std::numeric_limits<double>::infinity();
            bool valid = false;
            for (double phi : phis) {
                const BoundResult b = etnl_bound(kappa, phi, c.model.codim());
                if (b.valid) {
                    bound = std::min(bound, b.value);
                    valid = true;
                }
            }
            const Flat aff = affine_hull(tri);
            for (std::size_t i = 0; i < points; ++i) {
                const auto xt = try_project(c.model, random_barycentric_point(tri, rng));
                if (!xt) {
                    ++acc.skipped;
                    continue;
                }
                const double measured = flat_angle(aff, c.model.tangent_space(*xt));
                if (valid)
                    acc[0].record(measured, bound);
                else
                    acc[0].record(measured, BoundResult::none(Formula::etnl));
            }
            return;
        }
        throw ConvergenceError("could not construct a triangle with kappa <= etnl.kappa_max");
    });
}

Accumulator lemma_witness(const LemmaContext& c) {
    const CheckSpec spec{{"unit-sphere", Quantity::length},   {"collinear", Quantity::length},
                         {"chord-product", Quantity::length}, {"tangency", Quantity::length},
                         {"chord-lengths", Quantity::length}, {"angle-matches-eta1-full", Quantity::angle},
                         {"angle-within-eta1", Quantity::angle}};
    constexpr double tol = 1e-10;
    return run_trials(c.count("trials"), c.opts.threads, spec, [&](std::size_t t, Accumulator& acc) {
        auto rng = c.rng(t);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double delta = eta1_limit() * (1e-6 + (1.0 - 2e-6) * u(rng));
        const double q2 = u(rng) * delta * delta / 2.0;
        const DualTangencyWitness w = dual_tangency_witness(delta, q2);
        const Eigen::Vector3d below(0.0, -1.0, 0.0);
        const Eigen::Vector3d above(0.0, 1.0, 0.0);
        acc[0].record(std::max(std::abs(w.z.norm() - 1.0), std::abs(w.z_prime.norm() - 1.0)), tol, 0.0);
        const Eigen::Vector3d chord = w.z_prime - w.z;
        const double off_line = chord.cross(w.q - w.z).norm() / chord.norm();
        const double along = (w.q - w.z).dot(chord) / chord.squaredNorm();
        acc[1].record(std::max(off_line, std::max(-along, along - 1.0)), tol, 0.0);
        acc[2].record(std::abs(w.ell * w.ell_prime - (1.0 - delta * delta)), tol, 0.0);
        acc[3].record(std::max(std::abs((w.z - below).norm() - (w.ell + 1.0)),
                               std::abs((w.z_prime - above).norm() - (w.ell_prime + 1.0))),
                      tol, 0.0);
        acc[4].record(std::max(std::abs((w.z - w.q).norm() - w.ell), std::abs((w.z_prime - w.q).norm() - w.ell_prime)),
                      tol, 0.0);
        const BoundResult full = eta1_full({delta, q2});
        if (full.valid)
            acc[5].record(std::abs(w.angle - full.value), 1e-9, 0.0);
        else
            acc[5].record(w.angle, full);
        acc[6].record(w.angle, eta1(delta));
    });
}

struct Corollary16Extras {
    std::size_t vertices = 0;
    std::size_t triangles = 0;
    bool closed = false;
    std::size_t warnings = 0;
};

Accumulator lemma_corollary16(const LemmaContext& c, Corollary16Extras& extras) {
    if (c.model.codim() != 1 || c.model.ambient_dim() != 3)
        throw ConfigError("corollary16 needs a surface in R^3");
    const double eps = c.num("eps");
    if (!(eps > 0.0 && eps <= 1.0 / 3.0)) throw ConfigError("corollary16.eps must lie in (0, 1/3]");
    const auto phis = c.phis(kEtnlEpsPhiCodim1);
    const std::size_t points = c.count("points");
    SampleOptions so;
    so.pool_refinement = c.num("pool_refinement");
    const SampleSet sample = generate_eps_sample(c.model, eps, c.opts.seed, so);
    const RestrictedDelaunay rdt = restricted_delaunay(c.model, sample.vertices);
    extras = {sample.vertices.size(), rdt.triangles.size(), is_closed_mesh(rdt), rdt.warnings.size()};

    double radius = 0.0;
    for (const auto& v : sample.vertices) radius = std::max(radius, v.norm());
    NearestIndex index(3, std::max(eps * radius / 8.0, 1e-9));
    for (const auto& v : sample.vertices) index.insert(v);

    const CorollaryCoefficients coef = corollary_interp_coefs(eps);
    double angle_bound = std::numeric_limits<double>::infinity();
    for (double phi : phis) {
        const BoundResult b = etnl_eps_bound(eps, phi, 1);
        if (b.valid) angle_bound = std::min(angle_bound, b.value);
    }
    const bool angle_valid = std::isfinite(angle_bound);

    const CheckSpec spec{{"interp-lfs-xtilde", Quantity::length}, {"interp-lfs-u", Quantity::length},
                         {"normal-angle", Quantity::angle},       {"projection-in-dual-ball", Quantity::length},
                         {"vertex-nearer-than-u", Quantity::length}, {"s-within-eps-lfs-u", Quantity::length},
                         {"voronoi-empty", Quantity::length},     {"dual-equidistant", Quantity::length}};
    return run_trials(rdt.triangles.size(), c.opts.threads, spec, [&](std::size_t t, Accumulator& acc) {
        auto rng = c.rng(t);
        const RestrictedTriangle& rt = rdt.triangles[t];
        std::vector<Point> v;
        for (int i : rt.v) v.emplace_back(rdt.vertices[static_cast<std::size_t>(i)]);
        const Simplex tri(v);
        std::vector<double> lfs_u;
        for (const auto& d : rt.duals) {
            const Point u = d.u;
            lfs_u.push_back(c.model.lfs(c.model.project(u)));
            acc[5].record(d.s, eps * lfs_u.back());
            acc[6].record(d.s - index.nearest(u).second, 0.0);
            double spread = 0.0;
            for (const auto& w : v) spread = std::max(spread, std::abs((w - u).norm() - d.s));
            acc[7].record(spread, 1e-8 * std::max(1.0, d.s), 0.0);
        }
        const Flat aff = affine_hull(tri);
        for (std::size_t i = 0; i < points; ++i) {
            const Point x = random_barycentric_point(tri, rng);
            const auto xt = try_project(c.model, x);
            if (!xt) {
                ++acc.skipped;
                continue;
            }
            const double dist = (x - *xt).norm();
            acc[0].record(dist, coef.lfs_xtilde * c.model.lfs(*xt));
            const double angle = flat_angle(aff, c.model.tangent_space(*xt));
            if (angle_valid)
                acc[2].record(angle, angle_bound);
            else
                acc[2].record(angle, BoundResult::none(Formula::etnl_eps));
            for (std::size_t k = 0; k < rt.duals.size(); ++k) {
                const Point u = rt.duals[k].u;
                const double s = rt.duals[k].s;
                acc[1].record(dist, coef.lfs_u * lfs_u[k]);
                acc[3].record((*xt - u).norm(), s);
                double best = std::numeric_limits<double>::infinity();
                for (const auto& w : v) best = std::min(best, (w - *xt).norm() - (w - u).norm());
                acc[4].record(best, 0.0);
            }
        }
    });
}

}  // namespace

double sharpness_sphere(int trials, int points, std::uint64_t seed) {
    if (trials < 1 || points < 1) throw PreconditionError("sharpness needs at least one trial and one point");
    KeyValueConfig cfg = default_lemma_config();
    cfg.set("sharpness.trials", std::to_string(trials));
    cfg.set("sharpness.points", std::to_string(points));
    const auto sphere = std::make_shared<SphereModel>(1.0, 2, 3);
    const LemmaReport r = run_lemma_suite("sharpness", sphere, cfg, {1, seed});
    return r.check("equality-gap").max_measured;
}

std::vector<std::string> lemma_catalog() {
    return {"sharpness", "interp", "proj-inside", "proj-nearest", "tnl",    "nvl1",
            "nvl2",      "nvl-codim2", "etnl",     "corollary16",  "witness"};
}

KeyValueConfig default_lemma_config() { return KeyValueConfig::parse(kLemmaConfigText, "lemmas.conf"); }

LemmaReport run_lemma_suite(const std::string& lemma, const std::shared_ptr<const SurfaceModel>& model,
                            const KeyValueConfig& config, const SuiteOptions& opts) {
    if (!model) throw PreconditionError("run_lemma_suite needs a model");
    const auto cat = lemma_catalog();
    if (std::find(cat.begin(), cat.end(), lemma) == cat.end()) throw ConfigError("unknown lemma '" + lemma + "'");
    if (opts.threads < 1) throw ConfigError("threads must be at least 1");
    const std::string key = lemma == "nvl-codim2" ? "nvl2" : lemma;
    const LemmaContext ctx{*model, config, key, opts};
    const auto start = std::chrono::steady_clock::now();

    Accumulator acc;
    std::vector<std::pair<std::string, double>> facts;
    if (key == "sharpness") acc = lemma_sharpness(ctx);
    else if (key == "interp") acc = lemma_interp(ctx);
    else if (key == "proj-inside") acc = lemma_proj_inside(ctx);
    else if (key == "proj-nearest") acc = lemma_proj_nearest(ctx);
    else if (key == "tnl") acc = lemma_tnl(ctx);
    else if (key == "nvl1") acc = lemma_nvl1(ctx);
    else if (key == "nvl2") acc = lemma_nvl2(ctx);
    else if (key == "etnl") acc = lemma_etnl(ctx);
    else if (key == "witness") acc = lemma_witness(ctx);
    else {
        Corollary16Extras extras;
        acc = lemma_corollary16(ctx, extras);
        CheckStats closed;
        closed.name = "closed-mesh";
        closed.record(extras.closed ? 0.0 : 1.0, 0.0, 0.0);
        acc.checks.push_back(closed);
        facts = {{"vertices", static_cast<double>(extras.vertices)},
                 {"triangles", static_cast<double>(extras.triangles)},
                 {"grazing_warnings", static_cast<double>(extras.warnings)}};
    }

    LemmaReport r;
    r.lemma = lemma;
    r.model = model->name();
    r.seed = opts.seed;
    r.skipped = acc.skipped;
    r.checks = std::move(acc.checks);
    r.facts = std::move(facts);
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

// ---- models --------------------------------------------------------------------------------

std::shared_ptr<const SurfaceModel> make_model(const std::string& name, const std::vector<std::string>& params) {
    std::map<std::string, double> defaults;
    if (name == "sphere") defaults = {{"radius", 1.0}, {"k", 2.0}, {"d", 3.0}};
    else if (name == "torus") defaults = {{"major", 2.0}, {"minor", 0.5}};
    else if (name == "clifford") defaults = {{"rho", 1.0}};
    else if (name == "ellipsoid") defaults = {{"a", 1.5}, {"b", 1.0}, {"c", 0.8}};
    else throw ConfigError("unknown model '" + name + "'");

    KeyValueConfig cfg;
    for (const auto& [k, v] : defaults) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        cfg.set(k, os.str());
    }
    for (const auto& p : params) cfg.override_with(p);
    auto get = [&](const char* k) { return cfg.get_double(k); };
    auto get_int = [&](const char* k) {
        const double v = get(k);
        if (v != std::floor(v)) throw ConfigError(std::string("model parameter ") + k + " must be an integer");
        return static_cast<int>(v);
    };
    try {
        if (name == "sphere") return std::make_shared<SphereModel>(get("radius"), get_int("k"), get_int("d"));
        if (name == "torus") return std::make_shared<TorusModel>(get("major"), get("minor"));
        if (name == "clifford") return std::make_shared<CliffordTorusModel>(get("rho"));
        return ImplicitSurfaceModel::ellipsoid(get("a"), get("b"), get("c"));
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("model '") + name + "': " + e.what());
    }
}

// ---- formula diagnostics -------------------------------------------------------------------

std::array<double, 2> fit_eta_series(Eta which, double lo, double hi, int samples) {
    if (!(lo > 0.0 && hi > lo) || samples < 8) throw PreconditionError("bad series fit range");
    // (eta - delta) / delta^3 = c3 + c5 t + c7 t^2 + c9 t^3 with t = delta^2.
    Eigen::MatrixXd a(samples, 4);
    Eigen::VectorXd b(samples);
    for (int i = 0; i < samples; ++i) {
        const double d = lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1));
        const BoundResult e = eta(which, d);
        if (!e.valid) throw PreconditionError("series fit range leaves the domain");
        const double t = d * d;
        a.row(i) << 1.0, t, t * t, t * t * t;
        b(i) = (e.value - d) / (d * t);
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    return {c(0), c(1)};
}

double eta_threshold(Eta which, double angle, double tol) {
    const double limit = which == Eta::eta1 ? eta1_limit() : eta2_limit();
    double lo = 0.0;
    double hi = limit;
    auto below = [&](double d) {
        const BoundResult e = eta(which, d);
        return e.valid && e.value < angle;
    };
    if (!below(lo)) throw PreconditionError("target angle is not above eta(0)");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (below(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace surfacc
