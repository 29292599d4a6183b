#include "surfacc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "surfacc/errors.hpp"
#include "surfacc/spatial.hpp"

namespace surfacc {

namespace {

double min_lfs_estimate(const SurfaceModel& s) {
    const SurfaceGrid coarse = s.grid(s.bounding_radius() / 40.0);
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < coarse.points.cols(); ++i) m = std::min(m, s.lfs(coarse.points.col(i)));
    // lfs is 1-Lipschitz, so the true minimum is at most one covering radius lower.
    return m - coarse.covering_radius;
}

}  // namespace

double generation_pool_spacing(const SurfaceModel& s, double eps, const SampleOptions& opts) {
    if (opts.pool_spacing > 0.0) return opts.pool_spacing;
    if (!(opts.pool_refinement >= 4.0)) throw ConfigError("pool refinement must be at least 4");
    const double m = min_lfs_estimate(s);
    if (!(m > 0.0)) throw ConfigError("cannot bound lfs away from zero on a coarse grid");
    return eps * m / opts.pool_refinement;
}

SampleSet generate_eps_sample(const SurfaceModel& s, double eps, std::uint64_t seed, const SampleOptions& opts) {
    if (!(eps > 0.0 && eps < 0.5)) throw PreconditionError("eps must lie in (0, 1/2)");
    const double h = generation_pool_spacing(s, eps, opts);
    const SurfaceGrid pool = s.grid(h);
    const Eigen::Index n = pool.points.cols();
    if (n == 0) throw ConfigError("empty candidate pool");
    const double hc = pool.covering_radius;

    std::vector<double> lfs(static_cast<std::size_t>(n));
    std::vector<double> target(static_cast<std::size_t>(n));
    double min_lfs = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        lfs[k] = s.lfs(pool.points.col(i));
        min_lfs = std::min(min_lfs, lfs[k]);
        target[k] = eps * (lfs[k] - hc) - hc;
    }
    if (hc > eps * min_lfs / 4.0)
        throw ConfigError("candidate pool too sparse: spacing " + std::to_string(hc) + " exceeds eps * min lfs / 4 = " +
                          std::to_string(eps * min_lfs / 4.0));

    std::vector<double> nd(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    SampleSet out;
    out.eps = eps;
    out.seed = seed;
    out.model = s.name();
    out.dim = s.ambient_dim();

    std::mt19937_64 rng(seed);
    Eigen::Index next = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    for (;;) {
        if (out.vertices.size() >= opts.max_vertices) throw ConfigError("vertex limit reached before coverage");
        const Point w = pool.points.col(next);
        out.vertices.push_back(w);
        double worst = -1.0;
        bool covered = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            nd[k] = std::min(nd[k], (pool.points.col(i) - w).norm());
            if (nd[k] > target[k]) covered = false;
            const double ratio = nd[k] / lfs[k];
            if (ratio > worst) {
                worst = ratio;
                next = i;
            }
        }
        if (covered) break;
    }
    return out;
}

CoverageReport verify_eps_sample(const SurfaceModel& s, const std::vector<Point>& vertices, double eps,
                                 const CoverageOptions& opts) {
    if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
    if (!(opts.density_factor >= 1.0)) throw ConfigError("validation density factor must be at least 1");
    const double h_gen = generation_pool_spacing(s, std::min(eps, 0.49), opts.generation);
    const double h = h_gen / std::pow(opts.density_factor, 1.0 / s.intrinsic_dim());
    const SurfaceGrid pool = s.grid(h);

    CoverageReport rep;
    rep.pool_size = static_cast<std::size_t>(pool.points.cols());
    if (vertices.empty()) {
        rep.worst_ratio = std::numeric_limits<double>::infinity();
        rep.witness = pool.points.col(0);
        return rep;
    }
    NearestIndex index(s.ambient_dim(), std::max(h_gen * 4.0, 1e-9));
    for (const auto& v : vertices) index.insert(v);
    rep.worst_ratio = -1.0;
    for (Eigen::Index i = 0; i < pool.points.cols(); ++i) {
        const auto [idx, d] = index.nearest(pool.points.col(i));
        const double ratio = d / s.lfs(pool.points.col(i));
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.witness = pool.points.col(i);
        }
    }
    rep.pass = rep.worst_ratio <= eps * (1.0 + opts.slack);
    return rep;
}

void write_sample(std::ostream& out, const SampleSet& set, const std::vector<std::string>& comments) {
    out << "# d=" << set.dim << " eps=" << set.eps << " seed=" << set.seed << " model=" << set.model << "\n";
    for (const auto& c : comments) out << "# " << c << "\n";
    out.precision(17);
    for (const auto& v : set.vertices) {
        for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? " " : "") << v(i);
        out << "\n";
    }
}

SampleSet read_sample(std::istream& in) {
    SampleSet set;
    std::string line;
    bool header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (header) continue;
            std::istringstream hs(line.substr(1));
            std::string tok;
            while (hs >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq);
                const std::string val = tok.substr(eq + 1);
                try {
                    if (key == "d") set.dim = std::stoi(val);
                    else if (key == "eps") set.eps = std::stod(val);
                    else if (key == "seed") set.seed = std::stoull(val);
                    else if (key == "model") set.model = val;
                } catch (const std::exception&) {
                    throw FormatError("sample header: bad value for " + key);
                }
            }
            header = true;
            continue;
        }
        if (!header || set.dim <= 0) throw FormatError("sample table lacks a '# d=... eps=... seed=... model=...' header");
        std::istringstream ls(line);
        Point p(set.dim);
        for (int i = 0; i < set.dim; ++i)
            if (!(ls >> p(i))) throw FormatError("sample line " + std::to_string(lineno) + ": expected " +
                                                 std::to_string(set.dim) + " coordinates");
        std::string extra;
        if (ls >> extra) throw FormatError("sample line " + std::to_string(lineno) + ": too many values");
        set.vertices.push_back(p);
    }
    if (!header) throw FormatError("sample table lacks a header");
    return set;
}

}  // namespace surfacc
