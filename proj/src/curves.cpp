#include "surfacc/curves.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "surfacc/bounds.hpp"
#include "surfacc/errors.hpp"
#include "surfacc/geom.hpp"

namespace surfacc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double deg(const BoundResult& b) { return b.valid ? to_degrees(b.value) : kNaN; }
double len(const BoundResult& b) { return b.valid ? b.value : kNaN; }

CurveTable one_d(const std::vector<std::string>& columns, const GridSpec& x,
                 const std::function<std::vector<double>(double)>& row) {
    CurveTable t{columns, {}};
    for (double v : x.values()) {
        std::vector<double> r{v};
        const auto rest = row(v);
        r.insert(r.end(), rest.begin(), rest.end());
        t.rows.push_back(std::move(r));
    }
    return t;
}

CurveTable two_d(const std::vector<std::string>& columns, const GridSpec& x, const GridSpec& y,
                 const std::function<double(double, double)>& cell) {
    CurveTable t{columns, {}};
    const auto ys = y.values();
    for (double xv : x.values())
        for (double yv : ys) t.rows.push_back({xv, yv, cell(xv, yv)});
    return t;
}

BoundResult etnl_safe(double kappa, double phi_deg, int codim) {
    if (!(kappa <= 0.5)) return BoundResult::none(Formula::etnl);
    return etnl_bound(kappa, to_radians(phi_deg), codim);
}

BoundResult etnl_eps_safe(double eps, double phi_deg, int codim) {
    if (!(eps <= 1.0 / 3.0)) return BoundResult::none(Formula::etnl_eps);
    return etnl_eps_bound(eps, to_radians(phi_deg), codim);
}

// delta_N must not exceed delta^2 / 2.
BoundResult nv_full(bool codim1, double delta, double delta_n) {
    const Formula f = codim1 ? Formula::eta1_full : Formula::eta2_full;
    if (delta_n > delta * delta / 2.0 || delta_n > delta) return BoundResult::none(f);
    return codim1 ? eta1_full({delta, delta_n}) : eta2_full({delta, delta_n});
}

}  // namespace

std::vector<double> GridSpec::values() const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(step > 0.0) || hi < lo)
        throw ConfigError("grid needs finite lo <= hi and step > 0");
    const double span = (hi - lo) / step;
    if (span > 1e7) throw ConfigError("grid has too many points");
    const auto n = static_cast<long>(std::floor(span + 1e-9));
    std::vector<double> out;
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    if (hi - out.back() > 1e-9 * step) out.push_back(hi);
    else out.back() = std::min(out.back(), hi);
    return out;
}

std::vector<FigureInfo> figure_catalog() {
    return {
        {"figure-3-left", "bound on |x x~| against r (ebs = 1)", false, {0.0, 1.0, 0.001}, {}},
        {"figure-3-right", "bound on |x x~| over r and |xc| (ebs = 1)", true, {0.0, 1.0, 0.01}, {0.0, 1.0, 0.01}},
        {"figure-4", "normal variation bounds in degrees against delta", false, {0.0, 0.99, 0.001}, {}},
        {"figure-5-left", "triangle normal bounds in degrees against R at the largest angle (ebs = 1)", false,
         {0.0, 0.6, 0.001}, {}},
        {"figure-5-right", "triangle normal bound in degrees over R and phi (ebs = 1)", true, {0.0, 1.0, 0.01},
         {1.0, 180.0, 1.0}},
        {"figure-7", "extended triangle normal bounds in degrees against R (lfs = 1)", false, {0.0, 0.5, 0.001}, {}},
        {"figure-8-left", "codimension-1 normal variation bound in degrees over delta and delta_N", true,
         {0.0, 0.97, 0.005}, {0.0, 0.5, 0.005}},
        {"figure-8-right", "codimension-1 normal variation bound in degrees over delta_T and delta_N", true,
         {0.0, 0.97, 0.005}, {-0.5, 0.5, 0.005}},
        {"figure-11-left", "higher-codimension normal variation bound in degrees over delta and delta_N", true,
         {0.0, 0.78, 0.005}, {0.0, 0.5, 0.005}},
        {"figure-11-right", "higher-codimension normal variation bound in degrees over delta_T and delta_N", true,
         {0.0, 0.78, 0.005}, {-0.5, 0.5, 0.005}},
        {"figure-15", "extended triangle normal bounds for eps-samples in degrees against eps", false,
         {0.0, 1.0 / 3.0, 0.001}, {}},
    };
}

const FigureInfo& figure_info(const std::string& id) {
    static const auto catalog = figure_catalog();
    for (const auto& f : catalog)
        if (f.id == id) return f;
    throw ConfigError("unknown figure id '" + id + "'");
}

CurveTable figure_curves(const std::string& id, const GridSpec& x, const GridSpec& y) {
    figure_info(id);
    if (id == "figure-3-left")
        return one_d({"r", "bound"}, x, [](double r) { return std::vector<double>{len(interp_bound(r, 0.0, 1.0))}; });
    if (id == "figure-3-right")
        return two_d({"r", "xc", "bound"}, x, y, [](double r, double xc) {
            return xc <= r ? len(interp_bound(r, xc, 1.0)) : kNaN;
        });
    if (id == "figure-4")
        return one_d({"delta", "eta1_deg", "eta2_deg", "neg_log_1_minus_delta_deg", "delta_over_1_minus_delta_deg"}, x,
                     [](double d) {
                         const PriorNvlBounds prior = prior_nvl_bounds(d);
                         return std::vector<double>{deg(eta1(d)), deg(eta2(d)), deg(prior.log), deg(prior.ratio)};
                     });
    if (id == "figure-5-left")
        return one_d({"R", "new_deg", "cheng_deg", "acdl_deg"}, x, [](double r) {
            const PriorTnlBounds prior = prior_tnl_bounds(r, 1.0);
            return std::vector<double>{deg(prior.sqrt3), deg(prior.cheng), deg(prior.acdl)};
        });
    if (id == "figure-5-right")
        return two_d({"R", "phi_deg", "bound_deg"}, x, y, [](double r, double phi) {
            if (!(phi > 0.0 && phi < 180.0)) return kNaN;
            return deg(tnl_bound(r, 1.0, to_radians(phi)));
        });
    if (id == "figure-7")
        return one_d({"R", "codim1_phi49_deg", "codim2_phi48.5_deg"}, x, [](double r) {
            return std::vector<double>{deg(etnl_safe(r, kEtnlPhiCodim1, 1)), deg(etnl_safe(r, kEtnlPhiCodimHigh, 2))};
        });
    if (id == "figure-8-left" || id == "figure-11-left") {
        const bool c1 = id == "figure-8-left";
        return two_d({"delta", "delta_N", "bound_deg"}, x, y,
                     [c1](double d, double dn) { return dn < 0.0 ? kNaN : deg(nv_full(c1, d, dn)); });
    }
    if (id == "figure-8-right" || id == "figure-11-right") {
        const bool c1 = id == "figure-8-right";
        return two_d({"delta_T", "delta_N", "bound_deg"}, x, y, [c1](double dt, double dn) {
            return deg(nv_full(c1, std::hypot(dt, dn), std::abs(dn)));
        });
    }
    return one_d({"eps", "codim1_phi56.65_deg", "codim2_phi56.75_deg"}, x, [](double e) {
        return std::vector<double>{deg(etnl_eps_safe(e, kEtnlEpsPhiCodim1, 1)),
                                   deg(etnl_eps_safe(e, kEtnlEpsPhiCodimHigh, 2))};
    });
}

void write_csv(std::ostream& out, const CurveTable& table, const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << "\n";
    out.precision(12);
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            if (!std::isnan(row[i])) out << row[i];
        }
        out << "\n";
    }
}

}  // namespace surfacc
