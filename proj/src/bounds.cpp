#include "surfacc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "surfacc/errors.hpp"
#include "surfacc/geom.hpp"

namespace surfacc {

namespace {

constexpr double kClampTol = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<double> safe_asin(double x) {
    if (!(x >= -1.0 - kClampTol && x <= 1.0 + kClampTol)) return std::nullopt;
    return std::asin(std::clamp(x, -1.0, 1.0));
}

void require(bool cond, const char* msg) {
    if (!cond) throw PreconditionError(msg);
}

// 1 - cos(eta1) as a function of delta.
double eta1_gap(double delta) { return delta * delta / (2.0 * std::sqrt(1.0 - delta * delta)); }

void check_nv_input(const NormalVariationInput& in) {
    require(std::isfinite(in.delta) && in.delta >= 0.0, "delta must be finite and nonnegative");
    require(std::isfinite(in.delta_n) && in.delta_n >= 0.0, "delta_N must be finite and nonnegative");
    const double cap = in.delta * in.delta / 2.0;
    require(in.delta_n <= cap + 1e-15 * std::max(1.0, cap), "delta_N exceeds delta^2/2");
    require(in.delta_n <= in.delta, "delta_N exceeds delta");
}

void require_phi(double phi, double max_phi) {
    require(std::isfinite(phi) && phi > 0.0 && phi <= max_phi + 1e-12, "phi out of range");
}

BoundResult two_branch(Formula id, Eta which, double eta_arg1, double sin_arg1, double eta_scale2, double eta_arg2,
                       double sin_arg2) {
    const BoundResult e1 = eta(which, eta_arg1);
    const BoundResult e2 = eta(which, eta_arg2);
    const auto s1 = safe_asin(sin_arg1);
    const auto s2 = safe_asin(sin_arg2);
    if (!e1.valid || !e2.valid || !s1 || !s2) return BoundResult::none(id);
    return BoundResult::ok(id, std::max(e1.value + *s1, eta_scale2 * e2.value + *s2));
}

}  // namespace

std::string_view formula_id(Formula f) {
    switch (f) {
        case Formula::interp: return "interp";
        case Formula::eta1: return "eta1";
        case Formula::eta1_full: return "eta1-full";
        case Formula::eta2: return "eta2";
        case Formula::eta2_full: return "eta2-full";
        case Formula::tnl: return "tnl";
        case Formula::acdl_tnl: return "tnl-acdl";
        case Formula::cheng_tnl: return "tnl-cheng";
        case Formula::sqrt3_tnl: return "tnl-sqrt3";
        case Formula::etnl: return "etnl";
        case Formula::etnl_eps: return "etnl-eps";
        case Formula::proj_nearest: return "proj-nearest";
        case Formula::log_nvl: return "nvl-log";
        case Formula::ratio_nvl: return "nvl-ratio";
    }
    return "unknown";
}

std::string_view formula_name(Formula f) {
    switch (f) {
        case Formula::interp: return "Surface Interpolation Lemma: distance from a simplex point to its projection";
        case Formula::eta1: return "Normal Variation Lemma, codimension 1";
        case Formula::eta1_full: return "Normal Variation Lemma, codimension 1, with known normal offset";
        case Formula::eta2: return "Normal Variation Lemma, any codimension";
        case Formula::eta2_full: return "Normal Variation Lemma, any codimension, with known normal offset";
        case Formula::tnl: return "Triangle Normal Lemma at a vertex";
        case Formula::acdl_tnl: return "Amenta-Choi-Dey-Leekha triangle normal bound";
        case Formula::cheng_tnl: return "Cheng-Dey-Edelsbrunner-Sullivan triangle normal bound";
        case Formula::sqrt3_tnl: return "Triangle Normal Lemma at the largest-angle vertex";
        case Formula::etnl: return "Extended Triangle Normal Lemma";
        case Formula::etnl_eps: return "Extended Triangle Normal Lemma for restricted Delaunay triangles";
        case Formula::proj_nearest: return "distance from a projected point to its nearest simplex vertex";
        case Formula::log_nvl: return "Amenta-Dey normal variation bound -ln(1 - delta)";
        case Formula::ratio_nvl: return "Amenta-Dey normal variation bound delta / (1 - delta)";
    }
    return "unknown";
}

BoundResult BoundResult::none(Formula f) { return {kNaN, false, f}; }

double eta1_limit() { return std::sqrt(4.0 * std::sqrt(5.0) - 8.0); }
double eta2_limit() { return std::sqrt((std::sqrt(5.0) - 1.0) / 2.0); }

BoundResult interp_bound(double r, double dist_xc, double L) {
    require(std::isfinite(r) && r >= 0.0, "r must be finite and nonnegative");
    require(std::isfinite(L) && L > 0.0, "L must be positive");
    require(std::isfinite(dist_xc) && dist_xc >= 0.0, "|xc| must be finite and nonnegative");
    require(dist_xc <= r * (1.0 + 1e-12) + 1e-15, "|xc| exceeds r");
    dist_xc = std::min(dist_xc, r);
    if (!(r < L)) return BoundResult::none(Formula::interp);
    // L - sqrt(L^2 - (r^2 - xc^2)), written without cancellation.
    const double h = (r - dist_xc) * (r + dist_xc);
    return BoundResult::ok(Formula::interp, h / (L + std::sqrt(L * L - h)));
}

double interp_taylor_leading(double r, double L) {
    require(std::isfinite(L) && L > 0.0, "L must be positive");
    require(std::isfinite(r) && r >= 0.0 && r < L, "need 0 <= r < L");
    return r * r / (2.0 * L);
}

BoundResult eta1(double delta) {
    require(std::isfinite(delta) && delta >= 0.0, "delta must be finite and nonnegative");
    if (!(delta < eta1_limit())) return BoundResult::none(Formula::eta1);
    // arccos(1 - g) = 2 arcsin(sqrt(g / 2)) keeps precision for small delta.
    const auto a = safe_asin(std::sqrt(eta1_gap(delta) / 2.0));
    if (!a) return BoundResult::none(Formula::eta1);
    return BoundResult::ok(Formula::eta1, 2.0 * *a);
}

BoundResult eta1_full(const NormalVariationInput& in) {
    check_nv_input(in);
    const double d2 = in.delta * in.delta;
    const double n2 = in.delta_n * in.delta_n;
    if (!(in.delta < eta1_limit())) return BoundResult::none(Formula::eta1_full);
    const double num = d2 - d2 * d2 / 2.0 - 2.0 * n2;
    const double den = std::sqrt((1.0 - d2) * ((2.0 - d2) * (2.0 - d2) - 4.0 * n2));
    const auto a = safe_asin(std::sqrt(std::max(0.0, num / den) / 2.0));
    if (!a) return BoundResult::none(Formula::eta1_full);
    return BoundResult::ok(Formula::eta1_full, 2.0 * *a);
}

BoundResult eta2(double delta) {
    require(std::isfinite(delta) && delta >= 0.0, "delta must be finite and nonnegative");
    if (!(delta < eta2_limit())) return BoundResult::none(Formula::eta2);
    // arccos(sqrt(1 - y)) = arcsin(sqrt(y)).
    const auto a = safe_asin(delta / std::pow(1.0 - delta * delta, 0.25));
    if (!a) return BoundResult::none(Formula::eta2);
    return BoundResult::ok(Formula::eta2, *a);
}

BoundResult eta2_full(const NormalVariationInput& in) {
    check_nv_input(in);
    if (!(in.delta < eta2_limit())) return BoundResult::none(Formula::eta2_full);
    const double d2 = in.delta * in.delta;
    const double g = eta1_gap(in.delta);
    // 1 - cos^2 with cos^2 = (1 - g)^2 - delta_N^2 / (1 - delta^2).
    const double sin2 = g * (2.0 - g) + in.delta_n * in.delta_n / (1.0 - d2);
    const auto a = safe_asin(std::sqrt(sin2));
    if (!a) return BoundResult::none(Formula::eta2_full);
    return BoundResult::ok(Formula::eta2_full, *a);
}

BoundResult eta(Eta which, double delta) { return which == Eta::eta1 ? eta1(delta) : eta2(delta); }

std::array<Rational, 4> eta_series_coefficients(Eta which) {
    if (which == Eta::eta1) return {Rational{1, 1}, Rational{7, 24}, Rational{123, 640}, Rational{1083, 7168}};
    return {Rational{1, 1}, Rational{5, 12}, Rational{57, 160}, Rational{327, 896}};
}

BoundResult tnl_bound(double R, double ebs_v, double phi) {
    require(std::isfinite(R) && R >= 0.0, "R must be finite and nonnegative");
    require(std::isfinite(ebs_v) && ebs_v > 0.0, "ebs must be positive");
    require(std::isfinite(phi) && phi > 0.0 && phi < std::numbers::pi, "phi must lie in (0, pi)");
    const double factor = std::max(1.0 / std::tan(phi / 2.0), 1.0);
    const auto a = safe_asin(R / ebs_v * factor);
    if (!a) return BoundResult::none(Formula::tnl);
    return BoundResult::ok(Formula::tnl, *a);
}

PriorTnlBounds prior_tnl_bounds(double R, double lfs_v) {
    require(std::isfinite(R) && R >= 0.0, "R must be finite and nonnegative");
    require(std::isfinite(lfs_v) && lfs_v > 0.0, "lfs must be positive");
    const double rho = R / lfs_v;
    PriorTnlBounds out{BoundResult::none(Formula::acdl_tnl), BoundResult::none(Formula::cheng_tnl),
                       BoundResult::none(Formula::sqrt3_tnl)};
    if (rho <= 0.433) {
        const auto a = safe_asin(rho);
        const auto b = a ? safe_asin(2.0 / std::sqrt(3.0) * std::sin(2.0 * *a)) : std::nullopt;
        if (a && b) out.acdl = BoundResult::ok(Formula::acdl_tnl, *a + *b);
    }
    if (const auto c = safe_asin(2.0 * rho)) out.cheng = BoundResult::ok(Formula::cheng_tnl, *c);
    if (const auto s = safe_asin(std::sqrt(3.0) * rho)) out.sqrt3 = BoundResult::ok(Formula::sqrt3_tnl, *s);
    return out;
}

BoundResult etnl_bound(double kappa, double phi, int codim) {
    require(std::isfinite(kappa) && kappa >= 0.0 && kappa <= 0.5, "kappa must lie in [0, 1/2]");
    require_phi(phi, std::numbers::pi / 3.0);
    require(codim >= 1, "codimension must be positive");
    const Eta which = codim == 1 ? Eta::eta1 : Eta::eta2;
    return two_branch(Formula::etnl, which, std::sqrt(2.0) * kappa, kappa / std::tan(phi / 2.0), 1.0, 2.0 * kappa,
                      kappa / std::tan(std::numbers::pi / 4.0 - phi / 4.0));
}

BoundResult etnl_eps_bound(double eps, double phi, int codim) {
    require(std::isfinite(eps) && eps >= 0.0 && eps <= 1.0 / 3.0 + 1e-15, "eps must lie in [0, 1/3]");
    require_phi(phi, std::numbers::pi / 3.0);
    require(codim >= 1, "codimension must be positive");
    const Eta which = codim == 1 ? Eta::eta1 : Eta::eta2;
    const double e = eps / (1.0 - eps);
    return two_branch(Formula::etnl_eps, which, e, e / std::tan(phi / 2.0), 2.0, eps,
                      e / std::tan(std::numbers::pi / 4.0 - phi / 4.0));
}

CorollaryCoefficients corollary_interp_coefs(double eps) {
    require(std::isfinite(eps) && eps >= 0.0 && eps < 0.5, "eps must lie in [0, 1/2)");
    const double e = eps / (1.0 - eps);
    // 1 - sqrt(1 - e^2) and 1 - eps - sqrt(1 - 2 eps), both without cancellation.
    const double a = e * e / (1.0 + std::sqrt(1.0 - e * e));
    const double b = eps * eps / (1.0 - eps + std::sqrt(1.0 - 2.0 * eps));
    return {a, b};
}

NearestVertexBound proj_nearest_vertex_bound(double r, double ebs_x) {
    require(std::isfinite(r) && r >= 0.0, "r must be finite and nonnegative");
    require(std::isfinite(ebs_x) && ebs_x > 0.0, "ebs must be positive");
    if (r < ebs_x) {
        const double gap = r * r / (ebs_x + std::sqrt(ebs_x * ebs_x - r * r));
        return {BoundResult::ok(Formula::proj_nearest, std::sqrt(2.0 * ebs_x * gap)), false};
    }
    return {BoundResult::ok(Formula::proj_nearest, std::sqrt(2.0) * r), true};
}

FeatureTranslation feature_translation(double lfs_q, double eps) {
    require(std::isfinite(lfs_q) && lfs_q >= 0.0, "lfs must be finite and nonnegative");
    require(std::isfinite(eps) && eps >= 0.0 && eps < 1.0, "eps must lie in [0, 1)");
    const double up = lfs_q / (1.0 - eps);
    return {up, eps * up};
}

PriorNvlBounds prior_nvl_bounds(double delta) {
    require(std::isfinite(delta) && delta >= 0.0, "delta must be finite and nonnegative");
    PriorNvlBounds out{BoundResult::none(Formula::log_nvl), BoundResult::none(Formula::ratio_nvl)};
    if (delta <= 1.0 - std::exp(-std::numbers::pi)) out.log = BoundResult::ok(Formula::log_nvl, -std::log1p(-delta));
    if (delta < 1.0 && delta / (1.0 - delta) <= std::numbers::pi)
        out.ratio = BoundResult::ok(Formula::ratio_nvl, delta / (1.0 - delta));
    return out;
}

DualTangencyWitness dual_tangency_witness(double delta, double q2) {
    require(std::isfinite(delta) && delta > 0.0 && delta < eta1_limit(), "delta out of the witness domain");
    require(std::isfinite(q2) && q2 >= 0.0 && q2 <= delta * delta / 2.0, "q2 must lie in [0, delta^2/2]");
    const double n2 = delta * delta;
    const double q1 = std::sqrt(n2 - q2 * q2);
    const Eigen::Vector3d q(q1, q2, 0.0);

    const double ell = std::sqrt((1.0 - n2) * (2.0 + 2.0 * q2 - n2) / (2.0 - 2.0 * q2 - n2));
    const double ell_p = (1.0 - n2) / ell;
    // z lies on the unit sphere, at distance ell from q, tangent to the ball around (0,-1,0).
    const double z2 = (ell + 1.0) * (ell + 1.0) / 2.0 - 1.0;
    const double rim = 1.0 - z2 * z2;
    const double chord = ell * ell - (z2 - q2) * (z2 - q2);
    const double z1 = (rim - chord + q1 * q1) / (2.0 * q1);
    const double z3sq = rim - z1 * z1;
    if (z3sq < -1e-12) throw ConsistencyError("dual tangency witness: negative radicand for z3");
    const Eigen::Vector3d z(z1, z2, std::sqrt(std::max(0.0, z3sq)));
    const Eigen::Vector3d zp = q + (ell_p / ell) * (q - z);

    const Eigen::Vector3d below(0.0, -1.0, 0.0);
    const Eigen::Vector3d above(0.0, 1.0, 0.0);
    const double residuals[] = {
        z.norm() - 1.0,
        zp.norm() - 1.0,
        ell * ell_p - (1.0 - n2),
        (z - below).norm() - (ell + 1.0),
        (zp - above).norm() - (ell_p + 1.0),
        (z - q).norm() - ell,
        (zp - q).norm() - ell_p,
    };
    for (double res : residuals)
        if (!(std::abs(res) <= 1e-10)) throw ConsistencyError("dual tangency witness: postcondition failed");

    const double c = std::clamp((z2 - q2) / ell, -1.0, 1.0);
    return {q, z, zp, ell, ell_p, std::acos(c)};
}

}  // namespace surfacc
