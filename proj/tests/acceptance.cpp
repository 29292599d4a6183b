// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when all pass.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "surfacc/bounds.hpp"
#include "surfacc/geom.hpp"
#include "surfacc/surfaces.hpp"
#include "surfacc/verify.hpp"

using namespace surfacc;

namespace {

// Pinned tolerances.
constexpr double kSharpnessGap = 1e-9;
constexpr double kSharpnessSeconds = 10.0;
constexpr double kFigureAngleTol = 0.05;         // degrees
constexpr double kWitnessAngleTol = 1e-6;        // degrees
constexpr double kThresholdTol = 1e-6;
constexpr double kNearLimitTol = 0.01;           // degrees
constexpr double kSeriesRelTol = 1e-3;
constexpr double kAcdlRatio = 1.91, kAcdlRatioTol = 0.01;
constexpr double kChengRatio = 1.155, kChengRatioTol = 0.005;
constexpr double kEtnlTol = 0.5;                 // degrees
constexpr double kCorollaryAngle = 47.95;        // degrees
constexpr double kCorollarySeconds = 120.0;
constexpr double kWitnessTol = 1e-10;
constexpr double kSebCenterTol = 1e-10;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double deg(double rad) { return to_degrees(rad); }

Outcome c1() {
    const auto t0 = std::chrono::steady_clock::now();
    const double gap = sharpness_sphere(1000, 100, 1);
    const double t = seconds_since(t0);
    return {gap <= kSharpnessGap && t < kSharpnessSeconds,
            fmt("max gap %.3e over 1000 triangles x 100 points in %.1f s", gap, t)};
}

Outcome c2() {
    const double e = deg(eta1(0.5).value);
    const double w = deg(dual_tangency_witness(0.5, 0.0).angle);
    return {std::abs(e - 31.17) <= kFigureAngleTol && std::abs(w - e) <= kWitnessAngleTol,
            fmt("eta1(0.5) = %.6f deg, witness angle differs by %.2e deg", e, std::abs(w - e))};
}

Outcome c3() {
    const double a = eta_threshold(Eta::eta1, std::numbers::pi / 2.0);
    const double b = eta_threshold(Eta::eta1, std::numbers::pi);
    const double c = eta_threshold(Eta::eta2, std::numbers::pi / 2.0);
    const double ea = std::sqrt(2.0 * std::sqrt(2.0) - 2.0);
    const double eb = std::sqrt(4.0 * std::sqrt(5.0) - 8.0);
    const double ec = std::sqrt((std::sqrt(5.0) - 1.0) / 2.0);
    const double near = deg(eta1(eta1_limit() - 1e-12).value);
    const bool ok = std::abs(a - ea) <= kThresholdTol && std::abs(b - eb) <= kThresholdTol &&
                    std::abs(c - ec) <= kThresholdTol && std::abs(near - 180.0) <= kNearLimitTol &&
                    std::abs(a - 0.91018) <= kThresholdTol + 5e-6 && std::abs(b - 0.97174) <= kThresholdTol + 5e-6 &&
                    std::abs(c - 0.78615) <= kThresholdTol + 5e-6;
    return {ok, fmt("eta1=90 at %.8f, eta1=180 at %.8f, eta2=90 at %.8f, eta1 just below its limit %.4f deg", a, b,
                    c, near)};
}

Outcome c4() {
    const auto f1 = fit_eta_series(Eta::eta1);
    const auto f2 = fit_eta_series(Eta::eta2);
    const std::array<double, 4> expected{7.0 / 24.0, 123.0 / 640.0, 5.0 / 12.0, 57.0 / 160.0};
    const std::array<double, 4> got{f1[0], f1[1], f2[0], f2[1]};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(got[i] / expected[i] - 1.0));
    return {worst <= kSeriesRelTol, fmt("eta1 (%.6f, %.6f), eta2 (%.6f, %.6f), worst relative error %.2e", got[0],
                                        got[1], got[2], got[3], worst)};
}

Outcome c5() {
    const auto p = prior_tnl_bounds(1e-4, 1.0);
    const double acdl = p.acdl.value / p.sqrt3.value;
    const double cheng = p.cheng.value / p.sqrt3.value;
    int bad = 0;
    for (int i = 1; i <= 1000; ++i) {
        const double d = eta1_limit() * i / 1001.0;
        const double e = eta1(d).value;
        if (!(e <= -std::log1p(-d) && e <= d / (1.0 - d))) ++bad;
    }
    return {std::abs(acdl - kAcdlRatio) <= kAcdlRatioTol && std::abs(cheng - kChengRatio) <= kChengRatioTol && bad == 0,
            fmt("ACDL/new %.4f, Cheng/new %.4f, %d grid points above a prior bound", acdl, cheng, bad)};
}

Outcome c6() {
    const double pi = std::numbers::pi;
    const std::array<double, 4> v{deg(etnl_bound(0.3734, 49.0 * pi / 180.0, 1).value),
                                  deg(etnl_bound(0.3527, 48.5 * pi / 180.0, 2).value),
                                  deg(etnl_eps_bound(0.3202, 56.65 * pi / 180.0, 1).value),
                                  deg(etnl_eps_bound(0.3189, 56.75 * pi / 180.0, 2).value)};
    bool ok = true;
    for (double x : v) ok = ok && std::abs(x - 90.0) <= kEtnlTol;
    return {ok, fmt("%.3f, %.3f, %.3f, %.3f deg", v[0], v[1], v[2], v[3])};
}

Outcome c7() {
    KeyValueConfig cfg = default_lemma_config();
    cfg.set("corollary16.eps", "0.2");
    cfg.set("corollary16.points", "50");
    const auto t0 = std::chrono::steady_clock::now();
    const LemmaReport r = run_lemma_suite("corollary16", make_model("torus"), cfg, {1, 1});
    const double t = seconds_since(t0);
    const CorollaryCoefficients coef = corollary_interp_coefs(0.2);
    double vertices = 0.0;
    for (const auto& [k, v] : r.facts)
        if (k == "vertices") vertices = v;
    bool ok = r.pass() && t < kCorollarySeconds;
    for (const char* name : {"interp-lfs-xtilde", "interp-lfs-u", "normal-angle", "projection-in-dual-ball",
                             "vertex-nearer-than-u", "closed-mesh"}) {
        const CheckStats& c = r.check(name);
        ok = ok && c.violations == 0 && c.trials > c.vacuous;
    }
    const double max_angle = deg(r.check("normal-angle").max_measured);
    ok = ok && max_angle < kCorollaryAngle;
    return {ok, fmt("%.0f vertices, %zu comparisons, %zu violations, coefficients %.6f / %.6f, max angle %.3f deg, "
                    "%.1f s",
                    vertices, r.trials(), r.violations(), coef.lfs_xtilde, coef.lfs_u, max_angle, t)};
}

Outcome c8() {
    const auto clifford = make_model("clifford");
    KeyValueConfig cfg = default_lemma_config();
    cfg.set("nvl2.trials", "10000");
    cfg.set("tnl.trials", "10000");
    cfg.set("etnl.trials", "10000");
    cfg.set("etnl.kappa_max", "0.3");
    std::size_t trials = 0, violations = 0;
    std::ostringstream os;
    for (const char* lemma : {"nvl-codim2", "tnl", "etnl"}) {
        const LemmaReport r = run_lemma_suite(lemma, clifford, cfg, {1, 1});
        trials += r.trials();
        violations += r.violations();
        os << lemma << " " << r.violations() << "/" << r.trials() << " ";
    }
    return {violations == 0 && trials >= 30000, os.str() + "violations/comparisons"};
}

Outcome c9() {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Eigen::Vector3d below(0.0, -1.0, 0.0), above(0.0, 1.0, 0.0);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const double d = eta1_limit() * (1e-4 + (1.0 - 2e-4) * u(rng));
        const double q2 = u(rng) * d * d / 2.0;
        const auto w = dual_tangency_witness(d, q2);
        const Eigen::Vector3d a = w.q - w.z, b = w.z_prime - w.q;
        worst = std::max({worst, std::abs(w.z.norm() - 1.0), std::abs(w.z_prime.norm() - 1.0),
                          a.cross(b).norm() / (a.norm() + b.norm()), std::abs(w.ell * w.ell_prime - (1.0 - d * d)),
                          std::abs((w.z - below).norm() - (w.ell + 1.0)),
                          std::abs((w.z_prime - above).norm() - (w.ell_prime + 1.0))});
    }
    return {worst <= kWitnessTol, fmt("worst postcondition residual %.2e over 1000 pairs", worst)};
}

Outcome c10() {
    std::mt19937_64 rng(10);
    int r_gt_R = 0, seb_off = 0, complement_off = 0;
    const int n = 1000;
    for (int t = 0; t < n; ++t) {
        const int d = 2 + t % 5;
        const int j = 1 + t % std::min(d, 3);
        std::vector<Point> v;
        std::vector<Eigen::VectorXd> raw;
        for (int i = 0; i <= j; ++i) v.push_back(oracle::random_vector(d, rng));
        for (const auto& p : v) raw.push_back(p);
        const Simplex s(v);
        const Ball cb = circumball(s);
        const Ball mb = min_enclosing_ball(s);
        if (mb.radius > cb.radius * (1.0 + 1e-12)) ++r_gt_R;
        const oracle::Sphere ref = oracle::smallest_enclosing_sphere(raw);
        if ((mb.center - ref.center).norm() > kSebCenterTol * std::max(1.0, mb.radius)) ++seb_off;

        const int dd = 3 + t % 4;
        const int k = 1 + t % (dd - 1);
        Eigen::MatrixXd fa(dd, k), ga(dd, k);
        for (int i = 0; i < k; ++i) fa.col(i) = oracle::random_vector(dd, rng), ga.col(i) = oracle::random_vector(dd, rng);
        const Flat f = Flat::spanned_by(Point::Zero(dd), fa), g = Flat::spanned_by(Point::Zero(dd), ga);
        if (std::abs(flat_angle(f, g) - flat_angle(orthogonal_complement(f), orthogonal_complement(g))) > 1e-9)
            ++complement_off;
    }
    const double lip_torus = lipschitz_check(TorusModel(2.0, 0.5), 10000, 10);
    const double lip_fat = lipschitz_check(TorusModel(1.0, 0.8), 10000, 11);
    const double lip_sphere = lipschitz_check(SphereModel(1.0, 2, 3), 1000, 12);
    const bool ok = r_gt_R == 0 && seb_off == 0 && complement_off == 0 && lip_torus <= 1e-9 && lip_fat <= 1e-9 &&
                    lip_sphere <= 0.0;
    return {ok, fmt("%d instances: r>R %d, center mismatches %d, complement mismatches %d; lipschitz excess %.1e / "
                    "%.1e / %.1e",
                    n, r_gt_R, seb_off, complement_off, lip_torus, lip_fat, lip_sphere)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"C1 sphere sharpness", c1},        {"C2 eta1(0.5) and witness", c2},
        {"C3 thresholds", c3},              {"C4 series coefficients", c4},
        {"C5 prior-bound ratios", c5},      {"C6 extended TNL thresholds", c6},
        {"C7 eps-sample end to end", c7},   {"C8 codimension-2 soundness", c8},
        {"C9 witness soundness", c9},       {"C10 geometry property suites", c10},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
