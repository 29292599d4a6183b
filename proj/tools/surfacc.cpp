#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "surfacc/bounds.hpp"
#include "surfacc/curves.hpp"
#include "surfacc/errors.hpp"
#include "surfacc/mesh.hpp"
#include "surfacc/rdt.hpp"
#include "surfacc/sampling.hpp"
#include "surfacc/verify.hpp"

namespace {

using namespace surfacc;

constexpr const char* kVersion = "surfacc " SURFACC_VERSION;

enum ExitCode { kPass = 0, kViolation = 1, kUsage = 2, kNumeric = 3 };

int exit_code(Error::Kind kind) {
    switch (kind) {
        case Error::Kind::precondition:
        case Error::Kind::configuration:
        case Error::Kind::format:
        case Error::Kind::duplicate: return kUsage;
        case Error::Kind::degeneracy:
        case Error::Kind::ambiguity:
        case Error::Kind::convergence:
        case Error::Kind::consistency: return kNumeric;
    }
    return kNumeric;
}

void append_options(const CLI::App& app, const std::string& prefix, std::vector<std::string>& lines) {
    for (const CLI::Option* opt : app.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "version" || name == "config") continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
        } else {
            value = opt->get_default_str();
            if (value == "{}") value.clear();
        }
        lines.push_back(prefix + name + "=" + value);
    }
}

// Header lines recorded in every output: version and the resolved options of the command that ran.
std::vector<std::string> run_header(const CLI::App& root) {
    std::vector<std::string> lines{kVersion};
    append_options(root, "", lines);
    for (const CLI::App* sub : root.get_subcommands()) append_options(*sub, sub->get_name() + ".", lines);
    return lines;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_.open(path);
        if (!file_) throw ConfigError("cannot open " + path + " for writing");
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

GridSpec parse_grid(const std::string& text, const GridSpec& fallback) {
    if (text.empty()) return fallback;
    GridSpec g;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
        throw ConfigError("grid must be lo:hi:step, got '" + text + "'");
    if (!(g.step > 0.0) || !(g.hi >= g.lo)) throw ConfigError("grid needs lo <= hi and step > 0");
    return g;
}

bool is_angle(Formula f) {
    switch (f) {
        case Formula::interp:
        case Formula::proj_nearest: return false;
        default: return true;
    }
}

// ---- eval ----------------------------------------------------------------------------------

struct EvalArgs {
    std::string formula;
    std::optional<double> delta, delta_n, r, xc, L, R, lfs, ebs, phi, kappa, eps;
    int codim = 1;
    bool radians = false;
};

double need(const std::optional<double>& v, const char* flag) {
    if (!v) throw ConfigError(std::string("missing --") + flag);
    return *v;
}

int run_eval(const EvalArgs& a) {
    const auto angle_in = [&](const std::optional<double>& v, const char* flag) {
        const double x = need(v, flag);
        return a.radians ? x : to_radians(x);
    };
    BoundResult res = BoundResult::none(Formula::interp);
    std::string note;
    const std::string& f = a.formula;
    if (f == "interp") {
        res = interp_bound(need(a.r, "r"), need(a.xc, "xc"), need(a.L, "L"));
    } else if (f == "eta1") {
        res = eta1(need(a.delta, "delta"));
    } else if (f == "eta2") {
        res = eta2(need(a.delta, "delta"));
    } else if (f == "eta1-full") {
        res = eta1_full({need(a.delta, "delta"), need(a.delta_n, "delta-n")});
    } else if (f == "eta2-full") {
        res = eta2_full({need(a.delta, "delta"), need(a.delta_n, "delta-n")});
    } else if (f == "tnl") {
        res = tnl_bound(need(a.R, "R"), need(a.ebs, "ebs"), angle_in(a.phi, "phi"));
    } else if (f == "tnl-acdl" || f == "tnl-cheng" || f == "tnl-sqrt3") {
        const auto prior = prior_tnl_bounds(need(a.R, "R"), need(a.lfs, "lfs"));
        res = f == "tnl-acdl" ? prior.acdl : f == "tnl-cheng" ? prior.cheng : prior.sqrt3;
    } else if (f == "etnl") {
        res = etnl_bound(need(a.kappa, "kappa"), angle_in(a.phi, "phi"), a.codim);
    } else if (f == "etnl-eps") {
        res = etnl_eps_bound(need(a.eps, "eps"), angle_in(a.phi, "phi"), a.codim);
    } else if (f == "proj-nearest") {
        const auto b = proj_nearest_vertex_bound(need(a.r, "r"), need(a.ebs, "ebs"));
        res = b.bound;
        if (b.fallback) note = "fallback: sqrt(2) r";
    } else if (f == "nvl-log" || f == "nvl-ratio") {
        const auto prior = prior_nvl_bounds(need(a.delta, "delta"));
        res = f == "nvl-log" ? prior.log : prior.ratio;
    } else {
        throw ConfigError("unknown formula '" + f + "'");
    }

    const bool angle = is_angle(res.formula);
    const double shown = angle && !a.radians && res.valid ? to_degrees(res.value) : res.value;
    std::cout << "formula: " << formula_id(res.formula) << "\n";
    std::cout << "citation: " << formula_name(res.formula) << "\n";
    if (res.valid)
        std::cout << "value: " << std::setprecision(12) << shown
                  << (angle ? (a.radians ? " rad" : " deg") : "") << "\n";
    else
        std::cout << "value: none\n";
    std::cout << "valid: " << (res.valid ? "true" : "false") << "\n";
    if (!note.empty()) std::cout << "note: " << note << "\n";
    return kPass;
}

// ---- curves --------------------------------------------------------------------------------

struct CurvesArgs {
    std::string figure;
    std::string x, y;
    std::string out;
    bool list = false;
};

int run_curves(const CurvesArgs& a, const CLI::App& root) {
    if (a.list) {
        for (const auto& info : figure_catalog()) std::cout << info.id << "  " << info.description << "\n";
        return kPass;
    }
    if (a.figure.empty()) throw ConfigError("curves needs a figure id (see --list)");
    const FigureInfo& info = figure_info(a.figure);
    const GridSpec x = parse_grid(a.x, info.x);
    const GridSpec y = parse_grid(a.y, info.y);
    const CurveTable table = figure_curves(info.id, x, y);
    Output out(a.out);
    auto header = run_header(root);
    header.push_back(info.id + ": " + info.description);
    write_csv(out.stream(), table, header);
    return kPass;
}

// ---- verify --------------------------------------------------------------------------------

struct VerifyArgs {
    std::string lemma;
    std::string model = "sphere";
    std::vector<std::string> model_params;
    std::optional<std::uint64_t> seed;
    std::optional<double> eps;
    std::string lemma_config;
    std::vector<std::string> sets;
    std::string out;
    bool timing = false;
    bool list = false;
};

int run_verify(const VerifyArgs& a, int threads, const CLI::App& root) {
    if (a.list) {
        for (const auto& id : lemma_catalog()) std::cout << id << "\n";
        return kPass;
    }
    if (a.lemma.empty()) throw ConfigError("verify needs a lemma id (see --list)");
    KeyValueConfig cfg = default_lemma_config();
    if (!a.lemma_config.empty()) cfg.override_with(KeyValueConfig::load(a.lemma_config));
    for (const auto& s : a.sets) cfg.override_with(s);
    if (a.eps) cfg.set("corollary16.eps", std::to_string(*a.eps));
    if (a.seed) cfg.set("seed", std::to_string(*a.seed));

    SuiteOptions opts;
    opts.threads = threads;
    opts.seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
    const auto model = make_model(a.model, a.model_params);
    const LemmaReport report = run_lemma_suite(a.lemma, model, cfg, opts);

    nlohmann::json doc;
    doc["version"] = kVersion;
    doc["options"] = run_header(root);
    nlohmann::json settings = nlohmann::json::object();
    for (const auto& [k, v] : cfg.values()) settings[k] = v;
    doc["settings"] = settings;
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, val] : model->parameters()) params[k] = val;
    doc["model"] = {{"name", model->name()}, {"parameters", params}};
    doc["report"] = report.to_json(a.timing);
    Output out(a.out);
    out.stream() << doc.dump(2) << "\n";
    std::cerr << report.summary() << "\n";
    return report.pass() ? kPass : kViolation;
}

// ---- sample / rdt --------------------------------------------------------------------------

struct SampleArgs {
    std::string model = "torus";
    std::vector<std::string> model_params;
    double eps = 0.2;
    std::uint64_t seed = 1;
    double pool_refinement = 12.0;
    std::string out;
    bool check = false;
};

int run_sample(const SampleArgs& a, const CLI::App& root) {
    const auto model = make_model(a.model, a.model_params);
    SampleOptions opts;
    opts.pool_refinement = a.pool_refinement;
    const SampleSet set = generate_eps_sample(*model, a.eps, a.seed, opts);
    auto header = run_header(root);
    int code = kPass;
    if (a.check) {
        CoverageOptions cov;
        cov.generation = opts;
        const CoverageReport rep = verify_eps_sample(*model, set.vertices, a.eps, cov);
        std::ostringstream line;
        line << "coverage: " << (rep.pass ? "pass" : "fail") << " worst_ratio=" << std::setprecision(6)
             << rep.worst_ratio << " pool=" << rep.pool_size;
        header.push_back(line.str());
        std::cerr << line.str() << "\n";
        if (!rep.pass) code = kViolation;
    }
    Output out(a.out);
    write_sample(out.stream(), set, header);
    std::cerr << set.vertices.size() << " vertices\n";
    return code;
}

struct RdtArgs {
    std::string samples;
    std::string model = "torus";
    std::vector<std::string> model_params;
    double eps = 0.2;
    std::uint64_t seed = 1;
    std::string out;
    std::string duals;
};

int run_rdt(const RdtArgs& a, const CLI::App& root) {
    const auto model = make_model(a.model, a.model_params);
    if (model->ambient_dim() != 3 || model->codim() != 1)
        throw ConfigError("rdt needs a surface in R^3");
    std::vector<Point> vertices;
    if (!a.samples.empty()) {
        std::ifstream in(a.samples);
        if (!in) throw ConfigError("cannot read " + a.samples);
        vertices = read_sample(in).vertices;
    } else {
        vertices = generate_eps_sample(*model, a.eps, a.seed).vertices;
    }
    const RestrictedDelaunay rdt = restricted_delaunay(*model, vertices);
    for (const auto& w : rdt.warnings) std::cerr << "warning: " << w << "\n";
    const bool closed = is_closed_mesh(rdt);
    auto header = run_header(root);
    header.push_back(std::string("closed: ") + (closed ? "true" : "false"));
    Output out(a.out);
    write_off(out.stream(), rdt, header);
    if (!a.duals.empty()) {
        Output duals(a.duals);
        write_dual_table(duals.stream(), rdt, header);
    }
    std::cerr << rdt.vertices.size() << " vertices, " << rdt.triangles.size() << " triangles, "
              << (closed ? "closed" : "not closed") << "\n";
    return kPass;
}

// ---- analyze-mesh --------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string mesh;
    std::optional<double> lfs_const;
    bool lfs_column = false;
    std::string model;
    std::vector<std::string> model_params;
    int codim = 1;
    std::optional<double> phi;
    bool radians = false;
    std::string out;
};

int run_analyze(const AnalyzeArgs& a, const CLI::App& root) {
    const int sources = int(a.lfs_const.has_value()) + int(a.lfs_column) + int(!a.model.empty());
    if (sources != 1) throw ConfigError("give exactly one of --lfs-const, --lfs-column, --model");
    const TriangleMesh mesh = read_mesh(a.mesh, a.lfs_column);

    std::function<VertexFeatures(int)> features;
    std::shared_ptr<const SurfaceModel> model;
    if (a.lfs_const) {
        if (!(*a.lfs_const > 0.0)) throw ConfigError("--lfs-const must be positive");
        const double v = *a.lfs_const;
        features = [v](int) { return VertexFeatures{v, v}; };
    } else if (a.lfs_column) {
        features = [&mesh](int i) {
            const double v = mesh.vertex_values.at(static_cast<std::size_t>(i));
            if (!(v > 0.0)) throw FormatError("vertex " + std::to_string(i) + " has nonpositive lfs");
            return VertexFeatures{v, v};
        };
    } else {
        model = make_model(a.model, a.model_params);
        features = [&mesh, &model](int i) {
            const Point p = model->project(mesh.vertices.at(static_cast<std::size_t>(i)));
            return VertexFeatures{model->lfs(p), model->ebs(p)};
        };
    }
    const double phi_deg = a.phi ? (a.radians ? to_degrees(*a.phi) : *a.phi)
                                 : (a.codim == 1 ? kEtnlPhiCodim1 : kEtnlPhiCodimHigh);
    const auto rows = analyze_mesh(mesh, features, a.codim, to_radians(phi_deg));

    const auto angle = [&](double rad) { return a.radians ? rad : to_degrees(rad); };
    const auto cell = [](std::ostream& os, const BoundResult& b, double v) {
        if (b.valid) os << v;
    };
    Output out(a.out);
    std::ostream& os = out.stream();
    for (const auto& line : run_header(root)) os << "# " << line << "\n";
    os << "triangle,R,r,largest_angle,tnl_v0,tnl_v1,tnl_v2,tnl_v0_valid,tnl_v1_valid,tnl_v2_valid,kappa,etnl,"
          "etnl_valid\n";
    os << std::setprecision(12);
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const auto& r = rows[t];
        os << t << "," << r.circumradius << "," << r.min_radius << "," << angle(r.largest_angle);
        for (const auto& b : r.tnl) {
            os << ",";
            cell(os, b, angle(b.value));
        }
        for (const auto& b : r.tnl) os << "," << (b.valid ? 1 : 0);
        os << "," << r.kappa << ",";
        cell(os, r.etnl, angle(r.etnl.value));
        os << "," << (r.etnl.valid ? 1 : 0) << "\n";
    }
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximation bounds for simplices on smooth manifolds", "surfacc"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "TOML/INI file with option values; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--threads", threads, "Worker threads for verification")->check(CLI::PositiveNumber);

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "Evaluate one bound formula");
    e->add_option("formula", eval.formula,
                  "interp, eta1, eta2, eta1-full, eta2-full, tnl, tnl-acdl, tnl-cheng, tnl-sqrt3, etnl, etnl-eps, "
                  "proj-nearest, nvl-log, nvl-ratio")
        ->required();
    e->add_option("--delta", eval.delta, "|pq| / lfs(p)");
    e->add_option("--delta-n", eval.delta_n, "dist(q, T_p) / lfs(p)");
    e->add_option("--r", eval.r, "Min-containment radius");
    e->add_option("--xc", eval.xc, "|xc|");
    e->add_option("--L", eval.L, "Radius of the surface-free ball");
    e->add_option("--R", eval.R, "Circumradius");
    e->add_option("--lfs", eval.lfs, "Local feature size at the vertex");
    e->add_option("--ebs", eval.ebs, "Empty ball size");
    e->add_option("--phi", eval.phi, "Plane angle (degrees unless --radians)");
    e->add_option("--kappa", eval.kappa, "R / lfs");
    e->add_option("--eps", eval.eps, "Sampling parameter");
    e->add_option("--codim", eval.codim, "Codimension")->check(CLI::PositiveNumber);
    e->add_flag("--radians", eval.radians, "Angles in radians");

    CurvesArgs curves;
    auto* c = app.add_subcommand("curves", "Write the data behind a figure as CSV");
    c->add_option("figure", curves.figure, "Figure id");
    c->add_option("--x", curves.x, "x grid lo:hi:step");
    c->add_option("--y", curves.y, "y grid lo:hi:step (two-dimensional figures)");
    c->add_option("-o,--out", curves.out, "Output file (default stdout)");
    c->add_flag("--list", curves.list, "List figure ids");

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "Check a lemma against measured errors on a model surface");
    v->add_option("lemma", verify.lemma, "Lemma id");
    v->add_option("--model", verify.model, "sphere, torus, clifford, ellipsoid");
    v->add_option("--param", verify.model_params, "Model parameter key=value");
    v->add_option("--seed", verify.seed, "RNG seed");
    v->add_option("--eps", verify.eps, "Sampling parameter for corollary16");
    v->add_option("--lemma-config", verify.lemma_config, "Key-value file overriding lemma settings");
    v->add_option("--set", verify.sets, "Override one lemma setting key=value");
    v->add_option("-o,--out", verify.out, "JSON output file (default stdout)");
    v->add_flag("--timing", verify.timing, "Include runtime in the report");
    v->add_flag("--list", verify.list, "List lemma ids");

    SampleArgs sample;
    auto* s = app.add_subcommand("sample", "Generate an eps-sample of a model surface");
    s->add_option("--model", sample.model, "Model name");
    s->add_option("--param", sample.model_params, "Model parameter key=value");
    s->add_option("--eps", sample.eps, "Sampling parameter")->check(CLI::Range(1e-6, 1.0));
    s->add_option("--seed", sample.seed, "RNG seed");
    s->add_option("--pool-refinement", sample.pool_refinement, "Candidate pool refinement factor");
    s->add_option("-o,--out", sample.out, "Output file (default stdout)");
    s->add_flag("--check", sample.check, "Validate coverage on a denser pool");

    RdtArgs rdt;
    auto* r = app.add_subcommand("rdt", "Restricted Delaunay triangulation of a sample");
    r->add_option("--samples", rdt.samples, "Sample table; generated from --model and --eps when absent");
    r->add_option("--model", rdt.model, "Model name");
    r->add_option("--param", rdt.model_params, "Model parameter key=value");
    r->add_option("--eps", rdt.eps, "Sampling parameter when generating");
    r->add_option("--seed", rdt.seed, "RNG seed when generating");
    r->add_option("-o,--out", rdt.out, "OFF output (default stdout)");
    r->add_option("--duals", rdt.duals, "Dual point table output");

    AnalyzeArgs analyze;
    auto* m = app.add_subcommand("analyze-mesh", "Per-triangle bound report for an OFF/OBJ mesh");
    m->add_option("mesh", analyze.mesh, "Mesh file")->required();
    m->add_option("--lfs-const", analyze.lfs_const, "Constant lfs for every vertex");
    m->add_flag("--lfs-column", analyze.lfs_column, "Read lfs from an extra column on each vertex line");
    m->add_option("--model", analyze.model, "Analytic model providing lfs and ebs");
    m->add_option("--param", analyze.model_params, "Model parameter key=value");
    m->add_option("--codim", analyze.codim, "Codimension")->check(CLI::PositiveNumber);
    m->add_option("--phi", analyze.phi, "Angle for the extended bound (degrees unless --radians)");
    m->add_flag("--radians", analyze.radians, "Angles in radians");
    m->add_option("-o,--out", analyze.out, "CSV output (default stdout)");

    for (auto* sub : app.get_subcommands({})) sub->allow_config_extras(CLI::config_extras_mode::error);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& ok) {
        return app.exit(ok);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return kUsage;
    }

    try {
        if (*e) return run_eval(eval);
        if (*c) return run_curves(curves, app);
        if (*v) return run_verify(verify, threads, app);
        if (*s) return run_sample(sample, app);
        if (*r) return run_rdt(rdt, app);
        if (*m) return run_analyze(analyze, app);
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_code(err.kind());
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kNumeric;
    }
    return kUsage;
}
