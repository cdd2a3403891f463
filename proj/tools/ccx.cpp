// ccx: compensated convex transforms of sampled grids, singularity maps,
// landscape sweeps, minimal bounding spheres and medial-axis maps.
//
// Exit codes: 0 success, 1 bad input or I/O, 2 a numerical check failed.

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <ccx/ccx.hpp>

namespace {

using nlohmann::json;

struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& s, const std::string& what) {
    try {
        return ccx::detail::split_list(s, what);
    } catch (const std::exception& e) {
        throw std::invalid_argument(e.what());
    }
}

// "a:r:b" geometric schedule, or a single value.
std::vector<double> parse_lambdas(const std::string& s) {
    const std::size_t c1 = s.find(':');
    if (c1 == std::string::npos) {
        const std::vector<double> one = parse_list(s, "lambdas");
        if (one.size() != 1) throw std::invalid_argument("lambdas: expected 'start:factor:end' or a single value");
        return one;
    }
    const std::size_t c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("lambdas: expected 'start:factor:end'");
    const double a = std::stod(s.substr(0, c1));
    const double r = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    const double b = std::stod(s.substr(c2 + 1));
    return ccx::geometric_lambdas(a, r, b);
}

ccx::GridFormat parse_format(const std::string& s) {
    if (s == "csv") return ccx::GridFormat::csv;
    if (s == "bin") return ccx::GridFormat::bin;
    if (s == "pgm") return ccx::GridFormat::pgm;
    throw std::invalid_argument("format: expected csv, bin or pgm");
}

std::string format_ext(ccx::GridFormat f) {
    switch (f) {
        case ccx::GridFormat::csv: return "csv";
        case ccx::GridFormat::bin: return "bin";
        default: return "pgm";
    }
}

ccx::TestFunctionRef fn_from_flags(const std::string& name, const std::string& params) {
    json j = params.empty() ? json::object() : json::parse(params);
    if (!j.is_object()) throw std::invalid_argument("fn-params: expected a JSON object");
    j["type"] = name;
    return ccx::test_function_from_json(j);
}

void emit_json(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
        out << text;
        if (!out) throw std::runtime_error(out_path + ": write failed");
    }
}

json sphere_json(const ccx::Sphere& s) {
    json j;
    j["centre"] = s.centre;
    j["radius"] = s.radius;
    j["support"] = s.support;
    return j;
}

struct TransformArgs {
    std::string in, out, kind = "lower", format = "csv";
    double lambda = 0.0, tau = 0.0;
};

struct SingmapArgs {
    std::string in, out, kind = "ridge", format = "csv";
    double lambda = 0.0;
};

struct SweepArgs {
    std::string in, fn, fn_params, lambdas, kind = "ridge", out;
    std::vector<std::string> probes;
    bool extrapolate = false;
};

struct GradientArgs {
    std::string in, fn, fn_params, out, format = "csv", kind = "upper";
    std::vector<std::string> probes;
    double lambda = 0.0;
    bool check = false;
};

struct MinisphereArgs {
    std::string points, out;
    bool jung = false, centre_hull = false;
};

struct MedialArgs {
    std::string mask, sites, out, sqdist_out, format = "csv", check_probe, lambdas;
    std::string dims, origin, spacing;
    double lambda = 0.0;
};

struct OracleArgs {
    std::string fn, fn_params, out;
    std::vector<std::string> probes;
};

struct DcArgs {
    std::string pair, probe, lambdas = "4:2:256", out;
    int random_pairs = 0, dim = 1;
    unsigned long long seed = 1;
    double tol = 0.01;
};

int run_transform(const TransformArgs& a) {
    const ccx::ScalarGrid f = ccx::read_grid(a.in);
    ccx::ScalarGrid g;
    if (a.kind == "lower") {
        g = ccx::lower_transform(f, a.lambda);
    } else if (a.kind == "upper") {
        g = ccx::upper_transform(f, a.lambda);
    } else if (a.kind == "mixed-ul") {
        g = ccx::mixed_transform(f, a.lambda, a.tau, ccx::TransformKind::mixed_ul);
    } else if (a.kind == "mixed-lu") {
        g = ccx::mixed_transform(f, a.lambda, a.tau, ccx::TransformKind::mixed_lu);
    } else {
        throw std::invalid_argument("kind: expected lower, upper, mixed-ul or mixed-lu");
    }
    ccx::write_grid(a.out, g, parse_format(a.format));
    return 0;
}

int run_singmap(const SingmapArgs& a) {
    const ccx::ScalarGrid f = ccx::read_grid(a.in);
    std::string kind = a.kind;
    bool scale1 = false;
    const std::string prefix = "scale1-";
    if (kind.rfind(prefix, 0) == 0) {
        scale1 = true;
        kind = kind.substr(prefix.size());
    }
    ccx::SingularityKind sk;
    if (kind == "ridge") sk = ccx::SingularityKind::ridge;
    else if (kind == "valley") sk = ccx::SingularityKind::valley;
    else if (kind == "edge") sk = ccx::SingularityKind::edge;
    else throw std::invalid_argument("kind: expected [scale1-]ridge, [scale1-]valley or [scale1-]edge");
    const ccx::ScalarGrid m =
        scale1 ? ccx::scale1_map(f, a.lambda, sk) : ccx::singular_map(f, a.lambda, sk);
    ccx::write_grid(a.out, m, parse_format(a.format));
    return 0;
}

ccx::SingularityKind parse_sing_kind(const std::string& s) {
    if (s == "ridge") return ccx::SingularityKind::ridge;
    if (s == "valley") return ccx::SingularityKind::valley;
    if (s == "edge") return ccx::SingularityKind::edge;
    throw std::invalid_argument("kind: expected ridge, valley or edge");
}

int run_sweep(const SweepArgs& a) {
    if (a.probes.empty()) throw std::invalid_argument("sweep: at least one --probe is required");
    const std::vector<double> lambdas = parse_lambdas(a.lambdas);
    const ccx::SingularityKind kind = parse_sing_kind(a.kind);
    ccx::SweepOptions opt;
    opt.extrapolate = a.extrapolate;
    json reports = json::array();
    if (!a.fn.empty()) {
        const ccx::TestFunctionRef tf = fn_from_flags(a.fn, a.fn_params);
        for (const std::string& ps : a.probes) {
            const ccx::Point probe = parse_list(ps, "probe");
            reports.push_back(ccx::to_json(ccx::landscape_sweep(*tf, probe, lambdas, kind, opt)));
        }
    } else if (!a.in.empty()) {
        const ccx::ScalarGrid f = ccx::read_grid(a.in);
        for (const std::string& ps : a.probes) {
            const ccx::Point probe = parse_list(ps, "probe");
            reports.push_back(ccx::to_json(ccx::landscape_sweep(f, probe, lambdas, kind, opt)));
        }
    } else {
        throw std::invalid_argument("sweep: provide --fn or --in");
    }
    emit_json(json{{"reports", reports}}, a.out);
    return 0;
}

int run_gradient(const GradientArgs& a) {
    ccx::TransformKind tk;
    if (a.kind == "upper") tk = ccx::TransformKind::upper;
    else if (a.kind == "lower") tk = ccx::TransformKind::lower;
    else throw std::invalid_argument("kind: expected lower or upper");

    if (!a.fn.empty()) {
        const ccx::TestFunctionRef tf = fn_from_flags(a.fn, a.fn_params);
        if (a.probes.empty()) throw std::invalid_argument("gradient: oracle mode needs --probe");
        json reports = json::array();
        for (const std::string& ps : a.probes) {
            const ccx::Point probe = parse_list(ps, "probe");
            json r;
            r["probe"] = probe;
            r["lambda"] = a.lambda;
            r["gradient"] = ccx::gradient_at_probe(*tf, probe, a.lambda, tk);
            reports.push_back(r);
        }
        emit_json(json{{"reports", reports}}, a.out);
        return 0;
    }
    if (a.in.empty()) throw std::invalid_argument("gradient: provide --fn or --in");
    const ccx::ScalarGrid f = ccx::read_grid(a.in);
    if (a.check) {
        const ccx::GradientLipschitzReport rep = ccx::gradient_lipschitz_check(f, a.lambda);
        json r;
        r["max_ratio"] = rep.max_ratio;
        r["bound"] = rep.bound;
        r["slack"] = rep.slack;
        r["ok"] = rep.ok;
        emit_json(r, a.out);
        if (!rep.ok) throw CheckFailed("gradient smoothness check failed");
        return 0;
    }
    if (a.out.empty()) throw std::invalid_argument("gradient: grid mode needs --out");
    const ccx::ScalarGrid base = tk == ccx::TransformKind::upper ? ccx::upper_transform(f, a.lambda)
                                                                 : ccx::lower_transform(f, a.lambda);
    const std::vector<ccx::ScalarGrid> grads = ccx::gradient_grids(base);
    const ccx::GridFormat fmt = parse_format(a.format);
    for (std::size_t k = 0; k < grads.size(); ++k)
        ccx::write_grid(a.out + ".ax" + std::to_string(k) + "." + format_ext(fmt), grads[k], fmt);
    return 0;
}

int run_minisphere(const MinisphereArgs& a) {
    const std::vector<ccx::Point> pts = ccx::read_points_csv(a.points);
    const ccx::Sphere s = ccx::min_bounding_sphere(pts);
    json r;
    r["sphere"] = sphere_json(s);
    bool failed = false;
    if (a.jung) {
        const ccx::JungReport jr = ccx::jung_check(pts);
        r["jung"] = {{"radius", jr.radius}, {"diameter", jr.diameter}, {"bound", jr.bound}, {"ok", jr.ok}};
        failed = failed || !jr.ok;
    }
    if (a.centre_hull) {
        if (pts.size() > 24) {
            r["centre_in_hull"] = {{"skipped", "needs at most 24 points"}};
        } else {
            const ccx::CentreHullReport cr = ccx::centre_in_hull_check(pts, s);
            r["centre_in_hull"] = {{"ok", cr.ok}, {"residual", cr.residual}, {"contacts", cr.contacts}};
            failed = failed || !cr.ok;
        }
    }
    emit_json(r, a.out);
    if (failed) throw CheckFailed("minisphere geometry check failed");
    return 0;
}

int run_medial(const MedialArgs& a) {
    ccx::SiteSet sites;
    ccx::GridSpec spec;
    if (!a.mask.empty()) {
        const ccx::ScalarGrid mask = ccx::read_grid(a.mask);
        sites = ccx::sites_from_mask(mask);
        spec.dims = mask.dims;
        spec.origin = mask.origin;
        spec.spacing = mask.spacing;
    } else if (!a.sites.empty()) {
        sites.points = ccx::read_points_csv(a.sites);
        if (a.dims.empty() || a.origin.empty() || a.spacing.empty())
            throw std::invalid_argument("medial: --sites mode needs --dims, --origin and --spacing");
        for (double d : parse_list(a.dims, "dims")) {
            if (d < 1 || d != std::floor(d)) throw std::invalid_argument("dims: expected positive integers");
            spec.dims.push_back(static_cast<std::size_t>(d));
        }
        spec.origin = parse_list(a.origin, "origin");
        spec.spacing = parse_list(a.spacing, "spacing");
    } else {
        throw std::invalid_argument("medial: provide --mask or --sites");
    }

    if (!a.sqdist_out.empty())
        ccx::write_grid(a.sqdist_out, ccx::sq_distance_transform(sites, spec), parse_format(a.format));
    if (!a.out.empty())
        ccx::write_grid(a.out, ccx::medial_axis_map(sites, a.lambda, spec), parse_format(a.format));

    if (!a.check_probe.empty()) {
        const ccx::Point probe = parse_list(a.check_probe, "check-probe");
        const std::vector<double> lambdas = parse_lambdas(a.lambdas.empty() ? "4:2:256" : a.lambdas);
        const ccx::MedialQuotientReport rep = ccx::distance_vs_sqdistance_check(sites, probe, lambdas);
        emit_json(ccx::to_json(rep), "");
        if (!rep.ok) throw CheckFailed("distance / squared-distance consistency check failed");
    } else if (a.out.empty() && a.sqdist_out.empty()) {
        throw std::invalid_argument("medial: nothing to do; pass --out, --sqdist-out or --check-probe");
    }
    return 0;
}

int run_oracle_eval(const OracleArgs& a) {
    const ccx::TestFunctionRef tf = fn_from_flags(a.fn, a.fn_params);
    if (a.probes.empty()) throw std::invalid_argument("oracle-eval: at least one --probe is required");
    json reports = json::array();
    for (const std::string& ps : a.probes) {
        const ccx::Point probe = parse_list(ps, "probe");
        json r;
        r["probe"] = probe;
        r["value"] = ccx::evaluate(*tf, probe);
        r["convex"] = ccx::is_convex(*tf);
        const std::optional<double> l0 = ccx::lambda0(*tf);
        r["lambda0"] = l0 ? json(*l0) : json(nullptr);
        try {
            const ccx::SubdifferentialResult sd = ccx::subdifferential(*tf, probe);
            r["subdifferential"] = {{"vertices", sd.polytope.vertices}, {"super", sd.super}, {"singular", sd.singular}};
            const ccx::LandscapePrediction lp = ccx::predicted_landscape(*tf, probe);
            r["landscape"] = {{"sphere", sphere_json(lp.sphere)}, {"limit", lp.limit}, {"super", lp.super}};
        } catch (const std::domain_error& e) {
            r["subdifferential"] = nullptr;
            r["note"] = e.what();
        }
        reports.push_back(r);
    }
    emit_json(json{{"reports", reports}}, a.out);
    return 0;
}

// Random positively-homogeneous convex pair: max of a few linear functions
// through the origin, so the subdifferential at 0 is the hull of the slopes.
ccx::TestFunctionRef random_sublinear(std::mt19937_64& rng, int dim) {
    std::uniform_int_distribution<int> kd(2, 4);
    std::uniform_real_distribution<double> sd(-3.0, 3.0);
    const int k = kd(rng);
    std::vector<ccx::Point> slopes;
    for (int i = 0; i < k; ++i) {
        ccx::Point p(dim);
        for (double& c : p) c = sd(rng);
        slopes.push_back(p);
    }
    return ccx::make_sublinear(slopes);
}

int run_dc_check(const DcArgs& a) {
    const std::vector<double> lambdas = parse_lambdas(a.lambdas);
    json reports = json::array();
    bool any_failed = false;

    if (a.random_pairs > 0) {
        std::mt19937_64 rng(a.seed);
        for (int i = 0; i < a.random_pairs; ++i) {
            const ccx::TestFunctionRef g = random_sublinear(rng, a.dim);
            const ccx::TestFunctionRef h = random_sublinear(rng, a.dim);
            const ccx::Point probe(static_cast<std::size_t>(a.dim), 0.0);
            const ccx::DcEdgeReport rep = ccx::dc_edge_bound(g, h, probe, lambdas, a.tol);
            json r = ccx::to_json(rep);
            r["g"] = ccx::to_json(*g);
            r["h"] = ccx::to_json(*h);
            reports.push_back(r);
            any_failed = any_failed || !rep.ok;
        }
    } else {
        if (a.pair.empty()) throw std::invalid_argument("dc-check: provide --pair or --random-pairs");
        const json pj = json::parse(a.pair);
        if (!pj.is_object() || !pj.contains("g") || !pj.contains("h"))
            throw std::invalid_argument("pair: expected {\"g\": ..., \"h\": ...}");
        const ccx::TestFunctionRef g = ccx::test_function_from_json(pj.at("g"));
        const ccx::TestFunctionRef h = ccx::test_function_from_json(pj.at("h"));
        if (a.probe.empty()) throw std::invalid_argument("dc-check: --probe is required with --pair");
        const ccx::Point probe = parse_list(a.probe, "probe");
        const ccx::DcEdgeReport rep = ccx::dc_edge_bound(g, h, probe, lambdas, a.tol);
        reports.push_back(ccx::to_json(rep));
        any_failed = !rep.ok;
    }
    emit_json(json{{"reports", reports}}, a.out);
    if (any_failed) throw CheckFailed("edge landscape fell below the subdifferential bound");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compensated convex transforms of sampled functions"};
    app.require_subcommand(1);

    int threads = -1;
    app.add_option("--threads", threads, "worker threads (0 = all cores; default 1 or CCX_THREADS)");

    TransformArgs ta;
    CLI::App* t = app.add_subcommand("transform", "lower/upper/mixed transform of a grid");
    t->add_option("--in", ta.in, "input grid (csv, bin or pgm)")->required();
    t->add_option("--out", ta.out, "output grid path")->required();
    t->add_option("--kind", ta.kind, "lower | upper | mixed-ul | mixed-lu");
    t->add_option("--lambda", ta.lambda, "curvature parameter")->required();
    t->add_option("--tau", ta.tau, "second parameter for mixed kinds");
    t->add_option("--format", ta.format, "csv | bin | pgm");

    SingmapArgs sa;
    CLI::App* s = app.add_subcommand("singmap", "ridge/valley/edge singularity map");
    s->add_option("--in", sa.in, "input grid")->required();
    s->add_option("--out", sa.out, "output grid path")->required();
    s->add_option("--kind", sa.kind, "[scale1-]ridge | [scale1-]valley | [scale1-]edge");
    s->add_option("--lambda", sa.lambda, "curvature parameter")->required();
    s->add_option("--format", sa.format, "csv | bin | pgm");

    SweepArgs wa;
    CLI::App* w = app.add_subcommand("sweep", "scale-1 landscape sweep at probes");
    w->add_option("--fn", wa.fn, "oracle name (abs, relu, sublinear, dist, sqdist, ...)");
    w->add_option("--fn-params", wa.fn_params, "oracle parameters as JSON");
    w->add_option("--in", wa.in, "sampled grid instead of an oracle");
    w->add_option("--probe", wa.probes, "probe point 'x0,x1,...' (repeatable)")->required();
    w->add_option("--lambdas", wa.lambdas, "schedule 'start:factor:end'")->required();
    w->add_option("--kind", wa.kind, "ridge | valley | edge");
    w->add_flag("--extrapolate", wa.extrapolate, "extrapolate the limit in 1/lambda");
    w->add_option("--out", wa.out, "write the JSON report here instead of stdout");

    GradientArgs ga;
    CLI::App* g = app.add_subcommand("gradient", "gradient of a transform");
    g->add_option("--in", ga.in, "sampled grid input");
    g->add_option("--fn", ga.fn, "oracle name");
    g->add_option("--fn-params", ga.fn_params, "oracle parameters as JSON");
    g->add_option("--probe", ga.probes, "probe point (oracle mode, repeatable)");
    g->add_option("--lambda", ga.lambda, "curvature parameter")->required();
    g->add_option("--kind", ga.kind, "lower | upper");
    g->add_flag("--check", ga.check, "check the 2*lambda gradient variation bound instead");
    g->add_option("--out", ga.out, "output path (grid mode: prefix for per-axis grids)");
    g->add_option("--format", ga.format, "csv | bin | pgm");

    MinisphereArgs ma;
    CLI::App* m = app.add_subcommand("minisphere", "minimal bounding sphere of points");
    m->add_option("--points", ma.points, "points csv (one point per line)")->required();
    m->add_flag("--jung", ma.jung, "check the dimension-dependent radius/diameter bound");
    m->add_flag("--centre-hull", ma.centre_hull, "check the centre lies in the hull of its contacts");
    m->add_option("--out", ma.out, "write the JSON report here instead of stdout");

    MedialArgs da;
    CLI::App* d = app.add_subcommand("medial", "squared distance transform and medial-axis map");
    d->add_option("--mask", da.mask, "mask grid; nonzero cells are sites");
    d->add_option("--sites", da.sites, "sites as points csv");
    d->add_option("--dims", da.dims, "grid node counts (with --sites)");
    d->add_option("--origin", da.origin, "grid origin (with --sites)");
    d->add_option("--spacing", da.spacing, "grid spacing (with --sites)");
    d->add_option("--lambda", da.lambda, "curvature parameter for the medial map");
    d->add_option("--out", da.out, "medial map output path");
    d->add_option("--sqdist-out", da.sqdist_out, "squared distance transform output path");
    d->add_option("--format", da.format, "csv | bin | pgm");
    d->add_option("--check-probe", da.check_probe, "run the distance vs squared-distance check here");
    d->add_option("--lambdas", da.lambdas, "schedule for --check-probe");

    OracleArgs oa;
    CLI::App* o = app.add_subcommand("oracle-eval", "evaluate a closed-form oracle");
    o->add_option("--fn", oa.fn, "oracle name")->required();
    o->add_option("--fn-params", oa.fn_params, "oracle parameters as JSON");
    o->add_option("--probe", oa.probes, "probe point (repeatable)")->required();
    o->add_option("--out", oa.out, "write the JSON report here instead of stdout");

    DcArgs ca;
    CLI::App* c = app.add_subcommand("dc-check", "edge landscape lower bound for convex differences");
    c->add_option("--pair", ca.pair, "JSON {\"g\": ..., \"h\": ...} of convex oracles");
    c->add_option("--probe", ca.probe, "probe point for --pair");
    c->add_option("--random-pairs", ca.random_pairs, "check N random positively-homogeneous pairs at 0");
    c->add_option("--dim", ca.dim, "dimension for --random-pairs (1 or 2)")->check(CLI::Range(1, 2));
    c->add_option("--seed", ca.seed, "RNG seed for --random-pairs");
    c->add_option("--lambdas", ca.lambdas, "schedule 'start:factor:end'");
    c->add_option("--tol", ca.tol, "slack below the bound that still passes");
    c->add_option("--out", ca.out, "write the JSON report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (threads >= 0) {
            ccx::set_thread_count(threads);
        } else if (const char* env = std::getenv("CCX_THREADS")) {
            ccx::set_thread_count(std::max(0, std::atoi(env)));
        }
        if (t->parsed()) return run_transform(ta);
        if (s->parsed()) return run_singmap(sa);
        if (w->parsed()) return run_sweep(wa);
        if (g->parsed()) return run_gradient(ga);
        if (m->parsed()) return run_minisphere(ma);
        if (d->parsed()) return run_medial(da);
        if (o->parsed()) return run_oracle_eval(oa);
        if (c->parsed()) return run_dc_check(ca);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const CheckFailed& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
