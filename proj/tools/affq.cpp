// affq: command-line front end.
//
// Exit codes: 0 success, 1 invalid input or failed validation, 2 broken
// mathematical invariant (for example a Poincare-Hopf violation).

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "affq/affq.hpp"

using namespace affq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInvariant = 2;

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::BadSpec, "cli", std::string("cannot parse ") + what + ": '" + text + "'");
        }
    }
    if (out.empty()) throw Error(ErrorCode::BadSpec, "cli", std::string("empty ") + what);
    return out;
}

// "log:a:b:n", "lin:a:b:n" or a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return parse_list(text, "grid");
    const std::string kind = text.substr(0, colon);
    std::string rest = text.substr(colon + 1);
    for (char& c : rest)
        if (c == ':') c = ',';
    const auto p = parse_list(rest, "grid");
    if (p.size() != 3 || p[2] < 1 || p[2] != std::floor(p[2]))
        throw Error(ErrorCode::BadSpec, "cli", "grid must be kind:a:b:n with integer n >= 1");
    const int n = static_cast<int>(p[2]);
    if (kind == "log") {
        if (!(p[0] > 0.0 && p[1] > p[0])) throw Error(ErrorCode::BadSpec, "cli", "log grid needs 0 < a < b");
        return log_grid(p[0], p[1], n);
    }
    if (kind == "lin") {
        std::vector<double> g;
        for (int i = 0; i < n; ++i) g.push_back(n == 1 ? p[0] : p[0] + (p[1] - p[0]) * i / (n - 1));
        return g;
    }
    throw Error(ErrorCode::BadSpec, "cli", "unknown grid kind '" + kind + "'");
}

template <int D>
Vec<D> parse_direction(const std::string& text) {
    const auto x = parse_list(text, "direction");
    if (x.size() != static_cast<std::size_t>(D))
        throw Error(ErrorCode::BadSpec, "cli", "direction needs " + std::to_string(D) + " components");
    Vec<D> v;
    for (int i = 0; i < D; ++i) v[i] = x[i];
    const double n = norm(v);
    if (!(n > 0.0)) throw Error(ErrorCode::BadSpec, "cli", "direction must be nonzero");
    return scaled(v, 1.0 / n);
}

std::string vec_string(const std::vector<double>& x) {
    std::vector<std::string> s;
    for (double c : x) s.push_back(fmt17(c));
    return join(s, ' ');
}

template <int D>
std::string vec_string(const Vec<D>& v) {
    return vec_string(std::vector<double>(v.begin(), v.end()));
}

struct Output {
    std::string path;

    void write(const std::string& text) const {
        if (path.empty() || path == "-") {
            std::cout << text;
            std::cout.flush();
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorCode::BadSpec, "cli", "cannot write " + path);
        out << text;
    }
};

std::string header(const std::vector<std::pair<std::string, std::string>>& meta) {
    std::string h = metadata_line("tool", std::string(kToolName) + " " + kToolVersion);
    for (const auto& [k, v] : meta) h += metadata_line(k, v);
    return h;
}

// Runs `f` with the loaded body in its dimension.
template <class F>
void with_body(const std::string& path, F&& f) {
    const BodySpec spec = read_body_spec(path);
    const AnyBody any = make_body(spec);
    std::visit([&](const auto& b) { f(b, spec); }, any);
}

struct Options {
    std::string body;
    std::vector<std::string> bodies;
    std::string out;
    std::string v;
    std::string grid;
    double tmin = 0.01, tmax = 100.0;
    int steps = 81;
    int resolution = 0;
    double tol = kDefaultBasisTolerance;
    unsigned long seed = 0;
    int random_bases = 0;
    std::string frame;
    std::optional<double> dump_t;
    std::optional<double> t_star_max;
    bool corollary = false;
    double corollary_t = 50.0;
    // generate
    std::string kind;
    std::string values;
    std::string coeffs;
    int degree = 4;
    double amp = 0.12;
    std::string label;
    // conjecture
    int k_max = 8;
    int sphere_res = 16;
    double s_max = 4.0;
    int s_steps = 32;
    bool zoo = false;
    std::string out_dir;
};

// ---------------------------------------------------------------------------

int cmd_generate(const Options& o) {
    BodySpec spec;
    std::vector<std::string> notes;
    if (o.kind == "ellipsoid") {
        const std::string src = o.values.empty() ? o.coeffs : o.values;
        spec = ellipsoid_spec(parse_list(src, "semi-axes"), o.label);
    } else if (o.kind == "fourier2d") {
        const std::string src = o.coeffs.empty() ? o.values : o.coeffs;
        spec = fourier_spec(parse_list(src, "coefficients"), o.label);
    } else if (o.kind == "harmonics3d") {
        const std::string src = o.coeffs.empty() ? o.values : o.coeffs;
        spec.dim = 3;
        spec.kind = BodyKind::harmonics3d;
        spec.coefficients = parse_list(src, "coefficients");  // real Y_lm order, l = 0 first
        spec.label = o.label.empty() ? "harmonics3d" : o.label;
    } else if (o.kind == "perturbed-sphere") {
        double used = 0.0;
        spec = perturbed_sphere_spec(o.degree, o.amp, o.seed, &used);
        if (!o.label.empty()) spec.label = o.label;
        if (used != o.amp) std::cerr << "amplitude clamped to " << fmt17(used) << " for convexity\n";
    } else {
        throw Error(ErrorCode::BadSpec, "generate",
                    "kind must be ellipsoid, fourier2d, harmonics3d or perturbed-sphere");
    }
    make_body(spec);  // rejects invalid combinations with the validation report
    Output{o.out}.write(dump_body_spec(spec));
    return kExitOk;
}

int cmd_validate(const Options& o) {
    with_body(o.body, [&](const auto& b, const BodySpec& spec) {
        constexpr int D = std::decay_t<decltype(b)>::dim;
        const ValidationReport rep = validate_shape<D>(b.root());
        nlohmann::json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["label"] = spec.label;
        j["dim"] = D;
        j["valid"] = true;
        j["min_radial"] = rep.min_radial;
        j["curvature_margin"] = rep.curvature_margin;
        j["volume"] = volume(b);
        j["surface_area"] = surface_area(b);
        j["iso_ratio"] = iso_ratio(b);
        j["centroid_shift"] = std::vector<double>(b.offset().begin(), b.offset().end());
        Output{o.out}.write(j.dump(2) + "\n");
    });
    return kExitOk;
}

int cmd_analyze(const Options& o) {
    with_body(o.body, [&](const auto& b, const BodySpec& spec) {
        constexpr int D = std::decay_t<decltype(b)>::dim;
        const AffineFamily<D> fam(b);
        nlohmann::json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["label"] = spec.label;
        j["dim"] = D;
        j["iso_ratio"] = iso_ratio(b);
        const EquilibriumCounts c = counts<D>(b);
        j["counts"] = {{"S", c.S}, {"U", c.U}, {"N", c.N}, {"T", c.T}};
        if (!o.v.empty()) {
            const Vec<D> v = parse_direction<D>(o.v);
            const IsoMax m = iso_max<D>(fam, v);
            j["direction"] = std::vector<double>(v.begin(), v.end());
            j["t_star"] = m.t_star;
            j["iso_star"] = m.iso_star;
            j["slope_at_1"] = fam.iso_derivative(v, 1.0);
            j["A2_at_1"] = surface_second_derivative<D>(fam, v, 1.0);
        }
        Output{o.out}.write(j.dump(2) + "\n");
    });
    return kExitOk;
}

std::vector<double> sweep_grid(const Options& o) {
    if (!o.grid.empty()) return parse_grid(o.grid);
    if (!(o.tmin > 0.0 && o.tmax > o.tmin) || o.steps < 2)
        throw Error(ErrorCode::BadSpec, "sweep", "need 0 < tmin < tmax and steps >= 2");
    return log_grid(o.tmin, o.tmax, o.steps);
}

std::string grid_label(const Options& o, const std::vector<double>& g) {
    if (!o.grid.empty()) return o.grid;
    return "log:" + fmt17(g.front()) + ":" + fmt17(g.back()) + ":" + std::to_string(g.size());
}

int cmd_sweep(const Options& o) {
    with_body(o.body, [&](const auto& b, const BodySpec& spec) {
        constexpr int D = std::decay_t<decltype(b)>::dim;
        const Vec<D> v = parse_direction<D>(o.v);
        const auto g = sweep_grid(o);
        const IsoCurve<D> c = iso_curve<D>(b, v, g);
        const QuasiconcavityReport q = check_quasiconcave(c);
        std::string text = header({{"body", spec.label},
                                   {"v", vec_string<D>(v)},
                                   {"grid", grid_label(o, g)},
                                   {"resolution", std::to_string(kDefaultResolution<D>)},
                                   {"seed", std::to_string(o.seed)}});
        text += iso_curve_csv(c);
        text += metadata_line("quasiconcave", std::string(q.pass ? "pass" : "fail") +
                                                  " sign_changes=" + std::to_string(q.sign_changes));
        Output{o.out}.write(text);
    });
    return kExitOk;
}

template <int D>
std::vector<Vec<D>> parse_frame(const std::string& text) {
    std::vector<Vec<D>> frame;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) frame.push_back(parse_direction<D>(item));
    return frame;
}

int cmd_basis(const Options& o) {
    int code = kExitOk;
    with_body(o.body, [&](const auto& b, const BodySpec& spec) {
        constexpr int D = std::decay_t<decltype(b)>::dim;
        const SlopeField<D> field(b);
        const CriticalBasis<D> cb =
            o.frame.empty() ? critical_basis<D>(field, o.tol) : complete_frame<D>(field, parse_frame<D>(o.frame), o.tol);
        std::string text = header({{"body", spec.label},
                                   {"tolerance", fmt17(o.tol)},
                                   {"resolution", std::to_string(kDefaultResolution<D>)},
                                   {"seed", std::to_string(o.seed)}});
        // Sum identity over seeded random orthonormal bases.
        if (o.random_bases > 0) {
            std::mt19937_64 rng(o.seed);
            std::normal_distribution<double> gauss(0.0, 1.0);
            double worst = 0.0;
            for (int k = 0; k < o.random_bases; ++k) {
                std::vector<Vec<D>> basis;
                while (static_cast<int>(basis.size()) < D) {
                    Vec<D> x;
                    for (auto& c : x) c = gauss(rng);
                    for (const auto& e : basis) x = x - scaled(e, dot(x, e));
                    if (norm(x) > 1e-6) basis.push_back(normalized(x));
                }
                double sum = 0.0, mx = 0.0;
                for (const auto& e : basis) {
                    const double f = field(e);
                    sum += f;
                    mx = std::max(mx, std::abs(f));
                }
                worst = std::max(worst, std::abs(sum) / (1.0 + mx));
            }
            text += metadata_line("sum_identity_max", fmt17(worst));
        }
        text += basis_csv(cb);
        Output{o.out}.write(text);
        for (double r : cb.residuals)
            if (!(std::abs(r) <= o.tol)) code = kExitInput;
    });
    return code;
}

int cmd_equilibria(const Options& o) {
    int code = kExitOk;
    with_body(o.body, [&](const auto& b, const BodySpec& spec) {
        constexpr int D = std::decay_t<decltype(b)>::dim;
        EquilibriumOptions eo;
        eo.resolution = o.resolution;
        const int res = o.resolution > 0 ? o.resolution : kEquilibriumResolution<D>;
        const Vec<D> v = parse_direction<D>(o.v);
        std::vector<std::pair<std::string, std::string>> meta{
            {"body", spec.label}, {"v", vec_string<D>(v)}, {"resolution", std::to_string(res)}};
        std::string text;
        if (o.dump_t) {
            meta.push_back({"t", fmt17(*o.dump_t)});
            meta.push_back({"seed", std::to_string(o.seed)});
            const auto bt = apply_affinity<D>(b, v, *o.dump_t);
            text = header(meta) + equilibria_csv<D>(checked_equilibria<D>(bt, eo));
        } else if (o.t_star_max) {
            meta.push_back({"t_max", fmt17(*o.t_star_max)});
            meta.push_back({"seed", std::to_string(o.seed)});
            const TStar ts = find_t_star<D>(b, v, *o.t_star_max, eo);
            meta.push_back({"t_star", fmt17(ts.t_star)});
            text = header(meta) + counts_csv(ts.rows);
        } else if (o.corollary) {
            if constexpr (D == 3) {
                const CorollaryReport rep = corollary_check(b, v, o.corollary_t, eo);
                nlohmann::json j;
                j["tool"] = kToolName;
                j["version"] = kToolVersion;
                j["label"] = spec.label;
                j["t"] = o.corollary_t;
                auto cj = [](const EquilibriumCounts& c) {
                    return nlohmann::json{{"S", c.S}, {"U", c.U}, {"N", c.N}, {"T", c.T}};
                };
                j["stretched"] = cj(rep.stretched);
                j["section"] = cj(rep.section);
                j["pass"] = rep.pass;
                text = j.dump(2) + "\n";
                if (!rep.pass) code = kExitInput;
            } else {
                throw Error(ErrorCode::Unsupported, "equilibria", "--corollary needs a 3D body");
            }
        } else {
            const auto g = o.grid.empty() ? std::vector<double>{1.0} : parse_grid(o.grid);
            meta.push_back({"grid", o.grid.empty() ? "1" : o.grid});
            meta.push_back({"seed", std::to_string(o.seed)});
            text = header(meta) + counts_csv(counts_vs_t<D>(b, v, g, eo));
        }
        Output{o.out}.write(text);
    });
    return code;
}

int cmd_conjecture(const Options& o) {
    std::vector<NamedBody> bodies;
    if (o.zoo)
        for (const auto& s : conjecture_zoo_specs()) bodies.push_back({s.label, make_body(s)});
    for (const auto& path : o.bodies) {
        const BodySpec s = read_body_spec(path);
        bodies.push_back({s.label.empty() ? std::filesystem::path(path).stem().string() : s.label, make_body(s)});
    }
    if (bodies.empty()) throw Error(ErrorCode::BadSpec, "conjecture", "no bodies given (use --bodies or --zoo)");
    ConjectureConfig cfg;
    cfg.k_max = o.k_max;
    cfg.seed = o.seed;
    cfg.field.sphere_res = o.sphere_res;
    cfg.field.s_max = o.s_max;
    cfg.field.s_steps = o.s_steps;
    const ConjectureReport rep = conjecture_report(bodies, cfg);
    const std::string doc = rep.document.dump(2) + "\n";
    if (o.out_dir.empty()) {
        Output{o.out}.write(doc);
    } else {
        std::filesystem::create_directories(o.out_dir);
        Output{(std::filesystem::path(o.out_dir) / "report.json").string()}.write(doc);
        for (std::size_t i = 0; i < rep.bins_csv.size(); ++i) {
            const auto& [label, csv] = rep.bins_csv[i];
            std::string name = label;
            for (char& c : name)
                if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
            const std::string text =
                header({{"body", label},
                        {"grid", "sphere_res=" + std::to_string(cfg.field.sphere_res) +
                                     " s_max=" + fmt17(cfg.field.s_max) + " s_steps=" + std::to_string(cfg.field.s_steps)},
                        {"seed", std::to_string(cfg.seed)}}) +
                csv;
            Output{(std::filesystem::path(o.out_dir) / ("bins_" + name + ".csv")).string()}.write(text);
        }
    }
    // Per-body failures are part of the report and still set the exit code.
    int code = kExitOk;
    for (const auto& e : rep.document["bodies"]) {
        if (!e.contains("error")) continue;
        code = std::max(code, e["invariant_failure"].get<bool>() ? kExitInvariant : kExitInput);
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orthogonal-affinity families of convex bodies: isoperimetric curves, critical bases, "
                 "static equilibria and bin averages."};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("generate", "Write a body spec file");
    gen->add_option("kind", o.kind, "ellipsoid | fourier2d | harmonics3d | perturbed-sphere")->required();
    gen->add_option("values", o.values, "Comma-separated semi-axes or coefficients");
    gen->add_option("--coeffs", o.coeffs, "Comma-separated coefficients");
    gen->add_option("--degree", o.degree, "Perturbation degree")->capture_default_str();
    gen->add_option("--amp", o.amp, "Perturbation amplitude (clamped for convexity)")->capture_default_str();
    gen->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    gen->add_option("--label", o.label, "Body label");
    gen->add_option("-o,--out", o.out, "Output file (default stdout)");

    auto* val = app.add_subcommand("validate", "Validate a body and report its basic measures");
    val->add_option("--body", o.body, "Body spec file")->required();
    val->add_option("-o,--out", o.out, "Output file");

    auto* ana = app.add_subcommand("analyze", "Counts at t = 1 and the isoperimetric maximum along v");
    ana->add_option("--body", o.body, "Body spec file")->required();
    ana->add_option("--v", o.v, "Direction, comma-separated");
    ana->add_option("-o,--out", o.out, "Output file");

    auto* swp = app.add_subcommand("sweep", "Isoperimetric curve t,V,A,I,dI along v");
    swp->add_option("--body", o.body, "Body spec file")->required();
    swp->add_option("--v", o.v, "Direction, comma-separated")->required();
    swp->add_option("--tmin", o.tmin)->capture_default_str();
    swp->add_option("--tmax", o.tmax)->capture_default_str();
    swp->add_option("--steps", o.steps)->capture_default_str();
    swp->add_option("--grid,--tgrid", o.grid, "log:a:b:n, lin:a:b:n or a list (overrides tmin/tmax/steps)");
    swp->add_option("--seed", o.seed, "Recorded in the header")->capture_default_str();
    swp->add_option("-o,--out", o.out, "Output file");

    auto* bas = app.add_subcommand("basis", "Critical orthonormal basis of the slope field");
    bas->add_option("--body", o.body, "Body spec file")->required();
    bas->add_option("--tol", o.tol, "Slope tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    bas->add_option("--frame", o.frame, "Critical directions to complete, ';'-separated");
    bas->add_option("--random-bases", o.random_bases, "Check the sum identity on this many random bases");
    bas->add_option("--seed", o.seed, "Seed of the random bases")->capture_default_str();
    bas->add_option("-o,--out", o.out, "Output file");

    auto* eqc = app.add_subcommand("equilibria", "Equilibrium counts t,S,U,N,T of K^v(t)");
    eqc->add_option("--body", o.body, "Body spec file")->required();
    eqc->add_option("--v", o.v, "Direction, comma-separated")->required();
    eqc->add_option("--tgrid,--grid", o.grid, "log:a:b:n, lin:a:b:n or a list (default 1)");
    eqc->add_option("--resolution", o.resolution, "Seed grid resolution");
    eqc->add_option("--dump", o.dump_t, "List the equilibria (ux,uy[,uz],index,r) at this t");
    eqc->add_option("--t-star", o.t_star_max, "Find the grid threshold after which U = 2, up to this t");
    eqc->add_flag("--corollary", o.corollary, "Large-t index correspondence with the section body");
    eqc->add_option("--corollary-t", o.corollary_t)->capture_default_str();
    eqc->add_option("--seed", o.seed, "Recorded in the header")->capture_default_str();
    eqc->add_option("-o,--out", o.out, "Output file");

    auto* con = app.add_subcommand("conjecture", "Bin averages and critical numbers");
    con->add_option("--bodies", o.bodies, "Body spec files");
    con->add_flag("--zoo", o.zoo, "Include the built-in five-body zoo");
    con->add_option("--k-max", o.k_max)->capture_default_str();
    con->add_option("--sphere-res", o.sphere_res)->capture_default_str();
    con->add_option("--s-max", o.s_max)->capture_default_str();
    con->add_option("--s-steps", o.s_steps)->capture_default_str();
    con->add_option("--seed", o.seed, "Recorded in the report")->capture_default_str();
    con->add_option("-o,--out", o.out, "Report file (default stdout)");
    con->add_option("--out-dir", o.out_dir, "Write report.json and per-body bin CSVs here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*gen) return cmd_generate(o);
        if (*val) return cmd_validate(o);
        if (*ana) return cmd_analyze(o);
        if (*swp) return cmd_sweep(o);
        if (*bas) return cmd_basis(o);
        if (*eqc) return cmd_equilibria(o);
        if (*con) return cmd_conjecture(o);
    } catch (const Error& e) {
        std::cerr << "affq: " << e.what() << "\n";
        return is_invariant_failure(e.code()) ? kExitInvariant : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "affq: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
