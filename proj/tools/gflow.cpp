// groupoid-flow command-line front end: loads a JSON config describing a
// system, dispatches to the library, and writes CSV/text reports.
//
// Exit codes: 0 success; 2 config error; 3 numerical failure (FAILURE,
// SINGULAR, HIGHER_INDEX, INCONSISTENT); 4 NOT_STABILIZED or INCONCLUSIVE.

#include <clocale>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "gflow/csv.hpp"
#include "gflow/dae.hpp"
#include "gflow/expr.hpp"
#include "gflow/lagrangian.hpp"
#include "gflow/nonholonomic.hpp"

using nlohmann::json;
using namespace gflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUnresolved = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::string out_path; // empty: stdout
    std::uint64_t seed = 0;
    std::optional<double> tol_override;
};

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ConfigError(where + ": missing numeric '" + key + "'");
    return obj[key].get<double>();
}

int require_int(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number_integer())
        throw ConfigError(where + ": missing integer '" + key + "'");
    return obj[key].get<int>();
}

std::string require_string(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw ConfigError(where + ": missing string '" + key + "'");
    return obj[key].get<std::string>();
}

Vector parse_vector(const json& arr, const std::string& where) {
    if (!arr.is_array()) throw ConfigError(where + ": expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(arr.size()));
    Eigen::Index i = 0;
    for (const auto& x : arr) {
        if (!x.is_number()) throw ConfigError(where + ": expected an array of numbers");
        v[i++] = x.get<double>();
    }
    return v;
}

Matrix parse_matrix(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty()) throw ConfigError(where + ": expected a nested array");
    const auto cols = arr[0].size();
    Matrix m(static_cast<Eigen::Index>(arr.size()), static_cast<Eigen::Index>(cols));
    Eigen::Index r = 0;
    for (const auto& row : arr) {
        if (!row.is_array() || row.size() != cols)
            throw ConfigError(where + ": ragged matrix rows");
        Eigen::Index c = 0;
        for (const auto& x : row) {
            if (!x.is_number()) throw ConfigError(where + ": matrix entries must be numbers");
            m(r, c++) = x.get<double>();
        }
        ++r;
    }
    return m;
}

std::vector<std::string> parse_names(const json& arr, const std::string& where) {
    if (!arr.is_array()) throw ConfigError(where + ": expected an array of names");
    std::vector<std::string> out;
    for (const auto& x : arr) {
        if (!x.is_string()) throw ConfigError(where + ": expected an array of names");
        out.push_back(x.get<std::string>());
    }
    return out;
}

std::map<std::string, double, std::less<>> parse_constants(const json& cfg,
                                                           const std::string& where) {
    std::map<std::string, double, std::less<>> out;
    if (!cfg.contains("constants")) return out;
    if (!cfg["constants"].is_object()) throw ConfigError(where + ": constants must be an object");
    for (const auto& [key, value] : cfg["constants"].items()) {
        if (!value.is_number()) throw ConfigError(where + ": constant '" + key + "' not a number");
        out.emplace(key, value.get<double>());
    }
    return out;
}

TolerancePolicy parse_tolerances(const json& cfg, const Options& opt) {
    TolerancePolicy tol;
    if (cfg.contains("tolerances")) {
        const json& t = cfg["tolerances"];
        check_keys(t, {"rank_rel_tol", "newton_tol", "newton_max_iter", "set_eq_tol"},
                   "tolerances");
        if (t.contains("rank_rel_tol"))
            tol.rank_rel_tol = require_number(t, "rank_rel_tol", "tolerances");
        if (t.contains("newton_tol")) tol.newton_tol = require_number(t, "newton_tol", "tolerances");
        if (t.contains("newton_max_iter"))
            tol.newton_max_iter = require_int(t, "newton_max_iter", "tolerances");
        if (t.contains("set_eq_tol")) tol.set_eq_tol = require_number(t, "set_eq_tol", "tolerances");
    }
    if (opt.tol_override) tol.newton_tol = *opt.tol_override;
    try {
        tol.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return tol;
}

int parse_pair_groupoid_n(const json& cfg, const std::string& where) {
    if (!cfg.contains("groupoid")) throw ConfigError(where + ": missing 'groupoid'");
    const json& g = cfg["groupoid"];
    check_keys(g, {"type", "n"}, where + ".groupoid");
    if (require_string(g, "type", where + ".groupoid") != "pair")
        throw ConfigError(where + ".groupoid: only type 'pair' is supported here");
    const int n = require_int(g, "n", where + ".groupoid");
    if (n < 1) throw ConfigError(where + ".groupoid: n must be >= 1");
    return n;
}

expr::Ast parse_expression(const std::string& src, const std::string& where) {
    try {
        return expr::Ast::parse(src);
    } catch (const expr::ParseError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

DiscreteLagrangian parse_lagrangian(const json& cfg, int n, const std::string& where) {
    auto vars = parse_names(cfg.contains("variables") ? cfg["variables"] : json::array(), where);
    if (static_cast<int>(vars.size()) != 2 * n)
        throw ConfigError(where + ": 'variables' must list the 2n element coordinates");
    auto ast = parse_expression(require_string(cfg, "lagrangian", where), where + ".lagrangian");
    DiscreteLagrangian L;
    L.realization = make_pair_groupoid(n);
    try {
        L.function = expr::to_scalar_field(ast, vars, parse_constants(cfg, where));
    } catch (const expr::EvalError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return L;
}

// Output is accumulated in memory and written in one shot, so a run that
// fails mid-way never leaves a truncated file behind.
void write_output(const Options& opt, const std::string& content) {
    if (opt.out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(opt.out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output path '" + opt.out_path + "'");
    out << content;
}

// --- subcommand runners ---------------------------------------------------

int run_del(const json& cfg, const Options& opt) {
    check_keys(cfg, {"kind", "groupoid", "lagrangian", "variables", "constants", "initial",
                     "steps", "out", "tolerances"},
               "del");
    const int n = parse_pair_groupoid_n(cfg, "del");
    auto L = parse_lagrangian(cfg, n, "del");
    TolerancePolicy tol = parse_tolerances(cfg, opt);
    Vector g = parse_vector(cfg.contains("initial") ? cfg["initial"] : json(), "del.initial");
    if (g.size() != 2 * n) throw ConfigError("del.initial: expected 2n coordinates");
    const int steps = require_int(cfg, "steps", "del");
    if (steps < 1) throw ConfigError("del.steps: must be >= 1");
    auto vars = parse_names(cfg["variables"], "del");

    std::string csv = csv_header("del");
    csv += "step";
    for (const auto& v : vars) csv += "," + v;
    for (int i = 0; i < n; ++i) csv += ",p" + std::to_string(i);
    csv += ",residual\n";

    int exit_code = kExitOk;
    Vector prev;
    for (int k = 0; k <= steps; ++k) {
        std::vector<std::string> row{std::to_string(k)};
        for (Eigen::Index i = 0; i < g.size(); ++i) row.push_back(format_double(g[i]));
        Vector p = legendre(L, g, LegendreSide::Plus).covector;
        for (Eigen::Index i = 0; i < p.size(); ++i) row.push_back(format_double(p[i]));
        const double res = k == 0 ? 0.0 : inf_norm(del_residual(L, prev, g));
        row.push_back(format_double(res));
        csv += csv_row(row);
        if (k == steps) break;
        auto step = evolve(L, g, tol);
        if (!step.ok()) {
            std::cerr << "del: step " << k << " "
                      << (step.status == EvolveResult::Status::Singular ? "SINGULAR" : "FAILURE")
                      << " (residual " << step.residual_inf << ")\n";
            exit_code = kExitNumerical;
            break;
        }
        prev = g;
        g = step.element;
    }
    write_output(opt, csv);
    return exit_code;
}

int run_extract(const json& cfg, const Options& opt) {
    check_keys(cfg, {"kind", "groupoid", "matrix", "offset", "mode", "max_iter", "out",
                     "tolerances"},
               "extract");
    const int n = parse_pair_groupoid_n(cfg, "extract");
    Matrix M = parse_matrix(cfg.contains("matrix") ? cfg["matrix"] : json(), "extract.matrix");
    Vector c = parse_vector(cfg.contains("offset") ? cfg["offset"] : json(), "extract.offset");
    if (M.cols() != 2 * n) throw ConfigError("extract.matrix: expected 2n columns");
    if (M.rows() != c.size()) throw ConfigError("extract: matrix rows != offset size");
    TolerancePolicy tol = parse_tolerances(cfg, opt);

    const std::string mode_name = require_string(cfg, "mode", "extract");
    ExtractMode mode;
    if (mode_name == "forward") mode = ExtractMode::Forward;
    else if (mode_name == "backward") mode = ExtractMode::Backward;
    else if (mode_name == "full") mode = ExtractMode::Full;
    else throw ConfigError("extract.mode: one of forward|backward|full");

    int max_iter = -1;
    if (cfg.contains("max_iter")) max_iter = require_int(cfg, "max_iter", "extract");

    AffineSubspace set = AffineSubspace::from_constraints(M, c, tol);
    auto E = ImplicitEquation::affine(make_pair_groupoid(n), set);
    auto report = extract_affine(E, mode, max_iter, tol);

    std::cerr << report.to_text();
    write_output(opt, report.to_csv());
    return report.stabilized() ? kExitOk : kExitUnresolved;
}

int run_classify(const json& cfg, const Options& opt) {
    check_keys(cfg, {"kind", "set", "points", "points_are_parameters", "depth", "seeds", "box",
                     "out", "tolerances"},
               "classify");
    if (!cfg.contains("set")) throw ConfigError("classify: missing 'set'");
    const json& set_cfg = cfg["set"];
    TolerancePolicy tol = parse_tolerances(cfg, opt);

    std::optional<ImplicitEquation> E;
    std::optional<DiscreteLagrangian> L;
    const std::string type = require_string(set_cfg, "type", "classify.set");
    if (type == "lagrangian_set") {
        check_keys(set_cfg, {"type", "groupoid", "lagrangian", "variables", "constants"},
                   "classify.set");
        const int n = parse_pair_groupoid_n(set_cfg, "classify.set");
        L = parse_lagrangian(set_cfg, n, "classify.set");
        E = build_SL(*L);
    } else if (type == "affine") {
        check_keys(set_cfg, {"type", "groupoid", "matrix", "offset"}, "classify.set");
        const int n = parse_pair_groupoid_n(set_cfg, "classify.set");
        Matrix M = parse_matrix(set_cfg["matrix"], "classify.set.matrix");
        Vector c = parse_vector(set_cfg["offset"], "classify.set.offset");
        if (M.cols() != 2 * n) throw ConfigError("classify.set.matrix: expected 2n columns");
        E = ImplicitEquation::affine(make_pair_groupoid(n),
                                     AffineSubspace::from_constraints(M, c, tol));
    } else {
        throw ConfigError("classify.set.type: one of lagrangian_set|affine");
    }

    const bool points_are_parameters =
        cfg.contains("points_are_parameters") ? cfg["points_are_parameters"].get<bool>()
                                              : type == "lagrangian_set";
    if (!cfg.contains("points") || !cfg["points"].is_array() || cfg["points"].empty())
        throw ConfigError("classify.points: expected a non-empty array of points");

    ClassifyOptions copts;
    copts.depth = cfg.contains("depth") ? require_int(cfg, "depth", "classify") : 3;
    if (copts.depth < 1) throw ConfigError("classify.depth: must be >= 1");
    copts.seeds = cfg.contains("seeds") ? require_int(cfg, "seeds", "classify") : 8;
    if (copts.seeds < 1) throw ConfigError("classify.seeds: must be >= 1");
    copts.rng_seed = opt.seed;
    if (cfg.contains("box")) {
        Vector box = parse_vector(cfg["box"], "classify.box");
        if (box.size() != 2 || !(box[0] < box[1]))
            throw ConfigError("classify.box: expected [lo, hi]");
        const int d = E->rep() == ImplicitEquation::Rep::Parametrized
                          ? E->parametrization().psi->in_dim()
                          : E->realization().element_dim;
        copts.box_lo = Vector::Constant(d, box[0]);
        copts.box_hi = Vector::Constant(d, box[1]);
    }

    std::string csv = csv_header("classify");
    csv += "index,forward_depth,backward_depth,forward_inconclusive,backward_inconclusive\n";
    int exit_code = kExitOk;
    int index = 0;
    for (const auto& pj : cfg["points"]) {
        Vector pt = parse_vector(pj, "classify.points");
        Vector g;
        if (points_are_parameters) {
            if (!L) throw ConfigError("classify: parameter points require a lagrangian_set");
            if (pt.size() != L->realization->element_dim)
                throw ConfigError("classify.points: wrong parameter dimension");
            g = differential(*L, pt);
        } else {
            g = pt;
        }
        ClassifyResult r;
        try {
            r = classify_point(*E, g, copts, tol);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("classify: ") + e.what());
        }
        csv += csv_row({std::to_string(index), std::to_string(r.forward_depth),
                        std::to_string(r.backward_depth), r.forward_inconclusive ? "1" : "0",
                        r.backward_inconclusive ? "1" : "0"});
        if (r.forward_inconclusive || r.backward_inconclusive) exit_code = kExitUnresolved;
        ++index;
    }
    write_output(opt, csv);
    return exit_code;
}

int run_dae(const json& cfg, const Options& opt) {
    check_keys(cfg, {"kind", "n", "A", "B", "b", "t0", "h", "steps", "guess", "out",
                     "tolerances"},
               "dae");
    const int n = require_int(cfg, "n", "dae");
    if (n < 1) throw ConfigError("dae.n: must be >= 1");

    // Coefficient entries are numbers or expression strings in t.
    auto parse_entry = [&](const json& e, const std::string& where) -> expr::Ast {
        if (e.is_number()) return expr::Ast::parse(format_double(e.get<double>()));
        if (e.is_string()) {
            auto ast = parse_expression(e.get<std::string>(), where);
            for (const auto& v : ast.free_variables())
                if (v != "t") throw ConfigError(where + ": unknown variable '" + v + "'");
            return ast;
        }
        throw ConfigError(where + ": entries must be numbers or expression strings");
    };
    auto parse_mat_exprs = [&](const char* key) {
        if (!cfg.contains(key)) throw ConfigError(std::string("dae: missing '") + key + "'");
        const json& arr = cfg[key];
        if (!arr.is_array() || static_cast<int>(arr.size()) != n)
            throw ConfigError(std::string("dae.") + key + ": expected n rows");
        std::vector<std::vector<expr::Ast>> rows;
        for (int i = 0; i < n; ++i) {
            if (!arr[i].is_array() || static_cast<int>(arr[i].size()) != n)
                throw ConfigError(std::string("dae.") + key + ": expected n columns");
            std::vector<expr::Ast> row;
            for (int j = 0; j < n; ++j)
                row.push_back(parse_entry(arr[i][j], std::string("dae.") + key));
            rows.push_back(std::move(row));
        }
        return rows;
    };

    auto A_exprs = parse_mat_exprs("A");
    auto B_exprs = parse_mat_exprs("B");
    if (!cfg.contains("b") || !cfg["b"].is_array() || static_cast<int>(cfg["b"].size()) != n)
        throw ConfigError("dae.b: expected n entries");
    std::vector<expr::Ast> b_exprs;
    for (int i = 0; i < n; ++i) b_exprs.push_back(parse_entry(cfg["b"][i], "dae.b"));

    LinearDAE dae;
    dae.n = n;
    dae.t0 = cfg.contains("t0") ? require_number(cfg, "t0", "dae") : 0.0;
    dae.h = require_number(cfg, "h", "dae");
    if (!(dae.h > 0.0)) throw ConfigError("dae.h: must be positive");
    auto eval_entries = [n](const std::vector<std::vector<expr::Ast>>& rows, double t) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) =
                    rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval({{"t", t}});
        return m;
    };
    dae.A = [A_exprs, eval_entries](double t) { return eval_entries(A_exprs, t); };
    dae.B = [B_exprs, eval_entries](double t) { return eval_entries(B_exprs, t); };
    dae.b = [b_exprs, n](double t) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = b_exprs[static_cast<std::size_t>(i)].eval({{"t", t}});
        return v;
    };

    Vector guess = parse_vector(cfg.contains("guess") ? cfg["guess"] : json(), "dae.guess");
    if (guess.size() != n) throw ConfigError("dae.guess: expected n entries");
    const int steps = require_int(cfg, "steps", "dae");
    if (steps < 1) throw ConfigError("dae.steps: must be >= 1");
    TolerancePolicy tol = parse_tolerances(cfg, opt);

    int exit_code = kExitOk;
    DAETrajectory traj;
    try {
        traj = integrate(dae, guess, steps, tol);
    } catch (const InconsistentInitError& e) {
        std::cerr << "dae: INCONSISTENT: " << e.what() << "\n";
        return kExitNumerical;
    }
    if (!traj.completed) {
        std::cerr << "dae: HIGHER_INDEX at step " << traj.reports.back().k << "\n";
        exit_code = kExitNumerical;
    }

    std::string csv = csv_header("dae");
    csv += "k,t";
    for (int i = 0; i < n; ++i) csv += ",x" + std::to_string(i);
    csv += ",constraint_residual,regular\n";
    for (std::size_t k = 0; k < traj.x.size(); ++k) {
        std::vector<std::string> row{std::to_string(k), format_double(traj.t[k])};
        for (int i = 0; i < n; ++i) row.push_back(format_double(traj.x[k][i]));
        row.push_back(format_double(
            constraint_set(dae, static_cast<int>(k), tol).residual_inf(traj.x[k])));
        const bool regular = k < traj.reports.size() ? traj.reports[k].regular : traj.completed;
        row.push_back(regular ? "1" : "0");
        csv += csv_row(row);
    }
    write_output(opt, csv);
    return exit_code;
}

int run_sleigh(const json& cfg, const Options& opt) {
    check_keys(cfg, {"kind", "m", "a", "b", "J", "initial", "steps", "out", "tolerances"},
               "sleigh");
    SleighParams params;
    params.m = require_number(cfg, "m", "sleigh");
    params.a = require_number(cfg, "a", "sleigh");
    params.b = require_number(cfg, "b", "sleigh");
    params.J = require_number(cfg, "J", "sleigh");
    NonholonomicSystem sys;
    try {
        sys = sleigh_system(params);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("sleigh: ") + e.what());
    }
    Vector g = parse_vector(cfg.contains("initial") ? cfg["initial"] : json(), "sleigh.initial");
    if (g.size() != 3) throw ConfigError("sleigh.initial: expected (theta, x, y)");
    if (constraint_residual(sys, g) >= 1e-8)
        throw ConfigError("sleigh.initial: point is not on the constraint manifold");
    const int steps = require_int(cfg, "steps", "sleigh");
    if (steps < 1) throw ConfigError("sleigh.steps: must be >= 1");
    TolerancePolicy tol = parse_tolerances(cfg, opt);

    std::string csv = csv_header("sleigh");
    csv += "step,theta,x,y,residual_mc,residual_nhdel\n";
    int exit_code = kExitOk;
    Vector prev;
    for (int k = 0; k <= steps; ++k) {
        std::vector<std::string> row{std::to_string(k)};
        for (int i = 0; i < 3; ++i) row.push_back(format_double(g[i]));
        row.push_back(format_double(constraint_residual(sys, g)));
        row.push_back(format_double(k == 0 ? 0.0 : inf_norm(nh_del_residual(sys, prev, g))));
        csv += csv_row(row);
        if (k == steps) break;
        auto step = nh_evolve(sys, g, g, tol);
        if (!step.ok) {
            std::cerr << "sleigh: step " << k << " FAILURE (residual " << step.residual_inf
                      << ")\n";
            exit_code = kExitNumerical;
            break;
        }
        if (step.multiple_roots)
            std::cerr << "sleigh: step " << k << " has " << step.roots.size()
                      << " converged roots; taking the one nearest the seed\n";
        prev = g;
        g = step.element;
    }
    write_output(opt, csv);
    return exit_code;
}

int run_flow(const json& cfg, const Options& opt) {
    check_keys(cfg, {"kind", "n", "hamiltonian", "variables", "constants", "t", "steps", "grid",
                     "out", "tolerances"},
               "flow");
    const int n = require_int(cfg, "n", "flow");
    if (n < 1) throw ConfigError("flow.n: must be >= 1");
    auto vars = parse_names(cfg.contains("variables") ? cfg["variables"] : json::array(), "flow");
    if (static_cast<int>(vars.size()) != 2 * n)
        throw ConfigError("flow.variables: expected the 2n phase-space coordinates");
    auto ast = parse_expression(require_string(cfg, "hamiltonian", "flow"), "flow.hamiltonian");
    HamiltonianSystem HS;
    HS.dof = n;
    try {
        HS.hamiltonian = expr::to_scalar_field(ast, vars, parse_constants(cfg, "flow"));
    } catch (const expr::EvalError& e) {
        throw ConfigError(std::string("flow: ") + e.what());
    }
    const double t = require_number(cfg, "t", "flow");
    const int steps = require_int(cfg, "steps", "flow");
    if (steps < 1) throw ConfigError("flow.steps: must be >= 1");
    if (!cfg.contains("grid") || !cfg["grid"].is_array() || cfg["grid"].empty())
        throw ConfigError("flow.grid: expected a non-empty array of (q, p) points");

    std::vector<Vector> grid;
    for (const auto& pj : cfg["grid"]) {
        Vector z = parse_vector(pj, "flow.grid");
        if (z.size() != 2 * n) throw ConfigError("flow.grid: wrong point dimension");
        grid.push_back(z);
    }

    auto points = flow_lagrangian_set(HS, t, grid, steps);
    std::string csv = csv_header("flow");
    std::vector<std::string> header;
    for (int i = 0; i < n; ++i) header.push_back("q0_" + std::to_string(i));
    for (int i = 0; i < n; ++i) header.push_back("q1_" + std::to_string(i));
    for (int i = 0; i < n; ++i) header.push_back("p0_" + std::to_string(i));
    for (int i = 0; i < n; ++i) header.push_back("p1_" + std::to_string(i));
    csv += csv_row(header);
    for (const auto& pt : points) {
        std::vector<std::string> row;
        for (Eigen::Index i = 0; i < pt.size(); ++i) row.push_back(format_double(pt[i]));
        csv += csv_row(row);
    }
    write_output(opt, csv);
    return kExitOk;
}

int dispatch(const std::string& kind, const Options& opt) {
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError("cannot open config '" + opt.config_path + "'");
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (cfg.contains("kind") && cfg["kind"] != kind)
        throw ConfigError("config kind '" + cfg["kind"].get<std::string>() +
                          "' does not match subcommand '" + kind + "'");

    Options merged = opt;
    if (merged.out_path.empty() && cfg.contains("out")) {
        if (!cfg["out"].is_string()) throw ConfigError("out: expected a string path");
        merged.out_path = cfg["out"].get<std::string>();
    }

    if (kind == "del") return run_del(cfg, merged);
    if (kind == "extract") return run_extract(cfg, merged);
    if (kind == "classify") return run_classify(cfg, merged);
    if (kind == "dae") return run_dae(cfg, merged);
    if (kind == "sleigh") return run_sleigh(cfg, merged);
    if (kind == "flow") return run_flow(cfg, merged);
    throw ConfigError("unknown subcommand '" + kind + "'");
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C"); // fixed '.' decimal separator in all output

    CLI::App app{"groupoid-flow: implicit difference equations on groupoids"};
    app.require_subcommand(1);

    Options opt;
    double tol_value = 0.0;
    bool tol_set = false;

    const std::vector<std::string> kinds = {"del", "extract", "classify", "dae", "sleigh", "flow"};
    std::map<std::string, CLI::App*> subs;
    for (const auto& kind : kinds) {
        CLI::App* sub = app.add_subcommand(kind);
        sub->add_option("--config", opt.config_path, "config file (JSON)")->required();
        sub->add_option("--out", opt.out_path, "output CSV path (default: stdout)");
        sub->add_option("--seed", opt.seed, "seed for reproducible randomness");
        sub->add_option("--tol", tol_value, "override the Newton tolerance")
            ->each([&](const std::string&) { tol_set = true; });
        subs[kind] = sub;
    }

    CLI11_PARSE(app, argc, argv);
    if (tol_set) opt.tol_override = tol_value;

    std::string kind;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) kind = name;

    try {
        return dispatch(kind, opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const expr::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
