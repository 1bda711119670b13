// njcli: command-line front end for the Nambu-Jacobi bracket library.
//
// Subcommands:
//   check            invariant suites on the configured system
//   vf               Hamiltonian vector field at a point (JSON)
//   flow             RK4 trajectory of the Hamiltonian field (CSV)
//   hj               HJ / relatedness residuals on a grid (CSV)
//   characteristics  method-of-characteristics cloud (CSV + stats JSON)
//   lagrangian       j-Lagrangian test for a subspace (JSON verdict)
//   riccati          coupled-Riccati demo (reports + trajectory + cloud)
//
// Exit codes: 0 success, 1 verification/domain failure, 2 usage error.
// Identical config + seed + flags produce byte-identical output files.

#include <CLI11.hpp>
#include <json.hpp>

#include <nj/nj.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            while (used < item.size() &&
                   std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (...) {
            throw nj::invalid_input(std::string(what) + ": malformed number '" + item + "'");
        }
    }
    if (out.empty()) throw nj::invalid_input(std::string(what) + ": empty list");
    return out;
}

// Writes to the path, or stdout when the path is empty.
void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw nj::invalid_input("cannot open output file '" + path + "'");
    out << content;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

nj::HamiltonianSystem make_system(const nj::SystemConfig& cfg) {
    nj::VnjStructure S(cfg.n, cfg.rho_lambda, cfg.rho_box);
    return nj::HamiltonianSystem(std::move(S), cfg.hamiltonians);
}

std::vector<double> sample_domain_point(nj::SplitMix64& rng, const nj::SystemConfig& cfg) {
    std::vector<double> x(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const double lo = cfg.domain.empty() ? -1.0 : cfg.domain[i].first;
        const double hi = cfg.domain.empty() ? 1.0 : cfg.domain[i].second;
        x[i] = rng.uniform(lo, hi);
    }
    return x;
}

// ---- check ---------------------------------------------------------------

int run_check(const std::string& config_path, std::size_t points, std::uint64_t seed,
              double tol, const std::string& report_path) {
    auto cfg = nj::load_config(config_path);
    auto sys = make_system(cfg);
    const std::size_t n = cfg.n;
    nj::SplitMix64 rng(seed);

    double max_skew = 0.0, max_leibniz = 0.0, max_fi = 0.0;
    double max_vf_mismatch = 0.0, max_bracket_rel = 0.0;

    for (std::size_t p = 0; p < points; ++p) {
        auto x = sample_domain_point(rng, cfg);

        std::vector<nj::ScalarField> fs;
        for (std::size_t i = 0; i < n; ++i)
            fs.push_back(nj::random_polynomial(rng, n, 3));
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        for (std::size_t i = n; i > 1; --i)
            std::swap(perm[i - 1], perm[rng.below(i)]);

        max_skew = std::max(max_skew,
                            nj::skew_residual(sys.structure, fs, x, perm).relative());
        max_leibniz = std::max(
            max_leibniz,
            nj::leibniz_residual(sys.structure, fs[0], fs[1],
                                 std::span<const nj::ScalarField>(fs.data() + 1, n - 1), x)
                .relative());
        max_fi = std::max(max_fi, nj::fundamental_identity_residual(
                                      sys.structure, sys.hamiltonians, fs, x)
                                      .relative());

        auto Xa = nj::ham_vf_components(sys, x);
        auto Xb = nj::ham_vf_composition(sys, x);
        double scale = 1.0;
        for (double c : Xa) scale = std::max(scale, std::abs(c));
        for (std::size_t k = 0; k < n; ++k)
            max_vf_mismatch = std::max(max_vf_mismatch, std::abs(Xa[k] - Xb[k]) / scale);

        // bracket relation with f = each coordinate
        const double box = nj::box_bracket(sys.structure, sys.hamiltonians, x);
        const double corr_sign = (n % 2 == 0) ? -1.0 : 1.0; // (-1)^(n-1)
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<nj::ScalarField> args(sys.hamiltonians);
            args.push_back(nj::ScalarField::coordinate(n, k));
            const double rhs = nj::nj_bracket(sys.structure, args, x) - corr_sign * x[k] * box;
            const double sc = std::max({1.0, std::abs(Xa[k]), std::abs(rhs)});
            max_bracket_rel = std::max(max_bracket_rel, std::abs(Xa[k] - rhs) / sc);
        }
    }

    const bool pass = max_skew < tol && max_leibniz < tol && max_fi < tol &&
                      max_vf_mismatch < 1e-9 && max_bracket_rel < 1e-9;
    json report = {
        {"points", points},
        {"seed", seed},
        {"tolerance", tol},
        {"max_skew_residual", max_skew},
        {"max_leibniz_residual", max_leibniz},
        {"max_fundamental_identity_residual", max_fi},
        {"max_vf_formula_mismatch", max_vf_mismatch},
        {"max_bracket_relation_residual", max_bracket_rel},
        {"pass", pass},
    };
    emit(report_path, dump_json(report));
    return pass ? 0 : 1;
}

// ---- vf ------------------------------------------------------------------

int run_vf(const std::string& config_path, const std::string& at) {
    auto cfg = nj::load_config(config_path);
    auto sys = make_system(cfg);
    auto x = parse_doubles(at, "--at");
    if (x.size() != cfg.n)
        throw nj::invalid_input("--at: expected " + std::to_string(cfg.n) + " coordinates");
    auto X = nj::ham_vf(sys, x);
    json out = {{"point", x}, {"components", X}};
    std::cout << dump_json(out);
    return 0;
}

// ---- flow ----------------------------------------------------------------

int run_flow(const std::string& config_path, const std::string& from, double t0,
             double t1, double h, const std::string& output) {
    auto cfg = nj::load_config(config_path);
    auto sys = make_system(cfg);
    auto x0 = parse_doubles(from, "--from");
    if (x0.size() != cfg.n)
        throw nj::invalid_input("--from: expected " + std::to_string(cfg.n) + " coordinates");
    auto traj = nj::integrate(
        [&sys](std::span<const double> y) { return nj::ham_vf(sys, y); }, x0, t0, t1, h);
    std::string csv = "t";
    for (std::size_t i = 1; i <= cfg.n; ++i) csv += ",x" + std::to_string(i);
    csv += "\n";
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        csv += g17(traj.times[r]);
        for (double c : traj.states[r]) csv += "," + g17(c);
        csv += "\n";
    }
    emit(output, csv);
    return 0;
}

// ---- hj ------------------------------------------------------------------

int run_hj(const std::string& config_path, const std::string& grid, double tol,
           const std::string& output) {
    auto cfg = nj::load_config(config_path);
    if (!cfg.section)
        throw nj::invalid_input("hj: the config must define 'section'");
    auto sys = make_system(cfg);
    const std::size_t m = cfg.n - 1;
    nj::Section sec(cfg.n, *cfg.section);

    // grid spec: one lo:hi:count per base coordinate
    std::vector<std::vector<double>> axes;
    {
        std::stringstream ss(grid);
        std::string item;
        while (std::getline(ss, item, ',')) {
            double lo, hi;
            long count;
            if (std::sscanf(item.c_str(), "%lf:%lf:%ld", &lo, &hi, &count) != 3 ||
                count < 1 || !(hi >= lo))
                throw nj::invalid_input("--grid: entry '" + item + "' must be lo:hi:count");
            std::vector<double> axis;
            for (long i = 0; i < count; ++i)
                axis.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
            axes.push_back(axis);
        }
    }
    if (axes.size() != m)
        throw nj::invalid_input("--grid: expected " + std::to_string(m) + " axes");

    const double sign = nj::hj_relatedness_sign();
    std::string csv;
    for (std::size_t i = 1; i <= m; ++i) csv += (i > 1 ? "," : "") + ("x" + std::to_string(i));
    csv += ",hj_residual,relatedness_n\n";

    bool pass = true;
    std::vector<std::size_t> idx(m, 0);
    for (;;) {
        std::vector<double> xN(m);
        for (std::size_t i = 0; i < m; ++i) xN[i] = axes[i][idx[i]];
        const double r = nj::hj_residual(sys, sec, xN);
        const double rel = nj::relatedness_residual(sys, sec, xN)[cfg.n - 1];
        const double scale = std::max({1.0, std::abs(r), std::abs(rel)});
        if (std::abs(r - sign * rel) > tol * scale) pass = false;
        for (std::size_t i = 0; i < m; ++i) csv += (i > 0 ? "," : "") + g17(xN[i]);
        csv += "," + g17(r) + "," + g17(rel) + "\n";
        // advance the grid index
        std::size_t i = 0;
        while (i < m && ++idx[i] == axes[i].size()) idx[i++] = 0;
        if (i == m) break;
    }
    emit(output, csv);
    return pass ? 0 : 1;
}

// ---- characteristics -----------------------------------------------------

std::vector<std::pair<std::vector<double>, double>> load_initial(const std::string& path,
                                                                 std::size_t m) {
    std::ifstream in(path);
    if (!in) throw nj::invalid_input("cannot open initial-data file '" + path + "'");
    std::vector<std::pair<std::vector<double>, double>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;
        auto vals = parse_doubles(line, "initial data");
        if (vals.size() != m + 1)
            throw nj::invalid_input("initial data line " + std::to_string(lineno) +
                                    ": expected " + std::to_string(m + 1) + " numbers");
        std::vector<double> x(vals.begin(), vals.end() - 1);
        out.push_back({std::move(x), vals.back()});
    }
    if (out.empty()) throw nj::invalid_input("initial-data file has no seeds");
    return out;
}

std::string cloud_csv(std::span<const nj::CloudPoint> cloud, std::size_t m) {
    std::string csv;
    for (std::size_t i = 1; i <= m; ++i) csv += (i > 1 ? "," : "") + ("x" + std::to_string(i));
    csv += ",u,seed_id,s\n";
    for (const auto& p : cloud) {
        for (std::size_t i = 0; i < m; ++i) csv += (i > 0 ? "," : "") + g17(p.x[i]);
        csv += "," + g17(p.u) + "," + std::to_string(p.seed_id) + "," + g17(p.s) + "\n";
    }
    return csv;
}

json stats_json(const nj::CloudResidualStats& stats,
                std::span<const std::size_t> degenerate) {
    return json{{"max_residual", stats.max},
                {"median_residual", stats.median},
                {"evaluated", stats.evaluated},
                {"excluded", stats.excluded},
                {"degenerate_seeds", std::vector<std::size_t>(degenerate.begin(),
                                                              degenerate.end())}};
}

int run_characteristics(const std::string& config_path, const std::string& initial_path,
                        double tmax, double h, const std::string& output,
                        const std::string& stats_path) {
    auto cfg = nj::load_config(config_path);
    auto sys = make_system(cfg);
    auto pde = nj::assemble_hj_pde(sys);
    auto initial = load_initial(initial_path, pde.base_dim);
    auto result = nj::solve_characteristics(pde, initial, tmax, h);
    emit(output, cloud_csv(result.points, pde.base_dim));
    auto stats = nj::estimate_cloud_residual(result.points, pde);
    emit(stats_path, dump_json(stats_json(stats, result.degenerate_seeds)));
    return 0;
}

// ---- lagrangian ----------------------------------------------------------

int run_lagrangian(const std::string& config_path, const std::string& basis_path,
                   std::size_t j, const std::string& at) {
    auto cfg = nj::load_config(config_path);
    nj::VnjStructure S(cfg.n, cfg.rho_lambda, cfg.rho_box);

    std::ifstream in(basis_path);
    if (!in) throw nj::invalid_input("cannot open basis file '" + basis_path + "'");
    std::vector<std::vector<double>> basis;
    std::string line;
    while (std::getline(in, line)) {
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;
        auto v = parse_doubles(line, "basis vector");
        if (v.size() != cfg.n)
            throw nj::invalid_input("basis vector: expected " + std::to_string(cfg.n) +
                                    " components");
        basis.push_back(std::move(v));
    }
    nj::Subspace V(cfg.n, std::move(basis));

    std::vector<double> x(cfg.n, 0.5);
    if (!at.empty()) {
        x = parse_doubles(at, "--at");
        if (x.size() != cfg.n)
            throw nj::invalid_input("--at: expected " + std::to_string(cfg.n) + " coordinates");
    } else if (!cfg.domain.empty()) {
        for (std::size_t i = 0; i < cfg.n; ++i)
            x[i] = 0.5 * (cfg.domain[i].first + cfg.domain[i].second);
    }

    const bool verdict = nj::is_j_lagrangian(S, V, j, x);
    json out = {{"j", j},
                {"subspace_dimension", V.basis.size()},
                {"point", x},
                {"j_lagrangian", verdict}};
    std::cout << dump_json(out);
    return verdict ? 0 : 1;
}

// ---- riccati -------------------------------------------------------------

int run_riccati(double a0, double a1, double a2, double b1, bool family,
                const std::string& outdir, std::uint64_t seed) {
    namespace rc = nj::riccati;
    rc::RiccatiParams p = family ? rc::RiccatiParams::family(b1)
                                 : rc::RiccatiParams{a0, a1, a2, b1};
    auto path = [&outdir](const char* name) { return outdir + "/" + name; };

    // 1. factorization report at a reference point and random domain points
    nj::SplitMix64 rng(seed);
    const std::vector<double> xref{0.0, 1.0, 2.0, 3.0};
    json fact = json::array();
    bool fact_ok = true;
    for (std::size_t l = 2; l <= 4; ++l)
        for (std::size_t jj = 1; jj <= 4; ++jj) {
            if (jj == l) continue;
            auto rep = rc::verify_factorization(l, jj, xref, p);
            const double expected_ratio = (jj < l) ? 1.0 : -1.0;
            const bool agree =
                p.on_family() &&
                std::abs(rep.ratio - expected_ratio) < 1e-10;
            if (p.on_family() && !agree) fact_ok = false;
            fact.push_back({{"l", l},
                            {"j", jj},
                            {"measured", rep.measured},
                            {"predicted", rep.predicted},
                            {"ratio", rep.ratio}});
        }
    json fact_report = {{"params", {{"a0", p.a0}, {"a1", p.a1}, {"a2", p.a2}, {"b1", p.b1}}},
                        {"on_family", p.on_family()},
                        {"point", xref},
                        {"pairs", fact},
                        {"note", "on the family, measured/predicted = +1 for j < l and "
                                 "-1 for j > l"},
                        {"pass", !p.on_family() || fact_ok}};
    emit(path("factorization.json"), dump_json(fact_report));

    // 2. conformal-ratio spread at random domain points
    double max_spread = 0.0;
    json spreads = json::array();
    for (int t = 0; t < 20; ++t) {
        // keep coordinates pairwise separated so the ratio is well
        // conditioned near the excluded hyperplanes
        std::vector<double> x;
        for (;;) {
            x = rng.point(4, -2.0, 2.0);
            if (!rc::in_domain(x)) continue;
            bool separated = true;
            for (std::size_t i = 0; i < 4 && separated; ++i)
                for (std::size_t k = i + 1; k < 4; ++k)
                    if (std::abs(x[i] - x[k]) < 0.05) separated = false;
            if (separated) break;
        }
        const double s = rc::conformal_spread(p, x);
        max_spread = std::max(max_spread, s);
        spreads.push_back({{"point", x}, {"spread", s}});
    }
    const bool spread_ok = !p.on_family() || max_spread < 1e-9;
    emit(path("conformal.json"),
         dump_json(json{{"samples", spreads}, {"max_spread", max_spread},
                        {"pass", spread_ok}}));

    // 3. sample trajectory of the bracket dynamics
    {
        auto sys = rc::riccati_system(p);
        std::vector<nj::ScalarField> Hs = sys.hamiltonians;
        auto field = [&sys, &Hs](std::span<const double> x) {
            std::vector<double> v(4);
            for (std::size_t i = 0; i < 4; ++i) {
                std::vector<nj::ScalarField> args = Hs;
                args.push_back(nj::ScalarField::coordinate(4, i));
                v[i] = nj::lambda_bracket(sys.structure, args, x);
            }
            return v;
        };
        const std::vector<double> x0{0.0, 1.0, 2.0, 3.0};
        auto traj = nj::integrate(field, x0, 0.0, 0.2, 1e-3);
        std::string csv = "t,x1,x2,x3,x4\n";
        for (std::size_t r = 0; r < traj.times.size(); ++r) {
            csv += g17(traj.times[r]);
            for (double c : traj.states[r]) csv += "," + g17(c);
            csv += "\n";
        }
        emit(path("trajectory.csv"), csv);
    }

    // 4. HJ characteristics from a 2-D patch of seeds in O
    auto pde = rc::riccati_hj(p);
    std::vector<std::pair<std::vector<double>, double>> initial;
    for (int i = 0; i < 4; ++i)
        for (int j2 = 0; j2 < 4; ++j2) {
            const double s1 = 0.15 * i, s2 = 0.15 * j2;
            initial.push_back({{0.0 + s1, 1.0 + s2, 2.0 + 0.5 * s1 - 0.3 * s2},
                               3.0 + 0.2 * s1 + 0.1 * s2});
        }
    auto result = nj::solve_characteristics(pde, initial, 0.01, 5e-4);
    emit(path("cloud.csv"), cloud_csv(result.points, 3));
    auto stats = nj::estimate_cloud_residual(result.points, pde);
    emit(path("cloud_stats.json"), dump_json(stats_json(stats, result.degenerate_seeds)));

    return (fact_report["pass"].get<bool>() && spread_ok) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nambu-Jacobi bracket mechanics toolkit"};
    app.require_subcommand(1);

    // check
    auto* check = app.add_subcommand("check", "run invariant suites on a configured system");
    std::string check_config, check_report;
    std::size_t check_points = 200;
    std::uint64_t check_seed = 42;
    double check_tol = 1e-8;
    check->add_option("--config", check_config, "system config file")->required();
    check->add_option("--points", check_points, "number of sample points");
    check->add_option("--seed", check_seed, "random seed");
    check->add_option("--tol", check_tol, "residual tolerance");
    check->add_option("--report", check_report, "JSON report path (default stdout)");

    // vf
    auto* vf = app.add_subcommand("vf", "Hamiltonian vector field at a point");
    std::string vf_config, vf_at;
    vf->add_option("--config", vf_config, "system config file")->required();
    vf->add_option("--at", vf_at, "point x1,...,xn")->required();

    // flow
    auto* flow = app.add_subcommand("flow", "integrate the Hamiltonian field");
    flow->set_help_flag("--help", "print help");
    std::string flow_config, flow_from, flow_output;
    double flow_t0 = 0.0, flow_t1 = 1.0, flow_h = 1e-3;
    flow->add_option("--config", flow_config, "system config file")->required();
    flow->add_option("--from", flow_from, "initial point x1,...,xn")->required();
    flow->add_option("--t0", flow_t0, "start time");
    flow->add_option("--t1", flow_t1, "end time");
    flow->add_option("--h", flow_h, "step size");
    flow->add_option("--output", flow_output, "CSV path (default stdout)");

    // hj
    auto* hj = app.add_subcommand("hj", "HJ / relatedness residuals on a grid");
    std::string hj_config, hj_grid, hj_output;
    double hj_tol = 1e-10;
    hj->add_option("--config", hj_config, "system config file (must define section)")
        ->required();
    hj->add_option("--grid", hj_grid, "per-axis lo:hi:count, comma-separated")->required();
    hj->add_option("--tol", hj_tol, "equivalence tolerance");
    hj->add_option("--output", hj_output, "CSV path (default stdout)");

    // characteristics
    auto* ch = app.add_subcommand("characteristics", "solve the HJ equation");
    ch->set_help_flag("--help", "print help");
    std::string ch_config, ch_initial, ch_output, ch_stats;
    double ch_tmax = 0.5, ch_h = 1e-3;
    ch->add_option("--config", ch_config, "system config file")->required();
    ch->add_option("--initial", ch_initial, "seed file: x1,...,x(n-1),u per line")
        ->required();
    ch->add_option("--tmax", ch_tmax, "characteristic horizon");
    ch->add_option("--h", ch_h, "step size");
    ch->add_option("--output", ch_output, "cloud CSV path (default stdout)");
    ch->add_option("--stats", ch_stats, "residual stats JSON path (default stdout)");

    // lagrangian
    auto* lg = app.add_subcommand("lagrangian", "j-Lagrangian subspace test");
    std::string lg_config, lg_basis, lg_at;
    std::size_t lg_j = 1;
    lg->add_option("--config", lg_config, "system config file")->required();
    lg->add_option("--basis", lg_basis, "basis file: one n-vector per line")->required();
    lg->add_option("--j", lg_j, "annihilator order j")->required();
    lg->add_option("--at", lg_at, "evaluation point (default domain midpoint)");

    // riccati
    auto* rc = app.add_subcommand("riccati", "coupled-Riccati demo");
    double rc_a0 = 0.0, rc_a1 = 0.0, rc_a2 = 0.0, rc_b1 = 0.0;
    bool rc_family = false;
    std::string rc_outdir = ".";
    std::uint64_t rc_seed = 42;
    rc->add_option("--a0", rc_a0, "Riccati coefficient a0");
    rc->add_option("--a1", rc_a1, "Riccati coefficient a1");
    rc->add_option("--a2", rc_a2, "Riccati coefficient a2");
    rc->add_option("--b1", rc_b1, "Hamiltonian parameter b1");
    rc->add_flag("--family", rc_family, "use the family a1=0, a2=-1, a0=-b1");
    rc->add_option("--outdir", rc_outdir, "output directory");
    rc->add_option("--seed", rc_seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (*check)
            return run_check(check_config, check_points, check_seed, check_tol, check_report);
        if (*vf) return run_vf(vf_config, vf_at);
        if (*flow)
            return run_flow(flow_config, flow_from, flow_t0, flow_t1, flow_h, flow_output);
        if (*hj) return run_hj(hj_config, hj_grid, hj_tol, hj_output);
        if (*ch)
            return run_characteristics(ch_config, ch_initial, ch_tmax, ch_h, ch_output,
                                       ch_stats);
        if (*lg) return run_lagrangian(lg_config, lg_basis, lg_j, lg_at);
        if (*rc) return run_riccati(rc_a0, rc_a1, rc_a2, rc_b1, rc_family, rc_outdir, rc_seed);
    } catch (const nj::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
