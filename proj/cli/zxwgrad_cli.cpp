// zxwgrad command line tool: parameter-shift rule synthesis, verification
// suites, and gradient-variance sweeps emitting CSV or JSON rows.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error.
// ZXWGRAD_WORKERS sets the worker-thread count for sweeps (default 1).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "circuit_json.hpp"
#include <zxwgrad/ansatz.hpp>
#include <zxwgrad/barren.hpp>
#include <zxwgrad/rules.hpp>
#include <zxwgrad/shift.hpp>
#include <zxwgrad/sim.hpp>

namespace {

using namespace zxwgrad;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// "3" -> {3}; "2..6" -> {2,...,6} (empty when start > end); "2,4,6" -> list.
std::vector<int> parse_range(const std::string& text) {
    auto parse_int = [](const std::string& s) {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw UsageError("bad integer '" + s + "'");
        return v;
    };
    std::vector<int> out;
    size_t dots = text.find("..");
    if (dots != std::string::npos) {
        int lo = parse_int(text.substr(0, dots));
        int hi = parse_int(text.substr(dots + 2));
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_int(item));
    if (out.empty()) throw UsageError("empty range '" + text + "'");
    return out;
}

int worker_count() {
    const char* env = std::getenv("ZXWGRAD_WORKERS");
    if (!env || !*env) return 1;
    try {
        int w = std::stoi(env);
        if (w < 1) throw UsageError("ZXWGRAD_WORKERS must be at least 1");
        return w;
    } catch (const std::exception&) {
        throw UsageError("ZXWGRAD_WORKERS must be a positive integer");
    }
}

// ---------- rules ----------

// Exactness of the printed rule on each frequency component:
// scale * sum_t coeff_t sin(f shift_t) must equal f.
double rule_residual(const ShiftRule& r, const std::vector<double>& freqs) {
    double worst = 0.0;
    for (double f : freqs) {
        double acc = 0.0;
        for (const auto& t : r.terms) acc += t.coeff * std::sin(f * t.shift);
        worst = std::max(worst, std::abs(r.scale * acc - f));
    }
    return worst;
}

void print_rule(const ShiftRule& r, const std::vector<double>& freqs) {
    std::cout << "rule: " << r.terms.size() << " terms, scale " << fmt(r.scale) << "\n";
    for (const auto& t : r.terms)
        std::cout << "  shift " << (t.shift >= 0 ? "+" : "") << fmt(t.shift)
                  << "  coeff " << (t.coeff >= 0 ? "+" : "") << fmt(t.coeff) << "\n";
    std::cout << "max residual " << fmt(rule_residual(r, freqs)) << "\n";
}

int run_rules(int legs, const std::vector<double>& eigs, const std::vector<double>& alphas) {
    if (legs > 0 && !eigs.empty()) throw UsageError("--legs and --eigs are exclusive");
    if (legs > 0) {
        ShiftRule r = general_equidistant(legs);
        std::vector<double> freqs;
        for (int k = 1; k <= legs; ++k) freqs.push_back(k);
        print_rule(r, freqs);
        return 0;
    }
    if (eigs.empty()) throw UsageError("need --legs N or --eigs list");
    std::vector<double> freqs = frequencies_from_eigs(eigs);
    if (freqs.empty()) throw UsageError("eigenvalues have no positive gaps");
    if (alphas.size() != freqs.size())
        throw UsageError("need one --alphas entry per frequency (" +
                         std::to_string(freqs.size()) + " here)");
    ShiftRule r = solve_system(freqs, alphas);
    print_rule(r, freqs);
    return 0;
}

// ---------- verify ----------

int verify_zxw_rules() {
    auto results = rule_suite();
    int failures = 0;
    for (const auto& r : results) {
        std::cout << (r.pass ? "ok  " : "FAIL ") << r.name << " (max dev " << fmt(r.max_dev)
                  << ", " << r.instances << " instances)\n";
        if (!r.pass) ++failures;
    }
    std::cout << "zxw-rules: " << (results.size() - failures) << "/" << results.size()
              << " checks passed\n";
    return failures == 0 ? 0 : 1;
}

// Random single-occurrence circuit whose bound gate has a known shift rule.
struct TriangleInstance {
    ParamCircuit circuit;
    ShiftRule rule;
};

TriangleInstance random_triangle_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nd(1, 4);
    const int n = nd(rng);
    std::uniform_int_distribution<int> qd(0, n - 1);
    std::uniform_int_distribution<int> scaffold(0, 3);
    std::uniform_int_distribution<int> kindd(0, n >= 2 ? 5 : 3);
    std::uniform_real_distribution<double> offd(-1.0, 1.0);
    const double mults[] = {1.0, -1.0, 2.0};

    TriangleInstance inst;
    ParamCircuit& c = inst.circuit;
    c.qubits = n;
    c.n_params = 1;
    auto add_scaffold = [&] {
        switch (scaffold(rng)) {
            case 0: c.gates.push_back(g_h(qd(rng))); break;
            case 1: c.gates.push_back(g_rx(qd(rng), GateBinding{-1, 1.0, offd(rng)})); break;
            case 2:
                if (n >= 2) {
                    int a = qd(rng), b = qd(rng);
                    if (a != b) c.gates.push_back(g_cnot(a, b));
                }
                break;
            default: c.gates.push_back(g_rz(qd(rng), GateBinding{-1, 1.0, offd(rng)})); break;
        }
    };
    add_scaffold();
    add_scaffold();

    int kind = kindd(rng);
    double m = mults[std::uniform_int_distribution<int>(0, 2)(rng)];
    GateBinding bind{0, m, offd(rng)};
    if (kind == 4 || kind == 5) m = (m > 0 ? 1.0 : -1.0), bind.mult = m;
    switch (kind) {
        case 0: c.gates.push_back(g_rz(qd(rng), bind)); break;
        case 1: c.gates.push_back(g_rx(qd(rng), bind)); break;
        case 2: c.gates.push_back(g_ry(qd(rng), bind)); break;
        case 3: {
            std::string paulis;
            const char letters[] = "XYZ";
            for (int q = 0; q < n; ++q) paulis += letters[qd(rng) % 3];
            std::vector<int> targets;
            for (int q = 0; q < n; ++q) targets.push_back(q);
            c.gates.push_back(g_pauli_exp(targets, paulis, bind));
            break;
        }
        case 4: {
            int a = qd(rng), b = (a + 1) % n;
            c.gates.push_back(g_cu1(a, b, bind));
            break;
        }
        default: {
            int a = qd(rng), b = (a + 1) % n;
            c.gates.push_back(g_crz(a, b, bind));
            break;
        }
    }
    add_scaffold();

    if (kind == 5) {
        inst.rule = four_term(m / 2.0, kPi / (2.0 * std::abs(m)), kPi / std::abs(m));
    } else if (kind == 4) {
        // eigenvalues {0, m}: one frequency |m|
        inst.rule = solve_system({std::abs(m)}, {kPi / (2.0 * std::abs(m))});
    } else {
        // eigenvalues +-m/2: one frequency |m|
        inst.rule = two_term(m / 2.0, -m / 2.0, kPi / (2.0 * std::abs(m)));
    }
    return inst;
}

int verify_gradients(int trials, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> td(-kPi, kPi);
    double max_rule = 0.0, max_fd = 0.0;
    for (int rep = 0; rep < trials; ++rep) {
        TriangleInstance inst = random_triangle_instance(rng);
        const int n = inst.circuit.qubits;
        std::string paulis;
        const char letters[] = "IXYZ";
        for (int q = 0; q < n; ++q)
            paulis += letters[std::uniform_int_distribution<int>(0, 3)(rng)];
        PauliHamiltonian h{n, {{1.0, paulis}}};
        std::vector<double> theta = {td(rng)};
        double ge = grad_exact(inst.circuit, theta, h, 0);
        double gr = apply_rule(inst.rule, inst.circuit, theta, 0, h);
        double gf = grad_fd(inst.circuit, theta, h, 1e-5)[0];
        max_rule = std::max(max_rule, std::abs(ge - gr));
        max_fd = std::max(max_fd, std::abs(ge - gf));
    }
    bool pass = max_rule <= 1e-8 && max_fd <= 1e-6;
    std::cout << (pass ? "ok  " : "FAIL ") << "gradient triangle (" << trials
              << " instances, max rule dev " << fmt(max_rule) << ", max fd dev " << fmt(max_fd)
              << ")\n";
    std::cout << "gradients: " << (pass ? 1 : 0) << "/1 checks passed\n";
    return pass ? 0 : 1;
}

int verify_nogo(int trials, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.1, 2 * kPi - 0.1);
    double min_res = std::numeric_limits<double>::infinity();
    int done = 0;
    while (done < trials) {
        double a = u(rng), b = u(rng), g = u(rng);
        if (std::abs(a - b) < 1e-3 || std::abs(a - g) < 1e-3 || std::abs(b - g) < 1e-3) continue;
        min_res = std::min(min_res, nogo_residual(a, b, g));
        ++done;
    }
    bool pass = min_res > 1e-6;
    std::cout << "nogo: " << trials << " triples, min residual " << fmt(min_res) << "\n";
    std::cout << (pass ? "ok  " : "FAIL ")
              << "no-go certificate (min residual > 1e-6)\n";
    std::cout << "nogo: " << (pass ? 1 : 0) << "/1 checks passed\n";
    return pass ? 0 : 1;
}

// ---------- variance / sweep ----------

struct SweepOptions {
    std::string ansatz;
    std::string circuit_path;
    std::string n_range;
    std::string layers_range = "1";
    std::vector<int> params;
    std::string h_pattern = "Z^n";
    std::vector<std::string> methods = {"quadrature"};
    int points = 5;
    long long budget = 10000000;
    long long samples = 100000;
    uint64_t seed = 0;
    bool seed_given = false;
    std::string output = "-";
    std::string format = "csv";
    bool single_point = false;  // variance subcommand
};

void write_rows_csv(std::ostream& os, const std::vector<VarianceReport>& rows) {
    os << "ansatz,n,layers,param,method,value,stderr\n";
    for (const auto& r : rows) {
        os << r.ansatz << ',' << r.n << ',' << r.layers << ',' << r.param << ',' << r.method
           << ',';
        if (!r.skipped.empty())
            os << r.skipped;
        else
            os << fmt(r.value);
        os << ',';
        if (r.skipped.empty() && r.method == "monte_carlo") os << fmt(r.std_err);
        os << '\n';
    }
}

void write_rows_json(std::ostream& os, const std::vector<VarianceReport>& rows) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["ansatz"] = r.ansatz;
        row["n"] = r.n;
        row["layers"] = r.layers;
        row["param"] = r.param;
        row["method"] = r.method;
        if (!r.skipped.empty())
            row["value"] = r.skipped;
        else
            row["value"] = r.value;
        if (r.skipped.empty() && r.method == "monte_carlo")
            row["stderr"] = r.std_err;
        else
            row["stderr"] = nullptr;
        out.push_back(std::move(row));
    }
    os << out.dump(2) << '\n';
}

// Rows for a gate-by-gate circuit file; closed forms do not apply there.
std::vector<VarianceReport> custom_rows(const ParamCircuit& c, const SweepOptions& opt,
                                        int workers) {
    PauliHamiltonian h = expand_h_pattern(opt.h_pattern, c.qubits);
    std::vector<int> params = opt.params;
    if (params.empty())
        for (int p = 0; p < c.n_params; ++p) params.push_back(p);
    std::vector<VarianceReport> rows;
    for (int p : params) {
        if (p < 0 || p >= c.n_params) throw UsageError("parameter index out of range");
        for (const std::string& method : opt.methods) {
            VarianceReport row;
            row.ansatz = "custom";
            row.n = c.qubits;
            row.layers = 1;
            row.param = p;
            row.method = method;
            if (method == "closed_form") {
                continue;
            } else if (method == "quadrature") {
                try {
                    row.value = variance_quadrature(c, h, p, opt.points, opt.budget, workers);
                } catch (const BudgetExceeded&) {
                    row.skipped = "skipped:budget";
                }
            } else if (method == "monte_carlo") {
                uint64_t row_seed = opt.seed ^ barren_detail::mix64(static_cast<uint64_t>(p));
                McEstimate e = variance_mc(c, h, p, opt.samples, row_seed, workers);
                row.value = e.value;
                row.std_err = e.std_err;
                row.exact = false;
            } else if (method == "diagram") {
                try {
                    row.value = variance_diagram(c, h, p);
                } catch (const std::invalid_argument&) {
                    row.skipped = "skipped:unsupported";
                }
            } else {
                throw UsageError("unknown method " + method);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

int run_sweep(const SweepOptions& opt) {
    for (const std::string& m : opt.methods)
        if (m == "monte_carlo" && !opt.seed_given)
            throw UsageError("--seed is required with the monte_carlo method");
    if (opt.format != "csv" && opt.format != "json")
        throw UsageError("--format must be csv or json");
    const int workers = worker_count();

    std::vector<VarianceReport> rows;
    if (!opt.circuit_path.empty()) {
        if (!opt.ansatz.empty()) throw UsageError("--ansatz and --circuit are exclusive");
        std::ifstream in(opt.circuit_path);
        if (!in) throw UsageError("cannot open circuit file " + opt.circuit_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::parse_error& e) {
            throw UsageError(std::string("circuit file: ") + e.what());
        }
        rows = custom_rows(circuit_from_json(j), opt, workers);
    } else {
        if (opt.ansatz.empty()) throw UsageError("need --ansatz or --circuit");
        if (opt.n_range.empty()) throw UsageError("need --n");
        SweepSpec spec;
        spec.family = family_from_name(opt.ansatz);
        spec.ns = parse_range(opt.n_range);
        spec.layer_counts = parse_range(opt.layers_range);
        spec.h_pattern = opt.h_pattern;
        spec.params = opt.params;
        spec.methods = opt.methods;
        spec.points = opt.points;
        spec.budget = opt.budget;
        spec.mc_samples = opt.samples;
        spec.seed = opt.seed;
        spec.workers = workers;
        if (opt.single_point && (spec.ns.size() != 1 || spec.layer_counts.size() != 1))
            throw UsageError("variance takes a single n and layer count; use sweep for ranges");
        rows = sweep(spec);
    }

    if (opt.output.empty() || opt.output == "-") {
        if (opt.format == "csv")
            write_rows_csv(std::cout, rows);
        else
            write_rows_json(std::cout, rows);
        return 0;
    }
    std::ofstream out(opt.output, std::ios::binary);
    if (!out) throw UsageError("cannot open output file " + opt.output);
    if (opt.format == "csv")
        write_rows_csv(out, rows);
    else
        write_rows_json(out, rows);
    return 0;
}

void add_sweep_options(CLI::App* cmd, SweepOptions& opt) {
    // --h takes the single-letter long name, so drop the default -h alias here.
    cmd->set_help_flag("--help", "Print this help message and exit");
    cmd->add_option("--ansatz", opt.ansatz, "Ansatz family (sim1..sim15, iqp1..iqp4, intro)");
    cmd->add_option("--circuit", opt.circuit_path, "Gate-by-gate circuit JSON file");
    cmd->add_option("--n", opt.n_range, "Qubit count, range 2..6, or list 2,4,6");
    cmd->add_option("--layers", opt.layers_range, "Layer count or range (default 1)");
    cmd->add_option("--params", opt.params, "Parameter indices (default: all)")->delimiter(',');
    cmd->add_option("--h", opt.h_pattern,
                    "Hamiltonian: pattern Z^n or (YX)^(n/2), or an explicit string");
    cmd->add_option("--methods", opt.methods,
                    "Comma list of quadrature, monte_carlo, diagram, closed_form")
        ->delimiter(',');
    cmd->add_option("--points", opt.points, "Quadrature points per parameter (default 5)");
    cmd->add_option("--budget", opt.budget, "Quadrature evaluation budget (default 1e7)");
    cmd->add_option("--samples", opt.samples, "Monte Carlo sample count (default 1e5)");
    cmd->add_option("--seed", opt.seed, "RNG seed (required with monte_carlo)");
    cmd->add_option("--output", opt.output, "Output path, - for stdout");
    cmd->add_option("--format", opt.format, "csv or json (default csv)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parameter-shift rules and gradient variance for ZXW tensor circuits"};
    app.require_subcommand(1);

    auto* rules_cmd = app.add_subcommand("rules", "Synthesise a parameter-shift rule");
    int legs = 0;
    std::vector<double> eigs, alphas;
    rules_cmd->add_option("--legs", legs, "Equidistant 2n-term rule for n spider legs");
    rules_cmd->add_option("--eigs", eigs, "Generator eigenvalues, comma separated")
        ->delimiter(',');
    rules_cmd->add_option("--alphas", alphas, "Shift angles, one per frequency")
        ->delimiter(',');

    auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
    std::string suite;
    int trials = 1000;
    uint64_t vseed = 7;
    verify_cmd->add_option("suite", suite, "zxw-rules, gradients, or nogo")->required();
    verify_cmd->add_option("--trials", trials, "Instance count (nogo and gradients)");
    verify_cmd->add_option("--seed", vseed, "RNG seed");

    SweepOptions var_opt, sweep_opt;
    var_opt.single_point = true;
    auto* var_cmd = app.add_subcommand("variance", "Gradient variance at one (n, layers) point");
    add_sweep_options(var_cmd, var_opt);
    auto* sweep_cmd = app.add_subcommand("sweep", "Gradient variance over n/layer ranges");
    add_sweep_options(sweep_cmd, sweep_opt);

    // Values like "-0.5,0,0.5" start with a dash; glue them to their option so
    // the parser does not mistake them for flags.
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    for (size_t i = 0; i + 1 < args.size(); ++i) {
        const std::string& next = args[i + 1];
        if ((args[i] == "--eigs" || args[i] == "--alphas") && next.size() > 1 && next[0] == '-' &&
            (std::isdigit(static_cast<unsigned char>(next[1])) || next[1] == '.')) {
            args[i] += "=" + next;
            args.erase(args.begin() + i + 1);
        }
    }
    std::reverse(args.begin(), args.end());

    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (rules_cmd->parsed()) return run_rules(legs, eigs, alphas);
        if (verify_cmd->parsed()) {
            if (suite == "zxw-rules") return verify_zxw_rules();
            if (suite == "gradients")
                return verify_gradients(verify_cmd->count("--trials") ? trials : 50, vseed);
            if (suite == "nogo") return verify_nogo(trials, vseed);
            throw UsageError("unknown suite '" + suite + "'");
        }
        if (var_cmd->parsed()) {
            var_opt.seed_given = var_cmd->count("--seed") > 0;
            return run_sweep(var_opt);
        }
        if (sweep_cmd->parsed()) {
            sweep_opt.seed_given = sweep_cmd->count("--seed") > 0;
            return run_sweep(sweep_opt);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
