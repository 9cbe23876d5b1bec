#include "leadel/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "leadel/asymptotics.hpp"
#include "leadel/crossval.hpp"
#include "leadel/exact.hpp"
#include "leadel/intervals.hpp"
#include "leadel/montecarlo.hpp"
#include "leadel/protocol.hpp"
#include "leadel/version.hpp"

namespace leadel {

namespace {

std::string fmt_num(double v) {
    char buf[64];
    snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
}

// Rows are kept as json objects so one table serves both output formats.
struct Table {
    std::vector<std::string> cols;
    std::vector<nlohmann::ordered_json> rows;

    void add(nlohmann::ordered_json row) { rows.push_back(std::move(row)); }

    void write_csv(std::ostream& os, double p, uint64_t seed) const {
        os << "# p=" << fmt_num(p) << " seed=" << seed << " version=" << kVersion << "\n";
        for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
        os << "\n";
        for (const auto& row : rows) {
            for (size_t i = 0; i < cols.size(); ++i) {
                if (i) os << ",";
                const auto& cell = row.at(cols[i]);
                if (cell.is_number_float())
                    os << fmt_num(cell.get<double>());
                else if (cell.is_null())
                    os << "";
                else
                    os << cell.dump();
            }
            os << "\n";
        }
    }

    void write_json(std::ostream& os, double p, uint64_t seed) const {
        nlohmann::ordered_json j;
        j["p"] = p;
        j["seed"] = seed;
        j["version"] = kVersion;
        j["rows"] = rows;
        os << j.dump(2) << "\n";
    }

    void write(std::ostream& os, const std::string& format, double p, uint64_t seed) const {
        if (format == "json")
            write_json(os, p, seed);
        else
            write_csv(os, p, seed);
    }
};

struct CommonOpts {
    double p = 0.5;
    uint64_t seed = 1;
    uint64_t trials = 100000;
    uint64_t max_steps = kDefaultMaxSteps;
    std::string out_path;
    std::string format = "csv";
};

void add_common(CLI::App* sub, CommonOpts& o, bool with_trials = true) {
    sub->add_option("--p", o.p, "splitting probability in (0,1)");
    sub->add_option("--seed", o.seed, "master seed");
    if (with_trials) sub->add_option("--trials", o.trials, "Monte Carlo trials");
    sub->add_option("--max-steps", o.max_steps, "chain step cap before a trial is reported Truncated");
    sub->add_option("--out", o.out_path, "output file (default stdout)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

std::vector<uint64_t> parse_ngrid(const std::string& s) {
    uint64_t a = 0, b = 0, step = 0;
    if (sscanf(s.c_str(), "%llu:%llu:%llu", (unsigned long long*)&a, (unsigned long long*)&b,
               (unsigned long long*)&step) != 3 ||
        step == 0 || b < a)
        throw std::invalid_argument("grid must be a:b:step with step >= 1 and b >= a");
    std::vector<uint64_t> g;
    for (uint64_t v = a; v <= b; v += step) g.push_back(v);
    return g;
}

std::vector<double> parse_xgrid(const std::string& s) {
    double a = 0, b = 0, step = 0;
    if (sscanf(s.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || !(step > 0) || b < a)
        throw std::invalid_argument("grid must be a:b:step with step > 0 and b >= a");
    std::vector<double> g;
    // integer-indexed walk keeps endpoints clean for grids like 0.05:0.95:0.05
    const int count = int(std::floor((b - a) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) g.push_back(a + step * i);
    return g;
}

std::vector<std::vector<uint8_t>> parse_script(const std::string& s) {
    std::vector<std::vector<uint8_t>> script;
    std::vector<uint8_t> round;
    for (char ch : s) {
        if (ch == ',') {
            script.push_back(round);
            round.clear();
        } else if (ch == '0' || ch == '1') {
            round.push_back(ch == '1' ? 1 : 0);
        } else {
            throw std::invalid_argument("script must be comma-separated strings of 0/1");
        }
    }
    if (!round.empty()) script.push_back(round);
    if (script.empty()) throw std::invalid_argument("script is empty");
    return script;
}

void warn_estimate(std::ostream& err, const char* what, const Estimate& e) {
    if (e.truncated_count || e.overflow_count)
        err << "warning: " << what << ": " << e.truncated_count << " truncated, " << e.overflow_count
            << " overflowed trials excluded; estimate is unreliable\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{std::string("leadel ") + kVersion +
                 " — biased leader election on a multiple access channel: protocol simulation, exact analysis, "
                 "and Monte Carlo verification"};
    app.require_subcommand(1);

    // simulate
    CommonOpts sim_o;
    uint64_t sim_n = 4;
    bool sim_trace = false;
    std::string sim_script;
    CLI::App* sim = app.add_subcommand("simulate", "run elections: single JSON trace or mean cost over trials");
    sim->add_option("--n", sim_n, "number of stations")->required();
    sim->add_flag("--trace", sim_trace, "emit one election trace as JSON");
    sim->add_option("--script", sim_script, "scripted flips per round, e.g. 1110,000,1000 (implies --trace)");
    add_common(sim, sim_o);

    // exact
    CommonOpts ex_o;
    uint64_t ex_n = 0;
    std::string ex_grid;
    int64_t ex_k = -1;
    CLI::App* ex = app.add_subcommand("exact", "mean-cost table from the recurrence, optional DP cdf columns");
    ex->add_option("--n", ex_n, "single n");
    ex->add_option("--n-grid", ex_grid, "grid a:b:step");
    ex->add_option("--k", ex_k, "add cdf columns P(H_n <= 0..k)");
    add_common(ex, ex_o, false);

    // dist
    CommonOpts di_o;
    uint64_t di_n = 2;
    uint64_t di_k = 10;
    CLI::App* di = app.add_subcommand("dist", "distribution of H_n: interval measure vs DP, plus Poissonized cdf");
    di->add_option("--n", di_n, "population size")->required();
    di->add_option("--k", di_k, "max level k")->required();
    add_common(di, di_o, false);

    // asymptotic
    CommonOpts as_o;
    std::string as_grid = "64:4096:64";
    CLI::App* as = app.add_subcommand("asymptotic", "decomposition of E(H_n) into log term, constant, oscillation, rest");
    as->add_option("--n-grid", as_grid, "grid a:b:step");
    add_common(as, as_o, false);

    // mc
    CommonOpts mc_o;
    uint64_t mc_n = 0;
    std::string mc_grid;
    double mc_x = -1.0, mc_y = -1.0;
    CLI::App* mcc = app.add_subcommand("mc", "hitting-time estimator of E(H_n); lemma check with --x/--y");
    mcc->add_option("--n", mc_n, "single n");
    mcc->add_option("--n-grid", mc_grid, "grid a:b:step");
    mcc->add_option("--x", mc_x, "lemma x");
    mcc->add_option("--y", mc_y, "lemma y");
    add_common(mcc, mc_o);

    // conjecture
    CommonOpts cj_o;
    std::string cj_grid = "0.05:0.95:0.05";
    CLI::App* cj = app.add_subcommand("conjecture", "exponential moment of tau(x,x) over an x grid");
    cj->add_option("--x-grid", cj_grid, "grid a:b:step");
    add_common(cj, cj_o);

    // crossval
    CommonOpts cv_o;
    CLI::App* cv = app.add_subcommand("crossval", "run the full cross-validation suite");
    cv->add_option("--out", cv_o.out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    }

    const auto chosen = app.get_subcommands().front();
    CommonOpts& o = *[&]() -> CommonOpts* {
        if (chosen == sim) return &sim_o;
        if (chosen == ex) return &ex_o;
        if (chosen == di) return &di_o;
        if (chosen == as) return &as_o;
        if (chosen == mcc) return &mc_o;
        if (chosen == cj) return &cj_o;
        return &cv_o;
    }();

    std::ofstream file;
    std::ostream* os = &out;
    if (!o.out_path.empty()) {
        file.open(o.out_path);
        if (!file) {
            err << "usage error: cannot open output file " << o.out_path << "\n";
            return 1;
        }
        os = &file;
    }

    try {
        if (chosen != cv && (!(o.p > 0.0) || !(o.p < 1.0))) throw std::invalid_argument("p must lie in (0,1)");
        if (chosen != cv && o.trials < 1) throw std::invalid_argument("trials must be >= 1");

        if (chosen == cv) {
            const auto results = run_acceptance_suite(*os);
            return all_passed(results) ? 0 : 3;
        }

        const SplitParams par(o.p);

        if (chosen == sim) {
            if (sim_trace || !sim_script.empty()) {
                ElectionTrace trace;
                if (!sim_script.empty()) {
                    trace = run_election_scripted(uint32_t(sim_n), parse_script(sim_script));
                    *os << trace_to_json(trace, o.p, std::nullopt) << "\n";
                } else {
                    Rng rng(o.seed);
                    trace = run_election(uint32_t(sim_n), par, rng, o.max_steps);
                    *os << trace_to_json(trace, o.p, o.seed) << "\n";
                }
                if (trace.truncated) err << "warning: election truncated at max rounds\n";
                return 0;
            }
            const Estimate e = mc_protocol_mean(uint32_t(sim_n), par, o.trials, o.seed, o.max_steps);
            warn_estimate(err, "simulate", e);
            Table t;
            t.cols = {"n", "mean_rounds", "stderr", "trials", "truncated", "overflow", "seed"};
            nlohmann::ordered_json full;
            full["n"] = sim_n;
            full["mean_rounds"] = e.value;
            full["stderr"] = e.std_err;
            full["trials"] = e.trials;
            full["truncated"] = e.truncated_count;
            full["overflow"] = e.overflow_count;
            full["seed"] = e.seed;
            t.add(full);
            t.write(*os, o.format, o.p, o.seed);
            return 0;
        }

        if (chosen == ex) {
            std::vector<uint64_t> grid;
            if (!ex_grid.empty())
                grid = parse_ngrid(ex_grid);
            else if (ex_n > 0)
                grid = {ex_n};
            else
                throw std::invalid_argument("exact: provide --n or --n-grid");
            const uint64_t n_max = *std::max_element(grid.begin(), grid.end());
            const MeanTable& table = cached_mean_table(n_max, par);
            Table t;
            t.cols = {"n", "mean"};
            for (int64_t k = 0; ex_k >= 0 && k <= ex_k; ++k) t.cols.push_back("cdf_k" + std::to_string(k));
            for (uint64_t n : grid) {
                nlohmann::ordered_json row;
                row["n"] = n;
                row["mean"] = table.values[n];
                for (int64_t k = 0; ex_k >= 0 && k <= ex_k; ++k)
                    row["cdf_k" + std::to_string(k)] = exact_cdf_dp(uint32_t(n), k, par);
                t.add(std::move(row));
            }
            t.write(*os, o.format, o.p, o.seed);
            return 0;
        }

        if (chosen == di) {
            if (di_n < 2) throw std::invalid_argument("dist: n must be >= 2");
            if (di_k > kLevelCap)
                throw std::invalid_argument("dist: level " + std::to_string(di_k) + " exceeds cap " +
                                            std::to_string(kLevelCap) + " (2^k blow-up)");
            Table t;
            t.cols = {"k", "cdf_exact", "cdf_dp", "poisson_cdf"};
            for (uint64_t k = 0; k <= di_k; ++k) {
                nlohmann::ordered_json row;
                row["k"] = k;
                row["cdf_exact"] = cdf_exact(uint32_t(di_n), uint32_t(k), par);
                row["cdf_dp"] = exact_cdf_dp(uint32_t(di_n), int64_t(k), par);
                // Poisson model at intensity x = n, the Poissonization of this population size
                row["poisson_cdf"] = poisson_cdf(double(di_n), uint32_t(k), par);
                t.add(std::move(row));
            }
            t.write(*os, o.format, o.p, o.seed);
            return 0;
        }

        if (chosen == as) {
            const std::vector<uint64_t> grid = parse_ngrid(as_grid);
            const uint64_t n_max = *std::max_element(grid.begin(), grid.end());
            constexpr uint64_t kExactCap = 16384;
            const MeanTable* table = nullptr;
            if (n_max <= kExactCap) table = &cached_mean_table(n_max, par);
            const double beta = residual_exponent(par);
            Table t;
            t.cols = {"n", "leading", "constant", "oscillation", "predicted", "exact", "residual", "residual_scaled"};
            for (uint64_t n : grid) {
                if (n < 2) continue;
                const AsymptoticDecomposition d = asymptotic_mean(n, par, table);
                nlohmann::ordered_json row;
                row["n"] = n;
                row["leading"] = d.leading;
                row["constant"] = d.constant;
                row["oscillation"] = d.oscillation;
                row["predicted"] = d.predicted;
                row["exact"] = d.exact ? nlohmann::ordered_json(*d.exact) : nlohmann::ordered_json(nullptr);
                row["residual"] = d.residual ? nlohmann::ordered_json(*d.residual) : nlohmann::ordered_json(nullptr);
                row["residual_scaled"] =
                    d.residual ? nlohmann::ordered_json(*d.residual * std::pow(double(n), beta)) : nlohmann::ordered_json(nullptr);
                t.add(std::move(row));
            }
            t.write(*os, o.format, o.p, o.seed);
            return 0;
        }

        if (chosen == mcc) {
            if (mc_x >= 0.0 || mc_y >= 0.0) {
                if (!(mc_x > 0.0) || !(mc_x < mc_y) || !(mc_y < 1.0))
                    throw std::invalid_argument("mc lemma check: need 0 < x < y < 1");
                const LemmaCheck chk = mc_lemma_check(mc_x, mc_y, par, o.trials, o.seed, o.max_steps);
                warn_estimate(err, "mc lemma", chk.diff);
                Table t;
                t.cols = {"x",      "y",      "omega", "lhs",    "lhs_stderr", "rhs",  "rhs_stderr",
                          "diff",   "diff_stderr", "trials", "truncated", "seed"};
                nlohmann::ordered_json row;
                row["x"] = mc_x;
                row["y"] = mc_y;
                row["omega"] = chk.omega ? 1 : 0;
                row["lhs"] = chk.lhs.value;
                row["lhs_stderr"] = chk.lhs.std_err;
                row["rhs"] = chk.rhs.value;
                row["rhs_stderr"] = chk.rhs.std_err;
                row["diff"] = chk.diff.value;
                row["diff_stderr"] = chk.diff.std_err;
                row["trials"] = chk.diff.trials;
                row["truncated"] = chk.diff.truncated_count;
                row["seed"] = chk.diff.seed;
                t.add(std::move(row));
                t.write(*os, o.format, o.p, o.seed);
                return 0;
            }
            std::vector<uint64_t> grid;
            if (!mc_grid.empty())
                grid = parse_ngrid(mc_grid);
            else if (mc_n >= 2)
                grid = {mc_n};
            else
                throw std::invalid_argument("mc: provide --n, --n-grid, or --x/--y");
            Table t;
            t.cols = {"n", "mean", "stderr", "trials", "truncated", "overflow", "seed"};
            for (uint64_t n : grid) {
                const Estimate e = mc_mean_cost_via_tau(uint32_t(n), par, o.trials, o.seed, o.max_steps);
                warn_estimate(err, "mc", e);
                nlohmann::ordered_json row;
                row["n"] = n;
                row["mean"] = e.value;
                row["stderr"] = e.std_err;
                row["trials"] = e.trials;
                row["truncated"] = e.truncated_count;
                row["overflow"] = e.overflow_count;
                row["seed"] = e.seed;
                t.add(std::move(row));
            }
            t.write(*os, o.format, o.p, o.seed);
            return 0;
        }

        if (chosen == cj) {
            const std::vector<double> grid = parse_xgrid(cj_grid);
            for (double x : grid)
                if (!(x > 0.0) || !(x < 1.0)) throw std::invalid_argument("conjecture: grid x must lie in (0,1)");
            const auto pts = mc_conjecture(grid, par, o.trials, o.seed, o.max_steps);
            Table t;
            t.cols = {"x",          "log10_moment", "moment_stderr_log10", "mean_tau", "tau_stderr",
                      "truncated",  "trials",       "seed",                "max_tau",  "top_trial_share"};
            uint64_t truncated_total = 0;
            bool tail_dominated = false;
            for (const auto& pt : pts) {
                truncated_total += pt.truncated;
                tail_dominated = tail_dominated || pt.top_trial_share > 0.5;
                nlohmann::ordered_json row;
                row["x"] = pt.x;
                row["log10_moment"] = pt.log10_moment;
                row["moment_stderr_log10"] = pt.moment_stderr_log10;
                row["mean_tau"] = pt.mean_tau;
                row["tau_stderr"] = pt.tau_stderr;
                row["truncated"] = pt.truncated;
                row["trials"] = pt.trials;
                row["seed"] = pt.seed;
                row["max_tau"] = pt.max_tau;
                row["top_trial_share"] = pt.top_trial_share;
                t.add(std::move(row));
            }
            if (o.format != "json")
                *os << "# note: the exponential moment is tail-dominated; figure-scale peak heights (1e14, 1e80) "
                       "are not reproducible at these trial counts\n";
            t.write(*os, o.format, o.p, o.seed);
            if (truncated_total) err << "warning: " << truncated_total << " truncated chains across the grid\n";
            if (tail_dominated)
                err << "warning: at least one grid point has >50% of its moment estimate in a single trial\n";
            return 0;
        }
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace leadel
