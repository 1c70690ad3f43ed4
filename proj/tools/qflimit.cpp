// qflimit — batch front-end for graph quadratic-form limit experiments.
//
// Subcommands: gen | estimate | simulate | limit-sample | compare | fourth |
//              diagnose | hist
//
// Exit codes: 0 success, 1 usage/parameter error, 2 IO or parse error,
//             3 numeric failure.
//
// All file outputs are written atomically (temp file + rename) and artifact
// outputs carry a JSON sidecar with enough provenance to re-run the command.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qflimit/diagnostics.hpp"
#include "qflimit/ensembles.hpp"
#include "qflimit/graph.hpp"
#include "qflimit/limits.hpp"
#include "qflimit/sampling.hpp"

namespace {

using nlohmann::json;
using namespace qflimit;

// ---- output plumbing -------------------------------------------------------

/// Atomic file write: stream into a sibling temp file, then rename over the
/// target so readers never observe a partial artifact.
void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
        os << content;
        os.flush();
        if (!os) throw IoError("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename temp file onto '" + path + "'");
    }
}

/// Flatten a JSON document into "dotted.path,value" CSV rows.
void flatten_json(const json& j, const std::string& prefix, std::ostringstream& os) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            flatten_json(v, prefix.empty() ? k : prefix + "." + k, os);
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            flatten_json(j[i], prefix + "." + std::to_string(i), os);
        }
    } else {
        os << prefix << ',' << j.dump() << '\n';
    }
}

/// Emit a report either as JSON (default) or flattened CSV, to --out or stdout.
void emit_report(const json& j, const std::string& out, const std::string& format) {
    std::string body;
    if (format == "csv") {
        std::ostringstream os;
        os << "key,value\n";
        flatten_json(j, "", os);
        body = os.str();
    } else {
        body = j.dump(2);
        body.push_back('\n');
    }
    if (out.empty()) {
        std::fputs(body.c_str(), stdout);
    } else {
        atomic_write(out, body);
    }
}

unsigned resolve_thread_flag(unsigned flag_value, bool flag_given) {
    if (flag_given) return resolve_workers(flag_value);
    if (const char* env = std::getenv("QFLIMIT_THREADS")) {
        char* endp = nullptr;
        const unsigned long v = std::strtoul(env, &endp, 10);
        if (endp != env && *endp == '\0') return resolve_workers(static_cast<unsigned>(v));
        std::fprintf(stderr, "warning: ignoring malformed QFLIMIT_THREADS='%s'\n", env);
    }
    return resolve_workers(0);
}

Graph load_graph(const std::string& path) { return read_edge_list_file(path); }

std::string sample_csv_text(const EmpiricalSample& s) {
    std::ostringstream os;
    write_sample_csv(os, s);
    return os.str();
}

void write_sample_artifacts(const std::string& out, const EmpiricalSample& s,
                            const json& command_provenance) {
    atomic_write(out, sample_csv_text(s));
    json side = s.provenance_json();
    side["command"] = command_provenance;
    atomic_write(out + ".json", side.dump(2) + "\n");
}

// ---- per-subcommand state ---------------------------------------------------

struct GenArgs {
    std::string kind;
    long long n = 0, a = 0;
    int m = 0;
    double p = 0.5, q = 0.5;
    std::uint64_t seed = 0;
    std::string out;
};

struct EstimateArgs {
    std::string graph;
    long long K = 0, s_max = 0;  // 0 = default heuristic
    std::string out;
};

struct SimulateArgs {
    std::string graph;
    std::string f = "normal";
    std::uint64_t reps = 100000, seed = 0;
    double M = 0.0;
    bool has_M = false;
    std::string out;
};

struct LimitSampleArgs {
    std::string spec;
    std::string f = "normal";
    std::uint64_t reps = 100000, seed = 0;
    double M = 0.0;
    bool has_M = false;
    std::string out;
};

struct CompareArgs {
    std::string a, b, law;
    std::string out;
};

struct FourthArgs {
    std::string graph;
    std::string f = "normal";
    std::vector<double> M_grid;
    double M = 0.0;
    bool has_M = false;
    std::uint64_t mc_reps = 20000, seed = 0;
    bool oracle = false;
    std::string out;
};

struct DiagnoseArgs {
    std::string graph;
    std::string f = "normal";
    double threshold = 0.05;
    std::string out;
};

struct HistArgs {
    std::string sample;
    long long bins = 50;
    std::string out;
};

// ---- subcommand bodies ------------------------------------------------------

EnsembleSpec make_spec(const GenArgs& g) {
    if (g.kind == "complete") return EnsembleSpec::complete(g.n);
    if (g.kind == "er") return EnsembleSpec::erdos_renyi(g.n, g.p, g.seed);
    if (g.kind == "sbm") return EnsembleSpec::sbm(g.n, g.p, g.q, g.seed);
    if (g.kind == "bipartite") return EnsembleSpec::complete_bipartite(g.a, g.n);
    if (g.kind == "star-union") return EnsembleSpec::star_union(g.m);
    if (g.kind == "coexist") return EnsembleSpec::coexistence(g.n, g.seed);
    throw InvalidParameter("unknown ensemble kind '" + g.kind +
                           "' (want complete|er|sbm|bipartite|star-union|coexist)");
}

int run_gen(const GenArgs& args) {
    const EnsembleSpec spec = make_spec(args);
    const Graph g = generate(spec);
    std::ostringstream body;
    write_edge_list(body, g);
    atomic_write(args.out, body.str());
    json side{{"command", "gen"},
              {"spec", spec.to_json()},
              {"out", args.out},
              {"n", g.n()},
              {"edges", g.edge_count()}};
    atomic_write(args.out + ".json", side.dump(2) + "\n");
    std::fprintf(stderr, "gen: wrote %s (n=%d, m=%llu)\n", args.out.c_str(), g.n(),
                 static_cast<unsigned long long>(g.edge_count()));
    return 0;
}

int run_estimate(const EstimateArgs& args, const std::string& format) {
    const Graph g = load_graph(args.graph);
    const std::size_t K =
        args.K > 0 ? static_cast<std::size_t>(args.K) : default_K(g.n());
    const std::size_t s_max = args.s_max > 0 ? static_cast<std::size_t>(args.s_max)
                                             : default_s_max(g.n(), K);
    LimitSpec spec = estimate_limit_spec(g, K, s_max);
    if (spec.residual_clamped) {
        std::fprintf(stderr,
                     "warning: residual rho^2 clamped to [0,1] (raw %.6g); finite-n "
                     "overshoot of the variance split\n",
                     spec.residual_raw);
    }
    spec.provenance["command"] = "estimate";
    spec.provenance["graph_path"] = args.graph;
    emit_report(spec.to_json(), args.out, format);
    return 0;
}

int run_simulate(const SimulateArgs& args, unsigned workers) {
    const Graph g = load_graph(args.graph);
    const SourceDistribution f = SourceDistribution::parse(args.f);
    const std::optional<double> M =
        args.has_M ? std::optional<double>(args.M) : std::nullopt;
    const EmpiricalSample s = monte_carlo(g, f, args.reps, args.seed, M, workers);
    json cmd{{"name", "simulate"}, {"graph_path", args.graph}, {"f", args.f},
             {"reps", args.reps},  {"seed", args.seed},        {"threads", workers}};
    cmd["M"] = args.has_M ? json(args.M) : json();
    write_sample_artifacts(args.out, s, cmd);
    std::fprintf(stderr, "simulate: wrote %s (%llu values)\n", args.out.c_str(),
                 static_cast<unsigned long long>(args.reps));
    return 0;
}

int run_limit_sample(const LimitSampleArgs& args, unsigned workers) {
    const LimitSpec spec = read_limit_spec_file(args.spec);
    const SourceDistribution f = SourceDistribution::parse(args.f);
    const std::optional<double> M =
        args.has_M ? std::optional<double>(args.M) : std::nullopt;
    const EmpiricalSample s = sample_limit(spec, f, args.reps, args.seed, M, workers);
    json cmd{{"name", "limit-sample"}, {"spec_path", args.spec}, {"f", args.f},
             {"reps", args.reps},      {"seed", args.seed},      {"threads", workers}};
    cmd["M"] = args.has_M ? json(args.M) : json();
    write_sample_artifacts(args.out, s, cmd);
    std::fprintf(stderr, "limit-sample: wrote %s (%llu values)\n", args.out.c_str(),
                 static_cast<unsigned long long>(args.reps));
    return 0;
}

int run_compare(const CompareArgs& args, const std::string& format) {
    const EmpiricalSample a = read_sample_csv_file(args.a);
    json rep{{"command", "compare"}, {"a", {{"path", args.a}, {"n", a.values.size()}}}};
    if (!args.law.empty()) {
        const AnalyticLaw law = AnalyticLaw::parse(args.law);
        rep["law"] = law.name();
        rep["ks"] = ks_distance(a, law);
        rep["wasserstein1"] = json();
    } else {
        const EmpiricalSample b = read_sample_csv_file(args.b);
        rep["b"] = {{"path", args.b}, {"n", b.values.size()}};
        rep["ks"] = ks_distance(a, b);
        rep["wasserstein1"] = a.values.size() == b.values.size()
                                  ? json(wasserstein1(a, b))
                                  : json();
        if (a.values.size() != b.values.size()) {
            std::fprintf(stderr,
                         "warning: wasserstein1 skipped (samples have different "
                         "lengths %zu and %zu)\n",
                         a.values.size(), b.values.size());
        }
    }
    emit_report(rep, args.out, format);
    return 0;
}

int run_fourth(const FourthArgs& args, unsigned workers, const std::string& format) {
    const Graph g = load_graph(args.graph);
    const SourceDistribution f = SourceDistribution::parse(args.f);
    const json cmd{{"name", "fourth"},     {"graph_path", args.graph},
                   {"f", args.f},          {"mc_reps", args.mc_reps},
                   {"seed", args.seed},    {"oracle", args.oracle},
                   {"threads", workers}};
    if (!args.M_grid.empty()) {
        const auto curve = truncated_fourth_moment_curve(g, f, args.M_grid);
        json arr = json::array();
        for (const auto& rep : curve) arr.push_back(rep.to_json());
        emit_report(json{{"command", cmd}, {"reports", arr}}, args.out, format);
        return 0;
    }
    const std::optional<double> M =
        args.has_M ? std::optional<double>(args.M) : std::nullopt;
    MomentReport rep;
    rep.n = static_cast<std::size_t>(g.n());
    rep.edge_count = g.edge_count();
    rep.motifs = count_motifs(g);
    const Moments mom = M ? truncated_moments(f, *M) : f.moments();
    rep.m3 = mom.m3;
    rep.m4 = mom.m4;
    rep.truncated = args.has_M;
    if (args.has_M) rep.M = args.M;
    if (std::isfinite(mom.m4)) {
        rep.exact_fourth = detail::fourth_moment_from_counts(rep.motifs, mom.m3, mom.m4);
    } else {
        std::fprintf(stderr,
                     "warning: E[X^4] infinite for %s and no --M given; exact fourth "
                     "moment omitted\n",
                     f.name().c_str());
    }
    if (args.mc_reps > 0) {
        const auto [mean, se] = mc_fourth_moment(g, f, args.mc_reps, args.seed, M, workers);
        rep.mc_fourth = mean;
        rep.mc_stderr = se;
    }
    json out = rep.to_json();
    out["command"] = cmd;
    if (args.oracle) {
        if (!std::isfinite(mom.m4)) {
            throw InfiniteFourthMoment("--oracle needs finite moments; give --M");
        }
        out["oracle_fourth"] = oracle_fourth_moment(g, mom);
    }
    emit_report(out, args.out, format);
    return 0;
}

int run_diagnose(const DiagnoseArgs& args, const std::string& format) {
    const Graph g = load_graph(args.graph);
    const SourceDistribution f = SourceDistribution::parse(args.f);
    const NormalityVerdict v = classify_normality(g, f, args.threshold);
    json rep = v.to_json();
    rep["universality_gap"] = universality_gap(g);
    rep["command"] = json{{"name", "diagnose"},
                          {"graph_path", args.graph},
                          {"f", args.f},
                          {"threshold", args.threshold}};
    emit_report(rep, args.out, format);
    return 0;
}

int run_hist(const HistArgs& args) {
    if (args.bins < 1) throw InvalidParameter("--bins must be >= 1");
    const EmpiricalSample s = read_sample_csv_file(args.sample);
    const double lo = s.values.front();
    const double hi = s.values.back();
    const auto bins = static_cast<std::size_t>(args.bins);
    std::vector<std::uint64_t> count(bins, 0);
    const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
    for (const double v : s.values) {
        auto idx = static_cast<std::size_t>((v - lo) / width);
        if (idx >= bins) idx = bins - 1;  // right edge lands in the last bin
        ++count[idx];
    }
    std::ostringstream os;
    os << "bin_left,bin_right,count\n";
    char buf[96];
    for (std::size_t i = 0; i < bins; ++i) {
        const double l = lo + width * static_cast<double>(i);
        const double r = (i + 1 == bins) ? hi : lo + width * static_cast<double>(i + 1);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%llu\n", l, r,
                      static_cast<unsigned long long>(count[i]));
        os << buf;
    }
    atomic_write(args.out, os.str());
    json side{{"command",
               json{{"name", "hist"}, {"sample_path", args.sample}, {"bins", args.bins}}},
              {"n", s.values.size()},
              {"min", lo},
              {"max", hi}};
    atomic_write(args.out + ".json", side.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qflimit — quadratic-form limit laws on graph sequences"};
    app.require_subcommand(1);
    app.fallthrough();  // allow --format/--threads after the subcommand

    std::string format = "json";
    unsigned threads_flag = 0;
    bool threads_given = false;
    app.add_option("--format", format, "Report format for JSON-emitting commands")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    auto* threads_opt =
        app.add_option("--threads", threads_flag,
                       "Worker cap (0 = auto; QFLIMIT_THREADS env as fallback)");

    GenArgs gen;
    auto* c_gen = app.add_subcommand("gen", "Generate an ensemble graph as an edge list");
    c_gen->add_option("kind", gen.kind,
                      "complete|er|sbm|bipartite|star-union|coexist")
        ->required();
    c_gen->add_option("--n", gen.n, "Vertex-scale parameter");
    c_gen->add_option("--p", gen.p, "Edge/within-block probability");
    c_gen->add_option("--q", gen.q, "Across-block probability (sbm)");
    c_gen->add_option("--a", gen.a, "Fixed side size (bipartite)");
    c_gen->add_option("--m", gen.m, "Number of stars (star-union)");
    c_gen->add_option("--seed", gen.seed, "Ensemble seed")->capture_default_str();
    c_gen->add_option("--out", gen.out, "Edge-list output path")->required();

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "Estimate limit-spec (sigma, rho, rho^2)");
    c_est->add_option("--graph", est.graph, "Edge-list input path")->required();
    c_est->add_option("--K", est.K, "Leading block size (default: heuristic)");
    c_est->add_option("--s-max", est.s_max, "Eigenvalues kept (default: heuristic)");
    c_est->add_option("--out", est.out, "Output path (stdout if omitted)");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo sample of S_G(X)");
    c_sim->add_option("--graph", sim.graph, "Edge-list input path")->required();
    c_sim->add_option("--f", sim.f, "Source distribution")->capture_default_str();
    c_sim->add_option("--reps", sim.reps, "Replications")->capture_default_str();
    c_sim->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    auto* sim_m = c_sim->add_option("--M", sim.M, "Truncation level");
    c_sim->add_option("--out", sim.out, "Sample CSV output path")->required();

    LimitSampleArgs lim;
    auto* c_lim = app.add_subcommand("limit-sample", "Sample the limit law Q1+Q2+Q3");
    c_lim->add_option("--spec", lim.spec, "LimitSpec JSON input path")->required();
    c_lim->add_option("--f", lim.f, "Source distribution for Q1")->capture_default_str();
    c_lim->add_option("--reps", lim.reps, "Replications")->capture_default_str();
    c_lim->add_option("--seed", lim.seed, "Master seed")->capture_default_str();
    auto* lim_m = c_lim->add_option("--M", lim.M, "Truncation level for Q1 variables");
    c_lim->add_option("--out", lim.out, "Sample CSV output path")->required();

    CompareArgs cmp;
    auto* c_cmp = app.add_subcommand("compare", "KS / Wasserstein-1 distance report");
    c_cmp->add_option("--a", cmp.a, "Sample CSV A")->required();
    auto* cmp_b = c_cmp->add_option("--b", cmp.b, "Sample CSV B");
    auto* cmp_law = c_cmp->add_option(
        "--law", cmp.law, "Analytic law (normal[:v] | chisq:a | chisq-normal:a,b)");
    cmp_b->excludes(cmp_law);
    cmp_law->excludes(cmp_b);
    c_cmp->add_option("--out", cmp.out, "Output path (stdout if omitted)");

    FourthArgs fourth;
    auto* c_4 = app.add_subcommand("fourth", "Exact / Monte Carlo fourth-moment report");
    c_4->add_option("--graph", fourth.graph, "Edge-list input path")->required();
    c_4->add_option("--f", fourth.f, "Source distribution")->capture_default_str();
    auto* f_m = c_4->add_option("--M", fourth.M, "Single truncation level");
    c_4->add_option("--M-grid", fourth.M_grid,
                    "Ascending truncation grid (replaces single report)")
        ->delimiter(',');
    c_4->add_option("--mc-reps", fourth.mc_reps, "Monte Carlo reps (0 = skip)")
        ->capture_default_str();
    c_4->add_option("--seed", fourth.seed, "Monte Carlo seed")->capture_default_str();
    c_4->add_flag("--oracle", fourth.oracle,
                  "Add brute-force ordered-tuple oracle (n <= 8 only)");
    c_4->add_option("--out", fourth.out, "Output path (stdout if omitted)");

    DiagnoseArgs diag;
    auto* c_diag = app.add_subcommand("diagnose", "Normality verdict for (G, F)");
    c_diag->add_option("--graph", diag.graph, "Edge-list input path")->required();
    c_diag->add_option("--f", diag.f, "Source distribution")->capture_default_str();
    c_diag->add_option("--threshold", diag.threshold, "Criterion threshold")
        ->capture_default_str();
    c_diag->add_option("--out", diag.out, "Output path (stdout if omitted)");

    HistArgs hist;
    auto* c_hist = app.add_subcommand("hist", "Histogram CSV from a sample CSV");
    c_hist->add_option("--sample", hist.sample, "Sample CSV input path")->required();
    c_hist->add_option("--bins", hist.bins, "Number of bins")->capture_default_str();
    c_hist->add_option("--out", hist.out, "Histogram CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message
        return 1;
    }

    threads_given = threads_opt->count() > 0;
    const unsigned workers = resolve_thread_flag(threads_flag, threads_given);
    sim.has_M = sim_m->count() > 0;
    lim.has_M = lim_m->count() > 0;
    fourth.has_M = f_m->count() > 0;

    try {
        if (c_gen->parsed()) return run_gen(gen);
        if (c_est->parsed()) return run_estimate(est, format);
        if (c_sim->parsed()) return run_simulate(sim, workers);
        if (c_lim->parsed()) return run_limit_sample(lim, workers);
        if (c_cmp->parsed()) {
            if (cmp.b.empty() && cmp.law.empty()) {
                std::fprintf(stderr, "compare: need --b or --law\n");
                return 1;
            }
            return run_compare(cmp, format);
        }
        if (c_4->parsed()) return run_fourth(fourth, workers, format);
        if (c_diag->parsed()) return run_diagnose(diag, format);
        if (c_hist->parsed()) return run_hist(hist);
        std::fprintf(stderr, "no subcommand given\n");
        return 1;
    } catch (const InvalidParameter& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const InvalidThreshold& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const TooLargeForOracle& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const LengthMismatch& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const EmptySample& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    }
}
