// mms: generate hidden sets, run solvers against an oracle, verify, sweep and time.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mms/harness/experiment.hpp"
#include "mms/harness/instance_io.hpp"

using namespace mms;
using namespace mms::harness;

namespace {

struct Flags
{
    std::string problem = "sphere";
    std::string solver;
    std::string instance = "random";
    std::string d, n, k, t, r; // comma lists in sweep, single values elsewhere
    std::string mode = "desk";
    std::string tie_policy = "prefer-revealed";
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::string out;
    std::optional<double> eps_side, eps_tie;
    std::size_t dim_cap = std::size_t{1} << 24;
    double q = 64;
    double delta2 = 0.125;
    std::size_t level = 2;
    std::size_t base_t = 3;
    unsigned threads = 1;
    bool timing = false;
    std::string csv;
    std::string recovered;
};

void add_common(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--problem", f.problem, "sphere, hamming or strong");
    cmd->add_option("--solver", f.solver, "hull (sphere), two-round (hamming), prefix or leveled (strong)");
    cmd->add_option("--instance", f.instance, "random, hard_d1, hard_rec, file:PATH or corpus:NAME");
    cmd->add_option("--d", f.d, "dimension");
    cmd->add_option("--n", f.n, "hidden set size");
    cmd->add_option("--k", f.k, "rank of a random sphere set");
    cmd->add_option("--t", f.t, "round-1 size (hamming, desk mode)");
    cmd->add_option("--r", f.r, "round-2 radius (hamming, desk mode)");
    cmd->add_option("--mode", f.mode, "paper or desk");
    cmd->add_option("--tie-policy", f.tie_policy, "lex-min, lex-max, prefer-revealed");
    cmd->add_option("--seed", f.seed);
    cmd->add_option("--trials", f.trials);
    cmd->add_option("--out", f.out, "output path (default stdout)");
    cmd->add_option("--eps-side", f.eps_side);
    cmd->add_option("--eps-tie", f.eps_tie);
    cmd->add_option("--dim-cap", f.dim_cap);
    cmd->add_option("--q", f.q, "hard_rec query budget");
    cmd->add_option("--delta2", f.delta2, "hard_rec failure allowance");
    cmd->add_option("--level", f.level, "hard_rec level");
    cmd->add_option("--base-t", f.base_t, "hard_rec base dimension");
    cmd->add_option("--threads", f.threads);
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what)
{
    std::vector<T> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size()) throw InvalidArgument(std::string("bad ") + what + " value '" + tok + "'");
        out.push_back(static_cast<T>(v));
    }
    return out;
}

template <class T>
std::optional<T> parse_one(const std::string& s, const char* what)
{
    if (s.empty()) return std::nullopt;
    auto v = parse_list<T>(s, what);
    if (v.size() != 1) throw InvalidArgument(std::string("--") + what + " takes a single value here");
    return v.front();
}

InstanceSource parse_source(const Flags& f)
{
    InstanceSource src;
    const std::string& s = f.instance;
    if (s == "random") src.kind = InstanceSource::Kind::Random;
    else if (s == "hard_d1") src.kind = InstanceSource::Kind::HardD1;
    else if (s == "hard_rec") src.kind = InstanceSource::Kind::HardRec;
    else if (s.rfind("file:", 0) == 0) { src.kind = InstanceSource::Kind::File; src.name = s.substr(5); }
    else if (s.rfind("corpus:", 0) == 0) { src.kind = InstanceSource::Kind::Corpus; src.name = s.substr(7); }
    else throw InvalidArgument("unknown instance source '" + s + "'");

    src.d = parse_one<std::size_t>(f.d, "d").value_or(0);
    src.n = parse_one<std::size_t>(f.n, "n").value_or(0);
    src.k = parse_one<std::size_t>(f.k, "k");
    src.hard.base_t = f.base_t;
    src.hard.level = f.level;
    src.hard.q = f.q;
    src.hard.delta2 = f.delta2;
    src.hard.dim_cap = f.dim_cap;
    return src;
}

/// In a sweep, comma-list axes are left to the grid; single values become the base config.
ExperimentConfig make_config(Flags f, bool sweeping)
{
    if (sweeping)
        for (auto* s : {&f.d, &f.n, &f.k, &f.t, &f.r})
            if (s->find(',') != std::string::npos) s->clear();
    ExperimentConfig c;
    c.problem = parse_problem(f.problem);
    c.solver = f.solver;
    c.instance = parse_source(f);
    if (!sweeping || (f.tie_policy.find(',') == std::string::npos && f.tie_policy != "all"))
        c.policy = parse_tie_policy(f.tie_policy);
    c.t = parse_one<std::uint64_t>(f.t, "t");
    c.r = parse_one<std::size_t>(f.r, "r");
    c.mode = parse_param_mode(f.mode);
    c.seed = f.seed;
    c.trials = f.trials;
    c.threads = f.threads;
    c.timing = f.timing;
    if (f.eps_side) c.tol.eps_side = *f.eps_side;
    if (f.eps_tie) c.tol.eps_tie = *f.eps_tie;
    return c;
}

/// Writes to --out or stdout.
template <class Fn>
void emit(const std::string& path, Fn&& fn)
{
    if (path.empty() || path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    fn(out);
}

HardInstanceMeta d1_meta(const D1Instance& inst)
{
    HardInstanceMeta m;
    m.level = 1;
    m.u = inst.u;
    m.outer_dim = inst.u.size();
    m.s_flips = inst.s_flips;
    return m;
}

/// The hidden set is trial 0's instance, so `solve --instance file:...` on the output
/// reproduces `solve` on the in-memory source with the same seed.
int cmd_gen(const Flags& f)
{
    const auto cfg = make_config(f, false);
    validate(cfg);
    const std::uint64_t iseed = derive_seed(trial_seed(cfg.seed, 0), 0);
    const HiddenSet h = make_instance(cfg, trial_seed(cfg.seed, 0));
    std::optional<HardInstanceMeta> meta;
    if (cfg.instance.kind == InstanceSource::Kind::HardD1) meta = d1_meta(gen_hard_d1(cfg.instance.d, iseed));
    if (cfg.instance.kind == InstanceSource::Kind::HardRec) meta = gen_hard_recursive(cfg.instance.hard, iseed).meta;
    emit(f.out, [&](std::ostream& os) { write_hidden_set(os, h); });
    if (meta) {
        const std::string text = meta_to_json(*meta).dump(2) + "\n";
        if (f.out.empty() || f.out == "-") {
            std::cerr << text;
        } else {
            std::ofstream side(f.out + ".meta.json", std::ios::binary);
            side << text;
        }
    }
    return 0;
}

int cmd_solve(const Flags& f)
{
    const auto cfg = make_config(f, false);
    const auto records = run_experiment(cfg);
    emit(f.out, [&](std::ostream& os) { write_records(os, records); });
    if (!f.recovered.empty() && records.front().recovered) write_hidden_set_file(f.recovered, *records.front().recovered);
    const bool all_ok = std::all_of(records.begin(), records.end(), [](const ResultRecord& r) { return r.success; });
    return all_ok ? 0 : 2;
}

int cmd_verify(const Flags& f)
{
    if (f.recovered.empty()) throw InvalidArgument("verify needs --recovered PATH");
    Tolerances tol;
    if (f.eps_tie) tol.eps_tie = *f.eps_tie;
    const auto src = parse_source(f);
    if (src.kind != InstanceSource::Kind::File && src.kind != InstanceSource::Kind::Corpus)
        throw InvalidArgument("verify needs --instance file:PATH or corpus:NAME for the hidden set");
    const HiddenSet hidden = src.kind == InstanceSource::Kind::File ? read_hidden_set_file(src.name, tol.eps_tie)
                                                                    : HiddenSet(corpus_by_name(src.name));
    const HiddenSet rec = read_hidden_set_file(f.recovered, tol.eps_tie);
    const auto v = verify_recovery(rec, hidden, tol.eps_tie);
    nlohmann::ordered_json j;
    j["equal"] = v.equal;
    j["missing"] = v.missing;
    j["extra"] = v.extra;
    emit(f.out, [&](std::ostream& os) { os << j.dump() << '\n'; });
    return v.equal ? 0 : 2;
}

int cmd_sweep(const Flags& f)
{
    SweepGrid g;
    g.base = make_config(f, true);
    auto many = [](const std::string& s) { return s.find(',') != std::string::npos; };
    if (many(f.d)) g.d = parse_list<std::size_t>(f.d, "d");
    if (many(f.n)) g.n = parse_list<std::size_t>(f.n, "n");
    if (many(f.k)) g.k = parse_list<std::size_t>(f.k, "k");
    if (many(f.t)) g.t = parse_list<std::uint64_t>(f.t, "t");
    if (many(f.r)) g.r = parse_list<std::size_t>(f.r, "r");
    if (f.tie_policy == "all") {
        g.policies.assign(std::begin(all_tie_policies), std::end(all_tie_policies));
    } else {
        std::stringstream ss(f.tie_policy);
        std::string tok;
        while (std::getline(ss, tok, ',')) g.policies.push_back(parse_tie_policy(tok));
        if (g.policies.size() == 1) g.policies.clear();
    }
    const auto result = sweep(g);
    emit(f.out, [&](std::ostream& os) {
        write_records(os, result.records);
        for (const auto& a : result.aggregates) os << to_json(a).dump() << '\n';
    });
    if (!f.csv.empty()) {
        std::ofstream csv(f.csv, std::ios::binary);
        if (!csv) throw Error("cannot write " + f.csv);
        write_aggregate_csv(csv, result.aggregates);
    }
    return 0;
}

int cmd_bench(const Flags& f)
{
    auto cfg = make_config(f, false);
    cfg.timing = true;
    const auto records = run_experiment(cfg);
    double total = 0.0, worst = 0.0, queries = 0.0;
    std::size_t ok = 0;
    for (const auto& r : records) {
        total += *r.elapsed_ms;
        worst = std::max(worst, *r.elapsed_ms);
        queries += static_cast<double>(r.queries);
        ok += r.success ? 1 : 0;
    }
    const double n = static_cast<double>(records.size());
    nlohmann::ordered_json j;
    j["problem"] = std::string(to_string(cfg.problem));
    j["solver"] = cfg.solver_id();
    j["instance"] = cfg.instance.describe();
    j["trials"] = records.size();
    j["threads"] = cfg.threads;
    j["mean_elapsed_ms"] = total / n;
    j["max_elapsed_ms"] = worst;
    j["mean_queries"] = queries / n;
    j["success_rate"] = static_cast<double>(ok) / n;
    emit(f.out, [&](std::ostream& os) { os << j.dump() << '\n'; });
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"query-complexity experiments for nearest-point reconstruction"};
    app.require_subcommand(1);
    Flags f;

    auto* gen = app.add_subcommand("gen", "write a hidden set (and a .meta.json sidecar for hard instances)");
    add_common(gen, f);
    auto* solve = app.add_subcommand("solve", "run a solver, one JSON record per trial");
    add_common(solve, f);
    solve->add_flag("--timing", f.timing, "record elapsed_ms");
    solve->add_option("--recovered", f.recovered, "write trial 0's recovered set here");
    auto* verify = app.add_subcommand("verify", "compare a recovered set to the hidden set");
    add_common(verify, f);
    verify->add_option("--recovered", f.recovered, "recovered set file")->required();
    auto* sw = app.add_subcommand("sweep", "Cartesian product over comma-separated --d/--n/--k/--t/--r/--tie-policy");
    add_common(sw, f);
    sw->add_flag("--timing", f.timing, "record elapsed_ms");
    sw->add_option("--csv", f.csv, "aggregate CSV path");
    auto* bench = app.add_subcommand("bench", "time repeated trials");
    add_common(bench, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*gen) return cmd_gen(f);
        if (*solve) return cmd_solve(f);
        if (*verify) return cmd_verify(f);
        if (*sw) return cmd_sweep(f);
        if (*bench) return cmd_bench(f);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
