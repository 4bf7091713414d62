#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mms/errors.hpp"
#include "mms/geometry.hpp"
#include "mms/hamming_solver.hpp"
#include "mms/hardgen.hpp"
#include "mms/harness/instance_io.hpp"
#include "mms/harness/instances.hpp"
#include "mms/oracle.hpp"
#include "mms/rng.hpp"
#include "mms/sphere_solver.hpp"
#include "mms/strong_solver.hpp"

namespace mms::harness {

enum class Problem
{
    Sphere,  ///< nearest point on S^{d-1}
    Hamming, ///< nearest point on {0,1}^d
    Strong,  ///< restricted minimum distance on {0,1}^d
};

inline std::string_view to_string(Problem p)
{
    switch (p) {
        case Problem::Sphere: return "sphere";
        case Problem::Hamming: return "hamming";
        case Problem::Strong: return "strong";
    }
    return "?";
}

inline Problem parse_problem(std::string_view s)
{
    for (auto p : {Problem::Sphere, Problem::Hamming, Problem::Strong})
        if (to_string(p) == s) return p;
    throw InvalidArgument("unknown problem '" + std::string(s) + "' (sphere, hamming, strong)");
}

/// Solver ids per problem; the first one is the default.
inline std::vector<std::string_view> solvers_for(Problem p)
{
    switch (p) {
        case Problem::Sphere: return {"hull"};
        case Problem::Hamming: return {"two-round"};
        case Problem::Strong: return {"prefix", "leveled"};
    }
    return {};
}

struct InstanceSource
{
    enum class Kind { Random, HardD1, HardRec, File, Corpus };

    Kind kind = Kind::Random;
    std::size_t d = 0;
    std::size_t n = 0;
    std::optional<std::size_t> k; ///< sphere rank; defaults to min(d, n)
    HardInstanceParams hard;      ///< HardRec
    std::string name;             ///< File path or corpus entry

    std::string describe() const
    {
        switch (kind) {
            case Kind::Random:
                return "random(d=" + std::to_string(d) + ",n=" + std::to_string(n) +
                       (k ? ",k=" + std::to_string(*k) : std::string()) + ")";
            case Kind::HardD1: return "hard_d1(d=" + std::to_string(d) + ")";
            case Kind::HardRec:
                return "hard_rec(t=" + std::to_string(hard.base_t) + ",level=" + std::to_string(hard.level) +
                       ",q=" + format_double(hard.q) + ",delta2=" + format_double(hard.delta2) + ")";
            case Kind::File: return "file(" + name + ")";
            case Kind::Corpus: return "corpus(" + name + ")";
        }
        return "?";
    }
};

struct ExperimentConfig
{
    Problem problem = Problem::Sphere;
    std::string solver; ///< empty = default for the problem
    InstanceSource instance;
    TieBreakPolicy policy = TieBreakPolicy::PreferRevealed;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> t; ///< two-round desk parameters
    std::optional<std::size_t> r;
    ParamMode mode = ParamMode::Desk;
    Tolerances tol;
    std::size_t trials = 1;
    unsigned threads = 1;
    bool timing = false; ///< emit elapsed_ms (makes output run-dependent)

    std::string solver_id() const { return solver.empty() ? std::string(solvers_for(problem).front()) : solver; }
};

struct ResultRecord
{
    // config echo
    std::string problem;
    std::string solver;
    std::string instance;
    std::string tie_policy;
    std::uint64_t seed = 0;
    std::size_t trial = 0;
    std::uint64_t trial_seed = 0;
    std::string rng;
    std::optional<std::uint64_t> t;
    std::optional<std::size_t> r;
    std::optional<std::string> mode;
    // measurements
    std::size_t d = 0;
    std::size_t n = 0;
    std::optional<std::size_t> k;
    std::uint64_t queries = 0;
    std::size_t rounds = 0;
    std::vector<std::size_t> round_sizes;
    bool success = false;
    std::size_t recovered_count = 0;
    std::size_t missing = 0;
    std::size_t extra = 0;
    std::optional<double> elapsed_ms;
    std::optional<HiddenSet> recovered; ///< not serialized
};

inline nlohmann::ordered_json to_json(const ResultRecord& r)
{
    nlohmann::ordered_json j;
    j["problem"] = r.problem;
    j["solver"] = r.solver;
    j["instance"] = r.instance;
    j["tie_policy"] = r.tie_policy;
    j["seed"] = r.seed;
    j["trial"] = r.trial;
    j["trial_seed"] = r.trial_seed;
    j["rng"] = r.rng;
    if (r.t) j["t"] = *r.t;
    if (r.r) j["r"] = *r.r;
    if (r.mode) j["mode"] = *r.mode;
    j["d"] = r.d;
    j["n"] = r.n;
    j["k"] = r.k ? nlohmann::ordered_json(*r.k) : nlohmann::ordered_json(nullptr);
    j["queries"] = r.queries;
    j["rounds"] = r.rounds;
    j["round_sizes"] = r.round_sizes;
    j["success"] = r.success;
    j["recovered_count"] = r.recovered_count;
    j["missing"] = r.missing;
    j["extra"] = r.extra;
    if (r.elapsed_ms) j["elapsed_ms"] = *r.elapsed_ms;
    return j;
}

// ---------------------------------------------------------------------------------------
// Recovery verification

struct VerifyResult
{
    bool equal = false;
    std::vector<std::size_t> missing; ///< indices into the hidden points
    std::vector<std::size_t> extra;   ///< indices into the recovered points
};

inline VerifyResult verify_recovery(const std::vector<BinaryPoint>& recovered, const std::vector<BinaryPoint>& hidden)
{
    VerifyResult v;
    std::vector<bool> used(recovered.size(), false);
    for (std::size_t i = 0; i < hidden.size(); ++i) {
        auto it = std::find(recovered.begin(), recovered.end(), hidden[i]);
        while (it != recovered.end() && used[static_cast<std::size_t>(it - recovered.begin())])
            it = std::find(it + 1, recovered.end(), hidden[i]);
        if (it == recovered.end())
            v.missing.push_back(i);
        else
            used[static_cast<std::size_t>(it - recovered.begin())] = true;
    }
    for (std::size_t j = 0; j < recovered.size(); ++j)
        if (!used[j]) v.extra.push_back(j);
    v.equal = v.missing.empty() && v.extra.empty();
    return v;
}

/// Bijective matching of sphere points: each hidden point pairs with its nearest unused
/// recovered point, accepted within eps_tie.
inline VerifyResult verify_recovery(const std::vector<SpherePoint>& recovered, const std::vector<SpherePoint>& hidden,
                                    double eps_tie = Tolerances{}.eps_tie)
{
    VerifyResult v;
    std::vector<bool> used(recovered.size(), false);
    for (std::size_t i = 0; i < hidden.size(); ++i) {
        std::size_t best = recovered.size();
        double best_dist = eps_tie;
        for (std::size_t j = 0; j < recovered.size(); ++j) {
            if (used[j]) continue;
            if (const double dist = distance(recovered[j].coords(), hidden[i].coords()); dist <= best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        if (best == recovered.size())
            v.missing.push_back(i);
        else
            used[best] = true;
    }
    for (std::size_t j = 0; j < recovered.size(); ++j)
        if (!used[j]) v.extra.push_back(j);
    v.equal = v.missing.empty() && v.extra.empty();
    return v;
}

inline VerifyResult verify_recovery(const HiddenSet& recovered, const HiddenSet& hidden, double eps_tie = Tolerances{}.eps_tie)
{
    if (recovered.index() != hidden.index()) throw VariantMismatch("recovered and hidden sets are of different variants");
    if (const auto* b = std::get_if<BinaryHiddenSet>(&hidden))
        return verify_recovery(std::get<BinaryHiddenSet>(recovered).points, b->points);
    return verify_recovery(std::get<SphereHiddenSet>(recovered).points, std::get<SphereHiddenSet>(hidden).points, eps_tie);
}

// ---------------------------------------------------------------------------------------
// Experiments

/// Seed of trial i: derive_seed(seed, i). Inside a trial, stream 0 generates the instance
/// and stream 1 feeds the solver.
inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) { return derive_seed(seed, trial); }

inline void validate(const ExperimentConfig& c)
{
    if (c.trials < 1) throw InvalidArgument("trials must be >= 1");
    const auto ids = solvers_for(c.problem);
    if (std::find(ids.begin(), ids.end(), c.solver_id()) == ids.end())
        throw InvalidArgument("solver '" + c.solver_id() + "' does not solve problem '" + std::string(to_string(c.problem)) + "'");
    using K = InstanceSource::Kind;
    const bool sphere = c.problem == Problem::Sphere;
    if (sphere && (c.instance.kind == K::HardD1 || c.instance.kind == K::HardRec))
        throw InvalidArgument("hard instances are binary; they cannot feed the sphere problem");
    if (!sphere && c.instance.kind == K::Corpus) throw InvalidArgument("the structured corpus holds sphere instances");
}

/// The hidden set of one trial.
inline HiddenSet make_instance(const ExperimentConfig& c, std::uint64_t tseed)
{
    using K = InstanceSource::Kind;
    const auto& src = c.instance;
    const std::uint64_t s = derive_seed(tseed, 0);
    HiddenSet h;
    switch (src.kind) {
        case K::Random: {
            Engine eng = make_engine(s);
            if (c.problem == Problem::Sphere)
                h = random_sphere_set(src.d, src.n, src.k.value_or(std::min(src.d, src.n)), eng, c.tol);
            else
                h = random_binary_set(src.d, src.n, eng);
            break;
        }
        case K::HardD1: h = gen_hard_d1(src.d, s).hidden; break;
        case K::HardRec: h = gen_hard_recursive(src.hard, s).hidden; break;
        case K::File: h = read_hidden_set_file(src.name, c.tol.eps_tie); break;
        case K::Corpus: h = corpus_by_name(src.name); break;
    }
    if ((c.problem == Problem::Sphere) != std::holds_alternative<SphereHiddenSet>(h))
        throw VariantMismatch("instance variant does not match problem '" + std::string(to_string(c.problem)) + "'");
    return h;
}

namespace detail {

inline TwoRoundParams two_round_params(const ExperimentConfig& c, std::size_t d, std::size_t n)
{
    if (c.mode == ParamMode::Paper) return choose_two_round_params(d, n, ParamMode::Paper);
    if (!c.t || !c.r) throw InvalidArgument("hamming problem in desk mode needs --t and --r");
    TwoRoundParams p;
    p.t = *c.t;
    p.r = *c.r;
    return choose_two_round_params(d, n, ParamMode::Desk, p);
}

} // namespace detail

/// One trial on a given hidden set.
inline ResultRecord run_trial(const ExperimentConfig& c, const HiddenSet& hidden, std::size_t trial)
{
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t tseed = trial_seed(c.seed, trial);

    ResultRecord rec;
    rec.problem = std::string(to_string(c.problem));
    rec.solver = c.solver_id();
    rec.instance = c.instance.describe();
    rec.tie_policy = std::string(to_string(c.policy));
    rec.seed = c.seed;
    rec.trial = trial;
    rec.trial_seed = tseed;
    rec.rng = std::string(rng_algorithm_id);
    rec.d = hidden_set_dim(hidden);
    rec.n = hidden_set_size(hidden);

    Oracle oracle(hidden, c.policy, c.tol);
    VerifyResult vr;
    std::size_t recovered = 0;
    switch (c.problem) {
        case Problem::Sphere: {
            auto rep = solve_sphere(SphereNearestOracle(oracle));
            rec.k = rep.basis_size;
            recovered = rep.recovered.size();
            vr = verify_recovery(rep.recovered, std::get<SphereHiddenSet>(hidden).points, c.tol.eps_tie);
            rec.recovered = SphereHiddenSet{rec.d, std::move(rep.recovered)};
            break;
        }
        case Problem::Strong: {
            std::vector<BinaryPoint> out;
            if (rec.solver == "leveled")
                out = solve_strong_leveled(DistanceOracle(oracle)).recovered;
            else
                out = solve_strong(DistanceOracle(oracle)).recovered;
            recovered = out.size();
            vr = verify_recovery(out, std::get<BinaryHiddenSet>(hidden).points);
            rec.recovered = BinaryHiddenSet{rec.d, std::move(out)};
            break;
        }
        case Problem::Hamming: {
            const auto params = detail::two_round_params(c, rec.d, rec.n);
            rec.t = params.t;
            rec.r = params.r;
            rec.mode = std::string(to_string(c.mode));
            auto rep = solve_hamming_two_round(HammingNearestOracle(oracle), params, derive_seed(tseed, 1));
            recovered = rep.recovered.size();
            vr = verify_recovery(rep.recovered, std::get<BinaryHiddenSet>(hidden).points);
            rec.recovered = BinaryHiddenSet{rec.d, std::move(rep.recovered)};
            break;
        }
    }
    const auto ledger = oracle.ledger_report();
    rec.queries = ledger.total;
    rec.rounds = ledger.round_count();
    rec.round_sizes = ledger.round_sizes();
    rec.success = vr.equal;
    rec.recovered_count = recovered;
    rec.missing = vr.missing.size();
    rec.extra = vr.extra.size();
    if (c.timing)
        rec.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

/// Runs every trial; trials are spread over c.threads workers and returned in trial order.
inline std::vector<ResultRecord> run_experiment(const ExperimentConfig& c)
{
    validate(c);
    std::vector<ResultRecord> records(c.trials);
    std::vector<std::exception_ptr> errors(c.trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < c.trials; i = next++) {
            try {
                const auto hidden = make_instance(c, trial_seed(c.seed, i));
                records[i] = run_trial(c, hidden, i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned nthreads = std::max(1u, std::min<unsigned>(c.threads, static_cast<unsigned>(c.trials)));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < nthreads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return records;
}

inline void write_records(std::ostream& os, const std::vector<ResultRecord>& records)
{
    for (const auto& r : records) os << to_json(r).dump() << '\n';
}

// ---------------------------------------------------------------------------------------
// Sweeps

/// Parameter axes; an empty axis keeps the base config's value.
struct SweepGrid
{
    ExperimentConfig base;
    std::vector<std::size_t> d;
    std::vector<std::size_t> n;
    std::vector<std::size_t> k;
    std::vector<std::uint64_t> t;
    std::vector<std::size_t> r;
    std::vector<TieBreakPolicy> policies;
};

struct AggregateRow
{
    std::map<std::string, std::string> cell; ///< axis name -> value
    std::size_t trials = 0;
    double mean_queries = 0.0;
    double mean_rounds = 0.0;
    double success_rate = 0.0;
};

inline nlohmann::ordered_json to_json(const AggregateRow& a)
{
    nlohmann::ordered_json j;
    j["aggregate"] = true;
    for (const auto& [key, value] : a.cell) j[key] = value;
    j["trials"] = a.trials;
    j["mean_queries"] = a.mean_queries;
    j["mean_rounds"] = a.mean_rounds;
    j["success_rate"] = a.success_rate;
    return j;
}

struct SweepResult
{
    std::vector<ResultRecord> records;
    std::vector<AggregateRow> aggregates;
};

inline SweepResult sweep(const SweepGrid& grid)
{
    // Cartesian product in a fixed axis order: d, n, k, t, r, policy.
    struct Axis
    {
        std::string name;
        std::size_t size;
    };
    std::vector<Axis> axes;
    if (!grid.d.empty()) axes.push_back({"d", grid.d.size()});
    if (!grid.n.empty()) axes.push_back({"n", grid.n.size()});
    if (!grid.k.empty()) axes.push_back({"k", grid.k.size()});
    if (!grid.t.empty()) axes.push_back({"t", grid.t.size()});
    if (!grid.r.empty()) axes.push_back({"r", grid.r.size()});
    if (!grid.policies.empty()) axes.push_back({"tie_policy", grid.policies.size()});
    if (axes.empty()) throw EmptyInput("sweep grid has no axis");

    SweepResult out;
    std::vector<std::size_t> pos(axes.size(), 0);
    while (true) {
        ExperimentConfig c = grid.base;
        AggregateRow row;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const auto& name = axes[a].name;
            const std::size_t i = pos[a];
            if (name == "d") { c.instance.d = grid.d[i]; row.cell[name] = std::to_string(grid.d[i]); }
            else if (name == "n") { c.instance.n = grid.n[i]; row.cell[name] = std::to_string(grid.n[i]); }
            else if (name == "k") { c.instance.k = grid.k[i]; row.cell[name] = std::to_string(grid.k[i]); }
            else if (name == "t") { c.t = grid.t[i]; row.cell[name] = std::to_string(grid.t[i]); }
            else if (name == "r") { c.r = grid.r[i]; row.cell[name] = std::to_string(grid.r[i]); }
            else { c.policy = grid.policies[i]; row.cell[name] = std::string(to_string(grid.policies[i])); }
        }
        const auto recs = run_experiment(c);
        row.trials = recs.size();
        for (const auto& r : recs) {
            row.mean_queries += static_cast<double>(r.queries);
            row.mean_rounds += static_cast<double>(r.rounds);
            row.success_rate += r.success ? 1.0 : 0.0;
        }
        row.mean_queries /= static_cast<double>(row.trials);
        row.mean_rounds /= static_cast<double>(row.trials);
        row.success_rate /= static_cast<double>(row.trials);
        out.records.insert(out.records.end(), recs.begin(), recs.end());
        out.aggregates.push_back(std::move(row));

        std::size_t a = axes.size();
        while (a > 0) {
            --a;
            if (++pos[a] < axes[a].size) break;
            pos[a] = 0;
            if (a == 0) return out;
        }
    }
}

inline void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows)
{
    if (rows.empty()) return;
    for (const auto& [key, value] : rows.front().cell) os << key << ',';
    os << "trials,mean_queries,mean_rounds,success_rate\n";
    for (const auto& row : rows) {
        for (const auto& [key, value] : row.cell) os << value << ',';
        os << row.trials << ',' << format_double(row.mean_queries) << ',' << format_double(row.mean_rounds) << ','
           << format_double(row.success_rate) << '\n';
    }
}

} // namespace mms::harness
