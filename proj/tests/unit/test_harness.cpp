#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mms/harness/experiment.hpp"
#include "mms/harness/instance_io.hpp"
#include "mms/harness/instances.hpp"

using namespace mms;
using namespace mms::harness;

namespace {

HiddenSet parse(const std::string& text)
{
    std::istringstream in(text);
    return read_hidden_set(in);
}

std::string dump(const std::vector<ResultRecord>& recs)
{
    std::ostringstream os;
    write_records(os, recs);
    return os.str();
}

ExperimentConfig sphere_config()
{
    ExperimentConfig c;
    c.problem = Problem::Sphere;
    c.instance.d = 3;
    c.instance.n = 4;
    c.trials = 10;
    c.seed = 5;
    return c;
}

} // namespace

TEST(InstanceIo, BinaryRoundTrip)
{
    Engine eng = make_engine(80);
    const HiddenSet h = random_binary_set(70, 9, eng);
    const auto text = hidden_set_to_string(h);
    EXPECT_EQ(text.substr(0, 7), "B 70 9\n");
    EXPECT_EQ(hidden_set_to_string(parse(text)), text);
    EXPECT_EQ(std::get<BinaryHiddenSet>(parse(text)).points, std::get<BinaryHiddenSet>(h).points);
}

TEST(InstanceIo, SphereRoundTripIsExact)
{
    Engine eng = make_engine(81);
    for (int i = 0; i < 20; ++i) {
        const HiddenSet h = random_sphere_set(5, 7, 4, eng);
        const auto text = hidden_set_to_string(h);
        const auto back = parse(text);
        EXPECT_EQ(std::get<SphereHiddenSet>(back).points, std::get<SphereHiddenSet>(h).points);
        EXPECT_EQ(hidden_set_to_string(back), text);
    }
}

TEST(InstanceIo, ParseErrors)
{
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("X 2 1\n01\n"), ParseError);
    EXPECT_THROW(parse("B 2\n01\n"), ParseError);
    EXPECT_THROW(parse("B 2 2\n01\n"), ParseError);
    EXPECT_THROW(parse("B 2 2\n01\n01\n"), ParseError);
    EXPECT_THROW(parse("B 2 1\n012\n"), ParseError);
    EXPECT_THROW(parse("B 2 1\n0a\n"), ParseError);
    EXPECT_THROW(parse("S 2 1\n1  0\n"), ParseError);
    EXPECT_THROW(parse("S 2 1\n1 x\n"), ParseError);
    EXPECT_THROW(parse("S 2 1\n1 0.1\n"), ParseError);
    EXPECT_THROW(parse("S 2 2\n1 0\n1 0\n"), ParseError);
    EXPECT_THROW(parse("S 0 1\n\n"), ParseError);
    EXPECT_NO_THROW(parse("B 2 1\n01\n\n"));
}

TEST(InstanceIo, SphereRenormalisation)
{
    const auto h = std::get<SphereHiddenSet>(parse("S 2 1\n1.0000005 0\n"));
    EXPECT_EQ(h.points[0].coords(), (Vector{1.0, 0.0}));
    EXPECT_THROW(parse("S 2 1\n1.00001 0\n"), ParseError);
}

TEST(InstanceIo, ShippedCorpusMatchesGenerators)
{
    for (const auto& e : structured_corpus()) {
        const std::string path = std::string(MMS_DATA_DIR) + "/sphere/" + e.name + ".txt";
        ASSERT_TRUE(std::filesystem::exists(path)) << path;
        const auto loaded = std::get<SphereHiddenSet>(read_hidden_set_file(path));
        EXPECT_EQ(loaded.points, e.set.points) << e.name;
    }
    EXPECT_THROW(corpus_by_name("nope"), InvalidArgument);
}

TEST(RandomSphereSet, RankAndSeparation)
{
    Engine eng = make_engine(82);
    for (int i = 0; i < 100; ++i) {
        const std::size_t d = 1 + uniform_below(eng, 5);
        const std::size_t k = 1 + uniform_below(eng, d);
        const std::size_t n = k == 1 ? 1 + uniform_below(eng, 2) : 1 + uniform_below(eng, 8);
        const auto s = random_sphere_set(d, n, k, eng);
        std::vector<Vector> c;
        for (const auto& p : s.points) c.push_back(p.coords());
        EXPECT_EQ(rank_of(c, 1e-8), std::min(n, k));
        EXPECT_EQ(s.points.size(), n);
    }
    EXPECT_THROW(random_sphere_set(3, 3, 1, eng), InvalidArgument);
    EXPECT_THROW(random_sphere_set(3, 3, 4, eng), InvalidArgument);
}

TEST(Verify, Examples)
{
    const auto a = BinaryPoint::from_string("01");
    const auto b = BinaryPoint::from_string("10");
    EXPECT_TRUE(verify_recovery(std::vector<BinaryPoint>{a, b}, std::vector<BinaryPoint>{b, a}).equal);
    const auto v = verify_recovery(std::vector<BinaryPoint>{a}, std::vector<BinaryPoint>{a, b});
    EXPECT_FALSE(v.equal);
    EXPECT_EQ(v.missing, std::vector<std::size_t>{1});
    EXPECT_TRUE(v.extra.empty());

    const auto p = SpherePoint::make({0.6, 0.8});
    const auto q = SpherePoint::make({0.6 + 1e-12, 0.8});
    EXPECT_TRUE(verify_recovery(std::vector<SpherePoint>{q}, std::vector<SpherePoint>{p}).equal);
    const auto far = SpherePoint::make({0.8, 0.6});
    const auto w = verify_recovery(std::vector<SpherePoint>{far}, std::vector<SpherePoint>{p});
    EXPECT_EQ(w.missing.size(), 1u);
    EXPECT_EQ(w.extra.size(), 1u);
    // pairing is bijective: one recovered point cannot cover two hidden ones
    const auto p2 = SpherePoint::make({0.6, 0.8 + 1e-12});
    EXPECT_FALSE(verify_recovery(std::vector<SpherePoint>{p}, std::vector<SpherePoint>{p, p2}).equal);

    const HiddenSet hb = make_binary_hidden_set({a});
    const HiddenSet hs = make_sphere_hidden_set({p});
    EXPECT_THROW(verify_recovery(hb, hs), VariantMismatch);
}

TEST(Experiment, SphereExample)
{
    const auto recs = run_experiment(sphere_config());
    ASSERT_EQ(recs.size(), 10u);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_TRUE(recs[i].success);
        EXPECT_EQ(recs[i].trial, i);
        EXPECT_EQ(recs[i].trial_seed, derive_seed(5, i));
        std::size_t sum = 0;
        for (auto s : recs[i].round_sizes) sum += s;
        EXPECT_EQ(sum, recs[i].queries);
        EXPECT_EQ(recs[i].round_sizes.size(), recs[i].rounds);
    }
}

TEST(Experiment, StrongExample)
{
    ExperimentConfig c;
    c.problem = Problem::Strong;
    c.instance.d = 32;
    c.instance.n = 20;
    c.trials = 3;
    for (const char* solver : {"prefix", "leveled"}) {
        c.solver = solver;
        for (const auto& r : run_experiment(c)) {
            EXPECT_TRUE(r.success);
            EXPECT_LE(r.queries, 3u * 20 * 32 + 32);
        }
    }
}

TEST(Experiment, HammingRecordsParameters)
{
    ExperimentConfig c;
    c.problem = Problem::Hamming;
    c.instance.d = 12;
    c.instance.n = 3;
    c.t = 64;
    c.r = 3;
    c.trials = 4;
    const auto recs = run_experiment(c);
    for (const auto& r : recs) {
        EXPECT_EQ(r.rounds, 2u);
        EXPECT_EQ(r.round_sizes[0], 64u);
        const auto j = to_json(r);
        EXPECT_EQ(j["t"].get<int>(), 64);
        EXPECT_EQ(j["mode"].get<std::string>(), "desk");
    }
    c.t.reset();
    EXPECT_THROW(run_experiment(c), InvalidArgument);
}

TEST(Experiment, ValidationErrors)
{
    auto c = sphere_config();
    c.solver = "prefix";
    EXPECT_THROW(run_experiment(c), InvalidArgument);
    c = sphere_config();
    c.trials = 0;
    EXPECT_THROW(run_experiment(c), InvalidArgument);
    c = sphere_config();
    c.instance.kind = InstanceSource::Kind::HardD1;
    EXPECT_THROW(run_experiment(c), InvalidArgument);
    c = sphere_config();
    c.instance.kind = InstanceSource::Kind::File;
    c.instance.name = "/nonexistent/file.txt";
    EXPECT_THROW(run_experiment(c), ParseError);
    EXPECT_THROW(parse_problem("cube"), InvalidArgument);
}

TEST(Experiment, DeterministicAndThreadIndependent)
{
    auto c = sphere_config();
    c.instance.d = 4;
    c.instance.n = 7;
    c.trials = 24;
    const auto serial = dump(run_experiment(c));
    EXPECT_EQ(serial, dump(run_experiment(c)));
    c.threads = 4;
    EXPECT_EQ(serial, dump(run_experiment(c)));

    ExperimentConfig h;
    h.problem = Problem::Hamming;
    h.instance.d = 12;
    h.instance.n = 4;
    h.t = 30;
    h.r = 2;
    h.trials = 12;
    const auto hs = dump(run_experiment(h));
    h.threads = 3;
    EXPECT_EQ(hs, dump(run_experiment(h)));
}

TEST(Experiment, TimingOnlyWhenRequested)
{
    auto c = sphere_config();
    c.trials = 1;
    EXPECT_FALSE(to_json(run_experiment(c)[0]).contains("elapsed_ms"));
    c.timing = true;
    EXPECT_TRUE(to_json(run_experiment(c)[0]).contains("elapsed_ms"));
}

TEST(Experiment, FileRoundTripGivesTheSameMeasurements)
{
    ExperimentConfig c;
    c.problem = Problem::Strong;
    c.instance.d = 40;
    c.instance.n = 12;
    c.seed = 17;
    const auto mem = run_experiment(c).front();

    const auto path = std::filesystem::temp_directory_path() / "mms_roundtrip.txt";
    write_hidden_set_file(path.string(), make_instance(c, trial_seed(c.seed, 0)));
    c.instance.kind = InstanceSource::Kind::File;
    c.instance.name = path.string();
    const auto file = run_experiment(c).front();
    std::filesystem::remove(path);

    auto a = to_json(mem), b = to_json(file);
    a.erase("instance");
    b.erase("instance");
    EXPECT_EQ(a.dump(), b.dump());
}

TEST(Sweep, AggregatesPerCell)
{
    SweepGrid g;
    g.base = sphere_config();
    g.base.trials = 3;
    g.n = {2, 4, 6};
    const auto res = sweep(g);
    ASSERT_EQ(res.aggregates.size(), 3u);
    EXPECT_EQ(res.records.size(), 9u);
    for (const auto& a : res.aggregates) EXPECT_DOUBLE_EQ(a.success_rate, 1.0);
    EXPECT_EQ(res.aggregates[1].cell.at("n"), "4");

    std::ostringstream csv;
    write_aggregate_csv(csv, res.aggregates);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "n,trials,mean_queries,mean_rounds,success_rate");

    SweepGrid empty;
    empty.base = sphere_config();
    EXPECT_THROW(sweep(empty), EmptyInput);
}

TEST(Sweep, PolicyColumnIsInvariantForDeterministicSolvers)
{
    SweepGrid g;
    g.base.problem = Problem::Strong;
    g.base.instance.n = 10;
    g.base.trials = 4;
    g.d = {8, 20};
    g.policies.assign(std::begin(all_tie_policies), std::end(all_tie_policies));
    const auto res = sweep(g);
    ASSERT_EQ(res.aggregates.size(), 6u);
    for (const auto& a : res.aggregates) EXPECT_DOUBLE_EQ(a.success_rate, 1.0);
}
