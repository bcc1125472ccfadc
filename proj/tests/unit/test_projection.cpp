#include "oracles.hpp"
#include "unit/support.hpp"

#include "trustnet/projection.hpp"
#include "trustnet/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace trustnet;

namespace {

using Edges = std::vector<std::pair<Index, Index>>;

BipartiteGraph random_graph(std::size_t n, std::size_t m, double density, std::uint64_t seed)
{
    Rng rng(seed);
    Edges e;
    for (Index i = 0; i < n; ++i)
        for (Index a = 0; a < m; ++a)
            if (rng.bernoulli(density))
                e.emplace_back(i, a);
    return BipartiteGraph::from_edges(n, m, e).pruned();
}

std::vector<double> random_probs(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<double> p(n);
    for (double& v : p)
        v = rng.uniform();
    return p;
}

} // namespace

TEST_CASE("poisson-binomial tail matches enumeration")
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto p = random_probs(1 + seed % 12, seed);
        for (std::size_t k = 0; k <= p.size() + 1; ++k)
            CHECK(std::abs(poisson_binomial_tail(p, k) - oracle::enumerate_tail(p, k)) <= 1e-12);
    }
}

TEST_CASE("poisson-binomial tail edge cases")
{
    const std::vector<double> ones(5, 1.0), zeros(5, 0.0);
    CHECK(poisson_binomial_tail(ones, 5) == 1.0);
    CHECK(poisson_binomial_tail(ones, 6) == 0.0);
    CHECK(poisson_binomial_tail(zeros, 1) == 0.0);
    CHECK(poisson_binomial_tail(zeros, 0) == 1.0);
    const std::vector<double> half(10, 0.5);
    CHECK(poisson_binomial_tail(half, 10) == doctest::Approx(1.0 / 1024).epsilon(1e-14));
    CHECK_THROWS_AS(poisson_binomial_tail(std::vector<double>{1.5}, 1), std::invalid_argument);
    CHECK_THROWS_AS(poisson_binomial_tail(std::vector<double>{0.5}, 3), std::invalid_argument);

    // Deep tails keep relative precision: 40 trials at 1e-3, all succeed.
    const std::vector<double> tiny(40, 1e-3);
    CHECK(poisson_binomial_tail(tiny, 40) == doctest::Approx(1e-120).epsilon(1e-10));
}

TEST_CASE("poisson tail approximation")
{
    CHECK(poisson_tail(2.0, 0) == 1.0);
    CHECK(poisson_tail(0.0, 1) == 0.0);
    CHECK(poisson_tail(2.0, 1) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
    CHECK(poisson_tail(1.0, 3) == doctest::Approx(1.0 - std::exp(-1.0) * 2.5).epsilon(1e-13));
}

TEST_CASE("pair p-value uses products of link probabilities")
{
    Edges e{{0, 0}, {0, 1}, {1, 0}, {2, 2}};
    const auto model = solve(BipartiteGraph::from_edges(3, 3, e));
    std::vector<double> q;
    for (Index i = 0; i < 3; ++i)
        q.push_back(model.probability(i, 0) * model.probability(i, 1));
    CHECK(pair_pvalue(model, 0, 1, 1).pvalue == doctest::Approx(oracle::enumerate_tail(q, 1)).epsilon(1e-12));
    CHECK(pair_pvalue(model, 1, 0, 1).pvalue == pair_pvalue(model, 0, 1, 1).pvalue);
    CHECK(pair_pvalue(model, 0, 1, 0).pvalue == 1.0);
    CHECK_THROWS_AS(pair_pvalue(model, 0, 9, 1), std::out_of_range);
}

TEST_CASE("co-occurrence kernels agree with a brute-force scan")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto g = random_graph(40, 60, 0.1, seed);
        const auto fast = cooccurrences(g);
        const auto slow = serial::cooccurrences(g);
        CHECK(fast == slow);
        std::vector<std::vector<std::uint32_t>> cols(g.url_links.begin(), g.url_links.end());
        const auto brute = oracle::pair_counts(cols);
        REQUIRE(brute.size() == fast.size());
        for (const auto& c : fast)
            CHECK(brute.at({c.a, c.b}) == c.count);
    }
}

TEST_CASE("parallel and serial pair tests are identical")
{
    const auto g = random_graph(50, 80, 0.08, 11);
    const auto model = solve(g);
    const auto pairs = cooccurrences(g);
    for (TailMethod m : {TailMethod::exact, TailMethod::poisson})
        CHECK(pair_tests(model, pairs, m) == serial::pair_tests(model, pairs, m));
}

TEST_CASE("BH agrees with the definition")
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const std::size_t n = 200;
        std::vector<PairTest> tests;
        std::vector<double> p;
        for (Index i = 0; i < n; ++i) {
            double v = rng.uniform();
            if (i % 7 == 0)
                v *= 1e-4;
            if (i % 13 == 0 && i > 0)
                v = p[i - 1]; // ties
            p.push_back(v);
            tests.push_back({i, i + 1, 1, v});
        }
        const std::uint64_t m = n + seed * 10;
        const auto net = bh_validate(tests, 0.05, m, n + 1);
        const auto expected = oracle::bh_brute_force(p, 0.05, static_cast<double>(m));
        std::set<std::size_t> got;
        for (const auto& e : net.edges)
            got.insert(e.a);
        CHECK(got == expected);
    }
}

TEST_CASE("BH corner cases")
{
    std::vector<PairTest> none;
    const auto empty = bh_validate(none, 0.05, 10, 5);
    CHECK(empty.edges.empty());
    CHECK(empty.bh_threshold == 0.0);

    // Single pair, M = 1: rejected iff p <= alpha, boundary included.
    std::vector<PairTest> one{{0, 1, 3, 0.05}};
    CHECK(bh_validate(one, 0.05, 1, 2).edges.size() == 1);
    one[0].pvalue = 0.0500001;
    CHECK(bh_validate(one, 0.05, 1, 2).edges.empty());

    CHECK_THROWS_AS(bh_validate(one, 0.0, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(bh_validate(one, 1.0, 1, 2), std::invalid_argument);
    std::vector<PairTest> two{{0, 1, 1, 0.1}, {0, 2, 1, 0.1}};
    CHECK_THROWS_AS(bh_validate(two, 0.05, 1, 3), std::invalid_argument);
}

TEST_CASE("BH is monotone in alpha")
{
    Rng rng(5);
    std::vector<PairTest> tests;
    for (Index i = 0; i < 300; ++i)
        tests.push_back({i, i + 1, 1, std::pow(rng.uniform(), 3.0)});
    std::size_t prev = 0;
    for (double alpha : {0.001, 0.01, 0.05, 0.1, 0.3}) {
        const auto n = bh_validate(tests, alpha, 1000, 301).edges.size();
        CHECK(n >= prev);
        prev = n;
    }
}

TEST_CASE("planted pair is validated and round trips")
{
    // Ten users share URLs 0 and 1; the rest share random singletons.
    Edges e;
    for (Index i = 0; i < 10; ++i) {
        e.emplace_back(i, 0);
        e.emplace_back(i, 1);
    }
    for (Index i = 10; i < 60; ++i)
        e.emplace_back(i, 2 + i % 20);
    for (Index i = 0; i < 60; ++i)
        e.emplace_back(i, 22 + i % 7);
    const auto g = BipartiteGraph::from_edges(60, 29, e);
    const auto model = solve(g);
    const auto net = validate_projection(g, model);
    CHECK(net.hypotheses == 29ull * 28 / 2);
    CHECK(net.contains(0));
    CHECK(net.contains(1));
    REQUIRE_FALSE(net.edges.empty());
    CHECK(net.edges.front().a == 0);
    CHECK(net.edges.front().b == 1);

    testing::TempDir dir("proj");
    write_validated(net, dir / "v.csv", dir / "v.json", "h", TailMethod::exact);
    const auto back = read_validated(dir / "v.csv", dir / "v.json", g.url_ids);
    CHECK(back.edges == net.edges);
    CHECK(back.nodes == net.nodes);
    CHECK(back.bh_threshold == net.bh_threshold);
}
