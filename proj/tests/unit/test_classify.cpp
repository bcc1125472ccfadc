#include "unit/support.hpp"

#include "trustnet/classify.hpp"
#include "trustnet/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace trustnet;

namespace {

constexpr TrustLabel T = TrustLabel::trustworthy, N = TrustLabel::untrustworthy, U = TrustLabel::unclassified;

VoterProfile voter(Index user, double value)
{
    VoterProfile v;
    v.user = user;
    v.value = value;
    return v;
}

// Independent recount: distinct (publisher) reached by any voter, by label.
std::array<std::size_t, 3> recount(std::span<const Index> voters, const Corpus& c, const PublisherTrust& trust)
{
    std::set<std::string> seen;
    for (Index u : voters)
        for (const auto& it : c.interactions)
            if (it.user == u)
                seen.insert(c.publishers[c.article_publisher[it.article]]);
    std::array<std::size_t, 3> out{};
    for (const auto& d : seen)
        ++out[static_cast<std::size_t>(trust.label(*c.find_publisher(d)))];
    return out;
}

} // namespace

TEST_CASE("publisher score: five at 75 and five at 60 gives 67.5")
{
    std::vector<std::pair<std::string, std::string>> shares;
    for (int v = 0; v < 10; ++v)
        shares.emplace_back("v" + std::to_string(v), "https://p.com/" + std::to_string(v));
    const Corpus c = testing::corpus_of(shares);
    const auto trust = testing::trust_of(c, {{"p.com", 70}});
    std::vector<VoterProfile> voters;
    for (Index v = 0; v < 10; ++v)
        voters.push_back(voter(v, v < 5 ? 75.0 : 60.0));
    const auto scores = publisher_scores(voters, c, trust);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0].score == 67.5);
    CHECK(scores[0].n_voters == 10);
    CHECK(scores[0].kb_label == T);
}

TEST_CASE("publisher score: one vote per voter, uncovered publishers omitted")
{
    const Corpus c = testing::corpus_of(
        {{"a", "https://p.com/1"}, {"a", "https://p.com/2"}, {"a", "https://p.com/3"}, {"b", "https://q.com/1"}});
    const auto trust = testing::trust_of(c, {});
    const std::vector<VoterProfile> voters{voter(*c.find_user("a"), 80.0)};
    const auto scores = publisher_scores(voters, c, trust);
    REQUIRE(scores.size() == 1);
    CHECK(scores[0].domain == "p.com");
    CHECK(scores[0].score == 80.0);
    CHECK(scores[0].n_voters == 1);
    CHECK(scores[0].kb_label == U);

    VoterProfile undefined;
    undefined.user = *c.find_user("b");
    CHECK(publisher_scores(std::vector<VoterProfile>{undefined}, c, trust).empty());
}

TEST_CASE("self-vote exclusion switch")
{
    const Corpus c = testing::corpus_of({{"a", "https://p.com/1"}, {"a", "https://q.com/1"}});
    const auto trust = testing::trust_of(c, {{"p.com", 20}, {"q.com", 80}});
    VoterProfile v = voter(0, 50.0);
    v.articles = c.user_articles[0];
    const auto with = publisher_scores(std::vector<VoterProfile>{v}, c, trust);
    const auto without = publisher_scores(std::vector<VoterProfile>{v}, c, trust, {true});
    CHECK(with[0].score == 50.0);
    CHECK(without[*c.find_publisher("p.com")].score == 80.0);
    CHECK(without[*c.find_publisher("q.com")].score == 20.0);
}

TEST_CASE("coverage")
{
    const Corpus c = testing::corpus_of({{"a", "https://t.com/1"},
                                         {"a", "https://n.com/1"},
                                         {"b", "https://unc.com/1"},
                                         {"c", "https://t2.com/1"},
                                         {"c", "https://t.com/2"}});
    const auto trust = testing::trust_of(c, {{"t.com", 80}, {"t2.com", 90}, {"n.com", 10}});
    std::vector<Index> all{0, 1, 2};
    const auto full = coverage(all, c, trust);
    CHECK(full.percent(T) == 100.0);
    CHECK(full.percent(N) == 100.0);
    CHECK(full.percent(U) == 100.0);
    CHECK(full.total() == c.n_publishers());

    const auto none = coverage(std::vector<Index>{}, c, trust);
    CHECK(none.total() == 0);
    CHECK(none.percent(T) == 0.0);

    const std::vector<Index> a{*c.find_user("a")};
    const auto part = coverage(a, c, trust);
    CHECK(part.covered == recount(a, c, trust));
    CHECK(part.percent(T) == 50.0);

    // Monotone in the voter set.
    std::vector<Index> grow;
    std::size_t prev = 0;
    for (Index u = 0; u < c.n_users(); ++u) {
        grow.push_back(u);
        const auto r = coverage(grow, c, trust);
        CHECK(r.total() >= prev);
        CHECK(r.covered == recount(grow, c, trust));
        prev = r.total();
    }
}

TEST_CASE("stump on a separable pair")
{
    const std::vector<Sample> s{{10, N}, {90, T}};
    const Stump st = fit_stump(s);
    CHECK(st.threshold == 50.0);
    CHECK(st.predict(10) == N);
    CHECK(st.predict(90) == T);
}

TEST_CASE("stump on duplicate scores")
{
    const std::vector<Sample> s{{60, N}, {60, T}};
    const Stump st = fit_stump(s);
    CHECK(evaluate(st, s).balanced_accuracy() == 0.5);
}

TEST_CASE("stump separates 20 points and handles inverted polarity")
{
    std::vector<Sample> s;
    for (int i = 0; i < 20; ++i)
        s.push_back({static_cast<double>(i * 5), i < 8 ? N : T});
    const Stump st = fit_stump(s);
    const Confusion c = evaluate(st, s);
    CHECK(c.fp + c.fn == 0);
    CHECK(st.threshold == 37.5);

    for (auto& x : s)
        x.label = x.label == T ? N : T;
    const Stump inv = fit_stump(s);
    CHECK(inv.below == T);
    CHECK(inv.above == N);
    CHECK(evaluate(inv, s).balanced_accuracy() == 1.0);
}

TEST_CASE("stump tie-break picks the smallest threshold")
{
    // Splits at 15 and at 25 have equal impurity.
    const std::vector<Sample> s{{10, N}, {20, T}, {30, N}};
    const Stump st = fit_stump(s);
    CHECK(st.threshold == 15.0);
}

TEST_CASE("stump errors")
{
    CHECK_THROWS_AS(fit_stump(std::vector<Sample>{{1, T}, {2, T}}), Error);
    CHECK_THROWS_AS(fit_stump(std::vector<Sample>{}), Error);
    CHECK_THROWS_AS(fit_stump(std::vector<Sample>{{1, T}, {2, U}}), Error);
}

TEST_CASE("stump is invariant under increasing transforms")
{
    Rng rng(3);
    std::vector<Sample> s, t;
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform() * 100;
        const TrustLabel l = rng.bernoulli(x / 100) ? T : N;
        s.push_back({x, l});
        t.push_back({std::exp(x / 10), l});
    }
    const Stump a = fit_stump(s), b = fit_stump(t);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(a.predict(s[i].score) == b.predict(t[i].score));
}

TEST_CASE("balanced accuracy arithmetic")
{
    Confusion c;
    c.tp = 4;
    c.fn = 0;
    c.tn = 2;
    c.fp = 2;
    CHECK(c.balanced_accuracy() == 0.75);
}

TEST_CASE("stratified cv")
{
    std::vector<Sample> s;
    for (int i = 0; i < 40; ++i)
        s.push_back({static_cast<double>(i < 15 ? i : i + 50), i < 15 ? N : T});
    const CvReport r = stratified_cv(s, 10, 1);
    CHECK(r.folds == 10);
    CHECK(r.mean == 1.0);
    CHECK(r.stddev == 0.0);
    CHECK(r.baseline == 0.5);
    // Class proportions per fold within one sample.
    for (const auto& c : r.confusion) {
        CHECK(c.tp + c.fn >= 2);
        CHECK(c.tp + c.fn <= 3);
        CHECK(c.tn + c.fp >= 1);
        CHECK(c.tn + c.fp <= 2);
    }
    const CvReport again = stratified_cv(s, 10, 1);
    CHECK(again.fold_accuracy == r.fold_accuracy);
}

TEST_CASE("stratified cv reduces folds and rejects tiny classes")
{
    std::vector<Sample> s{{1, N}, {2, N}, {3, N}, {10, T}, {11, T}, {12, T}, {13, T}};
    CHECK(stratified_cv(s, 10, 0).folds == 3);
    std::vector<Sample> tiny{{1, N}, {10, T}, {11, T}};
    CHECK_THROWS_AS(stratified_cv(tiny, 10, 0), Error);
}

TEST_CASE("stratified cv on random labels is near chance")
{
    Rng rng(99);
    std::vector<Sample> s;
    for (int i = 0; i < 1000; ++i)
        s.push_back({rng.uniform() * 100, rng.bernoulli(0.5) ? T : N});
    const CvReport r = stratified_cv(s, 10, 5);
    CHECK(std::abs(r.mean - 0.5) <= 0.05);
}

TEST_CASE("worthy list ordering and predictions")
{
    std::vector<PublisherScore> scores{
        {0, "a.com", 80, 3, U}, {1, "b.com", 20, 10, U}, {2, "c.com", 90, 50, T}, {3, "d.com", 70, 3, U}};
    const Stump st{50.0, N, T};
    const auto w = worthy_list(scores, st);
    REQUIRE(w.size() == 3);
    CHECK(w[0].domain == "b.com");
    CHECK(w[0].predicted == N);
    CHECK(w[1].domain == "d.com");
    CHECK(w[2].domain == "a.com");
    CHECK(w[2].predicted == T);

    std::vector<PublisherScore> labeled{{0, "x.com", 80, 3, T}};
    CHECK(worthy_list(labeled, st).empty());
}

TEST_CASE("labeled samples skip unclassified publishers")
{
    std::vector<PublisherScore> scores{{0, "a", 80, 3, U}, {1, "b", 20, 10, N}, {2, "c", 90, 50, T}};
    const auto s = labeled_samples(scores);
    REQUIRE(s.size() == 2);
    CHECK(s[0].label == N);
    CHECK(s[1].score == 90);
}
