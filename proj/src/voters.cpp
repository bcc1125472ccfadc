#include "trustnet/voters.hpp"

#include <algorithm>

namespace trustnet {

std::string_view to_string(Strategy strategy) noexcept
{
    switch (strategy) {
    case Strategy::ds_url_nec: return "DS-URL-NEC";
    case Strategy::ds_all: return "DS-ALL";
    case Strategy::ds_all_wo_usr_nec: return "DS-ALL-WO-USR-NEC";
    case Strategy::users_all: return "USERS-ALL";
    }
    return "USERS-ALL";
}

std::optional<Strategy> parse_strategy(std::string_view text) noexcept
{
    for (Strategy s : kAllStrategies)
        if (text == to_string(s))
            return s;
    return std::nullopt;
}

std::vector<Index> discussion_supporters(const Corpus& corpus, const ValidatedNetwork& validated)
{
    std::vector<Index> out;
    for (Index u = 0; u < corpus.n_users(); ++u) {
        const auto& arts = corpus.user_articles[u];
        if (std::any_of(arts.begin(), arts.end(), [&](Index a) { return validated.contains(a); }))
            out.push_back(u);
    }
    return out;
}

std::vector<Index> select_voters(Strategy strategy, const Corpus& corpus, const ValidatedNetwork& validated)
{
    if (strategy == Strategy::users_all) {
        std::vector<Index> all(corpus.n_users());
        for (Index u = 0; u < all.size(); ++u)
            all[u] = u;
        return all;
    }
    const auto ds = discussion_supporters(corpus, validated);
    if (strategy != Strategy::ds_all_wo_usr_nec)
        return ds;
    std::vector<Index> rest;
    std::size_t k = 0;
    for (Index u = 0; u < corpus.n_users(); ++u) {
        if (k < ds.size() && ds[k] == u) {
            ++k;
            continue;
        }
        rest.push_back(u);
    }
    return rest;
}

std::vector<Index> article_set(Index voter, Strategy strategy, const Corpus& corpus, const ValidatedNetwork& validated)
{
    const auto& arts = corpus.user_articles.at(voter);
    if (strategy != Strategy::ds_url_nec)
        return arts;
    std::vector<Index> out;
    std::copy_if(arts.begin(), arts.end(), std::back_inserter(out), [&](Index a) { return validated.contains(a); });
    return out;
}

std::optional<double> mean_trust(std::span<const Index> articles, const Corpus& corpus, const PublisherTrust& trust)
{
    long long sum = 0;
    long long n = 0;
    for (Index a : articles)
        if (const auto score = trust.score[corpus.article_publisher[a]]) {
            sum += *score;
            ++n;
        }
    if (n == 0)
        return std::nullopt;
    return static_cast<double>(sum) / static_cast<double>(n);
}

std::optional<double> characterize(Index voter, Strategy strategy, const Corpus& corpus,
                                   const ValidatedNetwork& validated, const PublisherTrust& trust)
{
    return mean_trust(article_set(voter, strategy, corpus, validated), corpus, trust);
}

std::size_t information_diet(Index user, const Corpus& corpus) { return corpus.user_publishers(user).size(); }

std::vector<VoterProfile> build_profiles(Strategy strategy, const Corpus& corpus, const ValidatedNetwork& validated,
                                         const PublisherTrust& trust)
{
    std::vector<VoterProfile> out;
    for (Index u : select_voters(strategy, corpus, validated)) {
        VoterProfile p;
        p.user = u;
        p.strategy = strategy;
        p.articles = article_set(u, strategy, corpus, validated);
        p.value = mean_trust(p.articles, corpus, trust);
        p.diet = information_diet(u, corpus);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<VoterProfile> filter_min_publishers(std::span<const VoterProfile> voters, std::size_t theta)
{
    std::vector<VoterProfile> out;
    std::copy_if(voters.begin(), voters.end(), std::back_inserter(out),
                 [theta](const VoterProfile& v) { return v.diet >= theta; });
    return out;
}

std::vector<VoterProfile> defined_voters(std::span<const VoterProfile> voters)
{
    std::vector<VoterProfile> out;
    std::copy_if(voters.begin(), voters.end(), std::back_inserter(out),
                 [](const VoterProfile& v) { return v.value.has_value(); });
    return out;
}

} // namespace trustnet
