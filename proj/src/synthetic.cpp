#include "trustnet/synthetic.hpp"

#include "trustnet/csv.hpp"
#include "trustnet/random.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace trustnet {

void SyntheticSpec::validate() const
{
    if (users_per_block == 0 || publishers_per_pool == 0 || urls_per_publisher == 0)
        throw Error("synthetic: sizes must be positive");
    if (!(p_out >= 0.0 && p_in > p_out && p_in <= 1.0))
        throw Error("synthetic: need 0 <= p_out < p_in <= 1");
    if (!(share_given_engaged > 0.0 && share_given_engaged <= 1.0))
        throw Error("synthetic: share_given_engaged must lie in (0, 1]");
    if (!(unc_fraction >= 0.0 && unc_fraction <= 1.0))
        throw Error("synthetic: unc_fraction must lie in [0, 1]");
    if (!(duplicate_rate >= 0.0 && duplicate_rate <= 1.0 && quote_rate >= 0.0 && quote_rate <= 1.0))
        throw Error("synthetic: rates must lie in [0, 1]");
    if (t_score_min < kTrustThreshold || t_score_max > 100 || t_score_min > t_score_max)
        throw Error("synthetic: bad trustworthy score range");
    if (n_score_min < 0 || n_score_max >= kTrustThreshold || n_score_min > n_score_max)
        throw Error("synthetic: bad untrustworthy score range");
}

std::string synthetic_domain(int pool, std::size_t index)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "pool%d-pub%03zu.example", pool, index);
    return buf;
}

namespace {

std::string article_url(const std::string& domain, std::size_t k, Rng& rng)
{
    // Surface variants that canonicalize to the same article.
    std::string host = rng.bernoulli(0.5) ? "www." + domain : domain;
    std::string url = "https://" + host + "/news/" + std::to_string(k);
    if (rng.bernoulli(0.3))
        url += "?utm_source=feed";
    return url;
}

} // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec)
{
    spec.validate();
    Rng rng(spec.seed);
    SyntheticData data;

    const std::size_t np = spec.publishers_per_pool;
    for (int pool = 0; pool < 2; ++pool)
        for (std::size_t j = 0; j < np; ++j) {
            data.publishers.push_back(synthetic_domain(pool, j));
            data.publisher_pool.push_back(pool);
        }
    for (int block = 0; block < 2; ++block)
        for (std::size_t i = 0; i < spec.users_per_block; ++i) {
            data.users.push_back("user" + std::to_string(block) + "_" + std::to_string(i));
            data.user_block.push_back(block);
        }

    // Knowledge base: a seeded subset of each pool loses its score.
    const auto n_unc = static_cast<std::size_t>(std::llround(spec.unc_fraction * static_cast<double>(np)));
    for (int pool = 0; pool < 2; ++pool) {
        std::vector<std::size_t> order(np);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(std::span<std::size_t>(order));
        std::vector<char> unc(np, 0);
        for (std::size_t k = 0; k < n_unc; ++k)
            unc[order[k]] = 1;
        for (std::size_t j = 0; j < np; ++j) {
            const int score = pool == 0 ? rng.between(spec.t_score_min, spec.t_score_max)
                                        : rng.between(spec.n_score_min, spec.n_score_max);
            data.knowledge_base.emplace_back(synthetic_domain(pool, j),
                                             unc[j] ? std::nullopt : std::optional<int>(score));
        }
    }

    std::int64_t clock = 1'600'000'000;
    std::size_t next_id = 0;
    auto emit = [&](const std::string& user, std::vector<std::string> urls, PostKind kind) {
        clock += 1 + static_cast<std::int64_t>(rng.below(600));
        data.posts.push_back({"p" + std::to_string(next_id++), user, clock, std::move(urls), kind});
    };
    auto share_kind = [&] {
        const double u = rng.uniform();
        return u < 0.7 ? PostKind::original : (u < 0.9 ? PostKind::retweet : PostKind::reply);
    };

    const std::size_t n_pub = data.publishers.size();
    for (std::size_t u = 0; u < data.users.size(); ++u) {
        const int block = data.user_block[u];
        std::vector<std::size_t> engaged;
        for (std::size_t p = 0; p < n_pub; ++p)
            if (rng.bernoulli(data.publisher_pool[p] == block ? spec.p_in : spec.p_out))
                engaged.push_back(p);
        if (engaged.empty())
            engaged.push_back(static_cast<std::size_t>(block) * np + rng.below(np));

        std::vector<std::string> shared;
        for (std::size_t p : engaged) {
            std::vector<std::size_t> picks;
            for (std::size_t k = 0; k < spec.urls_per_publisher; ++k)
                if (rng.bernoulli(spec.share_given_engaged))
                    picks.push_back(k);
            if (picks.empty())
                picks.push_back(rng.below(spec.urls_per_publisher));
            for (std::size_t k : picks) {
                shared.push_back(article_url(data.publishers[p], k, rng));
                emit(data.users[u], {shared.back()}, share_kind());
            }
        }
        for (const std::string& url : shared)
            if (rng.bernoulli(spec.duplicate_rate))
                emit(data.users[u], {url}, share_kind());
        if (rng.bernoulli(spec.quote_rate)) {
            // Quotes reach into the other pool; they must be ignored downstream.
            const std::size_t p = static_cast<std::size_t>(1 - block) * np + rng.below(np);
            emit(data.users[u], {article_url(data.publishers[p], rng.below(spec.urls_per_publisher), rng)},
                 PostKind::quote);
        }
    }
    std::size_t fresh = spec.urls_per_publisher;
    for (std::size_t c = 0; c < spec.casual_users; ++c) {
        data.users.push_back("casual_" + std::to_string(c));
        data.user_block.push_back(-1);
        const std::size_t n = 1 + rng.below(3);
        for (std::size_t k = 0; k < n; ++k)
            emit(data.users.back(), {article_url(data.publishers[rng.below(n_pub)], fresh++, rng)}, share_kind());
    }
    return data;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& posts_path,
                     const std::filesystem::path& kb_path)
{
    std::ofstream posts(posts_path);
    if (!posts)
        throw Error("cannot write " + posts_path.string());
    for (const RawPost& p : data.posts) {
        nlohmann::ordered_json rec;
        rec["post_id"] = p.post_id;
        rec["user_id"] = p.user_id;
        rec["timestamp"] = p.timestamp;
        rec["urls"] = p.urls;
        rec["kind"] = to_string(p.kind);
        posts << rec.dump() << '\n';
    }
    std::ofstream kb(kb_path);
    if (!kb)
        throw Error("cannot write " + kb_path.string());
    csv::write_row(kb, {"domain", "score"});
    for (const auto& [domain, score] : data.knowledge_base)
        csv::write_row(kb, {domain, score ? std::to_string(*score) : std::string()});
}

} // namespace trustnet
