#include "unit/support.hpp"

#include "trustnet/csv.hpp"
#include "trustnet/ingest.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace trustnet;

namespace {

PostLoad parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_posts(in);
}

KnowledgeBaseLoad parse_kb(const std::string& text)
{
    std::istringstream in(text);
    return parse_knowledge_base(in);
}

} // namespace

TEST_CASE("load_posts: three valid records")
{
    const auto load = parse(R"({"post_id":"1","user_id":"a","timestamp":1,"urls":["https://x.com/1"],"kind":"original"}
{"post_id":"2","user_id":"b","timestamp":2,"urls":["https://x.com/2"],"kind":"retweet"}
{"post_id":"3","user_id":"c","timestamp":3,"urls":[],"kind":"reply"}
)");
    CHECK(load.posts.size() == 3);
    CHECK(load.malformed == 0);
    CHECK(load.posts[1].kind == PostKind::retweet);
}

TEST_CASE("load_posts: truncated line is skipped with a warning")
{
    const auto load = parse(R"({"post_id":"1","user_id":"a","timestamp":1,"urls":["https://x.com/1"],"kind":"original"}
{"post_id":"2","user_id":"b","timestamp":2,"urls":["https://x.com/2"],"kind":"original"}
{"post_id":"3","user_id":"c","timest
)");
    CHECK(load.posts.size() == 2);
    CHECK(load.malformed == 1);
    REQUIRE(load.warnings.size() == 1);
    CHECK(load.warnings[0].starts_with("line 3"));
}

TEST_CASE("load_posts: empty input and bad records")
{
    CHECK(parse("").posts.empty());
    const auto load = parse(R"({"post_id":"1","user_id":"a","timestamp":1,"urls":["u"],"kind":"boost"}
{"post_id":"","user_id":"a","timestamp":1,"urls":["u"],"kind":"original"}
{"post_id":"2","user_id":"a","timestamp":"x","urls":["u"],"kind":"original"}
{"post_id":"3","user_id":"a","timestamp":1,"urls":"u","kind":"original"}
{"post_id":"4","user_id":"a","timestamp":1,"urls":["u"],"kind":"original"}
{"post_id":"4","user_id":"b","timestamp":1,"urls":["u"],"kind":"original"}
)");
    CHECK(load.posts.size() == 1);
    CHECK(load.malformed == 5);
}

TEST_CASE("load_posts: unreadable file is fatal")
{
    CHECK_THROWS_AS(load_posts("/nonexistent/posts.jsonl"), Error);
}

TEST_CASE("extract_domain")
{
    CHECK(extract_domain("https://www.example.com/a/b?x=1") == "example.com");
    CHECK(extract_domain("http://News.Site.org:8080/p") == "news.site.org");
    CHECK_FALSE(extract_domain("notaurl"));
    CHECK_FALSE(extract_domain("/relative/path"));
    CHECK_FALSE(extract_domain("https:///nohost"));
    CHECK(extract_domain("https://www.www.example.com/") == "www.example.com");
    CHECK(extract_domain("https://news.bbc.co.uk/x", DomainMode::registrable) == "bbc.co.uk");
    CHECK(extract_domain("https://a.b.example.com/x", DomainMode::registrable) == "example.com");
    CHECK(extract_domain("https://a.b.example.com/x", DomainMode::host) == "a.b.example.com");
}

TEST_CASE("canonical_url drops query, fragment and www")
{
    CHECK(canonical_url("https://WWW.Example.com/a?utm=1#top") == "https://example.com/a");
    CHECK(canonical_url("https://example.com") == "https://example.com/");
    CHECK(canonical_url("http://example.com:8080/x") == "http://example.com:8080/x");
    CHECK_FALSE(canonical_url("nope"));
}

TEST_CASE("build_corpus: duplicate shares collapse to one interaction")
{
    std::vector<RawPost> posts{{"1", "u", 1, {"https://x.com/a"}, PostKind::original},
                               {"2", "u", 2, {"https://www.x.com/a?ref=2"}, PostKind::retweet}};
    const Corpus c = build_corpus(posts);
    CHECK(c.interactions.size() == 1);
    CHECK(c.share_events.size() == 2);
    CHECK(c.article_shares[0] == 2);
}

TEST_CASE("build_corpus: quote posts never contribute")
{
    std::vector<RawPost> posts{{"1", "u", 1, {"https://x.com/a"}, PostKind::quote},
                               {"2", "v", 1, {"https://y.com/b"}, PostKind::original}};
    const Corpus c = build_corpus(posts);
    CHECK(c.interactions.size() == 1);
    CHECK_FALSE(c.find_user("u"));
    CHECK_FALSE(c.find_publisher("x.com"));

    std::set<PostKind> all{PostKind::original, PostKind::retweet, PostKind::quote, PostKind::reply};
    CHECK(build_corpus(posts, all).interactions.size() == 1);
}

TEST_CASE("build_corpus: two users times two URLs")
{
    const Corpus c = testing::corpus_of(
        {{"a", "https://p.com/1"}, {"a", "https://q.com/2"}, {"b", "https://p.com/1"}, {"b", "https://q.com/2"}});
    CHECK(c.interactions.size() == 4);
    CHECK(c.n_users() == 2);
    CHECK(c.n_articles() == 2);
    CHECK(c.n_publishers() == 2);
}

TEST_CASE("build_corpus: bad URLs are skipped and counted")
{
    std::vector<RawPost> posts{{"1", "u", 1, {"notaurl", "https://x.com/a"}, PostKind::original}};
    const Corpus c = build_corpus(posts);
    CHECK(c.skipped_urls == 1);
    CHECK(c.interactions.size() == 1);
}

TEST_CASE("build_corpus is invariant under record order")
{
    std::vector<RawPost> posts;
    for (int i = 0; i < 40; ++i)
        posts.push_back({std::to_string(i), "u" + std::to_string(i % 7), i,
                         {"https://s" + std::to_string(i % 5) + ".com/" + std::to_string(i % 11)},
                         PostKind::original});
    const Corpus c1 = build_corpus(posts);
    std::reverse(posts.begin(), posts.end());
    const Corpus c2 = build_corpus(posts);
    CHECK(c1.users == c2.users);
    CHECK(c1.articles == c2.articles);
    CHECK(c1.interactions == c2.interactions);

    // Each article has exactly one publisher.
    std::vector<std::size_t> per_pub(c1.n_publishers(), 0);
    for (Index p : c1.article_publisher)
        ++per_pub[p];
    std::size_t total = 0;
    for (std::size_t n : per_pub)
        total += n;
    CHECK(total == c1.n_articles());
}

TEST_CASE("knowledge base labels")
{
    const auto load = parse_kb("domain,score\nsiteA,90\nsiteB,59\nsiteC,\nsiteD,60\n");
    CHECK(load.kb.label("siteA") == TrustLabel::trustworthy);
    CHECK(load.kb.label("siteB") == TrustLabel::untrustworthy);
    CHECK(load.kb.label("siteC") == TrustLabel::unclassified);
    CHECK(load.kb.label("siteD") == TrustLabel::trustworthy);
    CHECK(load.kb.label("absent.com") == TrustLabel::unclassified);
    CHECK(load.kb.contains("siteC"));
}

TEST_CASE("knowledge base errors and duplicates")
{
    CHECK_THROWS_AS(parse_kb("domain,score\na,101\n"), ParseError);
    CHECK_THROWS_AS(parse_kb("domain,score\na,-1\n"), ParseError);
    CHECK_THROWS_AS(parse_kb("domain,score\na,1.5\n"), ParseError);
    CHECK_THROWS_AS(parse_kb("name,value\na,1\n"), Error);
    try {
        parse_kb("domain,score\na,10\nb,abc\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    const auto dup = parse_kb("domain,score\na,10\nWWW.A,80\n");
    CHECK(dup.kb.score("a") == 80);
    CHECK(dup.warnings.size() == 1);
}

TEST_CASE("align maps publisher indices to scores")
{
    const Corpus c = testing::corpus_of({{"u", "https://a.com/1"}, {"u", "https://b.com/1"}, {"v", "https://c.com/"}});
    const auto trust = testing::trust_of(c, {{"a.com", 80}, {"b.com", std::nullopt}});
    CHECK(trust.label(*c.find_publisher("a.com")) == TrustLabel::trustworthy);
    CHECK(trust.label(*c.find_publisher("b.com")) == TrustLabel::unclassified);
    CHECK(trust.label(*c.find_publisher("c.com")) == TrustLabel::unclassified);
}

TEST_CASE("csv round trip")
{
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::escape("q\"x") == "\"q\"\"x\"");
    CHECK(csv::split_line("\"a,b\",c,\"q\"\"x\"") == std::vector<std::string>{"a,b", "c", "q\"x"});
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 67.5, 2.5e-308})
        CHECK(std::stod(csv::format_double(v)) == v);
    CHECK(csv::format_fixed(70.8749, 2) == "70.87");
}
