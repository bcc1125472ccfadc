#include "trustnet/ingest.hpp"

#include "trustnet/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <unordered_map>
#include <unordered_set>

namespace trustnet {

namespace {

std::string lowercase(std::string_view text)
{
    std::string out(text);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    return text;
}

struct UrlParts {
    std::string scheme;
    std::string host; // lowercase, no "www."
    std::string port;
    std::string path;
};

std::optional<UrlParts> parse_url(std::string_view url)
{
    url = trim(url);
    const auto sep = url.find("://");
    if (sep == std::string_view::npos || sep == 0)
        return std::nullopt;
    const std::string_view scheme = url.substr(0, sep);
    if (!std::isalpha(static_cast<unsigned char>(scheme.front())))
        return std::nullopt;
    for (char c : scheme)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return std::nullopt;

    std::string_view rest = url.substr(sep + 3);
    const auto authority_end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, authority_end);
    std::string_view tail = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

    if (const auto at = authority.rfind('@'); at != std::string_view::npos)
        authority = authority.substr(at + 1);

    std::string_view host = authority;
    std::string_view port;
    if (!host.empty() && host.front() == '[') {
        const auto close = host.find(']');
        if (close == std::string_view::npos)
            return std::nullopt;
        port = host.substr(close + 1);
        host = host.substr(0, close + 1);
        if (!port.empty() && port.front() != ':')
            return std::nullopt;
    } else if (const auto colon = host.find(':'); colon != std::string_view::npos) {
        port = host.substr(colon);
        host = host.substr(0, colon);
    }
    if (!port.empty()) {
        port.remove_prefix(1);
        for (char c : port)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                return std::nullopt;
    }
    if (host.empty())
        return std::nullopt;
    for (char c : host)
        if (std::isspace(static_cast<unsigned char>(c)) || std::iscntrl(static_cast<unsigned char>(c)))
            return std::nullopt;

    UrlParts parts;
    parts.scheme = lowercase(scheme);
    parts.host = normalize_domain(host);
    if (parts.host.empty())
        return std::nullopt;
    parts.port = std::string(port);

    const auto path_end = tail.find_first_of("?#");
    parts.path = std::string(tail.substr(0, path_end));
    if (parts.path.empty())
        parts.path = "/";
    return parts;
}

// Second-level suffixes under which registrations happen one label deeper.
// A compact subset of the public suffix list covering common news markets.
constexpr std::array<std::string_view, 34> kMultiLabelSuffixes = {
    "co.uk", "org.uk", "ac.uk", "gov.uk", "me.uk", "ltd.uk", "plc.uk",
    "com.au", "net.au", "org.au", "gov.au", "edu.au",
    "co.nz", "org.nz", "govt.nz",
    "co.jp", "or.jp", "ne.jp",
    "com.br", "org.br", "gov.br",
    "co.in", "org.in", "gov.in",
    "co.za", "org.za",
    "com.cn", "org.cn", "gov.cn",
    "com.mx", "com.ar", "com.tr", "co.kr", "com.sg",
};

std::string registrable_domain(const std::string& host)
{
    if (host.front() == '[')
        return host;
    const bool numeric = std::all_of(host.begin(), host.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
    });
    if (numeric)
        return host;

    std::vector<std::size_t> dots;
    for (std::size_t i = 0; i < host.size(); ++i)
        if (host[i] == '.')
            dots.push_back(i);
    if (dots.size() < 2)
        return host;
    const std::string_view last_two = std::string_view(host).substr(dots[dots.size() - 2] + 1);
    const bool multi = std::find(kMultiLabelSuffixes.begin(), kMultiLabelSuffixes.end(), last_two)
                       != kMultiLabelSuffixes.end();
    if (!multi)
        return host.substr(dots[dots.size() - 2] + 1);
    if (dots.size() < 3)
        return host;
    return host.substr(dots[dots.size() - 3] + 1);
}

template <typename Key>
std::optional<Index> find_sorted(const std::vector<std::string>& ids, const Key& key)
{
    const auto it = std::lower_bound(ids.begin(), ids.end(), key);
    if (it == ids.end() || *it != key)
        return std::nullopt;
    return static_cast<Index>(it - ids.begin());
}

} // namespace

std::string_view to_string(PostKind kind) noexcept
{
    switch (kind) {
    case PostKind::original: return "original";
    case PostKind::retweet: return "retweet";
    case PostKind::quote: return "quote";
    case PostKind::reply: return "reply";
    }
    return "original";
}

std::optional<PostKind> parse_post_kind(std::string_view text) noexcept
{
    if (text == "original")
        return PostKind::original;
    if (text == "retweet")
        return PostKind::retweet;
    if (text == "quote")
        return PostKind::quote;
    if (text == "reply")
        return PostKind::reply;
    return std::nullopt;
}

std::optional<DomainMode> parse_domain_mode(std::string_view text) noexcept
{
    if (text == "host")
        return DomainMode::host;
    if (text == "registrable")
        return DomainMode::registrable;
    return std::nullopt;
}

std::string_view to_string(DomainMode mode) noexcept
{
    return mode == DomainMode::registrable ? "registrable" : "host";
}

std::string normalize_domain(std::string_view domain)
{
    std::string out = lowercase(trim(domain));
    if (out.starts_with("www."))
        out.erase(0, 4);
    return out;
}

std::optional<std::string> extract_domain(std::string_view url, DomainMode mode)
{
    auto parts = parse_url(url);
    if (!parts)
        return std::nullopt;
    if (mode == DomainMode::registrable)
        return registrable_domain(parts->host);
    return std::move(parts->host);
}

std::optional<std::string> canonical_url(std::string_view url)
{
    const auto parts = parse_url(url);
    if (!parts)
        return std::nullopt;
    std::string out = parts->scheme + "://" + parts->host;
    if (!parts->port.empty())
        out += ":" + parts->port;
    out += parts->path;
    return out;
}

PostLoad parse_posts(std::istream& in)
{
    using nlohmann::json;
    PostLoad result;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;

    auto reject = [&](const std::string& why) {
        ++result.malformed;
        result.warnings.push_back("line " + std::to_string(line_no) + ": " + why);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            reject("not a JSON object");
            continue;
        }
        const auto post_id = record.find("post_id");
        const auto user_id = record.find("user_id");
        const auto timestamp = record.find("timestamp");
        const auto urls = record.find("urls");
        const auto kind = record.find("kind");
        if (post_id == record.end() || !post_id->is_string() || post_id->get_ref<const std::string&>().empty()) {
            reject("missing or empty post_id");
            continue;
        }
        if (user_id == record.end() || !user_id->is_string() || user_id->get_ref<const std::string&>().empty()) {
            reject("missing or empty user_id");
            continue;
        }
        if (timestamp == record.end() || !timestamp->is_number()) {
            reject("missing numeric timestamp");
            continue;
        }
        if (urls == record.end() || !urls->is_array()
            || !std::all_of(urls->begin(), urls->end(), [](const json& u) { return u.is_string(); })) {
            reject("urls must be an array of strings");
            continue;
        }
        if (kind == record.end() || !kind->is_string()) {
            reject("missing kind");
            continue;
        }
        const auto parsed_kind = parse_post_kind(kind->get_ref<const std::string&>());
        if (!parsed_kind) {
            reject("unknown kind '" + kind->get<std::string>() + "'");
            continue;
        }
        RawPost post;
        post.post_id = post_id->get<std::string>();
        if (!seen.insert(post.post_id).second) {
            reject("duplicate post_id '" + post.post_id + "'");
            continue;
        }
        post.user_id = user_id->get<std::string>();
        post.timestamp = timestamp->is_number_integer() ? timestamp->get<std::int64_t>()
                                                        : static_cast<std::int64_t>(timestamp->get<double>());
        post.urls = urls->get<std::vector<std::string>>();
        post.kind = *parsed_kind;
        result.posts.push_back(std::move(post));
    }
    return result;
}

PostLoad load_posts(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read posts file " + path.string());
    return parse_posts(in);
}

std::set<PostKind> default_post_kinds()
{
    return {PostKind::original, PostKind::retweet, PostKind::reply};
}

Corpus build_corpus(const std::vector<RawPost>& posts, const std::set<PostKind>& include_kinds, DomainMode mode)
{
    struct Share {
        const RawPost* post;
        std::string url;
        std::string domain;
    };
    std::vector<Share> shares;
    Corpus corpus;
    std::unordered_map<std::string, std::string> url_domain;

    for (const RawPost& post : posts) {
        if (post.kind == PostKind::quote || !include_kinds.contains(post.kind))
            continue;
        for (const std::string& raw : post.urls) {
            auto url = canonical_url(raw);
            auto domain = extract_domain(raw, mode);
            if (!url || !domain) {
                ++corpus.skipped_urls;
                continue;
            }
            url_domain.emplace(*url, *domain);
            shares.push_back({&post, std::move(*url), std::move(*domain)});
        }
    }

    auto sorted_unique = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    {
        std::vector<std::string> users, articles, publishers;
        for (const Share& s : shares) {
            users.push_back(s.post->user_id);
            articles.push_back(s.url);
            publishers.push_back(s.domain);
        }
        corpus.users = sorted_unique(std::move(users));
        corpus.articles = sorted_unique(std::move(articles));
        corpus.publishers = sorted_unique(std::move(publishers));
    }

    std::unordered_map<std::string_view, Index> user_ix, article_ix, publisher_ix;
    for (Index i = 0; i < corpus.users.size(); ++i)
        user_ix.emplace(corpus.users[i], i);
    for (Index i = 0; i < corpus.articles.size(); ++i)
        article_ix.emplace(corpus.articles[i], i);
    for (Index i = 0; i < corpus.publishers.size(); ++i)
        publisher_ix.emplace(corpus.publishers[i], i);

    corpus.article_publisher.resize(corpus.articles.size());
    for (Index a = 0; a < corpus.articles.size(); ++a)
        corpus.article_publisher[a] = publisher_ix.at(url_domain.at(corpus.articles[a]));

    corpus.article_shares.assign(corpus.articles.size(), 0);
    corpus.share_events.reserve(shares.size());
    corpus.interactions.reserve(shares.size());
    for (const Share& s : shares) {
        const Index u = user_ix.at(s.post->user_id);
        const Index a = article_ix.at(s.url);
        corpus.share_events.push_back({u, a, s.post->post_id});
        corpus.interactions.push_back({u, a});
        ++corpus.article_shares[a];
    }
    std::sort(corpus.interactions.begin(), corpus.interactions.end());
    corpus.interactions.erase(std::unique(corpus.interactions.begin(), corpus.interactions.end()),
                              corpus.interactions.end());

    corpus.user_articles.assign(corpus.users.size(), {});
    corpus.article_users.assign(corpus.articles.size(), {});
    for (const Interaction& it : corpus.interactions) {
        corpus.user_articles[it.user].push_back(it.article);
        corpus.article_users[it.article].push_back(it.user);
    }
    return corpus;
}

std::optional<Index> Corpus::find_user(std::string_view id) const { return find_sorted(users, id); }
std::optional<Index> Corpus::find_article(std::string_view url) const { return find_sorted(articles, url); }
std::optional<Index> Corpus::find_publisher(std::string_view domain) const { return find_sorted(publishers, domain); }

std::vector<Index> Corpus::user_publishers(Index user) const
{
    std::vector<Index> out;
    out.reserve(user_articles[user].size());
    for (Index a : user_articles[user])
        out.push_back(article_publisher[a]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool KnowledgeBase::set(std::string domain, std::optional<int> score)
{
    auto [it, inserted] = entries_.insert_or_assign(std::move(domain), score);
    return !inserted;
}

std::optional<int> KnowledgeBase::score(std::string_view domain) const
{
    const auto it = entries_.find(normalize_domain(domain));
    return it == entries_.end() ? std::nullopt : it->second;
}

TrustLabel KnowledgeBase::label(std::string_view domain) const { return label_for_score(score(domain)); }

bool KnowledgeBase::contains(std::string_view domain) const
{
    return entries_.find(normalize_domain(domain)) != entries_.end();
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line)
{
}

KnowledgeBaseLoad parse_knowledge_base(std::istream& in)
{
    KnowledgeBaseLoad result;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF"))
            line.erase(0, 3);
        if (trim(line).empty())
            continue;
        auto fields = csv::split_line(line);
        if (!header_seen) {
            if (fields.size() != 2 || lowercase(trim(fields[0])) != "domain" || lowercase(trim(fields[1])) != "score")
                throw ParseError(line_no, "knowledge base header must be 'domain,score'");
            header_seen = true;
            continue;
        }
        if (fields.size() != 2)
            throw ParseError(line_no, "expected 2 columns, found " + std::to_string(fields.size()));
        std::string domain = normalize_domain(fields[0]);
        if (domain.empty())
            throw ParseError(line_no, "empty domain");
        const std::string_view text = trim(fields[1]);
        std::optional<int> score;
        if (!text.empty()) {
            int value = 0;
            const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc() || end != text.data() + text.size())
                throw ParseError(line_no, "score '" + std::string(text) + "' is not an integer");
            if (value < 0 || value > 100)
                throw ParseError(line_no, "score " + std::to_string(value) + " outside 0..100");
            score = value;
        }
        if (result.kb.set(domain, score))
            result.warnings.push_back("line " + std::to_string(line_no) + ": duplicate domain '" + domain
                                      + "', keeping the last entry");
    }
    if (!header_seen)
        throw ParseError(line_no, "knowledge base is missing its header row");
    return result;
}

KnowledgeBaseLoad load_knowledge_base(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot read knowledge base " + path.string());
    return parse_knowledge_base(in);
}

PublisherTrust align(const KnowledgeBase& kb, const Corpus& corpus)
{
    PublisherTrust trust;
    trust.score.reserve(corpus.n_publishers());
    for (const std::string& domain : corpus.publishers)
        trust.score.push_back(kb.score(domain));
    return trust;
}

} // namespace trustnet
