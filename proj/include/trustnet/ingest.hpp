#pragma once

// Post corpora, URL normalization and the publisher trust knowledge base.

#include "trustnet/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace trustnet {

enum class PostKind : std::uint8_t { original, retweet, quote, reply };

std::string_view to_string(PostKind kind) noexcept;
std::optional<PostKind> parse_post_kind(std::string_view text) noexcept;

struct RawPost {
    std::string post_id;
    std::string user_id;
    std::int64_t timestamp = 0;
    std::vector<std::string> urls;
    PostKind kind = PostKind::original;
};

struct PostLoad {
    std::vector<RawPost> posts;
    std::size_t malformed = 0;
    // One message per skipped record, prefixed with its line number.
    std::vector<std::string> warnings;
};

// Reads a JSON Lines file. Throws trustnet::Error if the file cannot be read;
// malformed or duplicate records are skipped and counted.
PostLoad load_posts(const std::filesystem::path& path);
PostLoad parse_posts(std::istream& in);

enum class DomainMode : std::uint8_t {
    host,        // lowercase host without a leading "www."
    registrable, // host reduced to the registrable domain (built-in suffix table)
};

std::optional<DomainMode> parse_domain_mode(std::string_view text) noexcept;
std::string_view to_string(DomainMode mode) noexcept;

// Publisher domain of an absolute URL, or nullopt when the URL has no scheme or
// host. Port, path, query and fragment are dropped.
std::optional<std::string> extract_domain(std::string_view url, DomainMode mode = DomainMode::host);

// Article identity: lowercase scheme and host, leading "www." stripped, port
// kept, path kept, query and fragment dropped.
std::optional<std::string> canonical_url(std::string_view url);

struct Interaction {
    Index user = 0;
    Index article = 0;
    friend auto operator<=>(const Interaction&, const Interaction&) = default;
};

struct ShareEvent {
    Index user = 0;
    Index article = 0;
    std::string post_id;
};

// Deduplicated user-article-publisher records. All id vectors are sorted, so the
// integer indices are a deterministic function of the input set.
struct Corpus {
    std::vector<std::string> users;
    std::vector<std::string> articles;
    std::vector<std::string> publishers;
    std::vector<Index> article_publisher;

    std::vector<Interaction> interactions; // sorted, unique on (user, article)
    std::vector<ShareEvent> share_events;  // every accepted share, file order

    std::vector<std::vector<Index>> user_articles; // sorted article indices per user
    std::vector<std::vector<Index>> article_users; // sorted user indices per article
    std::vector<std::size_t> article_shares;       // share events per article

    std::size_t skipped_urls = 0;

    std::size_t n_users() const noexcept { return users.size(); }
    std::size_t n_articles() const noexcept { return articles.size(); }
    std::size_t n_publishers() const noexcept { return publishers.size(); }

    std::optional<Index> find_user(std::string_view id) const;
    std::optional<Index> find_article(std::string_view url) const;
    std::optional<Index> find_publisher(std::string_view domain) const;

    // Distinct publishers a user shared.
    std::vector<Index> user_publishers(Index user) const;
};

std::set<PostKind> default_post_kinds();

// Quote posts never contribute, whatever include_kinds says.
Corpus build_corpus(const std::vector<RawPost>& posts,
                    const std::set<PostKind>& include_kinds = default_post_kinds(),
                    DomainMode mode = DomainMode::host);

class KnowledgeBase {
public:
    // Last write wins; returns true if the domain was already present.
    bool set(std::string domain, std::optional<int> score);

    std::optional<int> score(std::string_view domain) const;
    TrustLabel label(std::string_view domain) const;
    bool contains(std::string_view domain) const;
    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<std::string, std::optional<int>, std::less<>>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, std::optional<int>, std::less<>> entries_;
};

struct KnowledgeBaseLoad {
    KnowledgeBase kb;
    std::vector<std::string> warnings;
};

// CSV with a `domain,score` header. Empty score means unclassified. Throws
// ParseError on out-of-range or non-integer scores.
KnowledgeBaseLoad load_knowledge_base(const std::filesystem::path& path);
KnowledgeBaseLoad parse_knowledge_base(std::istream& in);

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Scores aligned to corpus publisher indices.
struct PublisherTrust {
    std::vector<std::optional<int>> score;

    TrustLabel label(Index publisher) const { return label_for_score(score[publisher]); }
};

PublisherTrust align(const KnowledgeBase& kb, const Corpus& corpus);

// Lowercase and strip a single leading "www.".
std::string normalize_domain(std::string_view domain);

} // namespace trustnet
