#pragma once

// Voter selection and characterization. A voter's value is the mean trust score
// of the distinct scored articles in its strategy-specific article set.

#include "trustnet/ingest.hpp"
#include "trustnet/projection.hpp"
#include "trustnet/types.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace trustnet {

enum class Strategy : std::uint8_t {
    ds_url_nec,        // V = DS, articles restricted to the validated network
    ds_all,            // V = DS, all articles
    ds_all_wo_usr_nec, // V = U - DS, all articles
    users_all,         // V = U, all articles
};

inline constexpr Strategy kAllStrategies[] = {Strategy::ds_url_nec, Strategy::ds_all, Strategy::ds_all_wo_usr_nec,
                                              Strategy::users_all};

std::string_view to_string(Strategy strategy) noexcept;
std::optional<Strategy> parse_strategy(std::string_view text) noexcept;

// Users with at least one interaction on a validated URL, sorted.
std::vector<Index> discussion_supporters(const Corpus& corpus, const ValidatedNetwork& validated);

std::vector<Index> select_voters(Strategy strategy, const Corpus& corpus, const ValidatedNetwork& validated);

std::vector<Index> article_set(Index voter, Strategy strategy, const Corpus& corpus,
                               const ValidatedNetwork& validated);

// Mean publisher score over the scored articles of a set; nullopt if none.
std::optional<double> mean_trust(std::span<const Index> articles, const Corpus& corpus,
                                 const PublisherTrust& trust);

std::optional<double> characterize(Index voter, Strategy strategy, const Corpus& corpus,
                                   const ValidatedNetwork& validated, const PublisherTrust& trust);

// Distinct publishers the user shared anywhere in the corpus.
std::size_t information_diet(Index user, const Corpus& corpus);

struct VoterProfile {
    Index user = 0;
    Strategy strategy = Strategy::users_all;
    std::vector<Index> articles;
    std::optional<double> value;
    std::size_t diet = 0;
};

// Every voter the strategy selects, including those without a defined value.
std::vector<VoterProfile> build_profiles(Strategy strategy, const Corpus& corpus, const ValidatedNetwork& validated,
                                         const PublisherTrust& trust);

std::vector<VoterProfile> filter_min_publishers(std::span<const VoterProfile> voters, std::size_t theta);

// Profiles with a defined value; the only ones allowed to vote.
std::vector<VoterProfile> defined_voters(std::span<const VoterProfile> voters);

} // namespace trustnet
