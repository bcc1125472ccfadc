#pragma once

// Publisher scoring from voter values, coverage, the depth-one classifier and
// its stratified cross-validation.

#include "trustnet/ingest.hpp"
#include "trustnet/types.hpp"
#include "trustnet/voters.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace trustnet {

struct PublisherScore {
    Index publisher = 0;
    std::string domain;
    double score = 0.0;
    std::size_t n_voters = 0;
    TrustLabel kb_label = TrustLabel::unclassified;
};

struct ScoreOptions {
    // Drop the voter's own articles of p when computing the value it casts on p.
    bool exclude_self_votes = false;
};

// A voter votes on every publisher it shared anywhere in the corpus, once.
// Voters without a value are ignored. Sorted by publisher index.
std::vector<PublisherScore> publisher_scores(std::span<const VoterProfile> voters, const Corpus& corpus,
                                             const PublisherTrust& trust, const ScoreOptions& options = {});

struct CoverageReport {
    std::array<std::size_t, 3> covered{}; // indexed by TrustLabel
    std::array<std::size_t, 3> universe{};

    std::size_t total() const noexcept { return covered[0] + covered[1] + covered[2]; }
    // 100 * covered / universe; 0 for an empty level.
    double percent(TrustLabel level) const noexcept;
};

CoverageReport coverage(std::span<const Index> voters, const Corpus& corpus, const PublisherTrust& trust);

struct Sample {
    double score = 0.0;
    TrustLabel label = TrustLabel::trustworthy; // T or N only
};

// Scores at or below the threshold take `below`, the rest `above`.
struct Stump {
    double threshold = 0.0;
    TrustLabel below = TrustLabel::untrustworthy;
    TrustLabel above = TrustLabel::trustworthy;

    TrustLabel predict(double score) const noexcept { return score <= threshold ? below : above; }
};

// Minimum weighted Gini over midpoints of consecutive distinct scores, ties to
// the smallest threshold; majority ties resolve to N. Throws Error unless both
// classes are present.
Stump fit_stump(std::span<const Sample> samples);

struct Confusion {
    std::size_t tp = 0, fn = 0, tn = 0, fp = 0; // T is the positive class

    void add(TrustLabel truth, TrustLabel predicted);
    // (TPR + TNR) / 2; a rate with an empty denominator counts as 0.
    double balanced_accuracy() const noexcept;
};

Confusion evaluate(const Stump& stump, std::span<const Sample> samples);

struct CvReport {
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    std::vector<Confusion> confusion;
    std::vector<double> fold_accuracy;
    double mean = 0.0;
    double stddev = 0.0; // population
    double baseline = 0.5;
};

// Each class shuffled with the seed and dealt round-robin into folds. Folds are
// capped at the minority count; throws Error when it is below 2.
CvReport stratified_cv(std::span<const Sample> samples, std::size_t folds = 10, std::uint64_t seed = 7);

// Labeled publishers as classifier samples, in input order.
std::vector<Sample> labeled_samples(std::span<const PublisherScore> scores);

struct WorthyEntry {
    Index publisher = 0;
    std::string domain;
    double score = 0.0;
    std::size_t n_voters = 0;
    TrustLabel predicted = TrustLabel::unclassified;
};

// Covered UNC publishers by n_voters descending, score ascending, domain.
std::vector<WorthyEntry> worthy_list(std::span<const PublisherScore> scores, const Stump& stump);

} // namespace trustnet
