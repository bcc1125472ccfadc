#pragma once

// Statistically validated projection of the user-URL graph onto URLs: pairwise
// co-occurrence counts are tested against the BiCM null and filtered by
// Benjamini-Hochberg.

#include "trustnet/bicm.hpp"
#include "trustnet/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace trustnet {

struct Cooccurrence {
    Index a = 0; // a < b
    Index b = 0;
    std::uint32_t count = 0;

    friend bool operator==(const Cooccurrence&, const Cooccurrence&) = default;
};

struct PairTest {
    Index a = 0;
    Index b = 0;
    std::uint32_t observed = 0;
    double pvalue = 1.0;

    friend bool operator==(const PairTest&, const PairTest&) = default;
};

enum class TailMethod : std::uint8_t { exact, poisson };

std::optional<TailMethod> parse_tail_method(std::string_view text) noexcept;
std::string_view to_string(TailMethod method) noexcept;

// P(sum of independent Bernoulli(probs) >= k) by truncated convolution; the
// tail mass is accumulated directly, never as 1 - cdf. Requires k <= size + 1
// and every probability in [0, 1].
double poisson_binomial_tail(std::span<const double> probs, std::size_t k);

// P(Poisson(rate) >= k).
double poisson_tail(double rate, std::size_t k);

// Per-user success probability p(i, a) p(i, b); observed = 0 gives 1.
PairTest pair_pvalue(const BicmModel& model, Index a, Index b, std::uint32_t observed,
                     TailMethod method = TailMethod::exact);

// Pairs with at least one common user, sorted by (a, b). OpenMP over URLs.
std::vector<Cooccurrence> cooccurrences(const BipartiteGraph& graph);

// One test per co-occurring pair, same order as the input. OpenMP over pairs.
std::vector<PairTest> pair_tests(const BicmModel& model, std::span<const Cooccurrence> pairs,
                                 TailMethod method = TailMethod::exact);

// Single-threaded references for the kernels above.
namespace serial {
std::vector<Cooccurrence> cooccurrences(const BipartiteGraph& graph);
std::vector<PairTest> pair_tests(const BicmModel& model, std::span<const Cooccurrence> pairs,
                                 TailMethod method = TailMethod::exact);
} // namespace serial

struct ValidatedEdge {
    Index a = 0;
    Index b = 0;
    double pvalue = 1.0;

    friend bool operator==(const ValidatedEdge&, const ValidatedEdge&) = default;
};

struct ValidatedNetwork {
    std::vector<std::string> url_ids; // every column of the source graph
    std::vector<Index> nodes;         // columns incident to a validated edge, sorted
    std::vector<ValidatedEdge> edges; // sorted by (a, b)
    double alpha = 0.05;
    std::uint64_t hypotheses = 0;     // M
    double bh_threshold = 0.0;        // realized p-value cutoff, 0 when nothing passes
    std::size_t n_tests = 0;

    std::size_t n_urls() const noexcept { return url_ids.size(); }
    bool contains(Index url) const;
};

// Benjamini-Hochberg step-up at level alpha over `hypotheses` tests, of which
// the ones not listed have p = 1. Boundary ties are kept.
ValidatedNetwork bh_validate(std::span<const PairTest> tests, double alpha, std::uint64_t hypotheses,
                             std::size_t n_urls);

struct ProjectionOptions {
    double alpha = 0.05;
    TailMethod method = TailMethod::exact;
};

// Counts, tests and validates every URL pair of the graph with M = C(n_urls, 2).
ValidatedNetwork validate_projection(const BipartiteGraph& graph, const BicmModel& model,
                                     const ProjectionOptions& options = {});

void write_validated(const ValidatedNetwork& network, const std::filesystem::path& csv_path,
                     const std::filesystem::path& meta_path, const std::string& config_hash,
                     TailMethod method);
ValidatedNetwork read_validated(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path,
                                const std::vector<std::string>& url_ids);

} // namespace trustnet
