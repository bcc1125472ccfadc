#pragma once

// News Engagement Communities: Louvain on the validated URL network, purity
// metrics and per-community summaries.

#include "trustnet/ingest.hpp"
#include "trustnet/projection.hpp"
#include "trustnet/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trustnet {

// Undirected weighted graph. A self loop of weight w appears once in the
// adjacency with weight 2w, so strength(i) = sum of row i.
struct WeightedGraph {
    struct Arc {
        Index to;
        double weight;
    };
    std::vector<std::vector<Arc>> adjacency;

    std::size_t size() const noexcept { return adjacency.size(); }
    double strength(Index node) const;
    double total_weight() const; // m

    // Each undirected edge listed once; duplicates accumulate weight.
    static WeightedGraph from_edges(std::size_t n, std::span<const std::pair<Index, Index>> edges);
};

// Newman modularity sum_c (m_c / m - resolution * (d_c / 2m)^2).
double modularity(const WeightedGraph& graph, std::span<const Index> community, double resolution = 1.0);

struct LouvainResult {
    std::vector<Index> community; // contiguous ids, numbered by smallest member
    double modularity = 0.0;
    // Modularity of the singleton partition followed by the value after every
    // pass; non-decreasing.
    std::vector<double> pass_modularity;
};

// Two-phase Louvain. Nodes are visited in a seeded shuffle of their ids; a node
// moves only on a strictly positive gain, to the best community, ties going to
// the smallest community id.
LouvainResult louvain(const WeightedGraph& graph, std::uint64_t seed, double resolution = 1.0);

inline constexpr int kUnclustered = -1;

struct Partition {
    std::vector<std::string> url_ids;
    std::vector<int> community; // per URL; kUnclustered outside the validated network
    std::size_t n_communities = 0;
    double modularity = 0.0;
    std::vector<double> pass_modularity;

    std::vector<Index> members(int id) const;
};

struct CommunityOptions {
    std::uint64_t seed = 42;
    double resolution = 1.0;
    // Weight validated edges by -log10(p) instead of 1.
    bool weight_by_significance = false;
};

Partition louvain(const ValidatedNetwork& network, const CommunityOptions& options = {});

// Trust label of every URL, by its publisher.
std::vector<TrustLabel> url_labels(const Corpus& corpus, const PublisherTrust& trust);

// |U_i^level| / |U_i|; unclassified URLs only count in the denominator.
// Throws std::out_of_range for an unknown community.
double purity(const Partition& partition, int community, std::span<const TrustLabel> labels, TrustLabel level);

// Pooled over all communities; nullopt when there are none.
std::optional<double> overall_purity(const Partition& partition, std::span<const TrustLabel> labels,
                                     TrustLabel level);

// Within the unclustered bucket; nullopt when it is empty.
std::optional<double> unclustered_purity(const Partition& partition, std::span<const TrustLabel> labels,
                                         TrustLabel level);

struct NecSummaryRow {
    int id = 0;
    std::size_t n_users = 0;
    std::size_t n_distinct_urls = 0;
    std::size_t n_publishers = 0;
    std::size_t n_shares = 0;

    friend bool operator==(const NecSummaryRow&, const NecSummaryRow&) = default;
};

// One row per community, sorted by n_users descending then id.
std::vector<NecSummaryRow> nec_summary(const Partition& partition, const Corpus& corpus);

void write_partition(const Partition& partition, const std::filesystem::path& csv_path,
                     const std::filesystem::path& meta_path, const std::string& config_hash);
Partition read_partition(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path);

} // namespace trustnet
