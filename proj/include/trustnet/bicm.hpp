#pragma once

// Bipartite Configuration Model: the maximum-entropy ensemble of user-URL graphs
// that reproduces both degree sequences on average. Links are independent with
// p(i, a) = x_i y_a / (1 + x_i y_a).

#include "trustnet/ingest.hpp"
#include "trustnet/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace trustnet {

struct BipartiteGraph {
    std::vector<std::string> user_ids;
    std::vector<std::string> url_ids;
    std::vector<std::vector<Index>> user_links; // sorted URL columns per user row
    std::vector<std::vector<Index>> url_links;  // sorted user rows per URL column

    std::size_t n_users() const noexcept { return user_links.size(); }
    std::size_t n_urls() const noexcept { return url_links.size(); }
    std::size_t user_degree(Index user) const { return user_links[user].size(); }
    std::size_t url_degree(Index url) const { return url_links[url].size(); }
    std::size_t links() const noexcept;
    bool has_link(Index user, Index url) const;

    // Duplicate edges collapse to one link. Zero-degree nodes are kept; ids are
    // generated as "u<row>" and "r<column>".
    static BipartiteGraph from_edges(std::size_t n_users, std::size_t n_urls,
                                     std::span<const std::pair<Index, Index>> edges);

    // Copy without zero-degree nodes.
    BipartiteGraph pruned() const;
};

// Rows are corpus users and columns corpus articles, index for index.
BipartiteGraph build_graph(const Corpus& corpus);

enum class Pin : std::uint8_t { none, full, empty };

// Nodes whose degree saturates (or vanishes on) the opposite layer have no
// finite fitness. They are peeled in stages; a pinned node fixes every link to
// nodes still unpeeled when it was removed.
struct NodePin {
    Pin pin = Pin::none;
    int stage = 0;

    friend bool operator==(const NodePin&, const NodePin&) = default;
};

struct SolveOptions {
    double tol = 1e-8;
    int max_iter = 10'000;
    // Fixed-point sweeps before switching to Newton; also the stall window.
    int fixed_point_iter = 500;
    int stall_window = 25;
};

class BicmModel {
public:
    std::vector<std::string> user_ids;
    std::vector<std::string> url_ids;
    std::vector<std::size_t> user_degree;
    std::vector<std::size_t> url_degree;
    std::vector<double> x; // user fitness; +inf for full pins, 0 for empty pins
    std::vector<double> y; // URL fitness
    std::vector<NodePin> user_pin;
    std::vector<NodePin> url_pin;

    double tol = 0.0;
    double residual = 0.0; // max relative degree error over all nodes
    int iterations = 0;
    int fixed_point_iterations = 0;
    int newton_iterations = 0;

    std::size_t n_users() const noexcept { return x.size(); }
    std::size_t n_urls() const noexcept { return y.size(); }

    // Throws std::out_of_range for invalid indices.
    double link_probability(Index user, Index url) const;

    // Unchecked variant for inner loops.
    double probability(Index user, Index url) const noexcept;

    // Every (user, url) pair pinned to probability 1.
    std::vector<std::pair<Index, Index>> forced_links() const;

    // Brute-force sums over the opposite layer.
    double expected_user_degree(Index user) const;
    double expected_url_degree(Index url) const;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, double best_residual)
        : Error(what), best_residual_(best_residual)
    {
    }
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

// Deterministic: fixed initialization x_i = k_i / sqrt(L), nodes with equal
// degree share one unknown. Throws SolverError if tol is not reached.
BicmModel solve(const BipartiteGraph& graph, const SolveOptions& options = {});

// Independent draw of every link; node sets and ids are those of the model.
BipartiteGraph sample(const BicmModel& model, std::uint64_t seed);

// CSV `node_id,layer,degree,fitness` plus a JSON sidecar with solver metadata
// and pinned nodes.
void write_model(const BicmModel& model, const std::filesystem::path& csv_path,
                 const std::filesystem::path& meta_path, const std::string& config_hash);
BicmModel read_model(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path);

} // namespace trustnet
