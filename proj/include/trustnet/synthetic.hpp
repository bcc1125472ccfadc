#pragma once

// Planted two-block corpora for end-to-end testing.
//
// Block b users engage each publisher of pool b with probability p_in and each
// publisher of the other pool with p_out; an engaged user shares every URL of
// that publisher independently with probability share_given_engaged (at least
// one). Pool 0 is trustworthy, pool 1 untrustworthy.

#include "trustnet/ingest.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace trustnet {

struct SyntheticSpec {
    std::size_t users_per_block = 200;
    std::size_t publishers_per_pool = 15;
    std::size_t urls_per_publisher = 10;
    double p_in = 0.05;
    double p_out = 0.005;
    double share_given_engaged = 0.6;
    double unc_fraction = 0.2;
    int t_score_min = 70, t_score_max = 95;
    int n_score_min = 10, n_score_max = 50;
    // Extra posts that must not change the corpus: reposts of an already shared
    // URL and quote posts.
    double duplicate_rate = 0.05;
    double quote_rate = 0.05;
    // Users outside both blocks sharing 1 to 3 one-off articles of random
    // publishers; these articles are never co-shared.
    std::size_t casual_users = 0;
    std::uint64_t seed = 1;

    void validate() const; // throws Error
};

struct SyntheticData {
    std::vector<RawPost> posts;
    std::vector<std::pair<std::string, std::optional<int>>> knowledge_base; // domain, score
    // Ground truth.
    std::vector<std::string> publishers;   // pool 0 first
    std::vector<int> publisher_pool;
    std::vector<std::string> users;
    std::vector<int> user_block; // -1 for casual users
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

std::string synthetic_domain(int pool, std::size_t index);

void write_synthetic(const SyntheticData& data, const std::filesystem::path& posts_path,
                     const std::filesystem::path& kb_path);

} // namespace trustnet
