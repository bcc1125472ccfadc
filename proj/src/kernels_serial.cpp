#include "pair_kernel.hpp"

#include <map>
#include <utility>

namespace trustnet {

namespace serial {

// Enumerates URL pairs per user; independent of the column-wise kernel.
std::vector<Cooccurrence> cooccurrences(const BipartiteGraph& graph)
{
    std::map<std::pair<Index, Index>, std::uint32_t> counts;
    for (const auto& row : graph.user_links)
        for (std::size_t i = 0; i < row.size(); ++i)
            for (std::size_t j = i + 1; j < row.size(); ++j)
                ++counts[{row[i], row[j]}];
    std::vector<Cooccurrence> out;
    out.reserve(counts.size());
    for (const auto& [pair, count] : counts)
        out.push_back({pair.first, pair.second, count});
    return out;
}

std::vector<PairTest> pair_tests(const BicmModel& model, std::span<const Cooccurrence> pairs, TailMethod method)
{
    std::vector<PairTest> out;
    out.reserve(pairs.size());
    std::vector<double> buffer;
    for (const auto& pair : pairs)
        out.push_back(detail::pair_test_with_buffer(model, pair, method, buffer));
    return out;
}

} // namespace serial
} // namespace trustnet
