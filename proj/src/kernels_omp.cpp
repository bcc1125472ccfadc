#include "pair_kernel.hpp"

#include <omp.h>

#include <algorithm>

namespace trustnet {

std::vector<Cooccurrence> cooccurrences(const BipartiteGraph& graph)
{
    const auto n_urls = static_cast<std::int64_t>(graph.n_urls());
    std::vector<std::vector<Cooccurrence>> per_url(graph.n_urls());

#pragma omp parallel
    {
        std::vector<std::uint32_t> counter(graph.n_urls(), 0);
        std::vector<Index> touched;
#pragma omp for schedule(dynamic, 16)
        for (std::int64_t col = 0; col < n_urls; ++col) {
            const auto a = static_cast<Index>(col);
            touched.clear();
            for (Index user : graph.url_links[a]) {
                const auto& row = graph.user_links[user];
                for (auto it = std::upper_bound(row.begin(), row.end(), a); it != row.end(); ++it)
                    if (counter[*it]++ == 0)
                        touched.push_back(*it);
            }
            std::sort(touched.begin(), touched.end());
            auto& out = per_url[a];
            out.reserve(touched.size());
            for (Index b : touched) {
                out.push_back({a, b, counter[b]});
                counter[b] = 0;
            }
        }
    }

    std::size_t total = 0;
    for (const auto& v : per_url)
        total += v.size();
    std::vector<Cooccurrence> out;
    out.reserve(total);
    for (auto& v : per_url)
        out.insert(out.end(), v.begin(), v.end());
    return out;
}

std::vector<PairTest> pair_tests(const BicmModel& model, std::span<const Cooccurrence> pairs, TailMethod method)
{
    std::vector<PairTest> out(pairs.size());
    const auto n = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel
    {
        std::vector<double> buffer;
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t k = 0; k < n; ++k)
            out[static_cast<std::size_t>(k)] =
                detail::pair_test_with_buffer(model, pairs[static_cast<std::size_t>(k)], method, buffer);
    }
    return out;
}

} // namespace trustnet
