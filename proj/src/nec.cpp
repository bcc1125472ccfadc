#include "trustnet/nec.hpp"

#include "trustnet/csv.hpp"
#include "trustnet/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace trustnet {

double WeightedGraph::strength(Index node) const
{
    double s = 0.0;
    for (const Arc& arc : adjacency[node])
        s += arc.weight;
    return s;
}

double WeightedGraph::total_weight() const
{
    double s = 0.0;
    for (Index i = 0; i < size(); ++i)
        s += strength(i);
    return s / 2.0;
}

WeightedGraph WeightedGraph::from_edges(std::size_t n, std::span<const std::pair<Index, Index>> edges)
{
    std::vector<std::unordered_map<Index, double>> acc(n);
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n)
            throw std::out_of_range("edge endpoint out of range");
        if (u == v) {
            acc[u][u] += 2.0;
        } else {
            acc[u][v] += 1.0;
            acc[v][u] += 1.0;
        }
    }
    WeightedGraph g;
    g.adjacency.resize(n);
    for (Index i = 0; i < n; ++i) {
        for (const auto& [to, w] : acc[i])
            g.adjacency[i].push_back({to, w});
        std::sort(g.adjacency[i].begin(), g.adjacency[i].end(),
                  [](const Arc& l, const Arc& r) { return l.to < r.to; });
    }
    return g;
}

double modularity(const WeightedGraph& graph, std::span<const Index> community, double resolution)
{
    if (community.size() != graph.size())
        throw std::invalid_argument("modularity: assignment does not cover the graph");
    const double m2 = 2.0 * graph.total_weight();
    if (m2 == 0.0)
        return 0.0;
    const Index n_comm = community.empty() ? 0 : *std::max_element(community.begin(), community.end()) + 1;
    std::vector<double> inner(n_comm, 0.0), total(n_comm, 0.0);
    for (Index i = 0; i < graph.size(); ++i)
        for (const auto& arc : graph.adjacency[i]) {
            total[community[i]] += arc.weight;
            if (community[arc.to] == community[i])
                inner[community[i]] += arc.weight;
        }
    double q = 0.0;
    for (Index c = 0; c < n_comm; ++c)
        q += inner[c] / m2 - resolution * (total[c] / m2) * (total[c] / m2);
    return q;
}

namespace {

// Contiguous ids in order of first appearance.
std::vector<Index> renumber(std::span<const Index> labels)
{
    std::unordered_map<Index, Index> ids;
    std::vector<Index> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto [it, inserted] = ids.emplace(labels[i], static_cast<Index>(ids.size()));
        out[i] = it->second;
    }
    return out;
}

// Local moving on one level; returns true if any node changed community.
bool move_nodes(const WeightedGraph& g, double resolution, Rng& rng, std::vector<Index>& comm)
{
    const std::size_t n = g.size();
    const double m2 = 2.0 * g.total_weight();
    std::vector<double> k(n), tot(n);
    for (Index i = 0; i < n; ++i) {
        k[i] = g.strength(i);
        comm[i] = i;
        tot[i] = k[i];
    }
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<Index>(order));

    constexpr double kMinGain = 1e-12;
    std::vector<double> w_to(n, 0.0);
    std::vector<Index> touched;
    bool any = false;
    for (bool moved = true; moved;) {
        moved = false;
        for (Index i : order) {
            const Index home = comm[i];
            touched.clear();
            for (const auto& arc : g.adjacency[i]) {
                if (arc.to == i)
                    continue;
                const Index c = comm[arc.to];
                if (w_to[c] == 0.0)
                    touched.push_back(c);
                w_to[c] += arc.weight;
            }
            tot[home] -= k[i];
            const double scale = resolution * k[i] / m2;
            const double stay = w_to[home] - tot[home] * scale;

            std::sort(touched.begin(), touched.end());
            Index best = home;
            double best_gain = -std::numeric_limits<double>::infinity();
            for (Index c : touched) {
                if (c == home)
                    continue;
                const double gain = w_to[c] - tot[c] * scale;
                if (gain > best_gain) {
                    best_gain = gain;
                    best = c;
                }
            }
            if (best == home || !(best_gain > stay + kMinGain))
                best = home;
            tot[best] += k[i];
            if (best != home) {
                comm[i] = best;
                moved = any = true;
            }
            for (Index c : touched)
                w_to[c] = 0.0;
        }
    }
    return any;
}

WeightedGraph aggregate(const WeightedGraph& g, std::span<const Index> comm, std::size_t n_comm)
{
    std::vector<std::unordered_map<Index, double>> acc(n_comm);
    for (Index i = 0; i < g.size(); ++i)
        for (const auto& arc : g.adjacency[i])
            acc[comm[i]][comm[arc.to]] += arc.weight;
    WeightedGraph out;
    out.adjacency.resize(n_comm);
    for (Index c = 0; c < n_comm; ++c) {
        for (const auto& [to, w] : acc[c])
            out.adjacency[c].push_back({to, w});
        std::sort(out.adjacency[c].begin(), out.adjacency[c].end(),
                  [](const auto& l, const auto& r) { return l.to < r.to; });
    }
    return out;
}

} // namespace

LouvainResult louvain(const WeightedGraph& graph, std::uint64_t seed, double resolution)
{
    LouvainResult result;
    const std::size_t n = graph.size();
    result.community.resize(n);
    std::iota(result.community.begin(), result.community.end(), 0);
    result.modularity = modularity(graph, result.community, resolution);
    result.pass_modularity.push_back(result.modularity);
    if (n == 0 || graph.total_weight() == 0.0)
        return result;

    Rng rng(seed);
    WeightedGraph level = graph;
    std::vector<Index> membership = result.community;
    while (true) {
        std::vector<Index> comm(level.size());
        if (!move_nodes(level, resolution, rng, comm))
            break;
        const std::vector<Index> ids = renumber(comm);
        const std::size_t n_comm = ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
        for (Index& node : membership)
            node = ids[node];
        level = aggregate(level, ids, n_comm);
        result.pass_modularity.push_back(modularity(graph, membership, resolution));
        if (n_comm == level.size() && n_comm == comm.size())
            break;
    }
    result.community = renumber(membership);
    result.modularity = modularity(graph, result.community, resolution);
    return result;
}

std::vector<Index> Partition::members(int id) const
{
    std::vector<Index> out;
    for (Index a = 0; a < community.size(); ++a)
        if (community[a] == id)
            out.push_back(a);
    return out;
}

Partition louvain(const ValidatedNetwork& network, const CommunityOptions& options)
{
    Partition partition;
    partition.url_ids = network.url_ids;
    partition.community.assign(network.n_urls(), kUnclustered);
    if (network.edges.empty())
        return partition;

    std::unordered_map<Index, Index> local;
    for (Index i = 0; i < network.nodes.size(); ++i)
        local.emplace(network.nodes[i], i);

    WeightedGraph g;
    g.adjacency.resize(network.nodes.size());
    for (const auto& e : network.edges) {
        const double w = options.weight_by_significance ? -std::log10(std::max(e.pvalue, 1e-300)) : 1.0;
        const Index u = local.at(e.a), v = local.at(e.b);
        g.adjacency[u].push_back({v, w});
        g.adjacency[v].push_back({u, w});
    }
    for (auto& row : g.adjacency)
        std::sort(row.begin(), row.end(), [](const auto& l, const auto& r) { return l.to < r.to; });

    const LouvainResult result = louvain(g, options.seed, options.resolution);
    for (Index i = 0; i < network.nodes.size(); ++i)
        partition.community[network.nodes[i]] = static_cast<int>(result.community[i]);
    partition.n_communities = *std::max_element(result.community.begin(), result.community.end()) + 1;
    partition.modularity = result.modularity;
    partition.pass_modularity = result.pass_modularity;
    return partition;
}

std::vector<TrustLabel> url_labels(const Corpus& corpus, const PublisherTrust& trust)
{
    std::vector<TrustLabel> labels;
    labels.reserve(corpus.n_articles());
    for (Index a = 0; a < corpus.n_articles(); ++a)
        labels.push_back(trust.label(corpus.article_publisher[a]));
    return labels;
}

namespace {

struct LevelCount {
    std::size_t level = 0;
    std::size_t total = 0;
};

LevelCount count_level(const Partition& partition, std::span<const TrustLabel> labels, TrustLabel level,
                       auto&& include)
{
    if (labels.size() != partition.community.size())
        throw std::invalid_argument("purity: labels do not cover the partition");
    LevelCount c;
    for (std::size_t a = 0; a < labels.size(); ++a)
        if (include(partition.community[a])) {
            ++c.total;
            c.level += labels[a] == level;
        }
    return c;
}

} // namespace

double purity(const Partition& partition, int community, std::span<const TrustLabel> labels, TrustLabel level)
{
    if (community < 0 || static_cast<std::size_t>(community) >= partition.n_communities)
        throw std::out_of_range("purity: unknown community " + std::to_string(community));
    const auto c = count_level(partition, labels, level, [&](int id) { return id == community; });
    return c.total ? static_cast<double>(c.level) / static_cast<double>(c.total) : 0.0;
}

std::optional<double> overall_purity(const Partition& partition, std::span<const TrustLabel> labels,
                                     TrustLabel level)
{
    const auto c = count_level(partition, labels, level, [](int id) { return id != kUnclustered; });
    if (c.total == 0)
        return std::nullopt;
    return static_cast<double>(c.level) / static_cast<double>(c.total);
}

std::optional<double> unclustered_purity(const Partition& partition, std::span<const TrustLabel> labels,
                                         TrustLabel level)
{
    const auto c = count_level(partition, labels, level, [](int id) { return id == kUnclustered; });
    if (c.total == 0)
        return std::nullopt;
    return static_cast<double>(c.level) / static_cast<double>(c.total);
}

std::vector<NecSummaryRow> nec_summary(const Partition& partition, const Corpus& corpus)
{
    if (partition.community.size() != corpus.n_articles())
        throw std::invalid_argument("nec_summary: partition does not cover the corpus");
    std::vector<NecSummaryRow> rows;
    for (int id = 0; id < static_cast<int>(partition.n_communities); ++id) {
        const auto urls = partition.members(id);
        std::vector<Index> users, publishers;
        NecSummaryRow row;
        row.id = id;
        row.n_distinct_urls = urls.size();
        for (Index a : urls) {
            users.insert(users.end(), corpus.article_users[a].begin(), corpus.article_users[a].end());
            publishers.push_back(corpus.article_publisher[a]);
            row.n_shares += corpus.article_shares[a];
        }
        std::sort(users.begin(), users.end());
        std::sort(publishers.begin(), publishers.end());
        row.n_users = static_cast<std::size_t>(std::unique(users.begin(), users.end()) - users.begin());
        row.n_publishers = static_cast<std::size_t>(std::unique(publishers.begin(), publishers.end()) - publishers.begin());
        rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const NecSummaryRow& l, const NecSummaryRow& r) { return l.n_users > r.n_users; });
    return rows;
}

void write_partition(const Partition& partition, const std::filesystem::path& csv_path,
                     const std::filesystem::path& meta_path, const std::string& config_hash)
{
    std::ofstream out(csv_path);
    if (!out)
        throw Error("cannot write " + csv_path.string());
    csv::write_row(out, {"url", "community"});
    for (std::size_t a = 0; a < partition.url_ids.size(); ++a)
        csv::write_row(out, {partition.url_ids[a], std::to_string(partition.community[a])});

    nlohmann::ordered_json meta;
    meta["config_hash"] = config_hash;
    meta["n_communities"] = partition.n_communities;
    meta["n_unclustered"] = std::count(partition.community.begin(), partition.community.end(), kUnclustered);
    meta["modularity"] = partition.modularity;
    meta["pass_modularity"] = partition.pass_modularity;
    std::ofstream mout(meta_path);
    if (!mout)
        throw Error("cannot write " + meta_path.string());
    mout << meta.dump(2) << '\n';
}

Partition read_partition(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path)
{
    Partition partition;
    const csv::Table table = csv::read(csv_path);
    const std::size_t cu = table.column("url"), cc = table.column("community");
    for (const auto& row : table.rows) {
        partition.url_ids.push_back(row.at(cu));
        partition.community.push_back(std::stoi(row.at(cc)));
    }
    std::ifstream min(meta_path);
    if (!min)
        throw Error("cannot read " + meta_path.string());
    const auto meta = nlohmann::json::parse(min);
    partition.n_communities = meta.at("n_communities").get<std::size_t>();
    partition.modularity = meta.at("modularity").get<double>();
    partition.pass_modularity = meta.at("pass_modularity").get<std::vector<double>>();
    return partition;
}

} // namespace trustnet
