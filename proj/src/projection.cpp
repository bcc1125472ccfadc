#include "trustnet/projection.hpp"

#include "pair_kernel.hpp"
#include "trustnet/csv.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_map>

namespace trustnet {

std::optional<TailMethod> parse_tail_method(std::string_view text) noexcept
{
    if (text == "exact")
        return TailMethod::exact;
    if (text == "poisson")
        return TailMethod::poisson;
    return std::nullopt;
}

std::string_view to_string(TailMethod method) noexcept
{
    return method == TailMethod::poisson ? "poisson" : "exact";
}

double poisson_binomial_tail(std::span<const double> probs, std::size_t k)
{
    for (double p : probs)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("poisson_binomial_tail: probability outside [0, 1]");
    if (k > probs.size() + 1)
        throw std::invalid_argument("poisson_binomial_tail: k exceeds number of trials + 1");
    if (k == 0)
        return 1.0;

    // dist[j] = P(S = j) for j < k over the trials seen so far; mass leaving
    // state k - 1 is the tail. Neumaier summation on the tail.
    std::vector<double> dist(k, 0.0);
    dist[0] = 1.0;
    double tail = 0.0, carry = 0.0;
    for (double p : probs) {
        if (p == 0.0)
            continue;
        const double term = dist[k - 1] * p;
        const double t = tail + term;
        carry += std::abs(tail) >= std::abs(term) ? (tail - t) + term : (term - t) + tail;
        tail = t;
        const double q = 1.0 - p;
        for (std::size_t j = k - 1; j > 0; --j)
            dist[j] = dist[j] * q + dist[j - 1] * p;
        dist[0] *= q;
    }
    return std::min(1.0, tail + carry);
}

double poisson_tail(double rate, std::size_t k)
{
    if (!(rate >= 0.0))
        throw std::invalid_argument("poisson_tail: negative rate");
    if (k == 0)
        return 1.0;
    if (rate == 0.0)
        return 0.0;
    return boost::math::gamma_p(static_cast<double>(k), rate);
}

namespace {

PairTest pair_pvalue_into(const BicmModel& model, Index a, Index b, std::uint32_t observed, TailMethod method,
                          std::vector<double>& buffer)
{
    PairTest test{a, b, observed, 1.0};
    if (observed == 0)
        return test;
    buffer.clear();
    double rate = 0.0;
    for (Index i = 0; i < model.n_users(); ++i) {
        const double p = model.probability(i, a) * model.probability(i, b);
        if (p > 0.0) {
            buffer.push_back(p);
            rate += p;
        }
    }
    if (method == TailMethod::poisson)
        test.pvalue = poisson_tail(rate, observed);
    else
        test.pvalue = observed > buffer.size() ? 0.0 : poisson_binomial_tail(buffer, observed);
    return test;
}

} // namespace

PairTest pair_pvalue(const BicmModel& model, Index a, Index b, std::uint32_t observed, TailMethod method)
{
    if (a >= model.n_urls() || b >= model.n_urls())
        throw std::out_of_range("pair_pvalue: URL index out of range");
    std::vector<double> buffer;
    return pair_pvalue_into(model, std::min(a, b), std::max(a, b), observed, method, buffer);
}

namespace detail {
PairTest pair_test_with_buffer(const BicmModel& model, const Cooccurrence& pair, TailMethod method,
                               std::vector<double>& buffer)
{
    return pair_pvalue_into(model, pair.a, pair.b, pair.count, method, buffer);
}
} // namespace detail

bool ValidatedNetwork::contains(Index url) const { return std::binary_search(nodes.begin(), nodes.end(), url); }

ValidatedNetwork bh_validate(std::span<const PairTest> tests, double alpha, std::uint64_t hypotheses,
                             std::size_t n_urls)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("bh_validate: alpha must lie in (0, 1)");
    if (hypotheses < tests.size())
        throw std::invalid_argument("bh_validate: fewer hypotheses than tests");

    ValidatedNetwork net;
    net.alpha = alpha;
    net.hypotheses = hypotheses;
    net.n_tests = tests.size();

    std::vector<std::size_t> order(tests.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        if (tests[l].pvalue != tests[r].pvalue)
            return tests[l].pvalue < tests[r].pvalue;
        return std::tie(tests[l].a, tests[l].b) < std::tie(tests[r].a, tests[r].b);
    });
    const double m = static_cast<double>(hypotheses);
    std::size_t rank = 0;
    for (std::size_t r = 1; r <= order.size(); ++r)
        if (tests[order[r - 1]].pvalue <= static_cast<double>(r) * alpha / m)
            rank = r;

    if (rank > 0) {
        net.bh_threshold = tests[order[rank - 1]].pvalue;
        for (const PairTest& t : tests)
            if (t.pvalue <= net.bh_threshold)
                net.edges.push_back({std::min(t.a, t.b), std::max(t.a, t.b), t.pvalue});
    }
    std::sort(net.edges.begin(), net.edges.end(),
              [](const ValidatedEdge& l, const ValidatedEdge& r) { return std::tie(l.a, l.b) < std::tie(r.a, r.b); });
    for (const auto& e : net.edges) {
        net.nodes.push_back(e.a);
        net.nodes.push_back(e.b);
    }
    std::sort(net.nodes.begin(), net.nodes.end());
    net.nodes.erase(std::unique(net.nodes.begin(), net.nodes.end()), net.nodes.end());
    net.url_ids.resize(n_urls);
    for (std::size_t i = 0; i < n_urls; ++i)
        net.url_ids[i] = std::to_string(i);
    return net;
}

ValidatedNetwork validate_projection(const BipartiteGraph& graph, const BicmModel& model,
                                     const ProjectionOptions& options)
{
    const auto pairs = cooccurrences(graph);
    const auto tests = pair_tests(model, pairs, options.method);
    const std::uint64_t n = graph.n_urls();
    ValidatedNetwork net = bh_validate(tests, options.alpha, n * (n - 1) / 2, n);
    net.url_ids = graph.url_ids;
    return net;
}

void write_validated(const ValidatedNetwork& network, const std::filesystem::path& csv_path,
                     const std::filesystem::path& meta_path, const std::string& config_hash, TailMethod method)
{
    std::ofstream out(csv_path);
    if (!out)
        throw Error("cannot write " + csv_path.string());
    csv::write_row(out, {"url_a", "url_b", "pvalue"});
    for (const auto& e : network.edges)
        csv::write_row(out, {network.url_ids[e.a], network.url_ids[e.b], csv::format_double(e.pvalue)});

    nlohmann::ordered_json meta;
    meta["config_hash"] = config_hash;
    meta["alpha"] = network.alpha;
    meta["hypotheses"] = network.hypotheses;
    meta["bh_threshold"] = network.bh_threshold;
    meta["tail_method"] = to_string(method);
    meta["n_tests"] = network.n_tests;
    meta["n_edges"] = network.edges.size();
    meta["n_nodes"] = network.nodes.size();
    meta["n_urls"] = network.n_urls();
    std::ofstream mout(meta_path);
    if (!mout)
        throw Error("cannot write " + meta_path.string());
    mout << meta.dump(2) << '\n';
}

ValidatedNetwork read_validated(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path,
                                const std::vector<std::string>& url_ids)
{
    std::unordered_map<std::string_view, Index> column;
    for (Index a = 0; a < url_ids.size(); ++a)
        column.emplace(url_ids[a], a);

    ValidatedNetwork net;
    net.url_ids = url_ids;
    const csv::Table table = csv::read(csv_path);
    const std::size_t ca = table.column("url_a"), cb = table.column("url_b"), cp = table.column("pvalue");
    for (const auto& row : table.rows) {
        const auto ia = column.find(row.at(ca));
        const auto ib = column.find(row.at(cb));
        if (ia == column.end() || ib == column.end())
            throw Error("validated edge references an unknown URL");
        net.edges.push_back({std::min(ia->second, ib->second), std::max(ia->second, ib->second),
                             std::stod(row.at(cp))});
        net.nodes.push_back(ia->second);
        net.nodes.push_back(ib->second);
    }
    std::sort(net.edges.begin(), net.edges.end(),
              [](const ValidatedEdge& l, const ValidatedEdge& r) { return std::tie(l.a, l.b) < std::tie(r.a, r.b); });
    std::sort(net.nodes.begin(), net.nodes.end());
    net.nodes.erase(std::unique(net.nodes.begin(), net.nodes.end()), net.nodes.end());

    std::ifstream min(meta_path);
    if (!min)
        throw Error("cannot read " + meta_path.string());
    const auto meta = nlohmann::json::parse(min);
    net.alpha = meta.at("alpha").get<double>();
    net.hypotheses = meta.at("hypotheses").get<std::uint64_t>();
    net.bh_threshold = meta.at("bh_threshold").get<double>();
    net.n_tests = meta.at("n_tests").get<std::size_t>();
    return net;
}

} // namespace trustnet
