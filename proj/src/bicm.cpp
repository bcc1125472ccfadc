#include "trustnet/bicm.hpp"

#include "trustnet/csv.hpp"
#include "trustnet/random.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

namespace trustnet {

std::size_t BipartiteGraph::links() const noexcept
{
    std::size_t total = 0;
    for (const auto& row : user_links)
        total += row.size();
    return total;
}

bool BipartiteGraph::has_link(Index user, Index url) const
{
    const auto& row = user_links.at(user);
    return std::binary_search(row.begin(), row.end(), url);
}

BipartiteGraph BipartiteGraph::from_edges(std::size_t n_users, std::size_t n_urls,
                                          std::span<const std::pair<Index, Index>> edges)
{
    BipartiteGraph g;
    g.user_ids.reserve(n_users);
    g.url_ids.reserve(n_urls);
    for (std::size_t i = 0; i < n_users; ++i)
        g.user_ids.push_back("u" + std::to_string(i));
    for (std::size_t a = 0; a < n_urls; ++a)
        g.url_ids.push_back("r" + std::to_string(a));
    g.user_links.assign(n_users, {});
    g.url_links.assign(n_urls, {});
    for (const auto& [i, a] : edges) {
        if (i >= n_users || a >= n_urls)
            throw std::out_of_range("edge endpoint out of range");
        g.user_links[i].push_back(a);
    }
    for (Index i = 0; i < n_users; ++i) {
        auto& row = g.user_links[i];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        for (Index a : row)
            g.url_links[a].push_back(i);
    }
    return g;
}

BipartiteGraph BipartiteGraph::pruned() const
{
    std::vector<Index> user_map(n_users()), url_map(n_urls());
    BipartiteGraph g;
    for (Index i = 0; i < n_users(); ++i)
        if (!user_links[i].empty()) {
            user_map[i] = static_cast<Index>(g.user_ids.size());
            g.user_ids.push_back(user_ids[i]);
        }
    for (Index a = 0; a < n_urls(); ++a)
        if (!url_links[a].empty()) {
            url_map[a] = static_cast<Index>(g.url_ids.size());
            g.url_ids.push_back(url_ids[a]);
        }
    g.user_links.assign(g.user_ids.size(), {});
    g.url_links.assign(g.url_ids.size(), {});
    for (Index i = 0; i < n_users(); ++i)
        for (Index a : user_links[i]) {
            g.user_links[user_map[i]].push_back(url_map[a]);
            g.url_links[url_map[a]].push_back(user_map[i]);
        }
    return g;
}

BipartiteGraph build_graph(const Corpus& corpus)
{
    if (corpus.interactions.empty())
        throw Error("cannot build a bipartite graph from an empty corpus");
    BipartiteGraph g;
    g.user_ids = corpus.users;
    g.url_ids = corpus.articles;
    g.user_links = corpus.user_articles;
    g.url_links = corpus.article_users;
    return g;
}

namespace {

double sigmoid(double z)
{
    if (z >= 0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct Peeling {
    std::vector<NodePin> user_pin;
    std::vector<NodePin> url_pin;
    std::vector<std::size_t> user_residual; // degree towards free nodes
    std::vector<std::size_t> url_residual;
};

Peeling peel(const BipartiteGraph& g)
{
    Peeling p;
    p.user_pin.assign(g.n_users(), {});
    p.url_pin.assign(g.n_urls(), {});
    p.user_residual.assign(g.n_users(), 0);
    p.url_residual.assign(g.n_urls(), 0);

    for (int stage = 0;; ++stage) {
        std::size_t alive_users = 0, alive_urls = 0;
        for (const auto& s : p.user_pin)
            alive_users += s.pin == Pin::none;
        for (const auto& s : p.url_pin)
            alive_urls += s.pin == Pin::none;

        for (Index i = 0; i < g.n_users(); ++i) {
            if (p.user_pin[i].pin != Pin::none)
                continue;
            std::size_t r = 0;
            for (Index a : g.user_links[i])
                r += p.url_pin[a].pin == Pin::none;
            p.user_residual[i] = r;
        }
        for (Index a = 0; a < g.n_urls(); ++a) {
            if (p.url_pin[a].pin != Pin::none)
                continue;
            std::size_t r = 0;
            for (Index i : g.url_links[a])
                r += p.user_pin[i].pin == Pin::none;
            p.url_residual[a] = r;
        }

        std::vector<std::pair<Index, Pin>> users, urls;
        for (Index i = 0; i < g.n_users(); ++i) {
            if (p.user_pin[i].pin != Pin::none)
                continue;
            if (p.user_residual[i] == 0)
                users.emplace_back(i, Pin::empty);
            else if (p.user_residual[i] == alive_urls)
                users.emplace_back(i, Pin::full);
        }
        for (Index a = 0; a < g.n_urls(); ++a) {
            if (p.url_pin[a].pin != Pin::none)
                continue;
            if (p.url_residual[a] == 0)
                urls.emplace_back(a, Pin::empty);
            else if (p.url_residual[a] == alive_users)
                urls.emplace_back(a, Pin::full);
        }
        if (users.empty() && urls.empty())
            break;
        for (auto [i, pin] : users)
            p.user_pin[i] = {pin, stage};
        for (auto [a, pin] : urls)
            p.url_pin[a] = {pin, stage};
    }
    return p;
}

// Nodes sharing a residual degree share one unknown.
struct Groups {
    std::vector<double> target;
    std::vector<double> count;
    std::vector<int> of_node; // -1 for pinned nodes
};

Groups group_by_degree(const std::vector<std::size_t>& residual, const std::vector<NodePin>& pins)
{
    std::map<std::size_t, int> index;
    for (std::size_t n = 0; n < residual.size(); ++n)
        if (pins[n].pin == Pin::none)
            index.emplace(residual[n], 0);
    Groups g;
    int next = 0;
    for (auto& [degree, id] : index) {
        id = next++;
        g.target.push_back(static_cast<double>(degree));
        g.count.push_back(0.0);
    }
    g.of_node.assign(residual.size(), -1);
    for (std::size_t n = 0; n < residual.size(); ++n)
        if (pins[n].pin == Pin::none) {
            const int id = index.at(residual[n]);
            g.of_node[n] = id;
            g.count[id] += 1.0;
        }
    return g;
}

// The grouped system in log-fitness coordinates, theta = log x, eta = log y.
class ReducedSystem {
public:
    ReducedSystem(Groups users, Groups urls) : users_(std::move(users)), urls_(std::move(urls))
    {
        double links = 0.0;
        for (std::size_t r = 0; r < users_.target.size(); ++r)
            links += users_.count[r] * users_.target[r];
        const double scale = std::sqrt(links);
        for (double k : users_.target)
            theta.push_back(std::log(k / scale));
        for (double d : urls_.target)
            eta.push_back(std::log(d / scale));
    }

    std::size_t n_users() const { return theta.size(); }
    std::size_t n_urls() const { return eta.size(); }
    bool empty() const { return theta.empty() || eta.empty(); }
    const Groups& users() const { return users_; }
    const Groups& urls() const { return urls_; }

    void expected_users(const std::vector<double>& th, const std::vector<double>& et, std::vector<double>& out) const
    {
        out.assign(th.size(), 0.0);
        for (std::size_t r = 0; r < th.size(); ++r)
            for (std::size_t s = 0; s < et.size(); ++s)
                out[r] += urls_.count[s] * sigmoid(th[r] + et[s]);
    }

    void expected_urls(const std::vector<double>& th, const std::vector<double>& et, std::vector<double>& out) const
    {
        out.assign(et.size(), 0.0);
        for (std::size_t r = 0; r < th.size(); ++r)
            for (std::size_t s = 0; s < et.size(); ++s)
                out[s] += users_.count[r] * sigmoid(th[r] + et[s]);
    }

    // Max relative error against the residual targets.
    double residual(const std::vector<double>& th, const std::vector<double>& et) const
    {
        std::vector<double> eu, ed;
        expected_users(th, et, eu);
        expected_urls(th, et, ed);
        double worst = 0.0;
        for (std::size_t r = 0; r < eu.size(); ++r)
            worst = std::max(worst, std::abs(eu[r] - users_.target[r]) / users_.target[r]);
        for (std::size_t s = 0; s < ed.size(); ++s)
            worst = std::max(worst, std::abs(ed[s] - urls_.target[s]) / urls_.target[s]);
        return std::isfinite(worst) ? worst : std::numeric_limits<double>::infinity();
    }

    // Negative log-likelihood; convex, invariant under theta + c, eta - c.
    double objective(const std::vector<double>& th, const std::vector<double>& et) const
    {
        double f = 0.0;
        for (std::size_t r = 0; r < th.size(); ++r) {
            double row = 0.0;
            for (std::size_t s = 0; s < et.size(); ++s)
                row += urls_.count[s] * softplus(th[r] + et[s]);
            f += users_.count[r] * (row - users_.target[r] * th[r]);
        }
        for (std::size_t s = 0; s < et.size(); ++s)
            f -= urls_.count[s] * urls_.target[s] * et[s];
        return f;
    }

    std::vector<double> theta;
    std::vector<double> eta;

private:
    Groups users_;
    Groups urls_;
};

struct Progress {
    int fixed_point = 0;
    int newton = 0;
    double residual = std::numeric_limits<double>::infinity();
};

// Gauss-Seidel sweeps theta += b log(k / E[k]), eta += b log(d / E[d]); the
// relaxation b halves whenever a sweep makes things worse.
void fixed_point(ReducedSystem& sys, const SolveOptions& opt, Progress& progress)
{
    double damping = 1.0;
    double best = sys.residual(sys.theta, sys.eta);
    double window_start = best;
    progress.residual = best;
    std::vector<double> eu, ed;
    for (int it = 0; it < opt.fixed_point_iter && progress.fixed_point < opt.max_iter; ++it) {
        if (best <= opt.tol)
            return;
        const auto theta_prev = sys.theta;
        const auto eta_prev = sys.eta;
        sys.expected_users(sys.theta, sys.eta, eu);
        for (std::size_t r = 0; r < sys.n_users(); ++r)
            sys.theta[r] += damping * std::log(sys.users().target[r] / eu[r]);
        sys.expected_urls(sys.theta, sys.eta, ed);
        for (std::size_t s = 0; s < sys.n_urls(); ++s)
            sys.eta[s] += damping * std::log(sys.urls().target[s] / ed[s]);
        ++progress.fixed_point;

        const double res = sys.residual(sys.theta, sys.eta);
        if (!(res <= best)) {
            sys.theta = theta_prev;
            sys.eta = eta_prev;
            damping *= 0.5;
            if (damping < 1.0 / 64)
                return;
        } else {
            best = res;
            progress.residual = res;
        }
        if ((it + 1) % opt.stall_window == 0) {
            if (best > 0.5 * window_start)
                return;
            window_start = best;
        }
    }
}

// Newton on the convex objective with the last URL unknown held fixed to
// remove the scale gauge.
void newton(ReducedSystem& sys, const SolveOptions& opt, Progress& progress)
{
    const std::size_t U = sys.n_users();
    const std::size_t D = sys.n_urls();
    const std::size_t n = U + D - 1;
    const auto& cu = sys.users().count;
    const auto& cd = sys.urls().count;
    const auto& ku = sys.users().target;
    const auto& kd = sys.urls().target;

    double res = sys.residual(sys.theta, sys.eta);
    progress.residual = std::min(progress.residual, res);
    // Two extra full steps once within tolerance; these stop at the first
    // one that fails to lower the residual.
    int polish = 0;
    while (res > opt.tol || polish < 2) {
        if (res <= opt.tol)
            ++polish;
        else if (progress.fixed_point + progress.newton >= opt.max_iter)
            throw SolverError("BiCM solver did not converge within " + std::to_string(opt.max_iter) + " iterations",
                              progress.residual);

        Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < U; ++r) {
            for (std::size_t s = 0; s < D; ++s) {
                const double p = sigmoid(sys.theta[r] + sys.eta[s]);
                const double w = p * (1.0 - p);
                const auto ri = static_cast<Eigen::Index>(r);
                grad[ri] += cu[r] * cd[s] * p;
                hess(ri, ri) += cu[r] * cd[s] * w;
                if (s + 1 < D) {
                    const auto si = static_cast<Eigen::Index>(U + s);
                    grad[si] += cu[r] * cd[s] * p;
                    hess(si, si) += cu[r] * cd[s] * w;
                    hess(ri, si) += cu[r] * cd[s] * w;
                    hess(si, ri) += cu[r] * cd[s] * w;
                }
            }
        }
        for (std::size_t r = 0; r < U; ++r)
            grad[static_cast<Eigen::Index>(r)] -= cu[r] * ku[r];
        for (std::size_t s = 0; s + 1 < D; ++s)
            grad[static_cast<Eigen::Index>(U + s)] -= cd[s] * kd[s];

        const Eigen::VectorXd step = hess.ldlt().solve(-grad);
        if (!step.allFinite())
            throw SolverError("BiCM Newton system is singular", progress.residual);

        const double f0 = sys.objective(sys.theta, sys.eta);
        const double slope = grad.dot(step);
        bool accepted = false;
        for (double t = 1.0; t > 1e-12; t *= 0.5) {
            auto th = sys.theta;
            auto et = sys.eta;
            for (std::size_t r = 0; r < U; ++r)
                th[r] += t * step[static_cast<Eigen::Index>(r)];
            for (std::size_t s = 0; s + 1 < D; ++s)
                et[s] += t * step[static_cast<Eigen::Index>(U + s)];
            const double f1 = sys.objective(th, et);
            const double r1 = sys.residual(th, et);
            const bool ok = polish > 0 ? r1 < res : (std::isfinite(f1) && f1 <= f0 + 1e-4 * t * slope) || r1 < res;
            if (ok) {
                sys.theta = std::move(th);
                sys.eta = std::move(et);
                res = r1;
                accepted = true;
                break;
            }
        }
        ++progress.newton;
        progress.residual = std::min(progress.residual, res);
        if (!accepted && polish > 0)
            break;
        if (!accepted)
            throw SolverError("BiCM Newton line search stalled", progress.residual);
    }
}

} // namespace

double BicmModel::probability(Index user, Index url) const noexcept
{
    const NodePin& u = user_pin[user];
    const NodePin& r = url_pin[url];
    if (u.pin != Pin::none && (r.pin == Pin::none || u.stage <= r.stage))
        return u.pin == Pin::full ? 1.0 : 0.0;
    if (r.pin != Pin::none)
        return r.pin == Pin::full ? 1.0 : 0.0;
    const double xy = x[user] * y[url];
    return xy / (1.0 + xy);
}

double BicmModel::link_probability(Index user, Index url) const
{
    if (user >= n_users() || url >= n_urls())
        throw std::out_of_range("link_probability: node index out of range");
    return probability(user, url);
}

std::vector<std::pair<Index, Index>> BicmModel::forced_links() const
{
    std::set<std::pair<Index, Index>> out;
    for (Index i = 0; i < n_users(); ++i)
        if (user_pin[i].pin == Pin::full)
            for (Index a = 0; a < n_urls(); ++a)
                if (probability(i, a) == 1.0)
                    out.emplace(i, a);
    for (Index a = 0; a < n_urls(); ++a)
        if (url_pin[a].pin == Pin::full)
            for (Index i = 0; i < n_users(); ++i)
                if (probability(i, a) == 1.0)
                    out.emplace(i, a);
    return {out.begin(), out.end()};
}

double BicmModel::expected_user_degree(Index user) const
{
    double sum = 0.0;
    for (Index a = 0; a < n_urls(); ++a)
        sum += link_probability(user, a);
    return sum;
}

double BicmModel::expected_url_degree(Index url) const
{
    double sum = 0.0;
    for (Index i = 0; i < n_users(); ++i)
        sum += link_probability(i, url);
    return sum;
}

BicmModel solve(const BipartiteGraph& graph, const SolveOptions& options)
{
    if (!(options.tol > 0.0))
        throw std::invalid_argument("solve: tol must be positive");
    if (options.max_iter < 1)
        throw std::invalid_argument("solve: max_iter must be at least 1");

    BicmModel model;
    model.user_ids = graph.user_ids;
    model.url_ids = graph.url_ids;
    model.tol = options.tol;
    for (Index i = 0; i < graph.n_users(); ++i)
        model.user_degree.push_back(graph.user_degree(i));
    for (Index a = 0; a < graph.n_urls(); ++a)
        model.url_degree.push_back(graph.url_degree(a));

    Peeling peeled = peel(graph);
    model.user_pin = peeled.user_pin;
    model.url_pin = peeled.url_pin;

    ReducedSystem sys(group_by_degree(peeled.user_residual, peeled.user_pin),
                      group_by_degree(peeled.url_residual, peeled.url_pin));
    Progress progress;
    if (!sys.empty()) {
        fixed_point(sys, options, progress);
        newton(sys, options, progress);
    }
    model.fixed_point_iterations = progress.fixed_point;
    model.newton_iterations = progress.newton;
    model.iterations = progress.fixed_point + progress.newton;

    auto fitness = [](const NodePin& pin, int group, const std::vector<double>& logs) {
        if (pin.pin == Pin::full)
            return std::numeric_limits<double>::infinity();
        if (pin.pin == Pin::empty)
            return 0.0;
        return std::exp(logs[static_cast<std::size_t>(group)]);
    };
    for (Index i = 0; i < graph.n_users(); ++i)
        model.x.push_back(fitness(model.user_pin[i], sys.users().of_node[i], sys.theta));
    for (Index a = 0; a < graph.n_urls(); ++a)
        model.y.push_back(fitness(model.url_pin[a], sys.urls().of_node[a], sys.eta));

    // Residual against the full degrees. Free nodes in one group share their
    // original degree, so one error per group suffices.
    double worst = 0.0;
    if (!sys.empty()) {
        std::vector<double> eu, ed;
        sys.expected_users(sys.theta, sys.eta, eu);
        sys.expected_urls(sys.theta, sys.eta, ed);
        for (Index i = 0; i < graph.n_users(); ++i)
            if (const int g = sys.users().of_node[i]; g >= 0)
                worst = std::max(worst, std::abs(eu[g] - sys.users().target[g]) / double(model.user_degree[i]));
        for (Index a = 0; a < graph.n_urls(); ++a)
            if (const int g = sys.urls().of_node[a]; g >= 0)
                worst = std::max(worst, std::abs(ed[g] - sys.urls().target[g]) / double(model.url_degree[a]));
    }
    model.residual = worst;
    return model;
}

BipartiteGraph sample(const BicmModel& model, std::uint64_t seed)
{
    Rng rng(seed);
    BipartiteGraph g;
    g.user_ids = model.user_ids;
    g.url_ids = model.url_ids;
    g.user_links.assign(model.n_users(), {});
    g.url_links.assign(model.n_urls(), {});
    for (Index i = 0; i < model.n_users(); ++i)
        for (Index a = 0; a < model.n_urls(); ++a)
            if (rng.uniform() < model.probability(i, a)) {
                g.user_links[i].push_back(a);
                g.url_links[a].push_back(i);
            }
    return g;
}

namespace {

std::string_view pin_name(Pin pin)
{
    switch (pin) {
    case Pin::full: return "full";
    case Pin::empty: return "empty";
    case Pin::none: break;
    }
    return "none";
}

} // namespace

void write_model(const BicmModel& model, const std::filesystem::path& csv_path,
                 const std::filesystem::path& meta_path, const std::string& config_hash)
{
    std::ofstream out(csv_path);
    if (!out)
        throw Error("cannot write " + csv_path.string());
    csv::write_row(out, {"node_id", "layer", "degree", "fitness"});
    for (Index i = 0; i < model.n_users(); ++i)
        csv::write_row(out, {model.user_ids[i], "user", std::to_string(model.user_degree[i]),
                             csv::format_double(model.x[i])});
    for (Index a = 0; a < model.n_urls(); ++a)
        csv::write_row(out, {model.url_ids[a], "url", std::to_string(model.url_degree[a]),
                             csv::format_double(model.y[a])});

    nlohmann::ordered_json meta;
    meta["config_hash"] = config_hash;
    meta["tol"] = model.tol;
    meta["iterations"] = model.iterations;
    meta["fixed_point_iterations"] = model.fixed_point_iterations;
    meta["newton_iterations"] = model.newton_iterations;
    meta["residual"] = model.residual;
    meta["n_users"] = model.n_users();
    meta["n_urls"] = model.n_urls();
    auto pinned = nlohmann::ordered_json::array();
    for (Index i = 0; i < model.n_users(); ++i)
        if (model.user_pin[i].pin != Pin::none)
            pinned.push_back({{"layer", "user"}, {"index", i}, {"pin", pin_name(model.user_pin[i].pin)},
                              {"stage", model.user_pin[i].stage}});
    for (Index a = 0; a < model.n_urls(); ++a)
        if (model.url_pin[a].pin != Pin::none)
            pinned.push_back({{"layer", "url"}, {"index", a}, {"pin", pin_name(model.url_pin[a].pin)},
                              {"stage", model.url_pin[a].stage}});
    meta["pinned_nodes"] = std::move(pinned);
    meta["forced_links"] = model.forced_links().size();
    std::ofstream mout(meta_path);
    if (!mout)
        throw Error("cannot write " + meta_path.string());
    mout << meta.dump(2) << '\n';
}

BicmModel read_model(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path)
{
    const csv::Table table = csv::read(csv_path);
    const std::size_t c_id = table.column("node_id"), c_layer = table.column("layer"),
                      c_degree = table.column("degree"), c_fit = table.column("fitness");
    BicmModel model;
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw Error("malformed model row in " + csv_path.string());
        const bool user = row[c_layer] == "user";
        if (!user && row[c_layer] != "url")
            throw Error("unknown layer '" + row[c_layer] + "'");
        (user ? model.user_ids : model.url_ids).push_back(row[c_id]);
        (user ? model.user_degree : model.url_degree).push_back(std::stoull(row[c_degree]));
        (user ? model.x : model.y).push_back(std::stod(row[c_fit]));
    }
    std::ifstream min(meta_path);
    if (!min)
        throw Error("cannot read " + meta_path.string());
    const auto meta = nlohmann::json::parse(min);
    model.tol = meta.at("tol").get<double>();
    model.iterations = meta.at("iterations").get<int>();
    model.fixed_point_iterations = meta.at("fixed_point_iterations").get<int>();
    model.newton_iterations = meta.at("newton_iterations").get<int>();
    model.residual = meta.at("residual").get<double>();
    model.user_pin.assign(model.user_ids.size(), {});
    model.url_pin.assign(model.url_ids.size(), {});
    for (const auto& node : meta.at("pinned_nodes")) {
        const auto index = node.at("index").get<std::size_t>();
        const Pin pin = node.at("pin").get<std::string>() == "full" ? Pin::full : Pin::empty;
        auto& pins = node.at("layer").get<std::string>() == "user" ? model.user_pin : model.url_pin;
        pins.at(index) = {pin, node.at("stage").get<int>()};
    }
    return model;
}

} // namespace trustnet
