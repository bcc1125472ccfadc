#include "trustnet/pipeline.hpp"

#include "trustnet/csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace trustnet {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string_view to_string(Stage stage) noexcept
{
    switch (stage) {
    case Stage::ingest: return "ingest";
    case Stage::solve: return "solve";
    case Stage::validate: return "validate";
    case Stage::communities: return "communities";
    case Stage::voters: return "voters";
    case Stage::classify: return "classify";
    case Stage::figures: return "figures";
    }
    return "figures";
}

StageError::StageError(Stage stage, const std::string& cause)
    : Error(std::string(to_string(stage)) + ": " + cause), stage_(stage)
{
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t state)
{
    for (unsigned char c : bytes) {
        state ^= c;
        state *= 0x100000001b3ULL;
    }
    return state;
}

std::string hex(std::uint64_t value)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, value >>= 4)
        out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    return out;
}

void PipelineConfig::validate() const
{
    if (posts.empty())
        throw Error("no posts file given");
    if (knowledge_base.empty())
        throw Error("no knowledge base given");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error("alpha must lie in (0, 1)");
    if (!(tol > 0.0))
        throw Error("tol must be positive");
    if (max_iter == 0)
        throw Error("max_iter must be positive");
    if (!(resolution > 0.0))
        throw Error("resolution must be positive");
    if (strategies.empty())
        throw Error("no strategies selected");
    if (theta_min > theta_max)
        throw Error("theta_min exceeds theta_max");
    if (folds < 2)
        throw Error("folds must be at least 2");
    if (kinds.contains(PostKind::quote))
        throw Error("quote posts cannot be included");
}

ordered_json PipelineConfig::to_json() const
{
    ordered_json j;
    j["posts"] = posts.string();
    j["knowledge_base"] = knowledge_base.string();
    j["out_dir"] = out_dir.string();
    std::vector<std::string> k;
    for (PostKind kind : kinds)
        k.emplace_back(to_string(kind));
    j["kinds"] = k;
    j["domain_mode"] = to_string(domain_mode);
    j["tol"] = tol;
    j["max_iter"] = max_iter;
    j["alpha"] = alpha;
    j["tail"] = to_string(tail);
    j["louvain_seed"] = louvain_seed;
    j["resolution"] = resolution;
    j["weight_edges"] = weight_edges;
    std::vector<std::string> s;
    for (Strategy st : strategies)
        s.emplace_back(to_string(st));
    j["strategies"] = s;
    j["theta_min"] = theta_min;
    j["theta_max"] = theta_max;
    j["folds"] = folds;
    j["cv_seed"] = cv_seed;
    j["exclude_self_votes"] = exclude_self_votes;
    return j;
}

namespace {

std::string read_bytes(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string chain(const std::string& parent, const std::string& fields)
{
    return hex(fnv1a(fields, fnv1a(parent)));
}

std::optional<std::string> stored_hash(const fs::path& meta)
{
    std::ifstream in(meta);
    if (!in)
        return std::nullopt;
    try {
        const auto j = nlohmann::json::parse(in);
        return j.at("config_hash").get<std::string>();
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::ofstream open_out(const fs::path& path)
{
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const ordered_json& j)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

template <typename F>
auto guarded(Stage stage, F&& body) -> decltype(body())
{
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

std::string opt_double(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); }

struct Ingested {
    Corpus corpus;
    KnowledgeBase kb;
    PublisherTrust trust;
    std::string hash;
};

Ingested run_ingest(const PipelineConfig& cfg, const fs::path& dir)
{
    Ingested in;
    const std::string posts_bytes = read_bytes(cfg.posts);
    const std::string kb_bytes = read_bytes(cfg.knowledge_base);
    std::uint64_t h = fnv1a(posts_bytes);
    h = fnv1a(kb_bytes, h);
    std::string kinds;
    for (PostKind k : cfg.kinds)
        kinds += std::string(to_string(k)) + ",";
    h = fnv1a(kinds + "|" + std::string(to_string(cfg.domain_mode)), h);
    in.hash = hex(h);

    std::istringstream posts_stream(posts_bytes);
    const PostLoad load = parse_posts(posts_stream);
    std::istringstream kb_stream(kb_bytes);
    KnowledgeBaseLoad kbl = parse_knowledge_base(kb_stream);
    in.kb = std::move(kbl.kb);
    in.corpus = build_corpus(load.posts, cfg.kinds, cfg.domain_mode);
    if (in.corpus.n_articles() == 0)
        throw Error("corpus has no usable shares");
    in.trust = align(in.kb, in.corpus);

    const Corpus& c = in.corpus;
    {
        auto out = open_out(dir / "ingest" / "publishers.csv");
        std::vector<std::size_t> n_articles(c.n_publishers(), 0);
        for (Index p : c.article_publisher)
            ++n_articles[p];
        csv::write_row(out, {"domain", "n_articles", "score", "label"});
        for (Index p = 0; p < c.n_publishers(); ++p)
            csv::write_row(out, {c.publishers[p], std::to_string(n_articles[p]),
                                 in.trust.score[p] ? std::to_string(*in.trust.score[p]) : "",
                                 std::string(to_string(in.trust.label(p)))});
    }
    {
        auto out = open_out(dir / "ingest" / "interactions.csv");
        csv::write_row(out, {"user_id", "url", "publisher"});
        for (const Interaction& it : c.interactions)
            csv::write_row(out, {c.users[it.user], c.articles[it.article],
                                 c.publishers[c.article_publisher[it.article]]});
    }
    ordered_json meta;
    meta["config_hash"] = in.hash;
    meta["n_posts"] = load.posts.size();
    meta["n_malformed"] = load.malformed;
    meta["n_skipped_urls"] = c.skipped_urls;
    meta["n_users"] = c.n_users();
    meta["n_articles"] = c.n_articles();
    meta["n_publishers"] = c.n_publishers();
    meta["n_interactions"] = c.interactions.size();
    meta["n_share_events"] = c.share_events.size();
    meta["kb_entries"] = in.kb.size();
    std::vector<std::string> warnings = load.warnings;
    warnings.insert(warnings.end(), kbl.warnings.begin(), kbl.warnings.end());
    meta["warnings"] = warnings;
    write_json(dir / "ingest" / "corpus.json", meta);
    return in;
}

// Knowledge needed to characterize a voter set: labeled publishers among the
// articles the strategy reads.
std::size_t knowledge(Strategy strategy, std::span<const VoterProfile> voters, const Corpus& corpus,
                      const ValidatedNetwork& validated, const PublisherTrust& trust)
{
    std::vector<char> seen(corpus.n_publishers(), 0);
    if (strategy == Strategy::ds_url_nec) {
        for (Index a : validated.nodes)
            seen[corpus.article_publisher[a]] = 1;
    } else {
        for (const auto& v : voters)
            for (Index a : v.articles)
                seen[corpus.article_publisher[a]] = 1;
    }
    std::size_t n = 0;
    for (Index p = 0; p < corpus.n_publishers(); ++p)
        n += seen[p] && trust.label(p) != TrustLabel::unclassified;
    return n;
}

struct Cell {
    SweepRow row;
    std::vector<VoterProfile> selected;
    std::vector<PublisherScore> scores;
    std::optional<Stump> stump;
};

void write_purity(const fs::path& path, const Partition& partition, std::span<const TrustLabel> labels)
{
    auto out = open_out(path);
    csv::write_row(out, {"community", "n_urls", "purity_T", "purity_N", "purity_UNC"});
    for (std::size_t c = 0; c < partition.n_communities; ++c) {
        const int id = static_cast<int>(c);
        csv::write_row(out, {std::to_string(id), std::to_string(partition.members(id).size()),
                             csv::format_double(purity(partition, id, labels, TrustLabel::trustworthy)),
                             csv::format_double(purity(partition, id, labels, TrustLabel::untrustworthy)),
                             csv::format_double(purity(partition, id, labels, TrustLabel::unclassified))});
    }
    std::size_t clustered = 0;
    for (int c : partition.community)
        clustered += c != kUnclustered;
    csv::write_row(out, {"pooled", std::to_string(clustered),
                         opt_double(overall_purity(partition, labels, TrustLabel::trustworthy)),
                         opt_double(overall_purity(partition, labels, TrustLabel::untrustworthy)),
                         opt_double(overall_purity(partition, labels, TrustLabel::unclassified))});
    csv::write_row(out, {"unclustered", std::to_string(partition.community.size() - clustered),
                         opt_double(unclustered_purity(partition, labels, TrustLabel::trustworthy)),
                         opt_double(unclustered_purity(partition, labels, TrustLabel::untrustworthy)),
                         opt_double(unclustered_purity(partition, labels, TrustLabel::unclassified))});
}

ordered_json cv_json(const CvReport& cv)
{
    ordered_json j;
    j["folds"] = cv.folds;
    j["seed"] = cv.seed;
    j["mean"] = cv.mean;
    j["std"] = cv.stddev;
    j["baseline"] = cv.baseline;
    j["fold_balanced_accuracy"] = cv.fold_accuracy;
    ordered_json conf = ordered_json::array();
    for (const Confusion& c : cv.confusion)
        conf.push_back({{"tp", c.tp}, {"fn", c.fn}, {"tn", c.tn}, {"fp", c.fp}});
    j["confusion"] = conf;
    return j;
}

void write_classify(const fs::path& dir, const PipelineConfig& cfg, const std::vector<Cell>& cells)
{
    const fs::path cdir = dir / "classify";
    for (const Cell& cell : cells) {
        const std::string s(to_string(cell.row.strategy));
        auto out = open_out(cdir / s / ("scores_theta_" + std::to_string(cell.row.theta) + ".csv"));
        csv::write_row(out, {"domain", "score", "n_voters", "kb_label", "predicted"});
        for (const auto& ps : cell.scores)
            csv::write_row(out, {ps.domain, csv::format_double(ps.score), std::to_string(ps.n_voters),
                                 std::string(to_string(ps.kb_label)),
                                 cell.stump ? std::string(to_string(cell.stump->predict(ps.score))) : ""});
        if (cell.row.theta == cfg.theta_min) {
            auto w = open_out(cdir / ("worthy_" + s + ".csv"));
            csv::write_row(w, {"rank", "domain", "score", "n_voters", "predicted"});
            if (cell.stump) {
                std::size_t rank = 0;
                for (const auto& e : worthy_list(cell.scores, *cell.stump))
                    csv::write_row(w, {std::to_string(++rank), e.domain, csv::format_double(e.score),
                                       std::to_string(e.n_voters), std::string(to_string(e.predicted))});
            }
        }
    }

    auto cov = open_out(cdir / "coverage.csv");
    csv::write_row(cov, {"strategy", "T", "N", "UNC"});
    for (const Cell& cell : cells)
        if (cell.row.theta == cfg.theta_min) {
            const auto& r = cell.row.coverage;
            csv::write_row(cov, {std::string(to_string(cell.row.strategy)),
                                 csv::format_fixed(r.percent(TrustLabel::trustworthy), 2),
                                 csv::format_fixed(r.percent(TrustLabel::untrustworthy), 2),
                                 csv::format_fixed(r.percent(TrustLabel::unclassified), 2)});
        }

    auto sweep = open_out(cdir / "sweep.csv");
    csv::write_row(sweep, {"strategy", "theta", "n_selected", "n_voters", "covered_T", "covered_N", "covered_UNC",
                           "pct_T", "pct_N", "pct_UNC", "n_scored", "folds", "ba_mean", "ba_std", "knowledge"});
    ordered_json cv = ordered_json::object();
    for (const Cell& cell : cells) {
        const SweepRow& r = cell.row;
        const std::string s(to_string(r.strategy));
        csv::write_row(sweep, {s, std::to_string(r.theta), std::to_string(r.n_selected), std::to_string(r.n_voters),
                               std::to_string(r.coverage.covered[0]), std::to_string(r.coverage.covered[1]),
                               std::to_string(r.coverage.covered[2]),
                               csv::format_double(r.coverage.percent(TrustLabel::trustworthy)),
                               csv::format_double(r.coverage.percent(TrustLabel::untrustworthy)),
                               csv::format_double(r.coverage.percent(TrustLabel::unclassified)),
                               std::to_string(r.n_scored), r.cv ? std::to_string(r.cv->folds) : "",
                               r.cv ? csv::format_double(r.cv->mean) : "", r.cv ? csv::format_double(r.cv->stddev) : "",
                               std::to_string(r.knowledge)});
        cv[s][std::to_string(r.theta)] = r.cv ? cv_json(*r.cv) : ordered_json(nullptr);
    }
    write_json(cdir / "cv.json", cv);
}

} // namespace

RunSummary run_pipeline(const PipelineConfig& cfg, Stage last)
{
    guarded(Stage::ingest, [&] { cfg.validate(); });
    RunSummary summary;
    summary.dir = cfg.out_dir;
    const fs::path& dir = cfg.out_dir;

    Ingested in = guarded(Stage::ingest, [&] {
        fs::create_directories(dir);
        return run_ingest(cfg, dir);
    });
    const Corpus& corpus = in.corpus;
    summary.ingest_hash = in.hash;
    summary.n_users = corpus.n_users();
    summary.n_articles = corpus.n_articles();
    summary.n_publishers = corpus.n_publishers();
    summary.n_interactions = corpus.interactions.size();
    if (last == Stage::ingest)
        return summary;

    const BipartiteGraph graph = guarded(Stage::solve, [&] { return build_graph(corpus); });
    summary.solve_hash = chain(in.hash, "solve|" + csv::format_double(cfg.tol) + "|" + std::to_string(cfg.max_iter));
    const fs::path model_csv = dir / "bicm" / "model.csv", model_meta = dir / "bicm" / "model.json";
    const bool solve_cached = stored_hash(model_meta) == summary.solve_hash;
    summary.cached.push_back(solve_cached);
    const BicmModel model = guarded(Stage::solve, [&] {
        if (solve_cached)
            return read_model(model_csv, model_meta);
        SolveOptions opts;
        opts.tol = cfg.tol;
        opts.max_iter = cfg.max_iter;
        BicmModel m = solve(graph, opts);
        fs::create_directories(model_csv.parent_path());
        write_model(m, model_csv, model_meta, summary.solve_hash);
        return m;
    });
    if (last == Stage::solve)
        return summary;

    summary.validate_hash = chain(summary.solve_hash, "validate|" + csv::format_double(cfg.alpha) + "|" +
                                                          std::string(to_string(cfg.tail)));
    const fs::path val_csv = dir / "projection" / "validated_edges.csv",
                   val_meta = dir / "projection" / "validated.json";
    const bool validate_cached = stored_hash(val_meta) == summary.validate_hash;
    summary.cached.push_back(validate_cached);
    const ValidatedNetwork validated = guarded(Stage::validate, [&] {
        if (validate_cached)
            return read_validated(val_csv, val_meta, graph.url_ids);
        ValidatedNetwork net = validate_projection(graph, model, {cfg.alpha, cfg.tail});
        fs::create_directories(val_csv.parent_path());
        write_validated(net, val_csv, val_meta, summary.validate_hash, cfg.tail);
        return net;
    });
    summary.n_validated_edges = validated.edges.size();
    summary.n_validated_nodes = validated.nodes.size();
    if (last == Stage::validate)
        return summary;

    summary.communities_hash =
        chain(summary.validate_hash, "communities|" + std::to_string(cfg.louvain_seed) + "|" +
                                         csv::format_double(cfg.resolution) + "|" + (cfg.weight_edges ? "w" : "u"));
    const fs::path part_csv = dir / "nec" / "partition.csv", part_meta = dir / "nec" / "nec.json";
    const bool communities_cached = stored_hash(part_meta) == summary.communities_hash;
    summary.cached.push_back(communities_cached);
    const Partition partition = guarded(Stage::communities, [&] {
        Partition p;
        if (communities_cached) {
            p = read_partition(part_csv, part_meta);
        } else {
            p = louvain(validated, {cfg.louvain_seed, cfg.resolution, cfg.weight_edges});
            fs::create_directories(part_csv.parent_path());
            write_partition(p, part_csv, part_meta, summary.communities_hash);
        }
        const auto labels = url_labels(corpus, in.trust);
        write_purity(dir / "nec" / "purity.csv", p, labels);
        auto out = open_out(dir / "nec" / "summary.csv");
        csv::write_row(out, {"community", "n_users", "n_distinct_urls", "n_publishers", "n_shares"});
        for (const auto& r : nec_summary(p, corpus))
            csv::write_row(out, {std::to_string(r.id), std::to_string(r.n_users), std::to_string(r.n_distinct_urls),
                                 std::to_string(r.n_publishers), std::to_string(r.n_shares)});
        return p;
    });
    summary.n_communities = partition.n_communities;
    summary.modularity = partition.modularity;
    if (last == Stage::communities)
        return summary;

    std::vector<Cell> cells;
    guarded(Stage::voters, [&] {
        std::vector<std::vector<VoterProfile>> profiles(cfg.strategies.size());
#pragma omp parallel for schedule(dynamic)
        for (std::size_t s = 0; s < cfg.strategies.size(); ++s)
            profiles[s] = build_profiles(cfg.strategies[s], corpus, validated, in.trust);
        for (std::size_t s = 0; s < cfg.strategies.size(); ++s)
            for (std::size_t t = cfg.theta_min; t <= cfg.theta_max; ++t) {
                Cell cell;
                cell.row.strategy = cfg.strategies[s];
                cell.row.theta = t;
                cell.selected = filter_min_publishers(profiles[s], t);
                cells.push_back(std::move(cell));
            }
        for (const Cell& cell : cells) {
            auto out = open_out(dir / "voters" / std::string(to_string(cell.row.strategy)) /
                                ("theta_" + std::to_string(cell.row.theta) + ".csv"));
            csv::write_row(out, {"user_id", "strategy", "value", "diet", "n_articles"});
            for (const auto& v : cell.selected)
                csv::write_row(out, {corpus.users[v.user], std::string(to_string(v.strategy)), opt_double(v.value),
                                     std::to_string(v.diet), std::to_string(v.articles.size())});
        }
    });
    if (last == Stage::voters) {
        for (Cell& c : cells)
            summary.sweep.push_back(c.row);
        return summary;
    }

    guarded(Stage::classify, [&] {
        std::vector<std::string> failures(cells.size());
#pragma omp parallel for schedule(dynamic)
        for (std::size_t k = 0; k < cells.size(); ++k) {
            Cell& cell = cells[k];
            try {
                SweepRow& r = cell.row;
                const auto voters = defined_voters(cell.selected);
                r.n_selected = cell.selected.size();
                r.n_voters = voters.size();
                std::vector<Index> users;
                for (const auto& v : cell.selected)
                    users.push_back(v.user);
                r.coverage = coverage(users, corpus, in.trust);
                cell.scores = publisher_scores(voters, corpus, in.trust, {cfg.exclude_self_votes});
                r.n_scored = cell.scores.size();
                r.knowledge = knowledge(r.strategy, cell.selected, corpus, validated, in.trust);
                const auto samples = labeled_samples(cell.scores);
                const auto n_t = static_cast<std::size_t>(std::count_if(
                    samples.begin(), samples.end(), [](const Sample& s) { return s.label == TrustLabel::trustworthy; }));
                const std::size_t n_n = samples.size() - n_t;
                if (n_t >= 1 && n_n >= 1)
                    cell.stump = fit_stump(samples);
                if (n_t >= 2 && n_n >= 2)
                    r.cv = stratified_cv(samples, cfg.folds, cfg.cv_seed);
            } catch (const std::exception& e) {
                failures[k] = e.what();
            }
        }
        for (const auto& f : failures)
            if (!f.empty())
                throw Error(f);
        write_classify(dir, cfg, cells);
    });
    for (const Cell& c : cells)
        summary.sweep.push_back(c.row);

    ordered_json report;
    report["config"] = cfg.to_json();
    report["hashes"] = {{"ingest", summary.ingest_hash},
                        {"solve", summary.solve_hash},
                        {"validate", summary.validate_hash},
                        {"communities", summary.communities_hash}};
    report["corpus"] = {{"n_users", summary.n_users},
                        {"n_articles", summary.n_articles},
                        {"n_publishers", summary.n_publishers},
                        {"n_interactions", summary.n_interactions}};
    report["bicm"] = {{"residual", model.residual}, {"iterations", model.iterations}};
    report["projection"] = {{"n_edges", summary.n_validated_edges},
                            {"n_nodes", summary.n_validated_nodes},
                            {"bh_threshold", validated.bh_threshold}};
    const auto labels = url_labels(corpus, in.trust);
    report["nec"] = {{"n_communities", summary.n_communities},
                     {"modularity", summary.modularity},
                     {"purity_T", overall_purity(partition, labels, TrustLabel::trustworthy).value_or(0.0)},
                     {"purity_N", overall_purity(partition, labels, TrustLabel::untrustworthy).value_or(0.0)}};
    ordered_json strategies = ordered_json::object();
    for (const SweepRow& r : summary.sweep) {
        if (r.theta != cfg.theta_min)
            continue;
        ordered_json j;
        j["n_voters"] = r.n_voters;
        j["coverage_pct"] = {{"T", r.coverage.percent(TrustLabel::trustworthy)},
                             {"N", r.coverage.percent(TrustLabel::untrustworthy)},
                             {"UNC", r.coverage.percent(TrustLabel::unclassified)}};
        j["balanced_accuracy"] = r.cv ? ordered_json(r.cv->mean) : ordered_json(nullptr);
        j["knowledge"] = r.knowledge;
        strategies[std::string(to_string(r.strategy))] = j;
    }
    report["strategies"] = strategies;
    guarded(Stage::classify, [&] { write_json(dir / "report.json", report); });
    return summary;
}

std::vector<fs::path> emit_figures(const fs::path& run_dir)
{
    const std::pair<Stage, fs::path> needed[] = {
        {Stage::ingest, "ingest/corpus.json"},     {Stage::solve, "bicm/model.json"},
        {Stage::validate, "projection/validated.json"}, {Stage::communities, "nec/purity.csv"},
        {Stage::voters, "voters"},                 {Stage::classify, "classify/sweep.csv"},
    };
    std::string missing;
    for (const auto& [stage, rel] : needed)
        if (!fs::exists(run_dir / rel))
            missing += (missing.empty() ? "" : ", ") + std::string(to_string(stage));
    if (!missing.empty())
        throw StageError(Stage::figures, "incomplete run, missing stages: " + missing);

    return guarded(Stage::figures, [&] {
        const fs::path fdir = run_dir / "figures";
        std::vector<fs::path> written;
        const csv::Table purity = csv::read(run_dir / "nec" / "purity.csv");
        {
            written.push_back(fdir / "fig2_purity.csv");
            auto out = open_out(written.back());
            csv::write_row(out, {"community", "n_urls", "purity_T", "purity_N"});
            for (const auto& row : purity.rows)
                if (row.at(0) != "pooled" && row.at(0) != "unclustered")
                    csv::write_row(out, {row.at(purity.column("community")), row.at(purity.column("n_urls")),
                                         row.at(purity.column("purity_T")), row.at(purity.column("purity_N"))});
        }
        const csv::Table sweep = csv::read(run_dir / "classify" / "sweep.csv");
        auto col = [&](const std::vector<std::string>& row, std::string_view name) {
            return row.at(sweep.column(name));
        };
        {
            written.push_back(fdir / "fig3_voters.csv");
            auto out = open_out(written.back());
            csv::write_row(out, {"strategy", "theta", "n_voters"});
            for (const auto& row : sweep.rows)
                csv::write_row(out, {col(row, "strategy"), col(row, "theta"), col(row, "n_voters")});
        }
        {
            written.push_back(fdir / "fig4_coverage.csv");
            auto out = open_out(written.back());
            csv::write_row(out, {"strategy", "theta", "level", "covered", "percent"});
            for (const auto& row : sweep.rows)
                for (const char* level : {"T", "N", "UNC"})
                    csv::write_row(out, {col(row, "strategy"), col(row, "theta"), level,
                                         col(row, std::string("covered_") + level),
                                         col(row, std::string("pct_") + level)});
        }
        {
            written.push_back(fdir / "fig5_accuracy.csv");
            auto out = open_out(written.back());
            csv::write_row(out, {"strategy", "theta", "ba_mean", "ba_std", "baseline"});
            for (const auto& row : sweep.rows)
                csv::write_row(out, {col(row, "strategy"), col(row, "theta"), col(row, "ba_mean"),
                                     col(row, "ba_std"), "0.5"});
        }
        {
            written.push_back(fdir / "fig6_knowledge.csv");
            auto out = open_out(written.back());
            csv::write_row(out, {"strategy", "theta", "labeled_publishers"});
            for (const auto& row : sweep.rows)
                csv::write_row(out, {col(row, "strategy"), col(row, "theta"), col(row, "knowledge")});
        }
        return written;
    });
}

} // namespace trustnet
