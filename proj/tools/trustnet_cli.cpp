#include "trustnet/pipeline.hpp"
#include "trustnet/synthetic.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

using namespace trustnet;

constexpr int kUsage = 2;
constexpr int kSynth = 17;

int exit_code(Stage stage) { return 10 + static_cast<int>(stage); }

void print_summary(const RunSummary& s, Stage last)
{
    std::cout << "run directory: " << s.dir.string() << '\n'
              << "corpus: " << s.n_users << " users, " << s.n_articles << " articles, " << s.n_publishers
              << " publishers, " << s.n_interactions << " interactions\n";
    if (last >= Stage::validate)
        std::cout << "validated: " << s.n_validated_edges << " edges on " << s.n_validated_nodes << " URLs\n";
    if (last >= Stage::communities)
        std::cout << "communities: " << s.n_communities << " (Q = " << s.modularity << ")\n";
    if (last >= Stage::classify)
        for (const auto& r : s.sweep)
            if (r.theta == s.sweep.front().theta)
                std::cout << to_string(r.strategy) << ": " << r.n_voters << " voters, balanced accuracy "
                          << (r.cv ? std::to_string(r.cv->mean) : std::string("n/a")) << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Publisher trustworthiness from user-URL sharing"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML/INI file; command-line flags override it");

    PipelineConfig cfg;
    std::vector<std::string> kinds{"original", "retweet", "reply"};
    std::string domain_mode = "host", tail = "exact";
    std::vector<std::string> strategies;
    for (Strategy s : kAllStrategies)
        strategies.emplace_back(to_string(s));

    app.add_option("--posts", cfg.posts, "Posts file (JSON Lines)");
    app.add_option("--kb", cfg.knowledge_base, "Knowledge base CSV (domain,score)");
    app.add_option("--out", cfg.out_dir, "Run directory")->capture_default_str();
    app.add_option("--kinds", kinds, "Post kinds to include")->capture_default_str();
    app.add_option("--domain-mode", domain_mode, "host or registrable")->capture_default_str();
    app.add_option("--tol", cfg.tol, "Solver tolerance")->capture_default_str();
    app.add_option("--max-iter", cfg.max_iter, "Solver iteration cap")->capture_default_str();
    app.add_option("--alpha", cfg.alpha, "FDR level")->capture_default_str();
    app.add_option("--tail", tail, "exact or poisson")->capture_default_str();
    app.add_option("--louvain-seed", cfg.louvain_seed)->capture_default_str();
    app.add_option("--resolution", cfg.resolution)->capture_default_str();
    app.add_flag("--weight-edges", cfg.weight_edges, "Weight validated edges by -log10(p)");
    app.add_option("--strategies", strategies)->capture_default_str();
    app.add_option("--theta-min", cfg.theta_min)->capture_default_str();
    app.add_option("--theta-max", cfg.theta_max)->capture_default_str();
    app.add_option("--folds", cfg.folds)->capture_default_str();
    app.add_option("--cv-seed", cfg.cv_seed)->capture_default_str();
    app.add_flag("--exclude-self-votes", cfg.exclude_self_votes);

    const std::map<std::string, Stage> stage_commands{
        {"ingest", Stage::ingest},           {"solve", Stage::solve},   {"validate", Stage::validate},
        {"communities", Stage::communities}, {"voters", Stage::voters}, {"classify", Stage::classify},
        {"run", Stage::figures},
    };
    std::map<std::string, CLI::App*> commands;
    for (const auto& [name, stage] : stage_commands)
        commands[name] = app.add_subcommand(name, name == "run" ? "Run every stage and emit figure tables"
                                                                : "Run the pipeline through the " + name + " stage");

    std::string run_dir = "run";
    auto* figures = app.add_subcommand("figures", "Emit figure tables from a completed run");
    figures->add_option("--run-dir", run_dir)->capture_default_str();

    SyntheticSpec spec;
    std::string synth_out = "synthetic";
    auto* synth = app.add_subcommand("synth", "Write a planted two-block corpus and knowledge base");
    synth->add_option("--dir", synth_out, "Output directory")->capture_default_str();
    synth->add_option("--users-per-block", spec.users_per_block)->capture_default_str();
    synth->add_option("--publishers-per-pool", spec.publishers_per_pool)->capture_default_str();
    synth->add_option("--urls-per-publisher", spec.urls_per_publisher)->capture_default_str();
    synth->add_option("--p-in", spec.p_in)->capture_default_str();
    synth->add_option("--p-out", spec.p_out)->capture_default_str();
    synth->add_option("--share-given-engaged", spec.share_given_engaged)->capture_default_str();
    synth->add_option("--unc-fraction", spec.unc_fraction)->capture_default_str();
    synth->add_option("--casual-users", spec.casual_users)->capture_default_str();
    synth->add_option("--seed", spec.seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    if (synth->parsed()) {
        try {
            const SyntheticData data = generate_synthetic(spec);
            std::filesystem::create_directories(synth_out);
            const auto dir = std::filesystem::path(synth_out);
            write_synthetic(data, dir / "posts.jsonl", dir / "kb.csv");
            std::cout << "wrote " << data.posts.size() << " posts to " << (dir / "posts.jsonl").string() << '\n';
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "synth: " << e.what() << '\n';
            return kSynth;
        }
    }
    if (figures->parsed()) {
        try {
            for (const auto& path : emit_figures(run_dir))
                std::cout << path.string() << '\n';
            return 0;
        } catch (const StageError& e) {
            std::cerr << e.what() << '\n';
            return exit_code(e.stage());
        }
    }

    cfg.kinds.clear();
    for (const auto& k : kinds) {
        const auto kind = parse_post_kind(k);
        if (!kind) {
            std::cerr << "unknown post kind: " << k << '\n';
            return kUsage;
        }
        cfg.kinds.insert(*kind);
    }
    const auto mode = parse_domain_mode(domain_mode);
    const auto method = parse_tail_method(tail);
    if (!mode || !method) {
        std::cerr << "bad --domain-mode or --tail\n";
        return kUsage;
    }
    cfg.domain_mode = *mode;
    cfg.tail = *method;
    cfg.strategies.clear();
    for (const auto& s : strategies) {
        const auto st = parse_strategy(s);
        if (!st) {
            std::cerr << "unknown strategy: " << s << '\n';
            return kUsage;
        }
        cfg.strategies.push_back(*st);
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return kUsage;
    }

    Stage last = Stage::classify;
    for (const auto& [name, stage] : stage_commands)
        if (commands[name]->parsed())
            last = stage;
    try {
        const RunSummary summary = run_pipeline(cfg, std::min(last, Stage::classify));
        print_summary(summary, last);
        if (last == Stage::figures)
            for (const auto& path : emit_figures(cfg.out_dir))
                std::cout << path.string() << '\n';
    } catch (const StageError& e) {
        std::cerr << e.what() << '\n';
        return exit_code(e.stage());
    }
    return 0;
}
