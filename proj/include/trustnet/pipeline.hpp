#pragma once

// End-to-end orchestration with cached stage artifacts under a run directory.

#include "trustnet/bicm.hpp"
#include "trustnet/classify.hpp"
#include "trustnet/ingest.hpp"
#include "trustnet/nec.hpp"
#include "trustnet/projection.hpp"
#include "trustnet/voters.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace trustnet {

enum class Stage : std::uint8_t { ingest, solve, validate, communities, voters, classify, figures };

std::string_view to_string(Stage stage) noexcept;

class StageError : public Error {
public:
    StageError(Stage stage, const std::string& cause);
    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

struct PipelineConfig {
    std::filesystem::path posts;
    std::filesystem::path knowledge_base;
    std::filesystem::path out_dir = "run";

    std::set<PostKind> kinds = default_post_kinds();
    DomainMode domain_mode = DomainMode::host;
    double tol = 1e-8;
    std::size_t max_iter = 10000;
    double alpha = 0.05;
    TailMethod tail = TailMethod::exact;
    std::uint64_t louvain_seed = 42;
    double resolution = 1.0;
    bool weight_edges = false;
    std::vector<Strategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
    std::size_t theta_min = 0;
    std::size_t theta_max = 30;
    std::size_t folds = 10;
    std::uint64_t cv_seed = 7;
    bool exclude_self_votes = false;

    void validate() const; // throws Error
    nlohmann::ordered_json to_json() const;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);
std::string hex(std::uint64_t value);

// One (strategy, theta) cell of the sweep.
struct SweepRow {
    Strategy strategy = Strategy::users_all;
    std::size_t theta = 0;
    std::size_t n_selected = 0; // after the diet filter
    std::size_t n_voters = 0;   // of those, with a defined value
    CoverageReport coverage;
    std::size_t n_scored = 0;
    std::optional<CvReport> cv; // absent when a class has fewer than 2 samples
    std::size_t knowledge = 0;
};

struct RunSummary {
    std::filesystem::path dir;
    std::string ingest_hash, solve_hash, validate_hash, communities_hash;
    std::vector<bool> cached; // solve, validate, communities
    std::size_t n_users = 0, n_articles = 0, n_publishers = 0, n_interactions = 0;
    std::size_t n_validated_edges = 0, n_validated_nodes = 0, n_communities = 0;
    double modularity = 0.0;
    std::vector<SweepRow> sweep;
};

// Runs every stage up to and including `last`; earlier cached stages whose
// config hash matches are reloaded instead of recomputed. Throws StageError.
RunSummary run_pipeline(const PipelineConfig& config, Stage last = Stage::classify);

// Figure tables from a completed run. Throws StageError listing missing stages.
std::vector<std::filesystem::path> emit_figures(const std::filesystem::path& run_dir);

} // namespace trustnet
