#pragma once

#include "trustnet/ingest.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace testing {

struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag)
    {
        path = std::filesystem::temp_directory_path() /
               ("trustnet_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// One original post per (user, url) share.
inline trustnet::Corpus corpus_of(const std::vector<std::pair<std::string, std::string>>& shares)
{
    std::vector<trustnet::RawPost> posts;
    for (std::size_t i = 0; i < shares.size(); ++i)
        posts.push_back({"p" + std::to_string(i), shares[i].first, static_cast<std::int64_t>(i),
                         {shares[i].second}, trustnet::PostKind::original});
    return trustnet::build_corpus(posts);
}

inline trustnet::PublisherTrust trust_of(const trustnet::Corpus& corpus,
                                         const std::vector<std::pair<std::string, std::optional<int>>>& entries)
{
    trustnet::KnowledgeBase kb;
    for (const auto& [d, s] : entries)
        kb.set(d, s);
    return trustnet::align(kb, corpus);
}

} // namespace testing
