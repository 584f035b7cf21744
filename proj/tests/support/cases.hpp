#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ideation/corpus/paper.hpp"
#include "ideation/service/config.hpp"
#include "ideation/service/headless.hpp"

namespace ideation::support {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& prefix = "ideation");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

void write_text(const std::filesystem::path& p, const std::string& content);
std::string read_text(const std::filesystem::path& p);
void write_corpus(const std::filesystem::path& p, const std::vector<corpus::PaperRecord>& records);

/// Pseudo-words built from syllables; distinct for distinct indices.
std::string pseudo_word(std::size_t index);

std::vector<corpus::PaperRecord> random_corpus(std::size_t n, std::uint32_t seed);
std::vector<std::string> random_queries(std::size_t n, std::uint32_t seed);
/// Random paragraphs with uneven whitespace (tabs, runs of spaces, newlines).
std::vector<std::string> random_paragraphs(std::size_t n, std::uint32_t seed);

/// A scripted end-to-end scenario: corpus, proposal, and the headless script
/// (fixtures plus gate decisions).
struct Case {
    std::string name;
    std::vector<corpus::PaperRecord> corpus;
    std::map<std::string, std::string> full_texts;  // relative path -> content
    nlohmann::json proposal;
    nlohmann::json script;
};

/// Peer-review scenario: 60 papers, 50 retrieved, one question, five Yes
/// verdicts, one rejected at review, four gap groups, edited rewrite accepted.
Case golden_peer_review();

/// QA-metric scenario: no Yes verdicts, then method synthesis over four
/// similar and two sub-problems (40 distinct papers, 17 Yes, 11 kept, 10 methods).
Case golden_qa_metric();

/// Problem texts of the QA-metric scenario and, per problem, the ids of the
/// papers written for it (the intended top-10).
std::vector<std::string> qa_metric_problems();
std::vector<std::vector<std::string>> qa_metric_groups();

/// `answer` is the P3 response for every pair.
Case uniform_answer_case(const std::string& answer, std::size_t papers = 50);

/// Every P3 answer is Yes and every Gate E asks to iterate.
Case always_yes_case(int loop_cap, std::size_t papers = 10);

/// P3 calls for every tenth paper time out on every attempt; two papers
/// answer Yes, the rest No.
Case fail_soft_case();

struct CaseRun {
    service::HeadlessResult result;
    std::filesystem::path out;
};

/// Writes the corpus and full texts under `dir`, then runs the case headlessly.
CaseRun run_case(const Case& c, const std::filesystem::path& dir);

/// Config used by run_case: hash embeddings, corpus under `dir`, no fsync.
service::ServiceConfig case_config(const std::filesystem::path& dir);

}  // namespace ideation::support
