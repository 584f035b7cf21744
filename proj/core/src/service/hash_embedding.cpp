#include "ideation/service/hash_embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <set>

#include "ideation/error.hpp"

namespace ideation::service {

namespace {

const std::set<std::string, std::less<>>& stop_words() {
    static const std::set<std::string, std::less<>> words = {
        "a",     "about", "above", "after", "again", "all",   "also",  "an",    "and",  "any",   "are",
        "as",    "at",    "be",    "been",  "being", "both",  "but",   "by",    "can",  "could", "did",
        "do",    "does",  "doing", "during", "each", "few",   "for",   "from",  "had",  "has",   "have",
        "having", "he",   "her",   "here",  "hers",  "him",   "his",   "how",   "i",    "if",    "in",
        "into",  "is",    "it",    "its",   "itself", "just", "may",   "me",    "might", "more", "most",
        "must",  "my",    "no",    "nor",   "not",   "now",   "of",    "off",   "on",   "once",  "only",
        "or",    "other", "our",   "ours",  "out",   "over",  "own",   "same",  "she",  "should", "so",
        "some",  "such",  "than",  "that",  "the",   "their", "theirs", "them", "then", "there", "these",
        "they",  "this",  "those", "through", "to",  "too",   "under", "until", "up",   "very",  "was",
        "we",    "were",  "what",  "when",  "where", "which", "while", "who",   "whom", "why",   "will",
        "with",  "would", "you",   "your",  "yours",
    };
    return words;
}

std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::vector<std::string> content_words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !stop_words().contains(cur)) out.push_back(cur);
        cur.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c))
            cur.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    return out;
}

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) fail(ErrorCode::Config, "hash embedding dimension must be positive");
}

std::string HashEmbeddingProvider::model_id() const { return "hash-fnv1a-d" + std::to_string(dimension_); }

std::vector<float> HashEmbeddingProvider::embed_text(std::string_view text) const {
    std::vector<double> acc(dimension_, 0.0);
    auto words = content_words(text);
    for (const auto& w : words) {
        auto h = fnv1a(w);
        acc[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
    }
    double norm = 0.0;
    for (double x : acc) norm += x * x;
    if (norm == 0.0) {
        auto h = fnv1a(text);
        acc[h % dimension_] = 1.0;
        norm = 1.0;
    }
    norm = std::sqrt(norm);
    std::vector<float> out(dimension_);
    for (std::size_t i = 0; i < dimension_; ++i) out[i] = static_cast<float>(acc[i] / norm);
    return out;
}

std::vector<std::vector<float>> HashEmbeddingProvider::embed(std::span<const corpus::EmbeddingInput> inputs) {
    std::vector<std::vector<float>> out;
    out.reserve(inputs.size());
    for (const auto& in : inputs) out.push_back(embed_text(in.title + "\n" + in.abstract));
    return out;
}

}  // namespace ideation::service
