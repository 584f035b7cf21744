#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ideation/corpus/paper.hpp"

namespace ideation::corpus {

/// One (title, abstract) pair as sent to a document embedder. Free-text
/// queries travel as a title with an empty abstract.
struct EmbeddingInput {
    std::string title;
    std::string abstract;
};

/// Document embedder. Implementations must be deterministic for a fixed
/// input and thread-safe for concurrent `embed` calls.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::string model_id() const = 0;
    virtual std::size_t dimension() const = 0;

    /// Returns one vector per input, in order. Throws ideation::Error with
    /// ProviderUnreachable/Timeout (retryable) or ProviderRejected.
    virtual std::vector<std::vector<float>> embed(std::span<const EmbeddingInput> inputs) = 0;

    virtual bool reachable() { return true; }
};

/// Embeds inputs and checks the batch contract: one vector per input, each of
/// the provider's dimension, every component finite.
std::vector<std::vector<float>> embed_checked(EmbeddingProvider& provider,
                                              std::span<const EmbeddingInput> inputs);

DocEmbedding embed_document(std::string_view title, std::string_view abstract,
                            EmbeddingProvider& provider);

double cosine(std::span<const float> a, std::span<const float> b) noexcept;
double l2_norm(std::span<const float> v) noexcept;

}  // namespace ideation::corpus
