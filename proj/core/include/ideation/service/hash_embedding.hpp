#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ideation/corpus/embedding.hpp"

namespace ideation::service {

/// Offline embedder: a signed feature-hashed bag of lowercase alphanumeric
/// words (English stop words dropped), L2-normalized. Deterministic and
/// dependency-free, so corpora and golden runs are reproducible without a
/// model endpoint.
class HashEmbeddingProvider final : public corpus::EmbeddingProvider {
public:
    explicit HashEmbeddingProvider(std::size_t dimension = 256);

    std::string model_id() const override;
    std::size_t dimension() const override { return dimension_; }
    std::vector<std::vector<float>> embed(std::span<const corpus::EmbeddingInput> inputs) override;

    std::vector<float> embed_text(std::string_view text) const;

private:
    std::size_t dimension_;
};

/// Lowercase alphanumeric words of `text` minus stop words.
std::vector<std::string> content_words(std::string_view text);

}  // namespace ideation::service
