#pragma once

#include <filesystem>
#include <memory>

#include "ideation/corpus/corpus_index.hpp"

namespace ideation::corpus {

struct LoadedCorpus {
    std::shared_ptr<CorpusIndex> index;
    IngestReport report;
};

/// Opens either a JSON-lines corpus (embedding every record with `provider`)
/// or a snapshot written by CorpusIndex::save_snapshot, detected from the
/// first non-empty line. Relative full_text_uri values resolve against the
/// file's directory.
LoadedCorpus open_corpus(const std::filesystem::path& path, EmbeddingProvider& provider);

}  // namespace ideation::corpus
