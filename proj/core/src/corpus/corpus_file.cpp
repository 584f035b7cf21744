#include "ideation/corpus/corpus_file.hpp"

#include <fstream>
#include <sstream>

#include "ideation/error.hpp"
#include "ideation/text.hpp"

namespace ideation::corpus {

LoadedCorpus open_corpus(const std::filesystem::path& path, EmbeddingProvider& provider) {
    if (!std::filesystem::exists(path)) fail(ErrorCode::NotFound, "no corpus file at " + path.string());
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open corpus file " + path.string());

    bool snapshot = false;
    std::string line;
    std::streampos start = in.tellg();
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            snapshot = j.is_object() && j.contains("vector") && j.contains("model_id");
        } catch (const nlohmann::json::exception&) {
        }
        break;
    }
    in.clear();
    in.seekg(start);

    LoadedCorpus loaded{std::make_shared<CorpusIndex>(), {}};
    loaded.index->set_base_dir(std::filesystem::absolute(path).parent_path());
    if (snapshot) {
        loaded.report = loaded.index->load_snapshot(in);
        if (!loaded.index->empty() && loaded.index->model_id() != provider.model_id())
            fail(ErrorCode::Config, "snapshot " + path.string() + " was built with model '" +
                                        loaded.index->model_id() + "' but the configured embedder is '" +
                                        provider.model_id() + "'");
    } else {
        loaded.report = loaded.index->ingest_jsonl(in, provider);
    }
    return loaded;
}

}  // namespace ideation::corpus
