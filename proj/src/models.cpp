#include "ztac/models.hpp"

#include <fstream>

#include "ztac/error.hpp"
#include "ztac/synth.hpp"
#include "ztac/text.hpp"

namespace ztac {

ModelBundle build_models(const std::vector<std::string>& documents, std::size_t window,
                         const std::string& embeddings_path) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(documents.size());
    for (const auto& d : documents) tokens.push_back(tokenize(d));
    ModelBundle out;
    out.cooccurrence = build_cooccurrence(tokens, window);
    out.store = embeddings_path.empty() ? derive_embeddings_from_cooccurrence(out.cooccurrence)
                                        : load_embeddings_file(embeddings_path);
    return out;
}

const ModelBundle& default_models() {
    static const ModelBundle bundle =
        build_models(generate_corpus(kDefaultCorpusSeed, kDefaultCorpusDocuments), kDefaultCorpusWindow);
    return bundle;
}

std::vector<std::string> read_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file '" + path + "'");
    std::vector<std::string> docs;
    for (std::string line; std::getline(in, line);) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) docs.push_back(line);
    }
    return docs;
}

}  // namespace ztac
