#pragma once

#include <string>
#include <vector>

#include "ztac/embedding.hpp"
#include "ztac/trust.hpp"

namespace ztac {

// Owns the co-occurrence model and embedding store a scoring call borrows.
struct ModelBundle {
    CooccurrenceModel cooccurrence;
    EmbeddingStore store;

    ScoringModels view() const { return {store, cooccurrence}; }
};

/// Co-occurrence model over `documents` (one document per entry). The store is
/// loaded from `embeddings_path` when non-empty, otherwise derived from the model.
ModelBundle build_models(const std::vector<std::string>& documents, std::size_t window,
                         const std::string& embeddings_path = {});

/// Models over the generated default corpus.
const ModelBundle& default_models();

/// One document per non-empty line of a text file. Throws Error when unreadable.
std::vector<std::string> read_corpus_file(const std::string& path);

}  // namespace ztac
