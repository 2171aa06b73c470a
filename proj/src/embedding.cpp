#include "ztac/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ztac/error.hpp"
#include "ztac/text.hpp"

namespace ztac {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

double l2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

constexpr std::uint64_t pair_key(std::size_t a, std::size_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::vector<EmbeddingVector> vectors) : vectors_(std::move(vectors)) {
    if (!vectors_.empty()) dimension_ = vectors_.front().values.size();
    if (!vectors_.empty() && dimension_ == 0) throw InvalidArgument("embedding dimension must be at least 1");
    norms_.reserve(vectors_.size());
    index_.reserve(vectors_.size());
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        const auto& v = vectors_[i];
        if (v.values.size() != dimension_) {
            throw InvalidArgument("token '" + v.token + "' has dimension " + std::to_string(v.values.size()) +
                                  ", expected " + std::to_string(dimension_));
        }
        const double n = l2(v.values);
        if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("token '" + v.token + "' has a zero or non-finite vector");
        if (!index_.emplace(v.token, i).second) throw InvalidArgument("duplicate token '" + v.token + "'");
        norms_.push_back(n);
    }
}

const EmbeddingVector* EmbeddingStore::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? nullptr : &vectors_[it->second];
}

const EmbeddingVector& EmbeddingStore::at(std::string_view token) const {
    if (const auto* v = find(token)) return *v;
    throw UnknownToken("unknown token '" + std::string(token) + "'");
}

EmbeddingStore load_embeddings(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("missing '<count> <dimension>' header", 1);
    ++line_no;
    const auto header = split_fields(line);
    std::size_t count = 0;
    std::size_t dim = 0;
    if (header.size() != 2 || !parse_number(header[0], count) || !parse_number(header[1], dim)) {
        throw ParseError("malformed header, expected '<count> <dimension>'", line_no);
    }
    if (dim == 0) throw ParseError("dimension must be at least 1", line_no);

    std::vector<EmbeddingVector> vectors;
    vectors.reserve(count);
    std::unordered_map<std::string, std::size_t> seen;
    while (vectors.size() < count) {
        if (!std::getline(in, line)) {
            throw ParseError("expected " + std::to_string(count) + " vectors, found " + std::to_string(vectors.size()),
                             line_no + 1);
        }
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) throw ParseError("empty line inside vector block", line_no);
        if (fields.size() != dim + 1) {
            throw ParseError("dimension mismatch: expected " + std::to_string(dim) + " values, found " +
                                 std::to_string(fields.size() - 1),
                             line_no);
        }
        EmbeddingVector v{std::string(fields[0]), std::vector<double>(dim)};
        for (std::size_t j = 0; j < dim; ++j) {
            if (!parse_number(fields[j + 1], v.values[j]) || !std::isfinite(v.values[j])) {
                throw ParseError("invalid number '" + std::string(fields[j + 1]) + "'", line_no);
            }
        }
        if (!seen.emplace(v.token, line_no).second) throw ParseError("duplicate token '" + v.token + "'", line_no);
        if (std::all_of(v.values.begin(), v.values.end(), [](double x) { return x == 0.0; })) {
            throw ParseError("zero vector for token '" + v.token + "'", line_no);
        }
        vectors.push_back(std::move(v));
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!split_fields(line).empty()) throw ParseError("more vectors than declared in header", line_no);
    }
    return EmbeddingStore(std::move(vectors));
}

EmbeddingStore load_embeddings_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open embeddings file '" + path + "'");
    return load_embeddings(in);
}

void write_embeddings(std::ostream& out, const EmbeddingStore& store) {
    out << store.size() << ' ' << store.dimension() << '\n';
    char buf[64];
    for (const auto& v : store.vectors()) {
        out << v.token;
        for (double x : v.values) {
            auto res = std::to_chars(buf, buf + sizeof buf, x);
            out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
        }
        out << '\n';
    }
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidArgument("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    const double na = l2(a);
    const double nb = l2(b);
    if (!(na > 0.0) || !(nb > 0.0)) throw InvalidArgument("cosine similarity of a zero-norm vector");
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    return cosine_similarity(std::span<const double>(a.values), std::span<const double>(b.values));
}

std::vector<Neighbor> top_k_context(const EmbeddingStore& store, std::string_view token, std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    const auto& query = store.at(token);
    std::vector<Neighbor> all;
    all.reserve(store.size());
    for (const auto& v : store.vectors()) {
        if (v.token == query.token) continue;
        all.push_back({v.token, cosine_similarity(query, v)});
    }
    const auto by_rank = [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.token < b.token;
    };
    const std::size_t take = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(), by_rank);
    all.resize(take);
    return all;
}

long CooccurrenceModel::id_of(std::string_view token) const {
    auto it = ids_.find(std::string(token));
    return it == ids_.end() ? -1 : static_cast<long>(it->second);
}

std::uint64_t CooccurrenceModel::token_count(std::string_view token) const {
    const long id = id_of(token);
    return id < 0 ? 0 : token_counts_[static_cast<std::size_t>(id)];
}

std::uint64_t CooccurrenceModel::pair_count(std::string_view a, std::string_view b) const {
    const long ia = id_of(a);
    const long ib = id_of(b);
    if (ia < 0 || ib < 0) return 0;
    auto it = pair_counts_.find(pair_key(static_cast<std::size_t>(ia), static_cast<std::size_t>(ib)));
    return it == pair_counts_.end() ? 0 : it->second;
}

std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> CooccurrenceModel::pairs() const {
    std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> out;
    out.reserve(pair_counts_.size());
    for (const auto& [key, count] : pair_counts_) {
        out.emplace_back(static_cast<std::size_t>(key >> 32), static_cast<std::size_t>(key & 0xffffffffULL), count);
    }
    std::sort(out.begin(), out.end());
    return out;
}

CooccurrenceModel build_cooccurrence(const std::vector<std::vector<std::string>>& corpus, std::size_t window) {
    if (window == 0) throw InvalidArgument("co-occurrence window must be at least 1");
    CooccurrenceModel model;
    model.window_ = window;

    std::vector<std::string> vocab;
    for (const auto& doc : corpus) vocab.insert(vocab.end(), doc.begin(), doc.end());
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    model.vocabulary_ = std::move(vocab);
    model.ids_.reserve(model.vocabulary_.size());
    for (std::size_t i = 0; i < model.vocabulary_.size(); ++i) model.ids_.emplace(model.vocabulary_[i], i);
    model.token_counts_.assign(model.vocabulary_.size(), 0);

    std::vector<std::size_t> ids;
    for (const auto& doc : corpus) {
        ids.clear();
        for (const auto& t : doc) ids.push_back(model.ids_.at(t));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            ++model.token_counts_[ids[i]];
            const std::size_t hi = std::min(ids.size(), i + window + 1);
            for (std::size_t j = i + 1; j < hi; ++j) {
                ++model.pair_counts_[pair_key(ids[i], ids[j])];
                ++model.pair_counts_[pair_key(ids[j], ids[i])];
                model.total_pairs_ += 2;
            }
        }
        model.total_ += ids.size();
    }
    return model;
}

CooccurrenceModel build_cooccurrence_from_text(std::istream& in, std::size_t window) {
    std::vector<std::vector<std::string>> corpus;
    std::string line;
    while (std::getline(in, line)) {
        auto tokens = tokenize(line);
        if (!tokens.empty()) corpus.push_back(std::move(tokens));
    }
    return build_cooccurrence(corpus, window);
}

double attribute_weight(const CooccurrenceModel& model, std::string_view a, std::string_view b,
                        WeightOrientation orientation) {
    for (auto token : {a, b}) {
        if (!model.contains(token)) throw UnknownToken("token '" + std::string(token) + "' not in co-occurrence model");
    }
    const auto joint = static_cast<double>(model.pair_count(a, b));
    const auto given = static_cast<double>(
        model.token_count(orientation == WeightOrientation::GivenFirst ? a : b));
    return std::clamp(joint / given, 0.0, 1.0);
}

AttributeEmbedding embed_attribute(const EmbeddingStore& store, std::string_view attribute) {
    const auto tokens = tokenize(attribute);
    AttributeEmbedding out;
    out.vector.token = std::string(attribute);
    out.vector.values.assign(store.dimension(), 0.0);
    for (const auto& t : tokens) {
        const auto* v = store.find(t);
        if (v == nullptr) {
            ++out.skipped_tokens;
            continue;
        }
        for (std::size_t j = 0; j < v->values.size(); ++j) out.vector.values[j] += v->values[j];
        out.tokens.push_back(t);
    }
    if (out.tokens.empty()) {
        std::string listed;
        for (const auto& t : tokens) listed += (listed.empty() ? "" : ", ") + t;
        throw UnknownToken("attribute '" + std::string(attribute) + "' has no in-vocabulary token [" + listed + "]");
    }
    const auto n = static_cast<double>(out.tokens.size());
    for (double& x : out.vector.values) x /= n;
    return out;
}

EmbeddingStore derive_embeddings_from_cooccurrence(const CooccurrenceModel& model, std::size_t max_vocabulary) {
    if (model.empty()) throw InvalidArgument("cannot derive embeddings from an empty co-occurrence model");
    if (max_vocabulary == 0) throw InvalidArgument("vocabulary cap must be at least 1");
    const auto& vocab = model.vocabulary();

    std::vector<double> row_sum(vocab.size(), 0.0);
    const auto all_pairs = model.pairs();
    for (const auto& [a, b, c] : all_pairs) row_sum[a] += static_cast<double>(c);
    const auto grand = static_cast<double>(model.total_pairs());

    std::vector<std::size_t> order(vocab.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return model.token_count(vocab[a]) > model.token_count(vocab[b]);
    });
    if (order.size() > max_vocabulary) order.resize(max_vocabulary);
    std::sort(order.begin(), order.end());

    std::vector<long> column(vocab.size(), -1);
    for (std::size_t j = 0; j < order.size(); ++j) column[order[j]] = static_cast<long>(j);

    std::vector<std::vector<double>> rows(order.size(), std::vector<double>(order.size(), 0.0));
    for (const auto& [a, b, c] : all_pairs) {
        if (column[a] < 0 || column[b] < 0) continue;
        const double pmi = std::log(static_cast<double>(c) * grand / (row_sum[a] * row_sum[b]));
        if (pmi > 0.0) rows[static_cast<std::size_t>(column[a])][static_cast<std::size_t>(column[b])] = pmi;
    }

    std::vector<EmbeddingVector> vectors;
    for (std::size_t j = 0; j < order.size(); ++j) {
        auto& row = rows[j];
        if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) continue;
        vectors.push_back({vocab[order[j]], std::move(row)});
    }
    if (vectors.empty()) throw InvalidArgument("co-occurrence model yields no positive PMI context");
    return EmbeddingStore(std::move(vectors));
}

}  // namespace ztac
