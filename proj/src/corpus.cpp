#include "leanctx/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "leanctx/errors.hpp"
#include "leanctx/vecmath.hpp"

namespace leanctx {

namespace {

// Start offsets of the measurement units in text. For tokens these are the
// token spans' begins; for characters, UTF-8 code point starts.
std::vector<std::size_t> unit_starts(const std::string& text, ChunkUnit unit,
                                     const Tokenizer& tokenizer) {
    std::vector<std::size_t> starts;
    if (unit == ChunkUnit::Tokens) {
        for (const Token& token : tokenizer.tokenize(text)) {
            starts.push_back(token.begin);
        }
    } else {
        for (std::size_t i = 0; i < text.size(); ++i) {
            const unsigned char c = static_cast<unsigned char>(text[i]);
            if ((c & 0xC0) != 0x80) { // not a UTF-8 continuation byte
                starts.push_back(i);
            }
        }
    }
    return starts;
}

std::string unit_name(ChunkUnit unit) {
    return unit == ChunkUnit::Tokens ? "tokens" : "characters";
}

ChunkUnit unit_from_name(const std::string& name) {
    if (name == "tokens") {
        return ChunkUnit::Tokens;
    }
    if (name == "characters") {
        return ChunkUnit::Characters;
    }
    throw CorruptStoreFile("unknown chunk unit: " + name);
}

} // namespace

std::string context_text(const Context& context) {
    std::string out;
    for (std::size_t i = 0; i < context.sentences.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += context.sentences[i];
    }
    return out;
}

std::vector<Chunk> split_document(const Document& doc, int chunk_size, int overlap,
                                  ChunkUnit unit, const Tokenizer& tokenizer) {
    if (doc.text.empty()) {
        throw EmptyDocument("document " + doc.doc_id + " has no text");
    }
    if (chunk_size <= 0) {
        throw InvalidConfig("chunk_size must be positive");
    }
    if (overlap < 0 || overlap >= chunk_size) {
        throw InvalidConfig("chunk_overlap must satisfy 0 <= overlap < chunk_size");
    }

    const std::vector<std::size_t> starts = unit_starts(doc.text, unit, tokenizer);
    const std::size_t n = starts.size();
    const std::size_t size = static_cast<std::size_t>(chunk_size);
    const std::size_t stride = static_cast<std::size_t>(chunk_size - overlap);

    // Text between unit i-1 and unit i belongs to the chunk ending at i, so a
    // cut at unit index i lands on that unit's first byte.
    auto cut = [&](std::size_t unit_index) {
        if (unit_index == 0) {
            return std::size_t{0};
        }
        if (unit_index >= n) {
            return doc.text.size();
        }
        return starts[unit_index];
    };

    std::vector<Chunk> chunks;
    std::size_t begin = 0;
    int seq = 0;
    while (true) {
        const std::size_t end = std::min(begin + size, n);
        Chunk chunk;
        chunk.doc_id = doc.doc_id;
        chunk.seq_index = seq;
        chunk.chunk_id = doc.doc_id + "#" + std::to_string(seq);
        chunk.text = doc.text.substr(cut(begin), cut(end) - cut(begin));
        chunks.push_back(std::move(chunk));
        ++seq;
        if (end >= n) {
            break;
        }
        begin += stride;
    }
    return chunks;
}

VectorStore::VectorStore(int dimension, StoreConfig config)
    : dimension_(dimension), config_(config) {
    if (dimension <= 0) {
        throw InvalidConfig("store dimension must be positive");
    }
    if (config.chunk_size <= 0 || config.chunk_overlap < 0 ||
        config.chunk_overlap >= config.chunk_size) {
        throw InvalidConfig("store chunking config invalid");
    }
}

int VectorStore::ingest(const Document& doc, const Embedder& embedder,
                        const Tokenizer& tokenizer) {
    if (doc.doc_id.empty()) {
        throw InvalidConfig("doc_id must be non-empty");
    }
    if (next_seq_.count(doc.doc_id) != 0) {
        throw InvalidConfig("doc_id already ingested: " + doc.doc_id);
    }
    std::vector<Chunk> chunks =
        split_document(doc, config_.chunk_size, config_.chunk_overlap, config_.unit, tokenizer);
    for (Chunk& chunk : chunks) {
        chunk.embedding = embedder.embed(chunk.text);
        add_chunk(std::move(chunk));
    }
    return static_cast<int>(chunks.size());
}

void VectorStore::add_chunk(Chunk chunk) {
    if (static_cast<int>(chunk.embedding.size()) != dimension_) {
        throw DimensionMismatch("chunk embedding dimension " +
                                std::to_string(chunk.embedding.size()) +
                                " does not match store dimension " +
                                std::to_string(dimension_));
    }
    const double norm = l2_norm(chunk.embedding);
    if (std::abs(norm - 1.0) > 1e-6) {
        throw InvalidConfig("chunk embedding is not unit norm: " + std::to_string(norm));
    }
    int& next = next_seq_[chunk.doc_id];
    if (chunk.seq_index != next) {
        throw InvalidConfig("chunk " + chunk.chunk_id + " has seq_index " +
                            std::to_string(chunk.seq_index) + ", expected " +
                            std::to_string(next) + " for doc " + chunk.doc_id);
    }
    ++next;
    chunks_.push_back(std::move(chunk));
}

std::vector<Chunk> VectorStore::retrieve_top_n(std::span<const double> query_embedding,
                                               int n) const {
    if (chunks_.empty()) {
        throw EmptyStore("cannot retrieve from an empty store");
    }
    if (static_cast<int>(query_embedding.size()) != dimension_) {
        throw DimensionMismatch("query embedding dimension " +
                                std::to_string(query_embedding.size()) +
                                " does not match store dimension " +
                                std::to_string(dimension_));
    }
    if (n <= 0) {
        throw InvalidConfig("retrieval N must be positive");
    }

    std::vector<std::size_t> order(chunks_.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::vector<double> similarity(chunks_.size());
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        similarity[i] = cosine_similarity(query_embedding, chunks_[i].embedding);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (similarity[a] != similarity[b]) {
            return similarity[a] > similarity[b];
        }
        const Chunk& ca = chunks_[a];
        const Chunk& cb = chunks_[b];
        if (ca.doc_id != cb.doc_id) {
            return ca.doc_id < cb.doc_id;
        }
        return ca.seq_index < cb.seq_index;
    });

    const std::size_t take = std::min(static_cast<std::size_t>(n), chunks_.size());
    std::vector<Chunk> result;
    result.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        result.push_back(chunks_[order[i]]);
    }
    return result;
}

void VectorStore::save(const std::filesystem::path& path) const {
    nlohmann::ordered_json doc;
    doc["dimension"] = dimension_;
    doc["config"] = {
        {"chunk_size", config_.chunk_size},
        {"chunk_overlap", config_.chunk_overlap},
        {"unit", unit_name(config_.unit)},
    };
    nlohmann::ordered_json chunk_array = nlohmann::ordered_json::array();
    for (const Chunk& chunk : chunks_) {
        chunk_array.push_back({
            {"chunk_id", chunk.chunk_id},
            {"doc_id", chunk.doc_id},
            {"seq_index", chunk.seq_index},
            {"text", chunk.text},
            {"embedding", chunk.embedding},
        });
    }
    doc["chunks"] = std::move(chunk_array);

    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open store file for writing: " + path.string());
    }
    out << doc.dump(2) << "\n";
}

VectorStore VectorStore::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open store file: " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
        StoreConfig config;
        config.chunk_size = doc.at("config").at("chunk_size").get<int>();
        config.chunk_overlap = doc.at("config").at("chunk_overlap").get<int>();
        config.unit = unit_from_name(doc.at("config").at("unit").get<std::string>());
        VectorStore store(doc.at("dimension").get<int>(), config);
        for (const auto& entry : doc.at("chunks")) {
            Chunk chunk;
            chunk.chunk_id = entry.at("chunk_id").get<std::string>();
            chunk.doc_id = entry.at("doc_id").get<std::string>();
            chunk.seq_index = entry.at("seq_index").get<int>();
            chunk.text = entry.at("text").get<std::string>();
            chunk.embedding = entry.at("embedding").get<std::vector<double>>();
            store.add_chunk(std::move(chunk));
        }
        return store;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptStoreFile("malformed store file " + path.string() + ": " + e.what());
    }
}

Context build_context(const VectorStore& store, const std::string& query, int n,
                      const Embedder& embedder, const SegmenterOptions& segmenter,
                      const std::string& query_id) {
    const std::vector<double> query_embedding = embedder.embed(query);
    std::vector<Chunk> retrieved = store.retrieve_top_n(query_embedding, n);

    std::sort(retrieved.begin(), retrieved.end(), [](const Chunk& a, const Chunk& b) {
        if (a.doc_id != b.doc_id) {
            return a.doc_id < b.doc_id;
        }
        return a.seq_index < b.seq_index;
    });

    Context context;
    context.query_id = query_id;
    for (const Chunk& chunk : retrieved) {
        context.source_chunk_ids.push_back(chunk.chunk_id);
        for (std::string& sentence : segment_sentences(chunk.text, segmenter)) {
            context.sentences.push_back(std::move(sentence));
        }
    }
    return context;
}

} // namespace leanctx
