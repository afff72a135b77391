#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "leanctx/embedder.hpp"
#include "leanctx/sentences.hpp"
#include "leanctx/tokenizer.hpp"

namespace leanctx {

struct Document {
    std::string doc_id;
    std::string text;
};

struct Chunk {
    std::string chunk_id;
    std::string doc_id;
    int seq_index = 0;
    std::string text;
    std::vector<double> embedding;
};

enum class ChunkUnit {
    Tokens,
    Characters,
};

struct StoreConfig {
    int chunk_size = 500;
    int chunk_overlap = 0;
    ChunkUnit unit = ChunkUnit::Tokens;
};

// Ordered sentences assembled from retrieved chunks for one query.
struct Context {
    std::string query_id;
    std::vector<std::string> sentences;
    std::vector<std::string> source_chunk_ids;
};

// Sentences joined with single spaces.
std::string context_text(const Context& context);

// Sliding-window splitter. Windows hold complete measurement units (tokens or
// UTF-8 code points) and advance by chunk_size - overlap units; with zero
// overlap the chunk texts concatenate back to doc.text byte-for-byte.
std::vector<Chunk> split_document(const Document& doc, int chunk_size, int overlap,
                                  ChunkUnit unit, const Tokenizer& tokenizer);

// In-memory vector index over chunks. Ingestion is single-writer; reads are
// safe to share once ingestion is done.
class VectorStore {
public:
    VectorStore(int dimension, StoreConfig config);

    int dimension() const { return dimension_; }
    const StoreConfig& config() const { return config_; }
    const std::vector<Chunk>& chunks() const { return chunks_; }
    bool empty() const { return chunks_.empty(); }

    // Splits, embeds, and stores one document. Returns the number of chunks added.
    int ingest(const Document& doc, const Embedder& embedder, const Tokenizer& tokenizer);

    // Adds a pre-built chunk after validating dimension and unit norm.
    void add_chunk(Chunk chunk);

    // Top-N chunks by cosine similarity to the query embedding, ties broken by
    // (doc_id, seq_index) ascending.
    std::vector<Chunk> retrieve_top_n(std::span<const double> query_embedding, int n) const;

    void save(const std::filesystem::path& path) const;
    static VectorStore load(const std::filesystem::path& path);

private:
    int dimension_;
    StoreConfig config_;
    std::vector<Chunk> chunks_;
    std::map<std::string, int> next_seq_;
};

// Retrieves the top-N chunks for the query, re-sorts them into document order
// (doc_id, seq_index), and segments each chunk into sentences.
Context build_context(const VectorStore& store, const std::string& query, int n,
                      const Embedder& embedder, const SegmenterOptions& segmenter = {},
                      const std::string& query_id = "");

} // namespace leanctx
