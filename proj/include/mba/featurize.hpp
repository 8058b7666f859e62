#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mba/core.hpp"

namespace mba {

struct HashFeaturizerConfig {
    std::size_t dim = 256;
    std::size_t ngram_max = 2;
    bool normalize = true;  // L2

    void validate() const;
    friend bool operator==(const HashFeaturizerConfig&, const HashFeaturizerConfig&) = default;
};

/// 64-bit FNV-1a over the raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Lowercased word tokens. A word is a maximal run of ASCII letters/digits
/// and non-ASCII code points; everything else separates words. Only ASCII is
/// case-folded.
std::vector<std::string> tokenize(std::string_view text);

/// Signed feature hashing of token n-grams (n = 1..ngram_max, joined by a
/// single space). Empty text yields the zero vector.
FeatureVector hash_features(std::string_view text, const HashFeaturizerConfig& config);

/// Precomputed query vectors keyed by query id.
class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const FeatureVector* find(const std::string& query_id) const;
    /// Throws DimensionError / DuplicateError.
    void insert(std::string query_id, FeatureVector vector);
    const std::map<std::string, FeatureVector>& entries() const noexcept { return entries_; }

    friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

private:
    std::size_t dim_;
    std::map<std::string, FeatureVector> entries_;
};

// `#dim <D>` header, then one `<query_id>\t<f1> ... <fD>` line per entry.
EmbeddingTable load_embeddings(const std::filesystem::path& path);
EmbeddingTable parse_embeddings(std::string_view content);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);
std::string format_embeddings(const EmbeddingTable& table);

struct FeaturizerOptions {
    HashFeaturizerConfig hashing;
    /// Hash queries missing from the embedding table instead of failing.
    bool fallback_to_hash = true;
};

/// Resolves a query's features: precomputed on the query, then the
/// embedding table (if any), then hashing.
class Featurizer {
public:
    explicit Featurizer(FeaturizerOptions options,
                        std::shared_ptr<const EmbeddingTable> table = nullptr);

    FeatureVector operator()(const Query& query) const;
    std::size_t dim() const noexcept;
    const FeaturizerOptions& options() const noexcept { return options_; }
    const EmbeddingTable* table() const noexcept { return table_.get(); }

private:
    FeaturizerOptions options_;
    std::shared_ptr<const EmbeddingTable> table_;
};

FeatureVector featurize(const Query& query, const FeaturizerOptions& options,
                        const EmbeddingTable* table);

}  // namespace mba
