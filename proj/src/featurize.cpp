#include "mba/featurize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mba/errors.hpp"
#include "mba/kernels.hpp"

namespace mba {

void HashFeaturizerConfig::validate() const {
    if (dim < 1) {
        throw ConfigError("featurizer.dim must be >= 1");
    }
    if (ngram_max < 1) {
        throw ConfigError("featurizer.ngram_max must be >= 1");
    }
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char byte : bytes) {
        hash ^= byte;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto byte = static_cast<unsigned char>(ch);
        if (byte >= 0x80) {
            current.push_back(ch);  // part of a multi-byte code point
        } else if (byte >= 'A' && byte <= 'Z') {
            current.push_back(static_cast<char>(byte - 'A' + 'a'));
        } else if ((byte >= 'a' && byte <= 'z') || (byte >= '0' && byte <= '9')) {
            current.push_back(ch);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

FeatureVector hash_features(std::string_view text, const HashFeaturizerConfig& config) {
    config.validate();
    std::vector<double> values(config.dim, 0.0);
    const auto tokens = tokenize(text);
    std::string gram;
    for (std::size_t n = 1; n <= config.ngram_max; ++n) {
        for (std::size_t start = 0; start + n <= tokens.size(); ++start) {
            gram = tokens[start];
            for (std::size_t k = 1; k < n; ++k) {
                gram += ' ';
                gram += tokens[start + k];
            }
            const std::uint64_t hash = fnv1a64(gram);
            const double sign = (hash >> 63) == 0 ? 1.0 : -1.0;
            values[hash % config.dim] += sign;
        }
    }
    if (config.normalize) {
        const double norm = std::sqrt(kernels::dot(values, values));
        if (norm > 0.0) {
            for (auto& v : values) {
                v /= norm;
            }
        }
    }
    return FeatureVector(std::move(values));
}

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
    if (dim == 0) {
        throw DimensionError("embedding dim must be positive");
    }
}

const FeatureVector* EmbeddingTable::find(const std::string& query_id) const {
    auto it = entries_.find(query_id);
    return it == entries_.end() ? nullptr : &it->second;
}

void EmbeddingTable::insert(std::string query_id, FeatureVector vector) {
    if (vector.dim() != dim_) {
        throw DimensionError("embedding for '" + query_id + "' has " +
                             std::to_string(vector.dim()) + " values, expected " +
                             std::to_string(dim_));
    }
    if (entries_.contains(query_id)) {
        throw DuplicateError("duplicate embedding for query '" + query_id + "'");
    }
    entries_.emplace(std::move(query_id), std::move(vector));
}

namespace {

std::size_t parse_header(std::string_view line) {
    constexpr std::string_view prefix = "#dim ";
    if (!line.starts_with(prefix)) {
        throw FormatError("embedding file line 1: expected '#dim <D>' header");
    }
    // Free text may follow the dimension, e.g. the exporter's pooling note.
    auto digits = line.substr(prefix.size());
    digits = digits.substr(0, digits.find_first_of(" \t"));
    std::size_t dim = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), dim);
    if (ec != std::errc{} || end != digits.data() + digits.size() || dim == 0) {
        throw FormatError("embedding file line 1: invalid dimension '" + std::string(digits) + "'");
    }
    return dim;
}

}  // namespace

EmbeddingTable parse_embeddings(std::string_view content) {
    std::istringstream in{std::string(content)};
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("embedding file is empty");
    }
    EmbeddingTable table(parse_header(line));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw FormatError("embedding file line " + std::to_string(line_no) +
                              ": expected '<query_id>\\t<values>'");
        }
        std::string id = line.substr(0, tab);
        std::vector<double> values;
        values.reserve(table.dim());
        std::istringstream fields(line.substr(tab + 1));
        std::string field;
        while (fields >> field) {
            double v = 0.0;
            auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc{} || end != field.data() + field.size() || !std::isfinite(v)) {
                throw FormatError("embedding file line " + std::to_string(line_no) +
                                  ": invalid number '" + field + "'");
            }
            values.push_back(v);
        }
        if (values.size() != table.dim()) {
            throw DimensionError("embedding file line " + std::to_string(line_no) + ": " +
                                 std::to_string(values.size()) + " values, expected " +
                                 std::to_string(table.dim()));
        }
        if (table.find(id) != nullptr) {
            throw DuplicateError("embedding file line " + std::to_string(line_no) +
                                 ": duplicate query id '" + id + "'");
        }
        table.insert(std::move(id), FeatureVector(std::move(values)));
    }
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open embedding file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_embeddings(buffer.str());
}

std::string format_embeddings(const EmbeddingTable& table) {
    std::string out = "#dim " + std::to_string(table.dim()) + "\n";
    char buf[64];
    for (const auto& [id, vector] : table.entries()) {
        out += id;
        out += '\t';
        bool first = true;
        for (double v : vector.values()) {
            if (!first) {
                out += ' ';
            }
            first = false;
            // Shortest representation that round-trips (up to 17 digits).
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out.append(buf, end);
        }
        out += '\n';
    }
    return out;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write embedding file " + path.string());
    }
    out << format_embeddings(table);
}

Featurizer::Featurizer(FeaturizerOptions options, std::shared_ptr<const EmbeddingTable> table)
    : options_(options), table_(std::move(table)) {
    options_.hashing.validate();
    if (table_ && options_.fallback_to_hash && table_->dim() != options_.hashing.dim) {
        throw ConfigError("featurizer.dim (" + std::to_string(options_.hashing.dim) +
                          ") must equal the embedding dim (" + std::to_string(table_->dim()) +
                          ") when hash fallback is enabled");
    }
}

std::size_t Featurizer::dim() const noexcept {
    return table_ ? table_->dim() : options_.hashing.dim;
}

FeatureVector Featurizer::operator()(const Query& query) const {
    return featurize(query, options_, table_.get());
}

FeatureVector featurize(const Query& query, const FeaturizerOptions& options,
                        const EmbeddingTable* table) {
    if (query.features) {
        return *query.features;
    }
    if (table != nullptr) {
        if (const auto* found = table->find(query.id)) {
            return *found;
        }
        if (!options.fallback_to_hash) {
            throw LookupError("query '" + query.id + "' not found in embedding table");
        }
    }
    return hash_features(query.text, options.hashing);
}

}  // namespace mba
