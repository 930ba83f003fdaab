#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anchormatch/embedding.hpp"
#include "anchormatch/features.hpp"
#include "anchormatch/graph.hpp"

namespace anchormatch {

/// Data edges sharing one key and one (L(from), L(to)) pair.
struct IndexEntry {
    Label from_label = 0;
    Label to_label = 0;
    std::vector<OrientedEdge> edges;  // sorted, unique

    bool operator==(const IndexEntry&) const = default;
};

/// Key components -> entries sorted by label pair.
using StarIndex = std::unordered_map<std::vector<std::int64_t>, std::vector<IndexEntry>, KeyComponentsHash>;
using PathIndex = std::unordered_map<PathCode, std::vector<OrientedEdge>, PathCodeHash>;

enum class IndexFamily : std::uint8_t { S, SPrime, P };

const char* to_string(IndexFamily family);

struct IndexMeta {
    std::uint64_t dstar = 0;
    std::uint32_t k = 1;
    BackendTag backend = BackendTag::Wl;
    std::uint64_t model_digest = 0;
    std::uint64_t graph_digest = 0;

    bool operator==(const IndexMeta&) const = default;
};

struct BuildStats {
    std::size_t star_insertions = 0;  // stars enumerated over iS and iS' edges
    std::size_t path_insertions = 0;  // path codes enumerated over iP edges
    std::size_t distinct_star_shapes = 0;
};

/// iS holds sparse-sparse and sparse-dense orientations keyed by stars at
/// `from`; iS' holds dense-sparse orientations keyed by stars at `to`; iP
/// holds dense-dense orientations keyed by path codes.
struct AnchorIndexes {
    IndexMeta meta;
    StarIndex star;
    StarIndex star_prime;
    PathIndex path;

    /// Edges under (key, label pair), empty if absent. Throws
    /// Error(DigestMismatch) when the key's backend or model differs from meta.
    std::span<const OrientedEdge> lookup_star(IndexFamily family, const EmbeddingKey& key, Label from_label,
                                              Label to_label) const;
    std::span<const OrientedEdge> lookup_path(const PathCode& code) const;

    /// Every family listing `e`; a correct build yields at most one.
    std::vector<IndexFamily> families_of(OrientedEdge e) const;

    std::size_t distinct_path_keys() const { return path.size(); }

    bool operator==(const AnchorIndexes&) const = default;
};

/// Throws Error(Unsupported) for k != 1.
AnchorIndexes build_indexes(const Graph& g, const StarKeyer& keyer, std::size_t dstar, int k = 1,
                            BuildStats* stats = nullptr);

/// Throws Error(DigestMismatch) unless the index was built for this keyer and graph.
void check_index_meta(const AnchorIndexes& idx, const StarKeyer& keyer, const Graph& g);

std::string serialize_indexes(const AnchorIndexes& idx);
/// Throws Error(Format) on bad magic, truncation or trailing bytes and
/// Error(DigestMismatch) when the content checksum fails.
AnchorIndexes deserialize_indexes(std::string_view bytes);
void save_indexes(const AnchorIndexes& idx, const std::string& path);
AnchorIndexes load_indexes(const std::string& path);

}  // namespace anchormatch
