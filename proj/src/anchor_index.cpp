#include "anchormatch/anchor_index.hpp"

#include <algorithm>
#include <string>

#include "anchormatch/binary_io.hpp"
#include "anchormatch/errors.hpp"

namespace anchormatch {

const char* to_string(IndexFamily family) {
    switch (family) {
        case IndexFamily::S: return "S";
        case IndexFamily::SPrime: return "S'";
        case IndexFamily::P: return "P";
    }
    return "?";
}

namespace {

struct ShapeHash {
    std::size_t operator()(const std::vector<Label>& v) const noexcept {
        std::uint64_t h = 0x84222325cbf29ce4ULL;
        for (Label l : v) h = (h ^ l) * 0x100000001b3ULL;
        return static_cast<std::size_t>(h ^ (h >> 31));
    }
};

// Memoizes keys by canonical triple; a GIN forward is far costlier than a lookup.
class KeyCache {
public:
    explicit KeyCache(const StarKeyer& keyer) : keyer_(keyer) {}

    const std::vector<std::int64_t>& key(const AnchoredStar& s) {
        scratch_.clear();
        scratch_.push_back(s.center_label);
        scratch_.push_back(s.anchor_label);
        scratch_.insert(scratch_.end(), s.leaf_labels.begin(), s.leaf_labels.end());
        auto it = cache_.find(scratch_);
        if (it != cache_.end()) return it->second;
        auto k = keyer_.key(s);
        if (!k) throw Error(ErrorKind::InvalidArgument, "graph label outside the embedding model's alphabet");
        return cache_.emplace(scratch_, std::move(k->components)).first->second;
    }

    std::size_t size() const { return cache_.size(); }

private:
    const StarKeyer& keyer_;
    std::vector<Label> scratch_;
    std::unordered_map<std::vector<Label>, std::vector<std::int64_t>, ShapeHash> cache_;
};

void insert_star_edge(StarIndex& index, const std::vector<std::int64_t>& key, Label lf, Label lt, OrientedEdge e) {
    auto& entries = index[key];
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](const IndexEntry& x) { return x.from_label == lf && x.to_label == lt; });
    if (it == entries.end()) {
        entries.push_back({lf, lt, {}});
        it = entries.end() - 1;
    }
    if (it->edges.empty() || it->edges.back() != e) it->edges.push_back(e);
}

void finalize(StarIndex& index) {
    for (auto& [key, entries] : index) {
        std::sort(entries.begin(), entries.end(), [](const IndexEntry& a, const IndexEntry& b) {
            return std::pair(a.from_label, a.to_label) < std::pair(b.from_label, b.to_label);
        });
        for (IndexEntry& entry : entries) {
            std::sort(entry.edges.begin(), entry.edges.end());
            entry.edges.erase(std::unique(entry.edges.begin(), entry.edges.end()), entry.edges.end());
        }
    }
}

}  // namespace

std::span<const OrientedEdge> AnchorIndexes::lookup_star(IndexFamily family, const EmbeddingKey& key,
                                                         Label from_label, Label to_label) const {
    if (key.backend != meta.backend || key.model_digest != meta.model_digest)
        throw Error(ErrorKind::DigestMismatch, "query key was produced by a different embedding than the index");
    if (family == IndexFamily::P) throw Error(ErrorKind::InvalidArgument, "lookup_star on the path index");
    const StarIndex& index = family == IndexFamily::S ? star : star_prime;
    auto it = index.find(key.components);
    if (it == index.end()) return {};
    for (const IndexEntry& entry : it->second)
        if (entry.from_label == from_label && entry.to_label == to_label) return entry.edges;
    return {};
}

std::span<const OrientedEdge> AnchorIndexes::lookup_path(const PathCode& code) const {
    auto it = path.find(code);
    if (it == path.end()) return {};
    return it->second;
}

std::vector<IndexFamily> AnchorIndexes::families_of(OrientedEdge e) const {
    std::vector<IndexFamily> out;
    auto in_star = [&](const StarIndex& index) {
        for (const auto& [key, entries] : index)
            for (const IndexEntry& entry : entries)
                if (std::binary_search(entry.edges.begin(), entry.edges.end(), e)) return true;
        return false;
    };
    if (in_star(star)) out.push_back(IndexFamily::S);
    if (in_star(star_prime)) out.push_back(IndexFamily::SPrime);
    for (const auto& [code, edges] : path)
        if (std::binary_search(edges.begin(), edges.end(), e)) {
            out.push_back(IndexFamily::P);
            break;
        }
    return out;
}

AnchorIndexes build_indexes(const Graph& g, const StarKeyer& keyer, std::size_t dstar, int k, BuildStats* stats) {
    require_radius_one(k);
    if (keyer.backend() == BackendTag::Gin && keyer.model()->features.rows() < g.sigma_size())
        throw Error(ErrorKind::InvalidArgument, "embedding model alphabet is smaller than the graph's");
    AnchorIndexes idx;
    idx.meta = {dstar, static_cast<std::uint32_t>(k), keyer.backend(), keyer.model_digest(), g.digest()};
    BuildStats local;
    KeyCache cache(keyer);
    std::vector<const std::vector<std::int64_t>*> keys;

    for (OrientedEdge e : normalized_edges(g)) {
        const EdgeType type = classify_edge(g, e, dstar);
        const Label lf = g.label(e.from);
        const Label lt = g.label(e.to);
        if (type == EdgeType::DenseDense) {
            std::vector<PathCode> codes = enumerate_anchored_paths(g, e, k);
            local.path_insertions += codes.size();
            std::sort(codes.begin(), codes.end());
            codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
            for (const PathCode& c : codes) idx.path[c].push_back(e);
            continue;
        }
        const bool prime = type == EdgeType::DenseSparse;
        const OrientedEdge centered = prime ? OrientedEdge{e.to, e.from} : e;
        keys.clear();
        for_each_anchored_star(g, centered, [&](const AnchoredStar& s) { keys.push_back(&cache.key(s)); });
        local.star_insertions += keys.size();
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        StarIndex& target = prime ? idx.star_prime : idx.star;
        for (const auto* key : keys) insert_star_edge(target, *key, lf, lt, e);
    }
    finalize(idx.star);
    finalize(idx.star_prime);
    for (auto& [code, edges] : idx.path) std::sort(edges.begin(), edges.end());
    local.distinct_star_shapes = cache.size();
    if (stats) *stats = local;
    return idx;
}

void check_index_meta(const AnchorIndexes& idx, const StarKeyer& keyer, const Graph& g) {
    if (idx.meta.backend != keyer.backend())
        throw Error(ErrorKind::DigestMismatch, std::string("index was built with backend ") +
                                                   to_string(idx.meta.backend) + ", query uses " +
                                                   to_string(keyer.backend()));
    if (idx.meta.model_digest != keyer.model_digest())
        throw Error(ErrorKind::DigestMismatch, "index model digest does not match the supplied model");
    if (idx.meta.graph_digest != g.digest())
        throw Error(ErrorKind::DigestMismatch, "index graph digest does not match the data graph");
}

namespace {

constexpr std::string_view kIndexMagic = "GAE-IDX1";

void write_star_index(ByteWriter& w, const StarIndex& index) {
    std::vector<const StarIndex::value_type*> items;
    items.reserve(index.size());
    for (const auto& item : index) items.push_back(&item);
    std::sort(items.begin(), items.end(), [](auto* a, auto* b) { return a->first < b->first; });
    w.u64(items.size());
    for (const auto* item : items) {
        w.u64(item->first.size());
        for (std::int64_t c : item->first) w.i64(c);
        w.u64(item->second.size());
        for (const IndexEntry& entry : item->second) {
            w.u32(entry.from_label);
            w.u32(entry.to_label);
            w.u64(entry.edges.size());
            for (OrientedEdge e : entry.edges) {
                w.u32(e.from);
                w.u32(e.to);
            }
        }
    }
}

StarIndex read_star_index(ByteReader& r) {
    StarIndex index;
    const std::uint64_t keys = r.count(16);
    for (std::uint64_t i = 0; i < keys; ++i) {
        std::vector<std::int64_t> key(r.count(8));
        for (std::int64_t& c : key) c = r.i64();
        std::vector<IndexEntry> entries(r.count(16));
        for (IndexEntry& entry : entries) {
            entry.from_label = r.u32();
            entry.to_label = r.u32();
            entry.edges.resize(r.count(8));
            for (OrientedEdge& e : entry.edges) {
                e.from = r.u32();
                e.to = r.u32();
            }
        }
        if (!index.emplace(std::move(key), std::move(entries)).second)
            throw Error(ErrorKind::Format, "duplicate key in index file");
    }
    return index;
}

}  // namespace

std::string serialize_indexes(const AnchorIndexes& idx) {
    ByteWriter w;
    w.raw(kIndexMagic);
    w.u64(idx.meta.dstar);
    w.u32(idx.meta.k);
    w.u32(static_cast<std::uint32_t>(idx.meta.backend));
    w.u64(idx.meta.model_digest);
    w.u64(idx.meta.graph_digest);
    write_star_index(w, idx.star);
    write_star_index(w, idx.star_prime);

    std::vector<const PathIndex::value_type*> items;
    for (const auto& item : idx.path) items.push_back(&item);
    std::sort(items.begin(), items.end(), [](auto* a, auto* b) { return a->first < b->first; });
    w.u64(items.size());
    for (const auto* item : items) {
        w.u32(item->first.length);
        for (Label l : item->first.labels) w.u32(l);
        w.u64(item->second.size());
        for (OrientedEdge e : item->second) {
            w.u32(e.from);
            w.u32(e.to);
        }
    }
    Fnv1a h;
    h.update(w.bytes().data(), w.bytes().size());
    w.u64(h.value());
    return w.bytes();
}

AnchorIndexes deserialize_indexes(std::string_view bytes) {
    if (bytes.size() < kIndexMagic.size() || bytes.substr(0, kIndexMagic.size()) != kIndexMagic)
        throw Error(ErrorKind::Format, "not an index file (bad magic)");
    if (bytes.size() < kIndexMagic.size() + 8) throw Error(ErrorKind::Format, "truncated index file");
    const std::string_view body = bytes.substr(0, bytes.size() - 8);
    ByteReader tail(bytes.substr(bytes.size() - 8));
    Fnv1a h;
    h.update(body.data(), body.size());
    if (h.value() != tail.u64()) throw Error(ErrorKind::DigestMismatch, "index file checksum mismatch");

    ByteReader r(body);
    r.raw(kIndexMagic.size());
    AnchorIndexes idx;
    idx.meta.dstar = r.u64();
    idx.meta.k = r.u32();
    const std::uint32_t backend = r.u32();
    if (backend != static_cast<std::uint32_t>(BackendTag::Gin) && backend != static_cast<std::uint32_t>(BackendTag::Wl))
        throw Error(ErrorKind::Format, "unknown backend tag in index file");
    idx.meta.backend = static_cast<BackendTag>(backend);
    idx.meta.model_digest = r.u64();
    idx.meta.graph_digest = r.u64();
    idx.star = read_star_index(r);
    idx.star_prime = read_star_index(r);
    const std::uint64_t codes = r.count(24);
    for (std::uint64_t i = 0; i < codes; ++i) {
        PathCode code;
        const std::uint32_t length = r.u32();
        if (length != 2 && length != 3) throw Error(ErrorKind::Format, "bad path code length in index file");
        code.length = static_cast<std::uint8_t>(length);
        for (Label& l : code.labels) l = r.u32();
        std::vector<OrientedEdge> edges(r.count(8));
        for (OrientedEdge& e : edges) {
            e.from = r.u32();
            e.to = r.u32();
        }
        if (!idx.path.emplace(code, std::move(edges)).second)
            throw Error(ErrorKind::Format, "duplicate path code in index file");
    }
    if (!r.done()) throw Error(ErrorKind::Format, "trailing bytes in index file");
    return idx;
}

void save_indexes(const AnchorIndexes& idx, const std::string& path) { write_file_bytes(path, serialize_indexes(idx)); }

AnchorIndexes load_indexes(const std::string& path) { return deserialize_indexes(read_file_bytes(path)); }

}  // namespace anchormatch
