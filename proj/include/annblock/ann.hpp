#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "annblock/encode.hpp"

namespace annblock {

enum class MetricKind { cosine, euclidean };
enum class AnnAlgorithm { exact, lsh, hnsw };

std::string to_string(MetricKind metric);
std::string to_string(AnnAlgorithm algorithm);
MetricKind metric_from_string(const std::string& name);
AnnAlgorithm algorithm_from_string(const std::string& name);

struct HnswControls {
    int m = 25;        // max neighbours per node per layer (2*m on layer 0)
    int ef_c = 200;    // construction beam width
    int ef_s = 200;    // search beam width, clamped up to the requested k
    int n_threads = 1;
    bool select_heuristic = false;  // Malkov-style neighbour pruning instead of simple nearest
};

struct LshControls {
    int n_tables = 8;
    int n_bits = 16;
};

struct AnnControls {
    AnnAlgorithm algorithm = AnnAlgorithm::hnsw;
    std::uint64_t random_seed = 42;
    int k_search = 30;
    MetricKind metric = MetricKind::cosine;
    HnswControls hnsw;
    LshControls lsh;
};

/// One query→reference match. For cosine over count vectors dist lies in
/// [0, 1]; a zero-norm vector is at distance 1 from everything.
struct Neighbor {
    std::size_t query_index = 0;
    std::size_t ref_index = 0;
    double dist = 0.0;
};

/// Neighbour lists grouped by query row, each sorted by ascending
/// (dist, ref_index).
using NeighborLists = std::vector<std::vector<Neighbor>>;

/// Non-owning view over either matrix kind, the common currency of the
/// index builders and query paths.
class VectorSet {
public:
    VectorSet(const ShingleMatrix& m) : sparse_(&m) {}  // NOLINT: implicit by design
    VectorSet(const DenseMatrix& m) : dense_(&m) {}     // NOLINT

    bool is_sparse() const { return sparse_ != nullptr; }
    std::size_t rows() const { return sparse_ ? sparse_->n_rows : dense_->n_rows; }
    std::size_t cols() const { return sparse_ ? sparse_->n_cols() : dense_->n_cols; }
    const ShingleMatrix* sparse() const { return sparse_; }
    const DenseMatrix* dense() const { return dense_; }

private:
    const ShingleMatrix* sparse_ = nullptr;
    const DenseMatrix* dense_ = nullptr;
};

namespace detail {
class Backend;
}

/// A built nearest-neighbour index over a reference dataset. The index
/// owns a copy of the reference rows; it is immutable after build and
/// safe to query from any number of threads.
class AnnIndex {
public:
    /// Builds the index selected by controls.algorithm over all reference
    /// rows. Deterministic given controls.random_seed. Throws
    /// ValidationError for an empty reference.
    static AnnIndex build(VectorSet reference, const AnnControls& controls);

    /// Top-k neighbours per query row, sorted by ascending (dist, ref_index).
    /// The exact backend returns the true k nearest; lsh/hnsw return
    /// approximate candidate sets re-ranked by true distance (possibly fewer
    /// than k). Throws ValidationError when the query column count differs
    /// from the reference column count.
    NeighborLists query(VectorSet queries, int k) const;

    /// Queries the index with its own rows, requesting k+1 candidates,
    /// discarding self-matches and truncating to k. A record is never its
    /// own neighbour.
    NeighborLists self_query(int k) const;

    std::size_t size() const;     // reference row count
    std::size_t columns() const;  // reference column count
    double reference_norm2(std::size_t row) const;
    const AnnControls& controls() const { return controls_; }
    std::string method() const { return to_string(controls_.algorithm); }

    // Structure introspection used by the determinism and invariant tests.
    // The hnsw_* accessors throw unless the backend is HNSW; lsh_* unless LSH.
    int hnsw_max_level() const;
    int hnsw_node_level(std::size_t node) const;
    std::vector<std::int32_t> hnsw_neighbors(int level, std::size_t node) const;
    std::vector<std::vector<std::int32_t>> lsh_table_buckets(int table) const;

private:
    AnnIndex(std::shared_ptr<const detail::Backend> backend, AnnControls controls);

    std::shared_ptr<const detail::Backend> backend_;
    AnnControls controls_;
};

/// Distance between two explicit dense vectors under the given metric;
/// exposed for tests and diagnostic tooling.
double dense_distance(const std::vector<double>& u, const std::vector<double>& v,
                      MetricKind metric);

}  // namespace annblock
