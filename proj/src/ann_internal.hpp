#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <unordered_map>
#include <vector>

#include "annblock/ann.hpp"

namespace annblock::detail {

/// Lightweight view of one row, sparse or dense, with its squared norm.
struct RowRef {
    const std::int32_t* idx = nullptr;  // sparse column indices (strictly increasing)
    const double* val = nullptr;        // sparse values
    std::size_t nnz = 0;
    const double* dense = nullptr;      // dense values when idx == nullptr
    std::size_t dim = 0;
    double norm2 = 0.0;

    bool is_sparse() const { return idx != nullptr; }
};

/// Owned copy of a reference or query matrix plus per-row squared norms.
struct RefStore {
    bool sparse = false;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::size_t> offsets;
    std::vector<std::int32_t> cols;
    std::vector<double> vals;
    std::vector<double> dense;
    std::vector<double> norm2;

    static RefStore from(VectorSet v);
    RowRef row(std::size_t i) const;
};

double dot(const RowRef& a, const RowRef& b);
double pair_distance(const RowRef& a, const RowRef& b, MetricKind metric);

/// Bounded top-k selector ordered by ascending (dist, ref_index); ties are
/// broken deterministically by index.
class TopK {
public:
    explicit TopK(std::size_t k) : k_(k) {}

    void offer(double dist, std::size_t index) {
        if (heap_.size() < k_) {
            heap_.emplace_back(dist, index);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (!heap_.empty() && std::pair(dist, index) < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = {dist, index};
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    /// Drains into neighbours sorted ascending.
    std::vector<Neighbor> take(std::size_t query_index) {
        std::sort_heap(heap_.begin(), heap_.end());
        std::vector<Neighbor> out;
        out.reserve(heap_.size());
        for (const auto& [d, i] : heap_) out.push_back(Neighbor{query_index, i, d});
        heap_.clear();
        return out;
    }

private:
    std::size_t k_;
    std::vector<std::pair<double, std::size_t>> heap_;  // max-heap on (dist, index)
};

/// Runs fn(begin, end) over [0, count) split across up to n_threads workers.
void parallel_chunks(std::size_t count, int n_threads,
                     const std::function<void(std::size_t, std::size_t)>& fn);

class Backend {
public:
    explicit Backend(RefStore ref) : ref_(std::move(ref)) {}
    virtual ~Backend() = default;

    const RefStore& ref() const { return ref_; }

    /// Up to k neighbours of q, sorted ascending by (dist, ref_index).
    virtual std::vector<Neighbor> search_row(const RowRef& q, std::size_t query_index,
                                             int k) const = 0;

protected:
    RefStore ref_;
};

class ExactBackend final : public Backend {
public:
    explicit ExactBackend(RefStore ref, MetricKind metric)
        : Backend(std::move(ref)), metric_(metric) {}

    std::vector<Neighbor> search_row(const RowRef& q, std::size_t query_index,
                                     int k) const override;

private:
    MetricKind metric_;
};

class LshBackend final : public Backend {
public:
    LshBackend(RefStore ref, MetricKind metric, LshControls params, std::uint64_t seed);

    std::vector<Neighbor> search_row(const RowRef& q, std::size_t query_index,
                                     int k) const override;

    int table_count() const { return params_.n_tables; }
    std::vector<std::vector<std::int32_t>> buckets(int table) const;

private:
    std::uint64_t signature(const RowRef& row, int table) const;

    MetricKind metric_;
    LshControls params_;
    std::vector<double> hyperplanes_;  // (n_tables * n_bits) x n_cols, row-major
    std::vector<std::unordered_map<std::uint64_t, std::vector<std::int32_t>>> tables_;
};

class HnswBackend final : public Backend {
public:
    HnswBackend(RefStore ref, MetricKind metric, HnswControls params, std::uint64_t seed);

    std::vector<Neighbor> search_row(const RowRef& q, std::size_t query_index,
                                     int k) const override;

    int max_level() const { return max_level_; }
    int node_level(std::size_t node) const { return levels_[node]; }
    const std::vector<std::int32_t>& neighbors(int level, std::size_t node) const {
        return adjacency_[static_cast<std::size_t>(level)][node];
    }

private:
    struct Candidate {
        double dist;
        std::int32_t id;
        bool operator<(const Candidate& o) const {
            return dist < o.dist || (dist == o.dist && id < o.id);
        }
        bool operator>(const Candidate& o) const { return o < *this; }
    };

    void insert(std::int32_t node, int level);
    std::vector<Candidate> search_layer(const RowRef& q, std::int32_t entry, std::size_t ef,
                                        int level) const;
    std::vector<Candidate> select_neighbors(const RowRef& base,
                                            std::vector<Candidate> candidates,
                                            std::size_t m) const;
    void shrink_adjacency(std::int32_t node, int level, std::size_t m_max);
    double node_distance(const RowRef& q, std::int32_t node) const;

    MetricKind metric_;
    HnswControls params_;
    std::vector<int> levels_;
    // adjacency_[level][node] -> neighbour ids; symmetric within each level.
    std::vector<std::vector<std::vector<std::int32_t>>> adjacency_;
    std::int32_t entry_point_ = -1;
    int max_level_ = -1;
};

}  // namespace annblock::detail
