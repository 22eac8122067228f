#include "annblock/ann.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include "ann_internal.hpp"
#include "annblock/errors.hpp"

namespace annblock {

std::string to_string(MetricKind metric) {
    return metric == MetricKind::cosine ? "cosine" : "euclidean";
}

std::string to_string(AnnAlgorithm algorithm) {
    switch (algorithm) {
        case AnnAlgorithm::exact: return "exact";
        case AnnAlgorithm::lsh: return "lsh";
        case AnnAlgorithm::hnsw: return "hnsw";
    }
    return "unknown";
}

MetricKind metric_from_string(const std::string& name) {
    if (name == "cosine") return MetricKind::cosine;
    if (name == "euclidean") return MetricKind::euclidean;
    throw ValidationError("unknown distance metric \"" + name +
                          "\" (expected cosine or euclidean)");
}

AnnAlgorithm algorithm_from_string(const std::string& name) {
    if (name == "exact") return AnnAlgorithm::exact;
    if (name == "lsh") return AnnAlgorithm::lsh;
    if (name == "hnsw") return AnnAlgorithm::hnsw;
    throw ValidationError("unknown ann algorithm \"" + name +
                          "\" (expected exact, lsh or hnsw)");
}

namespace detail {

RefStore RefStore::from(VectorSet v) {
    RefStore s;
    s.n_rows = v.rows();
    s.n_cols = v.cols();
    s.sparse = v.is_sparse();
    s.norm2.resize(s.n_rows, 0.0);
    if (s.sparse) {
        const ShingleMatrix& m = *v.sparse();
        s.offsets = m.row_offsets;
        s.cols = m.col_indices;
        s.vals = m.values;
        for (std::size_t r = 0; r < s.n_rows; ++r) {
            double acc = 0.0;
            for (std::size_t j = s.offsets[r]; j < s.offsets[r + 1]; ++j) {
                acc += s.vals[j] * s.vals[j];
            }
            s.norm2[r] = acc;
        }
    } else {
        const DenseMatrix& m = *v.dense();
        s.dense = m.data;
        for (std::size_t r = 0; r < s.n_rows; ++r) {
            double acc = 0.0;
            const double* p = s.dense.data() + r * s.n_cols;
            for (std::size_t j = 0; j < s.n_cols; ++j) acc += p[j] * p[j];
            s.norm2[r] = acc;
        }
    }
    return s;
}

RowRef RefStore::row(std::size_t i) const {
    RowRef r;
    r.dim = n_cols;
    r.norm2 = norm2[i];
    if (sparse) {
        r.idx = cols.data() + offsets[i];
        r.val = vals.data() + offsets[i];
        r.nnz = offsets[i + 1] - offsets[i];
    } else {
        r.dense = dense.data() + i * n_cols;
    }
    return r;
}

double dot(const RowRef& a, const RowRef& b) {
    if (a.is_sparse() && b.is_sparse()) {
        double acc = 0.0;
        std::size_t i = 0, j = 0;
        while (i < a.nnz && j < b.nnz) {
            std::int32_t ca = a.idx[i], cb = b.idx[j];
            if (ca == cb) {
                acc += a.val[i] * b.val[j];
                ++i;
                ++j;
            } else if (ca < cb) {
                ++i;
            } else {
                ++j;
            }
        }
        return acc;
    }
    if (!a.is_sparse() && !b.is_sparse()) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.dim; ++j) acc += a.dense[j] * b.dense[j];
        return acc;
    }
    const RowRef& sp = a.is_sparse() ? a : b;
    const RowRef& dn = a.is_sparse() ? b : a;
    double acc = 0.0;
    for (std::size_t i = 0; i < sp.nnz; ++i) acc += sp.val[i] * dn.dense[sp.idx[i]];
    return acc;
}

double pair_distance(const RowRef& a, const RowRef& b, MetricKind metric) {
    if (metric == MetricKind::cosine) {
        double denom = std::sqrt(a.norm2 * b.norm2);
        if (denom == 0.0) return 1.0;  // zero-norm vectors match nothing
        return std::max(0.0, 1.0 - dot(a, b) / denom);
    }
    double d2 = a.norm2 + b.norm2 - 2.0 * dot(a, b);
    return std::sqrt(std::max(0.0, d2));
}

void parallel_chunks(std::size_t count, int n_threads,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    std::size_t workers = n_threads > 0 ? static_cast<std::size_t>(n_threads) : 1;
    workers = std::min(workers, count);
    if (workers <= 1) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(fn, begin, end);
    }
    for (auto& t : pool) t.join();
}

std::vector<Neighbor> ExactBackend::search_row(const RowRef& q, std::size_t query_index,
                                               int k) const {
    TopK top(static_cast<std::size_t>(k));
    for (std::size_t r = 0; r < ref_.n_rows; ++r) {
        top.offer(pair_distance(q, ref_.row(r), metric_), r);
    }
    return top.take(query_index);
}

}  // namespace detail

AnnIndex::AnnIndex(std::shared_ptr<const detail::Backend> backend, AnnControls controls)
    : backend_(std::move(backend)), controls_(std::move(controls)) {}

AnnIndex AnnIndex::build(VectorSet reference, const AnnControls& controls) {
    if (reference.rows() == 0) {
        throw ValidationError("cannot build an index over an empty reference dataset");
    }
    if (controls.k_search < 1) {
        throw ValidationError("k_search must be >= 1");
    }
    detail::RefStore store = detail::RefStore::from(reference);
    std::shared_ptr<const detail::Backend> backend;
    switch (controls.algorithm) {
        case AnnAlgorithm::exact:
            backend = std::make_shared<detail::ExactBackend>(std::move(store), controls.metric);
            break;
        case AnnAlgorithm::lsh:
            backend = std::make_shared<detail::LshBackend>(std::move(store), controls.metric,
                                                           controls.lsh, controls.random_seed);
            break;
        case AnnAlgorithm::hnsw:
            backend = std::make_shared<detail::HnswBackend>(std::move(store), controls.metric,
                                                            controls.hnsw, controls.random_seed);
            break;
    }
    return AnnIndex(std::move(backend), controls);
}

NeighborLists AnnIndex::query(VectorSet queries, int k) const {
    if (queries.cols() != backend_->ref().n_cols) {
        std::ostringstream msg;
        msg << "query matrix has " << queries.cols()
            << " columns but the index was built over " << backend_->ref().n_cols;
        throw ValidationError(msg.str());
    }
    if (k < 1) {
        throw ValidationError("k must be >= 1");
    }
    detail::RefStore qstore = detail::RefStore::from(queries);
    NeighborLists lists(qstore.n_rows);
    detail::parallel_chunks(qstore.n_rows, controls_.hnsw.n_threads,
                            [&](std::size_t begin, std::size_t end) {
                                for (std::size_t i = begin; i < end; ++i) {
                                    lists[i] = backend_->search_row(qstore.row(i), i, k);
                                }
                            });
    return lists;
}

NeighborLists AnnIndex::self_query(int k) const {
    if (k < 1) {
        throw ValidationError("k must be >= 1");
    }
    const detail::RefStore& store = backend_->ref();
    NeighborLists lists(store.n_rows);
    detail::parallel_chunks(store.n_rows, controls_.hnsw.n_threads,
                            [&](std::size_t begin, std::size_t end) {
                                for (std::size_t i = begin; i < end; ++i) {
                                    auto found = backend_->search_row(store.row(i), i, k + 1);
                                    std::vector<Neighbor> kept;
                                    kept.reserve(found.size());
                                    for (const auto& nb : found) {
                                        if (nb.ref_index != i) kept.push_back(nb);
                                    }
                                    if (kept.size() > static_cast<std::size_t>(k)) {
                                        kept.resize(static_cast<std::size_t>(k));
                                    }
                                    lists[i] = std::move(kept);
                                }
                            });
    return lists;
}

std::size_t AnnIndex::size() const { return backend_->ref().n_rows; }
std::size_t AnnIndex::columns() const { return backend_->ref().n_cols; }
double AnnIndex::reference_norm2(std::size_t row) const { return backend_->ref().norm2[row]; }

int AnnIndex::hnsw_max_level() const {
    auto* h = dynamic_cast<const detail::HnswBackend*>(backend_.get());
    if (!h) throw ValidationError("index backend is not hnsw");
    return h->max_level();
}

int AnnIndex::hnsw_node_level(std::size_t node) const {
    auto* h = dynamic_cast<const detail::HnswBackend*>(backend_.get());
    if (!h) throw ValidationError("index backend is not hnsw");
    return h->node_level(node);
}

std::vector<std::int32_t> AnnIndex::hnsw_neighbors(int level, std::size_t node) const {
    auto* h = dynamic_cast<const detail::HnswBackend*>(backend_.get());
    if (!h) throw ValidationError("index backend is not hnsw");
    if (level > h->node_level(node)) return {};
    return h->neighbors(level, node);
}

std::vector<std::vector<std::int32_t>> AnnIndex::lsh_table_buckets(int table) const {
    auto* l = dynamic_cast<const detail::LshBackend*>(backend_.get());
    if (!l) throw ValidationError("index backend is not lsh");
    return l->buckets(table);
}

double dense_distance(const std::vector<double>& u, const std::vector<double>& v,
                      MetricKind metric) {
    if (u.size() != v.size()) {
        throw ValidationError("vector lengths differ");
    }
    detail::RowRef a, b;
    a.dense = u.data();
    a.dim = u.size();
    b.dense = v.data();
    b.dim = v.size();
    for (double x : u) a.norm2 += x * x;
    for (double x : v) b.norm2 += x * x;
    return detail::pair_distance(a, b, metric);
}

}  // namespace annblock
