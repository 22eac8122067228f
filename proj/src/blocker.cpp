#include "annblock/blocker.hpp"

#include <algorithm>
#include <sstream>

#include "annblock/errors.hpp"

namespace annblock {

namespace {

std::vector<double> row_norms2(VectorSet v) {
    std::vector<double> norms(v.rows(), 0.0);
    if (v.is_sparse()) {
        const ShingleMatrix& m = *v.sparse();
        for (std::size_t r = 0; r < m.n_rows; ++r) {
            double acc = 0.0;
            for (std::size_t j = m.row_offsets[r]; j < m.row_offsets[r + 1]; ++j) {
                acc += m.values[j] * m.values[j];
            }
            norms[r] = acc;
        }
    } else {
        const DenseMatrix& m = *v.dense();
        for (std::size_t r = 0; r < m.n_rows; ++r) {
            double acc = 0.0;
            const double* p = m.row(r);
            for (std::size_t j = 0; j < m.n_cols; ++j) acc += p[j] * p[j];
            norms[r] = acc;
        }
    }
    return norms;
}

}  // namespace

BlockingResult Blocker::run(VectorSet x, const VectorSet* y, std::size_t n_columns,
                            const RunConfig& config) const {
    if (y && y->cols() != x.cols()) {
        std::ostringstream msg;
        msg << "query dataset has " << y->cols() << " columns but the reference has "
            << x.cols();
        throw ValidationError(msg.str());
    }

    AnnIndex index = AnnIndex::build(x, config.ann);
    NeighborLists neighbors = y ? index.query(*y, config.ann.k_search)
                                : index.self_query(config.ann.k_search);

    // Zero-norm rows have no direction under cosine; they match nothing and
    // end up as singleton blocks.
    if (config.ann.metric == MetricKind::cosine) {
        std::vector<double> query_norms = y ? row_norms2(*y) : std::vector<double>();
        for (std::size_t q = 0; q < neighbors.size(); ++q) {
            double qn = y ? query_norms[q] : index.reference_norm2(q);
            if (qn == 0.0) {
                neighbors[q].clear();
                continue;
            }
            auto& list = neighbors[q];
            list.erase(std::remove_if(list.begin(), list.end(),
                                      [&](const Neighbor& nb) {
                                          return index.reference_norm2(nb.ref_index) == 0.0;
                                      }),
                       list.end());
        }
    }

    BlockingMode mode = y ? BlockingMode::linkage : BlockingMode::dedup;
    std::size_t m = x.rows();
    std::size_t n = y ? y->rows() : x.rows();
    PairGraph graph = build_graph(neighbors, mode, m, n, config.edge_k);
    std::vector<std::int64_t> labels = connected_components(graph);
    return assemble_result(labels, neighbors, mode, m, n, n_columns, index.method());
}

BlockingResult Blocker::block(const ShingleMatrix& x, const ShingleMatrix* y,
                              const RunConfig& config) const {
    VectorSet vy = y ? VectorSet(*y) : VectorSet(x);
    return run(VectorSet(x), y ? &vy : nullptr, x.n_cols(), config);
}

BlockingResult Blocker::block(const DenseMatrix& x, const DenseMatrix* y,
                              const RunConfig& config) const {
    VectorSet vy = y ? VectorSet(*y) : VectorSet(x);
    return run(VectorSet(x), y ? &vy : nullptr, 0, config);
}

BlockingResult Blocker::block(const Corpus& x, const Corpus* y,
                              const RunConfig& config) const {
    auto [mx, my] = build_dtm(x, y, config.text);
    if (y) {
        return block(mx, &*my, config);
    }
    return block(mx, nullptr, config);
}

EvalReport Blocker::eval(const BlockingResult& result, const TrueBlocks& truth) const {
    EvalReport report;
    report.confusion = confusion(result, truth);
    report.metrics = metrics(report.confusion);
    return report;
}

}  // namespace annblock
