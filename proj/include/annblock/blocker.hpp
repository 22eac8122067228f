#pragma once

#include <optional>

#include "annblock/ann.hpp"
#include "annblock/corpus.hpp"
#include "annblock/eval.hpp"
#include "annblock/graph_blocks.hpp"

namespace annblock {

/// Full run configuration: text preprocessing, ANN backend controls, and
/// how many of each query's nearest neighbours become graph edges.
struct RunConfig {
    TextControls text;
    AnnControls ann;
    int edge_k = 1;
};

/// Coordinates the whole pipeline: encode, index, search, graph components,
/// result assembly. Deduplication when no query dataset is given, record
/// linkage otherwise (the first dataset is indexed, the second queried).
class Blocker {
public:
    BlockingResult block(const Corpus& x, const Corpus* y = nullptr,
                         const RunConfig& config = {}) const;
    BlockingResult block(const ShingleMatrix& x, const ShingleMatrix* y = nullptr,
                         const RunConfig& config = {}) const;
    BlockingResult block(const DenseMatrix& x, const DenseMatrix* y = nullptr,
                         const RunConfig& config = {}) const;

    EvalReport eval(const BlockingResult& result, const TrueBlocks& truth) const;

private:
    BlockingResult run(VectorSet x, const VectorSet* y, std::size_t n_columns,
                       const RunConfig& config) const;
};

}  // namespace annblock
