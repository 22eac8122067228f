#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "annblock/graph_blocks.hpp"

namespace annblock {

/// Ground-truth block assignments. Dedup entries use (x, block); linkage
/// entries use (x, y, block). Truth labels need not be consecutive.
struct TrueBlocks {
    struct Entry {
        std::size_t x = 0;
        std::size_t y = 0;  // unused in dedup mode
        std::int64_t block = 0;
    };
    BlockingMode mode = BlockingMode::dedup;
    std::vector<Entry> entries;
};

/// Reads a truth CSV with header `x,block` (dedup) or `x,y,block` (linkage).
TrueBlocks load_truth_csv(const std::string& path, BlockingMode mode);

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
};

/// The seven pairwise metrics. Any metric whose denominator is zero is
/// reported as 0 and listed in `flagged`.
struct MetricReport {
    double recall = 0.0;
    double precision = 0.0;
    double fpr = 0.0;
    double fnr = 0.0;
    double accuracy = 0.0;
    double specificity = 0.0;
    double f1_score = 0.0;
    std::vector<std::string> flagged;
};

struct EvalReport {
    ConfusionCounts confusion;
    MetricReport metrics;
};

/// 1 - sum(C(|B_i|, 2)) / C(n, 2) over the block-size histogram; singleton
/// blocks contribute nothing. Throws ValidationError when n < 2 or the
/// histogram covers more than n records.
double reduction_ratio_dedup(const std::map<std::size_t, std::size_t>& block_sizes,
                             std::size_t n);

/// 1 - sum(|B_i,x| * |B_i,y|) / (m * n) over per-block side counts.
double reduction_ratio_linkage(
    const std::vector<std::pair<std::size_t, std::size_t>>& block_memberships,
    std::size_t m, std::size_t n);

/// Pairwise confusion counts over the evaluated universe: all pairs formed
/// from records present in the truth (dedup: unordered pairs; linkage:
/// cross pairs). A pair is predicted-positive iff both members share an
/// emitted block; a record in no emitted block matches nothing.
ConfusionCounts confusion(const BlockingResult& result, const TrueBlocks& truth);

MetricReport metrics(const ConfusionCounts& c);

/// Listing-style plain-text renderings (labels padded, 6 decimal places).
std::string format_metrics(const MetricReport& report);
std::string format_confusion(const ConfusionCounts& c);

}  // namespace annblock
