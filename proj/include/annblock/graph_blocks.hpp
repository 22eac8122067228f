#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "annblock/ann.hpp"
#include "annblock/corpus.hpp"

namespace annblock {

enum class BlockingMode { dedup, linkage };

/// Which side of a linkage result a corpus belongs to.
enum class Side { x, y };

/// Undirected graph over record vertices. For deduplication the vertices
/// are the n records; for linkage the m reference records come first and
/// query record j is vertex m + j.
struct PairGraph {
    std::size_t n_vertices = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // no self-loops, deduplicated
};

/// Adds an edge per query record for each of its top-edge_k neighbours.
/// Neighbour lists must already be sorted ascending by distance.
PairGraph build_graph(const NeighborLists& neighbors, BlockingMode mode, std::size_t m,
                      std::size_t n, int edge_k = 1);

/// Component label per vertex; labels are consecutive from 0, ordered by
/// each component's smallest member vertex id.
std::vector<std::int64_t> connected_components(const PairGraph& graph);

struct BlockRow {
    std::size_t x = 0;  // reference row index
    std::size_t y = 0;  // query row index
    std::int64_t block = 0;
    double dist = 0.0;
};

struct BlockingResult {
    BlockingMode mode = BlockingMode::dedup;
    std::string method;
    std::vector<BlockRow> rows;  // one per query record with >= 1 neighbour, by y
    std::size_t n_blocks = 0;
    std::size_t n_columns = 0;  // DTM width; 0 for dense input
    double reduction_ratio = 0.0;
    std::map<std::size_t, std::size_t> block_sizes;  // block size -> number of blocks

    std::size_t m = 0;  // reference record count (dedup: the dataset size)
    std::size_t n = 0;  // query record count (dedup: equals m)
    // Block membership per record, -1 for records outside every emitted
    // block. y_blocks is used in linkage mode only.
    std::vector<std::int64_t> x_blocks;
    std::vector<std::int64_t> y_blocks;
};

/// Renumbers qualifying components (dedup: >= 2 records; linkage: at least
/// one record from each side) into consecutive block ids and assembles the
/// rows, membership, histogram and reduction ratio.
BlockingResult assemble_result(const std::vector<std::int64_t>& labeling,
                               const NeighborLists& neighbors, BlockingMode mode,
                               std::size_t m, std::size_t n, std::size_t n_columns,
                               const std::string& method);

/// (record id, block id) for every corpus record inside an emitted block;
/// records in no block are omitted. The id column value is used when the
/// corpus carries one, the row index otherwise.
std::vector<std::pair<std::string, std::int64_t>> export_block_column(
    const BlockingResult& result, const Corpus& corpus, Side side = Side::x);

/// The human-readable summary block: method line, block count, column
/// count, reduction ratio and the block-size table.
std::string format_summary(const BlockingResult& result);

/// Result CSV with header `x,y,block,dist`, dist at 6 decimal places.
void write_result_csv(std::ostream& out, const BlockingResult& result);
void write_result_csv(const std::string& path, const BlockingResult& result);

/// Reads a result CSV back into rows plus row-derived block membership
/// (m and n are inferred as max index + 1, or taken from the overrides).
BlockingResult read_result_csv(const std::string& path, BlockingMode mode);

}  // namespace annblock
