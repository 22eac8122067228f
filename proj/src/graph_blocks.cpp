#include "annblock/graph_blocks.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "annblock/csv.hpp"
#include "annblock/errors.hpp"
#include "annblock/eval.hpp"

namespace annblock {

PairGraph build_graph(const NeighborLists& neighbors, BlockingMode mode, std::size_t m,
                      std::size_t n, int edge_k) {
    if (edge_k < 1) {
        throw ValidationError("edge_k must be >= 1");
    }
    PairGraph graph;
    graph.n_vertices = mode == BlockingMode::dedup ? m : m + n;
    for (std::size_t q = 0; q < neighbors.size(); ++q) {
        std::size_t take = std::min(neighbors[q].size(), static_cast<std::size_t>(edge_k));
        for (std::size_t i = 0; i < take; ++i) {
            std::size_t a = neighbors[q][i].ref_index;
            std::size_t b = mode == BlockingMode::dedup ? q : m + q;
            if (a == b) continue;
            graph.edges.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(graph.edges.begin(), graph.edges.end());
    graph.edges.erase(std::unique(graph.edges.begin(), graph.edges.end()),
                      graph.edges.end());
    return graph;
}

std::vector<std::int64_t> connected_components(const PairGraph& graph) {
    std::vector<std::size_t> parent(graph.n_vertices);
    std::iota(parent.begin(), parent.end(), std::size_t{0});

    auto find = [&](std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    for (const auto& [a, b] : graph.edges) {
        std::size_t ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }

    // Scanning in vertex order makes labels consecutive and ordered by each
    // component's smallest member.
    std::vector<std::int64_t> labels(graph.n_vertices, -1);
    std::vector<std::int64_t> root_label(graph.n_vertices, -1);
    std::int64_t next = 0;
    for (std::size_t v = 0; v < graph.n_vertices; ++v) {
        std::size_t r = find(v);
        if (root_label[r] < 0) root_label[r] = next++;
        labels[v] = root_label[r];
    }
    return labels;
}

BlockingResult assemble_result(const std::vector<std::int64_t>& labeling,
                               const NeighborLists& neighbors, BlockingMode mode,
                               std::size_t m, std::size_t n, std::size_t n_columns,
                               const std::string& method) {
    std::size_t n_vertices = mode == BlockingMode::dedup ? m : m + n;
    if (labeling.size() != n_vertices) {
        throw ValidationError("component labeling does not cover all vertices");
    }

    // Count members per component, split by side for linkage.
    std::int64_t n_components = 0;
    for (std::int64_t l : labeling) n_components = std::max(n_components, l + 1);
    std::vector<std::size_t> x_count(static_cast<std::size_t>(n_components), 0);
    std::vector<std::size_t> y_count(static_cast<std::size_t>(n_components), 0);
    for (std::size_t v = 0; v < labeling.size(); ++v) {
        auto l = static_cast<std::size_t>(labeling[v]);
        if (mode == BlockingMode::dedup || v < m) {
            ++x_count[l];
        } else {
            ++y_count[l];
        }
    }

    // Renumber qualifying components consecutively, preserving order.
    std::vector<std::int64_t> renumber(static_cast<std::size_t>(n_components), -1);
    std::int64_t next = 0;
    for (std::size_t l = 0; l < renumber.size(); ++l) {
        bool qualifies = mode == BlockingMode::dedup
                             ? x_count[l] >= 2
                             : (x_count[l] >= 1 && y_count[l] >= 1);
        if (qualifies) renumber[l] = next++;
    }

    BlockingResult result;
    result.mode = mode;
    result.method = method;
    result.m = m;
    result.n = mode == BlockingMode::dedup ? m : n;
    result.n_columns = n_columns;
    result.n_blocks = static_cast<std::size_t>(next);

    result.x_blocks.assign(m, -1);
    if (mode == BlockingMode::linkage) result.y_blocks.assign(n, -1);
    for (std::size_t v = 0; v < labeling.size(); ++v) {
        std::int64_t b = renumber[static_cast<std::size_t>(labeling[v])];
        if (mode == BlockingMode::dedup || v < m) {
            result.x_blocks[v] = b;
        } else {
            result.y_blocks[v - m] = b;
        }
    }

    std::size_t n_queries = mode == BlockingMode::dedup ? m : n;
    if (neighbors.size() != n_queries) {
        throw ValidationError("neighbour lists do not cover all query records");
    }
    for (std::size_t q = 0; q < n_queries; ++q) {
        if (neighbors[q].empty()) continue;
        const Neighbor& nearest = neighbors[q].front();
        std::size_t vertex = mode == BlockingMode::dedup ? q : m + q;
        std::int64_t b = renumber[static_cast<std::size_t>(labeling[vertex])];
        result.rows.push_back(BlockRow{nearest.ref_index, q, b, nearest.dist});
    }

    std::vector<std::pair<std::size_t, std::size_t>> per_block(
        static_cast<std::size_t>(next), {0, 0});
    for (std::size_t l = 0; l < renumber.size(); ++l) {
        if (renumber[l] < 0) continue;
        auto b = static_cast<std::size_t>(renumber[l]);
        per_block[b] = {x_count[l], y_count[l]};
    }
    for (const auto& [bx, by] : per_block) {
        ++result.block_sizes[bx + by];
    }

    if (mode == BlockingMode::dedup) {
        result.reduction_ratio =
            m >= 2 ? reduction_ratio_dedup(result.block_sizes, m) : 1.0;
    } else {
        result.reduction_ratio = reduction_ratio_linkage(per_block, m, n);
    }
    return result;
}

std::vector<std::pair<std::string, std::int64_t>> export_block_column(
    const BlockingResult& result, const Corpus& corpus, Side side) {
    if (result.mode == BlockingMode::dedup) side = Side::x;
    const std::vector<std::int64_t>& blocks =
        side == Side::x ? result.x_blocks : result.y_blocks;
    if (corpus.size() != blocks.size()) {
        std::ostringstream msg;
        msg << "corpus has " << corpus.size() << " records but the blocked dataset has "
            << blocks.size();
        throw ValidationError(msg.str());
    }
    std::vector<std::pair<std::string, std::int64_t>> out;
    for (const Record& rec : corpus.records) {
        std::int64_t b = blocks[rec.row_index];
        if (b < 0) continue;
        out.emplace_back(corpus.has_ids ? rec.id : std::to_string(rec.row_index), b);
    }
    return out;
}

std::string format_summary(const BlockingResult& result) {
    std::ostringstream out;
    char buf[64];
    out << "====================================================\n";
    out << "Blocking based on the " << result.method << " method.\n";
    out << "Number of blocks: " << result.n_blocks << "\n";
    out << "Number of columns created for blocking: " << result.n_columns << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", result.reduction_ratio);
    out << "Reduction ratio: " << buf << "\n";
    out << "====================================================\n";
    out << "Distribution of the size of the blocks:\n";
    out << "Block Size | Number of Blocks\n";
    for (const auto& [size, count] : result.block_sizes) {
        std::snprintf(buf, sizeof(buf), "%10zu | %zu", size, count);
        out << buf << "\n";
    }
    return out.str();
}

void write_result_csv(std::ostream& out, const BlockingResult& result) {
    out << "x,y,block,dist\n";
    char buf[32];
    for (const BlockRow& row : result.rows) {
        std::snprintf(buf, sizeof(buf), "%.6f", row.dist);
        out << row.x << ',' << row.y << ',' << row.block << ',' << buf << '\n';
    }
}

void write_result_csv(const std::string& path, const BlockingResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write file: " + path);
    }
    write_result_csv(out, result);
    if (!out.flush()) {
        throw IoError("failed writing file: " + path);
    }
}

BlockingResult read_result_csv(const std::string& path, BlockingMode mode) {
    csv::Table table = csv::read_file(path);
    const std::vector<std::string> expected = {"x", "y", "block", "dist"};
    if (table.header != expected) {
        throw ValidationError(path + ": expected header x,y,block,dist");
    }
    BlockingResult result;
    result.mode = mode;
    std::size_t max_x = 0, max_y = 0;
    std::int64_t max_block = -1;
    for (const auto& fields : table.rows) {
        BlockRow row;
        try {
            row.x = static_cast<std::size_t>(std::stoull(fields[0]));
            row.y = static_cast<std::size_t>(std::stoull(fields[1]));
            row.block = std::stoll(fields[2]);
            row.dist = std::stod(fields[3]);
        } catch (const std::exception&) {
            throw ValidationError(path + ": malformed result row");
        }
        if (row.block < 0) {
            throw ValidationError(path + ": negative block id");
        }
        max_x = std::max(max_x, row.x);
        max_y = std::max(max_y, row.y);
        max_block = std::max(max_block, row.block);
        result.rows.push_back(row);
    }
    result.m = result.rows.empty() ? 0 : max_x + 1;
    result.n = result.rows.empty() ? 0 : max_y + 1;
    if (mode == BlockingMode::dedup) {
        result.m = result.n = std::max(result.m, result.n);
    }
    result.n_blocks = static_cast<std::size_t>(max_block + 1);
    result.x_blocks.assign(result.m, -1);
    if (mode == BlockingMode::linkage) result.y_blocks.assign(result.n, -1);
    for (const BlockRow& row : result.rows) {
        result.x_blocks[row.x] = row.block;
        if (mode == BlockingMode::dedup) {
            result.x_blocks[row.y] = row.block;
        } else {
            result.y_blocks[row.y] = row.block;
        }
    }

    // Rebuild the histogram and reduction ratio from membership.
    std::vector<std::pair<std::size_t, std::size_t>> per_block(result.n_blocks, {0, 0});
    for (std::int64_t b : result.x_blocks) {
        if (b >= 0) ++per_block[static_cast<std::size_t>(b)].first;
    }
    for (std::int64_t b : result.y_blocks) {
        if (b >= 0) ++per_block[static_cast<std::size_t>(b)].second;
    }
    for (const auto& [bx, by] : per_block) {
        if (bx + by > 0) ++result.block_sizes[bx + by];
    }
    if (mode == BlockingMode::dedup) {
        result.reduction_ratio =
            result.m >= 2 ? reduction_ratio_dedup(result.block_sizes, result.m) : 1.0;
    } else if (result.m >= 1 && result.n >= 1) {
        result.reduction_ratio = reduction_ratio_linkage(per_block, result.m, result.n);
    }
    return result;
}

}  // namespace annblock
