#include <cmath>
#include <limits>
#include <queue>

#include "ann_internal.hpp"
#include "annblock/errors.hpp"

namespace annblock::detail {

namespace {
std::size_t max_degree(const HnswControls& params, int level) {
    auto m = static_cast<std::size_t>(params.m);
    return level == 0 ? 2 * m : m;
}
}  // namespace

HnswBackend::HnswBackend(RefStore ref, MetricKind metric, HnswControls params,
                         std::uint64_t seed)
    : Backend(std::move(ref)), metric_(metric), params_(params) {
    if (params_.m < 2) throw ValidationError("hnsw M must be >= 2");
    if (params_.ef_c < 1) throw ValidationError("hnsw ef_c must be >= 1");
    if (params_.ef_s < 1) throw ValidationError("hnsw ef_s must be >= 1");

    // Exponential level assignment with multiplier 1/ln(M), drawn up front
    // in row order so the build is reproducible for a given seed.
    const double level_mult = 1.0 / std::log(static_cast<double>(params_.m));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    levels_.resize(ref_.n_rows);
    int top = 0;
    for (auto& level : levels_) {
        double u = uniform(rng);
        if (u <= 0.0) u = std::numeric_limits<double>::min();
        level = static_cast<int>(-std::log(u) * level_mult);
        top = std::max(top, level);
    }
    adjacency_.assign(static_cast<std::size_t>(top) + 1,
                      std::vector<std::vector<std::int32_t>>(ref_.n_rows));

    for (std::size_t node = 0; node < ref_.n_rows; ++node) {
        insert(static_cast<std::int32_t>(node), levels_[node]);
    }
}

double HnswBackend::node_distance(const RowRef& q, std::int32_t node) const {
    return pair_distance(q, ref_.row(static_cast<std::size_t>(node)), metric_);
}

std::vector<HnswBackend::Candidate> HnswBackend::search_layer(const RowRef& q,
                                                              std::int32_t entry,
                                                              std::size_t ef,
                                                              int level) const {
    std::vector<char> visited(ref_.n_rows, 0);
    visited[static_cast<std::size_t>(entry)] = 1;

    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<Candidate>> frontier;
    std::priority_queue<Candidate> best;  // max-heap: top() is the worst kept result

    Candidate start{node_distance(q, entry), entry};
    frontier.push(start);
    best.push(start);

    const auto& layer = adjacency_[static_cast<std::size_t>(level)];
    while (!frontier.empty()) {
        Candidate cur = frontier.top();
        frontier.pop();
        if (best.size() >= ef && best.top() < cur) break;
        for (std::int32_t nb : layer[static_cast<std::size_t>(cur.id)]) {
            if (visited[static_cast<std::size_t>(nb)]) continue;
            visited[static_cast<std::size_t>(nb)] = 1;
            Candidate cand{node_distance(q, nb), nb};
            if (best.size() < ef || cand < best.top()) {
                frontier.push(cand);
                best.push(cand);
                if (best.size() > ef) best.pop();
            }
        }
    }

    std::vector<Candidate> out;
    out.resize(best.size());
    for (std::size_t i = best.size(); i-- > 0;) {
        out[i] = best.top();
        best.pop();
    }
    return out;
}

std::vector<HnswBackend::Candidate> HnswBackend::select_neighbors(
    const RowRef& base, std::vector<Candidate> candidates, std::size_t m) const {
    if (candidates.size() <= m) return candidates;
    if (!params_.select_heuristic) {
        candidates.resize(m);  // simple nearest selection; input is sorted ascending
        return candidates;
    }
    // Diversity heuristic: keep a candidate only when it is closer to the
    // base point than to every neighbour already kept, then backfill with
    // the nearest discarded candidates.
    std::vector<Candidate> kept, discarded;
    for (const Candidate& c : candidates) {
        if (kept.size() >= m) break;
        bool closer_to_base = true;
        RowRef c_row = ref_.row(static_cast<std::size_t>(c.id));
        for (const Candidate& r : kept) {
            if (pair_distance(c_row, ref_.row(static_cast<std::size_t>(r.id)), metric_) <
                c.dist) {
                closer_to_base = false;
                break;
            }
        }
        if (closer_to_base) {
            kept.push_back(c);
        } else {
            discarded.push_back(c);
        }
    }
    for (const Candidate& c : discarded) {
        if (kept.size() >= m) break;
        kept.push_back(c);
    }
    return kept;
}

void HnswBackend::shrink_adjacency(std::int32_t node, int level, std::size_t m_max) {
    auto& adj = adjacency_[static_cast<std::size_t>(level)][static_cast<std::size_t>(node)];
    if (adj.size() <= m_max) return;

    RowRef base = ref_.row(static_cast<std::size_t>(node));
    std::vector<Candidate> candidates;
    candidates.reserve(adj.size());
    for (std::int32_t nb : adj) candidates.push_back({node_distance(base, nb), nb});
    std::sort(candidates.begin(), candidates.end());

    std::vector<Candidate> kept = select_neighbors(base, std::move(candidates), m_max);
    std::vector<char> keep_flag(ref_.n_rows, 0);
    for (const Candidate& c : kept) keep_flag[static_cast<std::size_t>(c.id)] = 1;

    // Remove the reverse edge of every dropped neighbour so that adjacency
    // stays symmetric within the layer.
    for (std::int32_t nb : adj) {
        if (keep_flag[static_cast<std::size_t>(nb)]) continue;
        auto& back =
            adjacency_[static_cast<std::size_t>(level)][static_cast<std::size_t>(nb)];
        back.erase(std::find(back.begin(), back.end(), node));
    }
    adj.clear();
    for (const Candidate& c : kept) adj.push_back(c.id);
}

void HnswBackend::insert(std::int32_t node, int level) {
    if (entry_point_ < 0) {
        entry_point_ = node;
        max_level_ = level;
        return;
    }
    RowRef q = ref_.row(static_cast<std::size_t>(node));
    std::int32_t cur = entry_point_;

    for (int l = max_level_; l > level; --l) {
        cur = search_layer(q, cur, 1, l).front().id;
    }
    for (int l = std::min(level, max_level_); l >= 0; --l) {
        std::vector<Candidate> found =
            search_layer(q, cur, static_cast<std::size_t>(params_.ef_c), l);
        std::vector<Candidate> chosen =
            select_neighbors(q, found, static_cast<std::size_t>(params_.m));
        auto& layer = adjacency_[static_cast<std::size_t>(l)];
        for (const Candidate& nb : chosen) {
            layer[static_cast<std::size_t>(node)].push_back(nb.id);
            layer[static_cast<std::size_t>(nb.id)].push_back(node);
        }
        std::size_t cap = max_degree(params_, l);
        for (const Candidate& nb : chosen) {
            if (layer[static_cast<std::size_t>(nb.id)].size() > cap) {
                shrink_adjacency(nb.id, l, cap);
            }
        }
        cur = found.front().id;
    }
    if (level > max_level_) {
        entry_point_ = node;
        max_level_ = level;
    }
}

std::vector<Neighbor> HnswBackend::search_row(const RowRef& q, std::size_t query_index,
                                              int k) const {
    std::int32_t cur = entry_point_;
    for (int l = max_level_; l > 0; --l) {
        cur = search_layer(q, cur, 1, l).front().id;
    }
    std::size_t ef = std::max(static_cast<std::size_t>(params_.ef_s),
                              static_cast<std::size_t>(k));
    std::vector<Candidate> found = search_layer(q, cur, ef, 0);
    if (found.size() > static_cast<std::size_t>(k)) {
        found.resize(static_cast<std::size_t>(k));
    }
    std::vector<Neighbor> out;
    out.reserve(found.size());
    for (const Candidate& c : found) {
        out.push_back(Neighbor{query_index, static_cast<std::size_t>(c.id), c.dist});
    }
    return out;
}

}  // namespace annblock::detail
