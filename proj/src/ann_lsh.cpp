#include "ann_internal.hpp"
#include "annblock/errors.hpp"

namespace annblock::detail {

LshBackend::LshBackend(RefStore ref, MetricKind metric, LshControls params,
                       std::uint64_t seed)
    : Backend(std::move(ref)), metric_(metric), params_(params) {
    if (params_.n_tables < 1) throw ValidationError("lsh n_tables must be >= 1");
    if (params_.n_bits < 1 || params_.n_bits > 64) {
        throw ValidationError("lsh n_bits must be in [1, 64]");
    }

    // Sign-random-projection sketch: one Gaussian hyperplane per bit.
    std::size_t n_planes =
        static_cast<std::size_t>(params_.n_tables) * static_cast<std::size_t>(params_.n_bits);
    hyperplanes_.resize(n_planes * ref_.n_cols);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& h : hyperplanes_) h = gauss(rng);

    tables_.resize(static_cast<std::size_t>(params_.n_tables));
    for (int t = 0; t < params_.n_tables; ++t) {
        auto& table = tables_[static_cast<std::size_t>(t)];
        for (std::size_t r = 0; r < ref_.n_rows; ++r) {
            table[signature(ref_.row(r), t)].push_back(static_cast<std::int32_t>(r));
        }
    }
}

std::uint64_t LshBackend::signature(const RowRef& row, int table) const {
    std::uint64_t sig = 0;
    std::size_t base = static_cast<std::size_t>(table) *
                       static_cast<std::size_t>(params_.n_bits) * ref_.n_cols;
    for (int b = 0; b < params_.n_bits; ++b) {
        const double* plane = hyperplanes_.data() + base + static_cast<std::size_t>(b) * ref_.n_cols;
        double proj = 0.0;
        if (row.is_sparse()) {
            for (std::size_t i = 0; i < row.nnz; ++i) proj += row.val[i] * plane[row.idx[i]];
        } else {
            for (std::size_t j = 0; j < row.dim; ++j) proj += row.dense[j] * plane[j];
        }
        if (proj > 0.0) sig |= (std::uint64_t{1} << b);
    }
    return sig;
}

std::vector<Neighbor> LshBackend::search_row(const RowRef& q, std::size_t query_index,
                                             int k) const {
    std::vector<std::int32_t> candidates;
    for (int t = 0; t < params_.n_tables; ++t) {
        auto it = tables_[static_cast<std::size_t>(t)].find(signature(q, t));
        if (it == tables_[static_cast<std::size_t>(t)].end()) continue;
        candidates.insert(candidates.end(), it->second.begin(), it->second.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Re-rank the candidate union by true distance. Fewer than k candidates
    // is a valid outcome for small buckets.
    TopK top(static_cast<std::size_t>(k));
    for (std::int32_t r : candidates) {
        top.offer(pair_distance(q, ref_.row(static_cast<std::size_t>(r)), metric_),
                  static_cast<std::size_t>(r));
    }
    return top.take(query_index);
}

std::vector<std::vector<std::int32_t>> LshBackend::buckets(int table) const {
    std::vector<std::vector<std::int32_t>> out;
    const auto& t = tables_.at(static_cast<std::size_t>(table));
    out.reserve(t.size());
    // Deterministic order for tests: sort buckets by signature.
    std::vector<std::uint64_t> sigs;
    sigs.reserve(t.size());
    for (const auto& [sig, rows] : t) sigs.push_back(sig);
    std::sort(sigs.begin(), sigs.end());
    for (std::uint64_t sig : sigs) out.push_back(t.at(sig));
    return out;
}

}  // namespace annblock::detail
