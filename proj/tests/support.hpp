#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "annblock/ann.hpp"
#include "annblock/encode.hpp"

namespace testsupport {

/// Self-cleaning temporary directory for file-based tests.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0; attempt < 100; ++attempt) {
            auto candidate = base / ("annblock-test-" + std::to_string(counter_++));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    return content;
}

/// Random sparse count matrix with the CSR invariants of ShingleMatrix.
inline annblock::ShingleMatrix random_sparse(std::mt19937_64& rng, std::size_t rows,
                                             std::size_t cols, int max_nnz_per_row = 8,
                                             bool allow_empty_rows = false) {
    annblock::ShingleMatrix m;
    m.n_rows = rows;
    m.vocabulary.resize(cols);
    for (std::size_t c = 0; c < cols; ++c) m.vocabulary[c] = "t" + std::to_string(c);
    m.row_offsets.push_back(0);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t nnz = rng() % static_cast<std::size_t>(max_nnz_per_row + 1);
        if (!allow_empty_rows && nnz == 0) nnz = 1;
        nnz = std::min(nnz, cols);
        std::vector<std::int32_t> picked;
        while (picked.size() < nnz) {
            auto c = static_cast<std::int32_t>(rng() % cols);
            bool dup = false;
            for (std::int32_t p : picked) dup = dup || p == c;
            if (!dup) picked.push_back(c);
        }
        std::sort(picked.begin(), picked.end());
        for (std::int32_t c : picked) {
            m.col_indices.push_back(c);
            m.values.push_back(static_cast<double>(1 + rng() % 5));
        }
        m.row_offsets.push_back(m.col_indices.size());
    }
    return m;
}

inline annblock::DenseMatrix random_dense(std::mt19937_64& rng, std::size_t rows,
                                          std::size_t cols) {
    annblock::DenseMatrix m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.data.resize(rows * cols);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (double& x : m.data) x = uniform(rng);
    return m;
}

/// Densifies one sparse row; the oracle path deliberately avoids the
/// library's merge-join kernels.
inline std::vector<double> densify_row(const annblock::ShingleMatrix& m, std::size_t r) {
    std::vector<double> row(m.n_cols(), 0.0);
    for (std::size_t j = m.row_offsets[r]; j < m.row_offsets[r + 1]; ++j) {
        row[static_cast<std::size_t>(m.col_indices[j])] = m.values[j];
    }
    return row;
}

inline double oracle_distance(const std::vector<double>& u, const std::vector<double>& v,
                              annblock::MetricKind metric) {
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (metric == annblock::MetricKind::cosine) {
        double denom = std::sqrt(nu * nv);
        if (denom == 0.0) return 1.0;
        return std::max(0.0, 1.0 - dot / denom);
    }
    return std::sqrt(std::max(0.0, nu + nv - 2.0 * dot));
}

/// Brute-force top-k over explicit dense rows, sorted by (dist, index).
inline std::vector<annblock::Neighbor> oracle_knn(
    const std::vector<std::vector<double>>& reference, const std::vector<double>& query,
    std::size_t query_index, int k, annblock::MetricKind metric) {
    std::vector<annblock::Neighbor> all;
    for (std::size_t r = 0; r < reference.size(); ++r) {
        all.push_back({query_index, r, oracle_distance(query, reference[r], metric)});
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.dist < b.dist || (a.dist == b.dist && a.ref_index < b.ref_index);
    });
    if (all.size() > static_cast<std::size_t>(k)) all.resize(static_cast<std::size_t>(k));
    return all;
}

}  // namespace testsupport
