#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "annblock/corpus.hpp"

namespace annblock {

/// Sparse row-major document-term matrix of character n-gram counts.
/// CSR triplet invariants: row_offsets has n_rows+1 entries and is
/// non-decreasing, column indices are strictly increasing within a row,
/// and every stored value is a positive count.
struct ShingleMatrix {
    std::size_t n_rows = 0;
    std::vector<std::string> vocabulary;  // lexicographically sorted; index = column
    std::vector<std::size_t> row_offsets;
    std::vector<std::int32_t> col_indices;
    std::vector<double> values;

    std::size_t n_cols() const { return vocabulary.size(); }
};

/// Row-major dense matrix; entries must be finite.
struct DenseMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> data;

    const double* row(std::size_t i) const { return data.data() + i * n_cols; }
};

/// All contiguous codepoint substrings of length n, with multiplicity.
/// Strings shorter than n yield an empty multiset.
std::map<std::string, std::size_t> shingle(std::string_view text, int n);

/// Builds the DTM(s) over the normalized key texts. When corpus_y is given
/// (record linkage) a single vocabulary is built over the union of shingles
/// from both corpora, so both matrices share one column space.
std::pair<ShingleMatrix, std::optional<ShingleMatrix>> build_dtm(
    const Corpus& corpus_x, const Corpus* corpus_y, const TextControls& controls);

/// Reads a headerless CSV of decimal floats, one record per line.
/// Ragged rows, non-numeric cells, and NaN/Inf entries raise a
/// ValidationError naming the offending row.
DenseMatrix load_dense(const std::string& path);

}  // namespace annblock
