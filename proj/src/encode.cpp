#include "annblock/encode.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "annblock/errors.hpp"

namespace annblock {

std::map<std::string, std::size_t> shingle(std::string_view text, int n) {
    if (n < 1) {
        throw ValidationError("shingle width must be >= 1");
    }
    std::map<std::string, std::size_t> counts;
    std::vector<char32_t> cps = utf8_decode(text);
    if (cps.size() < static_cast<std::size_t>(n)) return counts;
    std::string key;
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
        key.clear();
        for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
            utf8_encode(cps[i + k], key);
        }
        ++counts[key];
    }
    return counts;
}

namespace {

// Per-document shingle counts resolved to vocabulary ids, kept until the
// shared vocabulary ordering is known.
struct DocCounts {
    std::vector<std::pair<std::int32_t, double>> entries;  // (interned id, count)
};

class Interner {
public:
    std::int32_t intern(const std::string& s) {
        auto [it, inserted] = ids_.try_emplace(s, static_cast<std::int32_t>(strings_.size()));
        if (inserted) strings_.push_back(s);
        return it->second;
    }
    const std::vector<std::string>& strings() const { return strings_; }

private:
    std::unordered_map<std::string, std::int32_t> ids_;
    std::vector<std::string> strings_;
};

std::vector<DocCounts> count_corpus(const Corpus& corpus, const TextControls& controls,
                                    Interner& interner) {
    std::vector<DocCounts> docs(corpus.size());
    std::unordered_map<std::int32_t, double> row_counts;
    std::string key;
    for (std::size_t r = 0; r < corpus.size(); ++r) {
        row_counts.clear();
        std::string norm = normalize(corpus.records[r].key_text, controls);
        std::vector<char32_t> cps = utf8_decode(norm);
        std::size_t n = static_cast<std::size_t>(controls.n_shingles);
        if (cps.size() >= n) {
            for (std::size_t i = 0; i + n <= cps.size(); ++i) {
                key.clear();
                for (std::size_t k = 0; k < n; ++k) utf8_encode(cps[i + k], key);
                row_counts[interner.intern(key)] += 1.0;
            }
        }
        docs[r].entries.assign(row_counts.begin(), row_counts.end());
    }
    return docs;
}

ShingleMatrix to_csr(const std::vector<DocCounts>& docs,
                     const std::vector<std::int32_t>& id_to_col,
                     std::vector<std::string> vocabulary) {
    ShingleMatrix m;
    m.n_rows = docs.size();
    m.vocabulary = std::move(vocabulary);
    m.row_offsets.resize(docs.size() + 1, 0);
    std::size_t nnz = 0;
    for (const auto& d : docs) nnz += d.entries.size();
    m.col_indices.reserve(nnz);
    m.values.reserve(nnz);

    std::vector<std::pair<std::int32_t, double>> row;
    for (std::size_t r = 0; r < docs.size(); ++r) {
        row.clear();
        for (const auto& [id, count] : docs[r].entries) {
            row.emplace_back(id_to_col[static_cast<std::size_t>(id)], count);
        }
        std::sort(row.begin(), row.end());
        for (const auto& [col, count] : row) {
            m.col_indices.push_back(col);
            m.values.push_back(count);
        }
        m.row_offsets[r + 1] = m.col_indices.size();
    }
    return m;
}

}  // namespace

std::pair<ShingleMatrix, std::optional<ShingleMatrix>> build_dtm(
    const Corpus& corpus_x, const Corpus* corpus_y, const TextControls& controls) {
    if (corpus_x.size() == 0 || (corpus_y && corpus_y->size() == 0)) {
        throw ValidationError("cannot build a document-term matrix over an empty corpus");
    }
    if (controls.n_shingles < 1) {
        throw ValidationError("n_shingles must be >= 1");
    }

    Interner interner;
    std::vector<DocCounts> docs_x = count_corpus(corpus_x, controls, interner);
    std::vector<DocCounts> docs_y;
    if (corpus_y) docs_y = count_corpus(*corpus_y, controls, interner);

    // Lexicographic vocabulary over the union of both corpora.
    const auto& strings = interner.strings();
    std::vector<std::int32_t> order(strings.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int32_t>(i);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        return strings[static_cast<std::size_t>(a)] < strings[static_cast<std::size_t>(b)];
    });
    std::vector<std::int32_t> id_to_col(strings.size());
    std::vector<std::string> vocabulary(strings.size());
    for (std::size_t col = 0; col < order.size(); ++col) {
        id_to_col[static_cast<std::size_t>(order[col])] = static_cast<std::int32_t>(col);
        vocabulary[col] = strings[static_cast<std::size_t>(order[col])];
    }

    ShingleMatrix mx = to_csr(docs_x, id_to_col, vocabulary);
    std::optional<ShingleMatrix> my;
    if (corpus_y) {
        my = to_csr(docs_y, id_to_col, std::move(vocabulary));
    }
    return {std::move(mx), std::move(my)};
}

DenseMatrix load_dense(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path);
    }
    DenseMatrix m;
    std::string line;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        ++row_no;
        std::size_t cols_in_row = 0;
        const char* p = line.data();
        const char* end = p + line.size();
        while (true) {
            const char* cell_end = std::find(p, end, ',');
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(p, cell_end, value);
            if (ec != std::errc() || ptr != cell_end) {
                std::ostringstream msg;
                msg << path << ": row " << row_no << ": non-numeric cell \""
                    << std::string(p, cell_end) << "\"";
                throw ValidationError(msg.str());
            }
            if (!std::isfinite(value)) {
                std::ostringstream msg;
                msg << path << ": row " << row_no << ": non-finite value";
                throw ValidationError(msg.str());
            }
            m.data.push_back(value);
            ++cols_in_row;
            if (cell_end == end) break;
            p = cell_end + 1;
        }
        if (m.n_rows == 0) {
            m.n_cols = cols_in_row;
        } else if (cols_in_row != m.n_cols) {
            std::ostringstream msg;
            msg << path << ": row " << row_no << " has " << cols_in_row
                << " columns, expected " << m.n_cols;
            throw ValidationError(msg.str());
        }
        ++m.n_rows;
    }
    if (m.n_rows == 0) {
        throw ValidationError(path + ": empty dense matrix file");
    }
    return m;
}

}  // namespace annblock
