#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "annblock/encode.hpp"
#include "annblock/errors.hpp"
#include "support.hpp"

using namespace annblock;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

void check_csr_invariants(const ShingleMatrix& m) {
    REQUIRE(m.row_offsets.size() == m.n_rows + 1);
    CHECK(m.row_offsets.front() == 0);
    CHECK(m.row_offsets.back() == m.col_indices.size());
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        CHECK(m.row_offsets[r] <= m.row_offsets[r + 1]);
        for (std::size_t j = m.row_offsets[r]; j < m.row_offsets[r + 1]; ++j) {
            CHECK(m.values[j] > 0.0);
            CHECK(m.col_indices[j] >= 0);
            CHECK(static_cast<std::size_t>(m.col_indices[j]) < m.n_cols());
            if (j + 1 < m.row_offsets[r + 1]) {
                CHECK(m.col_indices[j] < m.col_indices[j + 1]);
            }
        }
    }
}

}  // namespace

TEST_CASE("shingle basics") {
    auto ab = shingle("abc", 2);
    CHECK(ab == std::map<std::string, std::size_t>{{"ab", 1}, {"bc", 1}});
    auto aa = shingle("aaa", 2);
    CHECK(aa == std::map<std::string, std::size_t>{{"aa", 2}});
    CHECK(shingle("a", 2).empty());
    CHECK(shingle("", 1).empty());
    CHECK_THROWS_AS(shingle("abc", 0), ValidationError);
}

TEST_CASE("shingles are codepoint based") {
    auto s = shingle("оле", 2);
    CHECK(s == std::map<std::string, std::size_t>{{"ол", 1}, {"ле", 1}});
}

TEST_CASE("shared vocabulary spans both corpora") {
    Corpus x = corpus_from_texts({"ab"});
    Corpus y = corpus_from_texts({"bc"});
    auto [mx, my] = build_dtm(x, &y, TextControls{2, true, true});
    REQUIRE(my.has_value());
    CHECK(mx.vocabulary == std::vector<std::string>{"ab", "bc"});
    CHECK(my->vocabulary == mx.vocabulary);
    REQUIRE(mx.n_rows == 1);
    CHECK(mx.col_indices == std::vector<std::int32_t>{0});
    CHECK(mx.values == std::vector<double>{1.0});
    CHECK(my->col_indices == std::vector<std::int32_t>{1});
}

TEST_CASE("deduplication DTM counts multiplicities") {
    Corpus x = corpus_from_texts({"abab"});
    auto [mx, my] = build_dtm(x, nullptr, TextControls{2, true, true});
    CHECK(!my.has_value());
    CHECK(mx.vocabulary == std::vector<std::string>{"ab", "ba"});
    CHECK(mx.values == std::vector<double>{2.0, 1.0});
    check_csr_invariants(mx);
}

TEST_CASE("rows shorter than n stay in the matrix as empty rows") {
    Corpus x = corpus_from_texts({"abc", "", "z"});
    auto [mx, _] = build_dtm(x, nullptr, TextControls{2, true, true});
    REQUIRE(mx.n_rows == 3);
    CHECK(mx.row_offsets[1] - mx.row_offsets[0] == 2);
    CHECK(mx.row_offsets[2] - mx.row_offsets[1] == 0);
    CHECK(mx.row_offsets[3] - mx.row_offsets[2] == 0);
    check_csr_invariants(mx);
}

TEST_CASE("count conservation and vocabulary completeness on random corpora") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 1 + static_cast<int>(rng() % 3);
        std::vector<std::string> texts;
        std::size_t rows = 1 + rng() % 12;
        for (std::size_t r = 0; r < rows; ++r) {
            std::string t;
            std::size_t len = rng() % 14;
            for (std::size_t i = 0; i < len; ++i) {
                t.push_back(static_cast<char>('a' + rng() % 4));
            }
            texts.push_back(t);
        }
        Corpus x = corpus_from_texts(texts);
        TextControls controls{n, true, true};
        auto [mx, _] = build_dtm(x, nullptr, controls);
        check_csr_invariants(mx);

        for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (std::size_t j = mx.row_offsets[r]; j < mx.row_offsets[r + 1]; ++j) {
                sum += mx.values[j];
            }
            std::size_t len = texts[r].size();  // pure-ASCII corpus
            double expected =
                len + 1 >= static_cast<std::size_t>(n)
                    ? static_cast<double>(len + 1 - static_cast<std::size_t>(n))
                    : 0.0;
            CHECK(sum == expected);
        }

        // Every vocabulary column carries at least one count, and every
        // occurring shingle is present exactly once.
        std::vector<double> col_totals(mx.n_cols(), 0.0);
        for (std::size_t j = 0; j < mx.values.size(); ++j) {
            col_totals[static_cast<std::size_t>(mx.col_indices[j])] += mx.values[j];
        }
        for (double total : col_totals) CHECK(total > 0.0);
        for (std::size_t c = 0; c + 1 < mx.n_cols(); ++c) {
            CHECK(mx.vocabulary[c] < mx.vocabulary[c + 1]);
        }
        for (const auto& t : texts) {
            for (const auto& [s, count] : shingle(t, n)) {
                auto it = std::lower_bound(mx.vocabulary.begin(), mx.vocabulary.end(), s);
                REQUIRE(it != mx.vocabulary.end());
                CHECK(*it == s);
            }
        }
    }
}

TEST_CASE("build_dtm is deterministic") {
    std::vector<std::string> texts = {"john smith", "jon smith", "mary jones"};
    Corpus x = corpus_from_texts(texts);
    auto [a, _1] = build_dtm(x, nullptr, TextControls{});
    auto [b, _2] = build_dtm(x, nullptr, TextControls{});
    CHECK(a.vocabulary == b.vocabulary);
    CHECK(a.row_offsets == b.row_offsets);
    CHECK(a.col_indices == b.col_indices);
    CHECK(a.values == b.values);
}

TEST_CASE("empty corpora are rejected") {
    Corpus empty;
    CHECK_THROWS_AS(build_dtm(empty, nullptr, TextControls{}), ValidationError);
    Corpus x = corpus_from_texts({"ab"});
    CHECK_THROWS_AS(build_dtm(x, &empty, TextControls{}), ValidationError);
}

TEST_CASE("load_dense parses a plain float grid") {
    TempDir dir;
    auto path = dir.file("id.csv");
    write_file(path, "1,0\n0,1\n");
    DenseMatrix m = load_dense(path);
    CHECK(m.n_rows == 2);
    CHECK(m.n_cols == 2);
    CHECK(m.data == std::vector<double>{1, 0, 0, 1});
}

TEST_CASE("load_dense rejects bad cells with the row number") {
    TempDir dir;
    auto nan_path = dir.file("nan.csv");
    write_file(nan_path, "1,0\n0,nan\n");
    CHECK_THROWS_WITH_AS(load_dense(nan_path), doctest::Contains("row 2"), ValidationError);

    auto ragged = dir.file("ragged.csv");
    write_file(ragged, "1,2\n3\n");
    CHECK_THROWS_WITH_AS(load_dense(ragged), doctest::Contains("row 2"), ValidationError);

    auto alpha = dir.file("alpha.csv");
    write_file(alpha, "1,x\n");
    CHECK_THROWS_AS(load_dense(alpha), ValidationError);

    CHECK_THROWS_AS(load_dense(dir.file("missing.csv")), IoError);

    auto empty = dir.file("empty.csv");
    write_file(empty, "");
    CHECK_THROWS_AS(load_dense(empty), ValidationError);
}
