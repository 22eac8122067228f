#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "annblock/ann.hpp"
#include "annblock/errors.hpp"
#include "support.hpp"

using namespace annblock;
using namespace testsupport;

namespace {

std::vector<std::vector<double>> densify(const ShingleMatrix& m) {
    std::vector<std::vector<double>> rows;
    rows.reserve(m.n_rows);
    for (std::size_t r = 0; r < m.n_rows; ++r) rows.push_back(densify_row(m, r));
    return rows;
}

std::vector<std::vector<double>> densify(const DenseMatrix& m) {
    std::vector<std::vector<double>> rows;
    rows.reserve(m.n_rows);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        rows.emplace_back(m.row(r), m.row(r) + m.n_cols);
    }
    return rows;
}

AnnControls controls_for(AnnAlgorithm algo, MetricKind metric = MetricKind::cosine,
                         std::uint64_t seed = 42) {
    AnnControls c;
    c.algorithm = algo;
    c.metric = metric;
    c.random_seed = seed;
    return c;
}

double recall_vs_exact(const NeighborLists& approx, const NeighborLists& exact, int k) {
    std::size_t hit = 0, want = 0;
    for (std::size_t q = 0; q < exact.size(); ++q) {
        std::set<std::size_t> truth;
        for (const auto& nb : exact[q]) truth.insert(nb.ref_index);
        want += truth.size();
        std::size_t taken = 0;
        for (const auto& nb : approx[q]) {
            if (taken++ >= static_cast<std::size_t>(k)) break;
            if (truth.count(nb.ref_index)) ++hit;
        }
    }
    return static_cast<double>(hit) / static_cast<double>(want);
}

}  // namespace

TEST_CASE("exact backend equals the brute-force oracle on sparse rows") {
    std::mt19937_64 rng(101);
    for (MetricKind metric : {MetricKind::cosine, MetricKind::euclidean}) {
        ShingleMatrix m = random_sparse(rng, 120, 40);
        auto dense_rows = densify(m);
        AnnIndex index = AnnIndex::build(m, controls_for(AnnAlgorithm::exact, metric));
        NeighborLists got = index.query(m, 5);
        REQUIRE(got.size() == m.n_rows);
        for (std::size_t q = 0; q < m.n_rows; ++q) {
            auto want = oracle_knn(dense_rows, dense_rows[q], q, 5, metric);
            REQUIRE(got[q].size() == want.size());
            for (std::size_t i = 0; i < want.size(); ++i) {
                CHECK(got[q][i].ref_index == want[i].ref_index);
                CHECK(got[q][i].dist == doctest::Approx(want[i].dist).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("exact backend equals the brute-force oracle on dense rows") {
    std::mt19937_64 rng(102);
    for (MetricKind metric : {MetricKind::cosine, MetricKind::euclidean}) {
        DenseMatrix m = random_dense(rng, 100, 16);
        auto rows = densify(m);
        AnnIndex index = AnnIndex::build(m, controls_for(AnnAlgorithm::exact, metric));
        NeighborLists got = index.query(m, 7);
        for (std::size_t q = 0; q < m.n_rows; ++q) {
            auto want = oracle_knn(rows, rows[q], q, 7, metric);
            REQUIRE(got[q].size() == want.size());
            for (std::size_t i = 0; i < want.size(); ++i) {
                CHECK(got[q][i].ref_index == want[i].ref_index);
                CHECK(got[q][i].dist == doctest::Approx(want[i].dist).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("metric axioms hold numerically") {
    std::mt19937_64 rng(103);
    DenseMatrix m = random_dense(rng, 30, 8);
    auto rows = densify(m);
    for (MetricKind metric : {MetricKind::cosine, MetricKind::euclidean}) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(dense_distance(rows[i], rows[i], metric) <= 1e-12);
            std::size_t j = rng() % rows.size();
            double ij = dense_distance(rows[i], rows[j], metric);
            double ji = dense_distance(rows[j], rows[i], metric);
            CHECK(ij == doctest::Approx(ji).epsilon(1e-12));
            CHECK(ij >= 0.0);
        }
    }
}

TEST_CASE("zero-norm vectors are at cosine distance 1 from everything") {
    std::vector<double> zero(4, 0.0);
    std::vector<double> other = {1.0, 2.0, 0.0, 1.0};
    CHECK(dense_distance(zero, other, MetricKind::cosine) == 1.0);
    CHECK(dense_distance(zero, zero, MetricKind::cosine) == 1.0);
    CHECK(dense_distance(zero, zero, MetricKind::euclidean) == 0.0);
}

TEST_CASE("neighbour lists are sorted with index tie-breaks") {
    // Duplicate rows force exact distance ties.
    ShingleMatrix m;
    m.n_rows = 4;
    m.vocabulary = {"aa", "bb"};
    m.row_offsets = {0, 1, 2, 3, 4};
    m.col_indices = {0, 0, 0, 1};
    m.values = {1, 1, 1, 1};
    AnnIndex index = AnnIndex::build(m, controls_for(AnnAlgorithm::exact));
    NeighborLists got = index.query(m, 4);
    for (const auto& list : got) {
        for (std::size_t i = 0; i + 1 < list.size(); ++i) {
            bool ordered = list[i].dist < list[i + 1].dist ||
                           (list[i].dist == list[i + 1].dist &&
                            list[i].ref_index < list[i + 1].ref_index);
            CHECK(ordered);
        }
    }
    CHECK(got[0][0].ref_index == 0);
    CHECK(got[0][1].ref_index == 1);
    CHECK(got[0][2].ref_index == 2);
}

TEST_CASE("a query equal to a reference row comes back at distance zero") {
    std::mt19937_64 rng(104);
    ShingleMatrix m = random_sparse(rng, 50, 20);
    for (AnnAlgorithm algo : {AnnAlgorithm::exact, AnnAlgorithm::lsh, AnnAlgorithm::hnsw}) {
        AnnIndex index = AnnIndex::build(m, controls_for(algo));
        NeighborLists got = index.query(m, 3);
        for (std::size_t q = 0; q < m.n_rows; ++q) {
            REQUIRE(!got[q].empty());
            CHECK(got[q][0].dist <= 1e-12);
        }
    }
}

TEST_CASE("one-row reference answers with that row on every backend") {
    DenseMatrix m;
    m.n_rows = 1;
    m.n_cols = 3;
    m.data = {0.5, 0.25, 0.25};
    for (AnnAlgorithm algo : {AnnAlgorithm::exact, AnnAlgorithm::lsh, AnnAlgorithm::hnsw}) {
        AnnIndex index = AnnIndex::build(m, controls_for(algo));
        NeighborLists got = index.query(m, 5);
        REQUIRE(got.size() == 1);
        REQUIRE(got[0].size() == 1);
        CHECK(got[0][0].ref_index == 0);

        NeighborLists self = index.self_query(5);
        CHECK(self[0].empty());
    }
}

TEST_CASE("self_query never returns the query row") {
    std::mt19937_64 rng(105);
    ShingleMatrix m = random_sparse(rng, 60, 25);
    for (AnnAlgorithm algo : {AnnAlgorithm::exact, AnnAlgorithm::lsh, AnnAlgorithm::hnsw}) {
        AnnIndex index = AnnIndex::build(m, controls_for(algo));
        NeighborLists lists = index.self_query(4);
        for (std::size_t q = 0; q < lists.size(); ++q) {
            CHECK(lists[q].size() <= 4);
            for (const auto& nb : lists[q]) CHECK(nb.ref_index != q);
        }
    }
}

TEST_CASE("identical pair find each other at distance zero via self_query") {
    Corpus x = corpus_from_texts({"same text", "same text"});
    auto [m, _] = build_dtm(x, nullptr, TextControls{});
    AnnIndex index = AnnIndex::build(m, controls_for(AnnAlgorithm::exact));
    NeighborLists lists = index.self_query(2);
    REQUIRE(lists.size() == 2);
    CHECK(lists[0][0].ref_index == 1);
    CHECK(lists[0][0].dist <= 1e-12);
    CHECK(lists[1][0].ref_index == 0);
    CHECK(lists[1][0].dist <= 1e-12);
}

TEST_CASE("column mismatch reports both widths") {
    std::mt19937_64 rng(106);
    DenseMatrix ref = random_dense(rng, 10, 8);
    DenseMatrix queries = random_dense(rng, 4, 5);
    AnnIndex index = AnnIndex::build(ref, controls_for(AnnAlgorithm::exact));
    CHECK_THROWS_WITH_AS(index.query(queries, 2), doctest::Contains("8"), ValidationError);
    CHECK_THROWS_WITH_AS(index.query(queries, 2), doctest::Contains("5"), ValidationError);
}

TEST_CASE("empty reference is rejected") {
    DenseMatrix empty;
    empty.n_cols = 4;
    CHECK_THROWS_AS(AnnIndex::build(empty, controls_for(AnnAlgorithm::exact)),
                    ValidationError);
}

TEST_CASE("lsh places every reference row in exactly one bucket per table") {
    std::mt19937_64 rng(107);
    ShingleMatrix m = random_sparse(rng, 100, 30);
    AnnIndex index = AnnIndex::build(m, controls_for(AnnAlgorithm::lsh));
    for (int t = 0; t < index.controls().lsh.n_tables; ++t) {
        auto buckets = index.lsh_table_buckets(t);
        std::vector<bool> seen(m.n_rows, false);
        std::size_t total = 0;
        for (const auto& bucket : buckets) {
            total += bucket.size();
            for (std::int32_t row : bucket) {
                CHECK(!seen[static_cast<std::size_t>(row)]);
                seen[static_cast<std::size_t>(row)] = true;
            }
        }
        CHECK(total == m.n_rows);
    }
}

TEST_CASE("lsh short candidate lists are returned as-is") {
    // With 64 bits per table and only two far-apart rows, buckets are tiny.
    DenseMatrix m;
    m.n_rows = 2;
    m.n_cols = 4;
    m.data = {1, 0, 0, 0, 0, 0, 0, 1};
    AnnControls c = controls_for(AnnAlgorithm::lsh);
    c.lsh.n_bits = 24;
    c.lsh.n_tables = 2;
    AnnIndex index = AnnIndex::build(m, c);
    NeighborLists lists = index.query(m, 2);
    for (const auto& list : lists) {
        CHECK(list.size() >= 1);  // own bucket always matches
        CHECK(list.size() <= 2);
    }
}

TEST_CASE("hnsw build is deterministic for a fixed seed") {
    std::mt19937_64 rng(108);
    DenseMatrix m = random_dense(rng, 300, 12);
    AnnControls c = controls_for(AnnAlgorithm::hnsw);
    AnnIndex a = AnnIndex::build(m, c);
    AnnIndex b = AnnIndex::build(m, c);
    REQUIRE(a.hnsw_max_level() == b.hnsw_max_level());
    for (std::size_t node = 0; node < m.n_rows; ++node) {
        REQUIRE(a.hnsw_node_level(node) == b.hnsw_node_level(node));
        for (int level = 0; level <= a.hnsw_node_level(node); ++level) {
            CHECK(a.hnsw_neighbors(level, node) == b.hnsw_neighbors(level, node));
        }
    }
}

TEST_CASE("hnsw structural invariants") {
    std::mt19937_64 rng(109);
    DenseMatrix m = random_dense(rng, 400, 10);
    AnnIndex index = AnnIndex::build(m, controls_for(AnnAlgorithm::hnsw));
    int top = index.hnsw_max_level();
    REQUIRE(top >= 0);
    for (std::size_t node = 0; node < m.n_rows; ++node) {
        int level = index.hnsw_node_level(node);
        CHECK(level >= 0);
        CHECK(level <= top);
        for (int l = 0; l <= level; ++l) {
            auto nbs = index.hnsw_neighbors(l, node);
            std::set<std::int32_t> uniq(nbs.begin(), nbs.end());
            CHECK(uniq.size() == nbs.size());
            CHECK(uniq.count(static_cast<std::int32_t>(node)) == 0);
            std::size_t cap = l == 0 ? 2 * static_cast<std::size_t>(index.controls().hnsw.m)
                                     : static_cast<std::size_t>(index.controls().hnsw.m);
            CHECK(nbs.size() <= cap);
            for (std::int32_t nb : nbs) {
                // Neighbours on layer l must live on layer l themselves, and
                // the edge must be symmetric.
                CHECK(index.hnsw_node_level(static_cast<std::size_t>(nb)) >= l);
                auto back = index.hnsw_neighbors(l, static_cast<std::size_t>(nb));
                CHECK(std::find(back.begin(), back.end(), static_cast<std::int32_t>(node)) !=
                      back.end());
            }
        }
    }
}

TEST_CASE("hnsw recall floor on uniform dense data") {
    std::mt19937_64 rng(110);
    DenseMatrix m = random_dense(rng, 600, 16);
    AnnIndex exact = AnnIndex::build(m, controls_for(AnnAlgorithm::exact));
    NeighborLists truth = exact.query(m, 10);

    AnnIndex hnsw = AnnIndex::build(m, controls_for(AnnAlgorithm::hnsw));
    NeighborLists got = hnsw.query(m, 10);
    CHECK(recall_vs_exact(got, truth, 10) >= 0.98);
}

TEST_CASE("ef_s below k is clamped up") {
    std::mt19937_64 rng(111);
    DenseMatrix m = random_dense(rng, 80, 8);
    AnnControls c = controls_for(AnnAlgorithm::hnsw);
    c.hnsw.ef_s = 1;
    AnnIndex index = AnnIndex::build(m, c);
    NeighborLists lists = index.query(m, 10);
    for (const auto& list : lists) CHECK(list.size() == 10);
}

TEST_CASE("queries are independent of thread count") {
    std::mt19937_64 rng(112);
    DenseMatrix m = random_dense(rng, 200, 8);
    AnnControls c1 = controls_for(AnnAlgorithm::hnsw);
    AnnControls c4 = c1;
    c4.hnsw.n_threads = 4;
    AnnIndex i1 = AnnIndex::build(m, c1);
    AnnIndex i4 = AnnIndex::build(m, c4);
    NeighborLists a = i1.query(m, 5);
    NeighborLists b = i4.query(m, 5);
    REQUIRE(a.size() == b.size());
    for (std::size_t q = 0; q < a.size(); ++q) {
        REQUIRE(a[q].size() == b[q].size());
        for (std::size_t i = 0; i < a[q].size(); ++i) {
            CHECK(a[q][i].ref_index == b[q][i].ref_index);
            CHECK(a[q][i].dist == b[q][i].dist);
        }
    }
}

TEST_CASE("monotone distances within every list on all backends") {
    std::mt19937_64 rng(113);
    ShingleMatrix m = random_sparse(rng, 150, 35);
    for (AnnAlgorithm algo : {AnnAlgorithm::exact, AnnAlgorithm::lsh, AnnAlgorithm::hnsw}) {
        AnnIndex index = AnnIndex::build(m, controls_for(algo));
        for (const auto& list : index.query(m, 8)) {
            for (std::size_t i = 0; i + 1 < list.size(); ++i) {
                CHECK(list[i].dist <= list[i + 1].dist);
            }
        }
    }
}
