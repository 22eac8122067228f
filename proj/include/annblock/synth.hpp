#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

#include "annblock/corpus.hpp"
#include "annblock/eval.hpp"

namespace annblock {

/// Corruption operations applied to duplicates, in op_mix order.
enum class CorruptionOp : int {
    char_substitute = 0,
    char_delete = 1,
    char_insert = 2,
    char_transpose = 3,
    field_swap = 4,
};

struct CorruptionSpec {
    std::size_t n_originals = 500;
    double dup_fraction = 1.0;
    int ops_per_dup = 2;
    // Weights for substitute / delete / insert / transpose / field_swap.
    std::array<double, 5> op_mix = {1.0, 1.0, 1.0, 1.0, 1.0};
    std::uint64_t seed = 42;
};

/// Generates a person-like corpus with injected duplicates. Originals are
/// assembled from the bundled word lists; each duplicate derives from one
/// original via ops_per_dup corruptions (field swaps act on fields, the
/// character operations on the concatenated key). Records are shuffled, and
/// the truth pairs every duplicate with its original. Deterministic for a
/// given seed.
std::pair<Corpus, TrueBlocks> generate(const CorruptionSpec& spec);

/// Linkage-shaped variant: dataset x holds the originals, dataset y one
/// corrupted copy per original in shuffled order, with (x, y, block) truth.
struct LinkageData {
    Corpus x;
    Corpus y;
    TrueBlocks truth;
};
LinkageData generate_linkage(const CorruptionSpec& spec);

/// CSV writers used by the gen subcommand: the corpus as (rec_id, txt)
/// rows, and the truth in the eval module's x,block / x,y,block schema.
void write_corpus_csv(const std::string& path, const Corpus& corpus);
void write_truth_csv(const std::string& path, const TrueBlocks& truth);

}  // namespace annblock
