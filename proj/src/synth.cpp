#include "annblock/synth.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "annblock/csv.hpp"
#include "annblock/errors.hpp"

namespace annblock {

namespace {
#include "synth_words.inc"

constexpr const char* kStreetTypes[] = {"street", "road", "avenue", "lane",
                                        "drive", "court", "place", "way"};
constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";

template <typename T, std::size_t N>
const T& pick(std::mt19937_64& rng, const T (&items)[N]) {
    return items[rng() % N];
}

std::size_t pick_index(std::mt19937_64& rng, std::size_t count) {
    return static_cast<std::size_t>(rng() % count);
}

std::vector<std::string> make_person(std::mt19937_64& rng) {
    std::vector<std::string> fields(9);
    fields[0] = pick(rng, kGivenNames);
    fields[1] = pick(rng, kSurnames);
    fields[2] = rng() % 2 ? "m" : "f";
    fields[3] = std::to_string(1 + rng() % 28);              // birth day
    fields[4] = std::to_string(1 + rng() % 12);              // birth month
    fields[5] = std::to_string(1930 + rng() % 76);           // birth year
    fields[6] = std::to_string(1 + rng() % 999);             // street number
    fields[7] = std::string(pick(rng, kStreetNames)) + " " + pick(rng, kStreetTypes);
    fields[8] = std::to_string(1000 + rng() % 9000);         // postcode
    return fields;
}

std::string concat(const std::vector<std::string>& fields) {
    std::string key;
    for (const auto& f : fields) key += f;
    return key;
}

CorruptionOp draw_op(std::mt19937_64& rng, const std::array<double, 5>& weights,
                     double total) {
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return static_cast<CorruptionOp>(i);
    }
    return CorruptionOp::field_swap;
}

std::string corrupt(const std::vector<std::string>& fields, const CorruptionSpec& spec,
                    std::mt19937_64& rng, double weight_total) {
    std::vector<CorruptionOp> ops;
    ops.reserve(static_cast<std::size_t>(spec.ops_per_dup));
    for (int i = 0; i < spec.ops_per_dup; ++i) {
        ops.push_back(draw_op(rng, spec.op_mix, weight_total));
    }

    // Field swaps first (they act on the record structure), then the
    // character operations on the concatenated key.
    std::vector<std::string> shuffled = fields;
    for (CorruptionOp op : ops) {
        if (op != CorruptionOp::field_swap) continue;
        std::size_t a = pick_index(rng, shuffled.size());
        std::size_t b = pick_index(rng, shuffled.size() - 1);
        if (b >= a) ++b;
        std::swap(shuffled[a], shuffled[b]);
    }
    std::string key = concat(shuffled);
    for (CorruptionOp op : ops) {
        switch (op) {
            case CorruptionOp::char_substitute: {
                if (key.empty()) break;
                key[pick_index(rng, key.size())] =
                    kAlphabet[pick_index(rng, sizeof(kAlphabet) - 1)];
                break;
            }
            case CorruptionOp::char_delete: {
                if (key.empty()) break;
                key.erase(pick_index(rng, key.size()), 1);
                break;
            }
            case CorruptionOp::char_insert: {
                std::size_t pos = pick_index(rng, key.size() + 1);
                key.insert(key.begin() + static_cast<std::ptrdiff_t>(pos),
                           kAlphabet[pick_index(rng, sizeof(kAlphabet) - 1)]);
                break;
            }
            case CorruptionOp::char_transpose: {
                if (key.size() < 2) break;
                std::size_t pos = pick_index(rng, key.size() - 1);
                std::swap(key[pos], key[pos + 1]);
                break;
            }
            case CorruptionOp::field_swap:
                break;  // already applied
        }
    }
    return key;
}

void validate(const CorruptionSpec& spec) {
    if (spec.n_originals == 0) {
        throw ValidationError("n_originals must be >= 1");
    }
    if (spec.dup_fraction < 0.0 || spec.dup_fraction > 1.0) {
        throw ValidationError("dup_fraction must lie in [0, 1]");
    }
    if (spec.ops_per_dup < 0) {
        throw ValidationError("ops_per_dup must be >= 0");
    }
    double total = 0.0;
    for (double w : spec.op_mix) {
        if (w < 0.0) throw ValidationError("op_mix weights must be non-negative");
        total += w;
    }
    if (total <= 0.0) {
        throw ValidationError("op_mix weights must not all be zero");
    }
}

struct RawRecord {
    std::string key;
    std::string id;
    std::int64_t pair = -1;  // truth block, -1 for unpaired originals
};

std::vector<RawRecord> make_records(const CorruptionSpec& spec, std::mt19937_64& rng) {
    double weight_total = std::accumulate(spec.op_mix.begin(), spec.op_mix.end(), 0.0);
    std::size_t n_dups = static_cast<std::size_t>(
        static_cast<double>(spec.n_originals) * spec.dup_fraction + 0.5);

    std::vector<std::vector<std::string>> originals(spec.n_originals);
    std::vector<RawRecord> records;
    records.reserve(spec.n_originals + n_dups);
    for (std::size_t i = 0; i < spec.n_originals; ++i) {
        originals[i] = make_person(rng);
        RawRecord rec;
        rec.key = concat(originals[i]);
        rec.id = "rec-" + std::to_string(i) + "-org";
        rec.pair = i < n_dups ? static_cast<std::int64_t>(i) : -1;
        records.push_back(std::move(rec));
    }
    for (std::size_t i = 0; i < n_dups; ++i) {
        RawRecord rec;
        rec.key = corrupt(originals[i], spec, rng, weight_total);
        rec.id = "rec-" + std::to_string(i) + "-dup";
        rec.pair = static_cast<std::int64_t>(i);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace

std::pair<Corpus, TrueBlocks> generate(const CorruptionSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    std::vector<RawRecord> records = make_records(spec, rng);
    std::shuffle(records.begin(), records.end(), rng);

    Corpus corpus;
    corpus.source_name = "synth";
    corpus.has_ids = true;
    TrueBlocks truth;
    truth.mode = BlockingMode::dedup;
    for (std::size_t i = 0; i < records.size(); ++i) {
        corpus.records.push_back(Record{i, records[i].key, records[i].id});
        if (records[i].pair >= 0) {
            truth.entries.push_back(TrueBlocks::Entry{i, 0, records[i].pair});
        }
    }
    return {std::move(corpus), std::move(truth)};
}

LinkageData generate_linkage(const CorruptionSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    double weight_total = std::accumulate(spec.op_mix.begin(), spec.op_mix.end(), 0.0);

    LinkageData data;
    data.x.source_name = "synth-x";
    data.x.has_ids = true;
    data.y.source_name = "synth-y";
    data.y.has_ids = true;
    data.truth.mode = BlockingMode::linkage;

    std::vector<std::vector<std::string>> originals(spec.n_originals);
    for (std::size_t i = 0; i < spec.n_originals; ++i) {
        originals[i] = make_person(rng);
        data.x.records.push_back(
            Record{i, concat(originals[i]), "rec-" + std::to_string(i) + "-org"});
    }
    std::vector<std::size_t> order(spec.n_originals);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        std::size_t i = order[pos];
        data.y.records.push_back(Record{pos, corrupt(originals[i], spec, rng, weight_total),
                                        "rec-" + std::to_string(i) + "-dup"});
        data.truth.entries.push_back(
            TrueBlocks::Entry{i, pos, static_cast<std::int64_t>(i)});
    }
    return data;
}

void write_corpus_csv(const std::string& path, const Corpus& corpus) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write file: " + path);
    }
    csv::write_row(out, {"rec_id", "txt"});
    for (const Record& rec : corpus.records) {
        csv::write_row(out, {corpus.has_ids ? rec.id : std::to_string(rec.row_index),
                             rec.key_text});
    }
    if (!out.flush()) {
        throw IoError("failed writing file: " + path);
    }
}

void write_truth_csv(const std::string& path, const TrueBlocks& truth) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write file: " + path);
    }
    if (truth.mode == BlockingMode::dedup) {
        csv::write_row(out, {"x", "block"});
        for (const auto& e : truth.entries) {
            csv::write_row(out, {std::to_string(e.x), std::to_string(e.block)});
        }
    } else {
        csv::write_row(out, {"x", "y", "block"});
        for (const auto& e : truth.entries) {
            csv::write_row(out,
                           {std::to_string(e.x), std::to_string(e.y), std::to_string(e.block)});
        }
    }
    if (!out.flush()) {
        throw IoError("failed writing file: " + path);
    }
}

}  // namespace annblock
