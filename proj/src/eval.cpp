#include "annblock/eval.hpp"

#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "annblock/csv.hpp"
#include "annblock/errors.hpp"

namespace annblock {

namespace {

std::uint64_t pairs_of(std::uint64_t c) { return c * (c - 1) / 2; }

// Record -> truth label, rejecting conflicting duplicate assignments.
void assign_label(std::unordered_map<std::size_t, std::int64_t>& labels, std::size_t record,
                  std::int64_t block, const char* side) {
    auto [it, inserted] = labels.try_emplace(record, block);
    if (!inserted && it->second != block) {
        std::ostringstream msg;
        msg << "truth assigns " << side << " record " << record << " to two blocks ("
            << it->second << " and " << block << ")";
        throw ValidationError(msg.str());
    }
}

}  // namespace

TrueBlocks load_truth_csv(const std::string& path, BlockingMode mode) {
    csv::Table table = csv::read_file(path);
    const std::vector<std::string> dedup_header = {"x", "block"};
    const std::vector<std::string> linkage_header = {"x", "y", "block"};
    const auto& expected = mode == BlockingMode::dedup ? dedup_header : linkage_header;
    if (table.header != expected) {
        std::string want = mode == BlockingMode::dedup ? "x,block" : "x,y,block";
        throw ValidationError(path + ": expected truth header " + want);
    }
    if (table.rows.empty()) {
        throw ValidationError(path + ": empty truth file");
    }
    TrueBlocks truth;
    truth.mode = mode;
    for (const auto& fields : table.rows) {
        TrueBlocks::Entry e;
        try {
            e.x = static_cast<std::size_t>(std::stoull(fields[0]));
            if (mode == BlockingMode::linkage) {
                e.y = static_cast<std::size_t>(std::stoull(fields[1]));
                e.block = std::stoll(fields[2]);
            } else {
                e.block = std::stoll(fields[1]);
            }
        } catch (const std::exception&) {
            throw ValidationError(path + ": malformed truth row");
        }
        truth.entries.push_back(e);
    }
    return truth;
}

double reduction_ratio_dedup(const std::map<std::size_t, std::size_t>& block_sizes,
                             std::size_t n) {
    if (n < 2) {
        throw ValidationError("reduction ratio needs at least 2 records");
    }
    std::uint64_t covered = 0;
    std::uint64_t comparisons = 0;
    for (const auto& [size, count] : block_sizes) {
        covered += size * count;
        comparisons += pairs_of(size) * count;
    }
    if (covered > n) {
        throw ValidationError("block sizes cover more records than the dataset holds");
    }
    return 1.0 - static_cast<double>(comparisons) / static_cast<double>(pairs_of(n));
}

double reduction_ratio_linkage(
    const std::vector<std::pair<std::size_t, std::size_t>>& block_memberships,
    std::size_t m, std::size_t n) {
    if (m < 1 || n < 1) {
        throw ValidationError("reduction ratio needs non-empty datasets");
    }
    std::uint64_t comparisons = 0;
    for (const auto& [bx, by] : block_memberships) {
        comparisons += static_cast<std::uint64_t>(bx) * static_cast<std::uint64_t>(by);
    }
    return 1.0 - static_cast<double>(comparisons) /
                     (static_cast<double>(m) * static_cast<double>(n));
}

namespace {

ConfusionCounts confusion_dedup(const BlockingResult& result, const TrueBlocks& truth) {
    std::unordered_map<std::size_t, std::int64_t> truth_label;
    for (const auto& e : truth.entries) {
        if (e.x >= result.m) {
            throw ValidationError("truth record " + std::to_string(e.x) +
                                  " is out of range for the blocked dataset");
        }
        assign_label(truth_label, e.x, e.block, "x");
    }

    std::map<std::int64_t, std::uint64_t> by_truth;
    std::map<std::int64_t, std::uint64_t> by_pred;
    std::map<std::pair<std::int64_t, std::int64_t>, std::uint64_t> joint;
    for (const auto& [record, t] : truth_label) {
        ++by_truth[t];
        std::int64_t p = result.x_blocks[record];
        if (p >= 0) {
            ++by_pred[p];
            ++joint[{p, t}];
        }
    }

    std::uint64_t r = truth_label.size();
    std::uint64_t total = pairs_of(r);
    std::uint64_t act_pos = 0, pred_pos = 0, tp = 0;
    for (const auto& [t, c] : by_truth) act_pos += pairs_of(c);
    for (const auto& [p, c] : by_pred) pred_pos += pairs_of(c);
    for (const auto& [pt, c] : joint) tp += pairs_of(c);

    ConfusionCounts counts;
    counts.tp = tp;
    counts.fp = pred_pos - tp;
    counts.fn = act_pos - tp;
    counts.tn = total - counts.tp - counts.fp - counts.fn;
    return counts;
}

ConfusionCounts confusion_linkage(const BlockingResult& result, const TrueBlocks& truth) {
    std::unordered_map<std::size_t, std::int64_t> truth_x, truth_y;
    for (const auto& e : truth.entries) {
        if (e.x >= result.m || e.y >= result.n) {
            std::ostringstream msg;
            msg << "truth pair (" << e.x << ", " << e.y
                << ") is out of range for the blocked datasets";
            throw ValidationError(msg.str());
        }
        assign_label(truth_x, e.x, e.block, "x");
        assign_label(truth_y, e.y, e.block, "y");
    }

    // Contingency counts per side: truth label and predicted block.
    std::map<std::int64_t, std::uint64_t> tx, ty, px, py;
    std::map<std::pair<std::int64_t, std::int64_t>, std::uint64_t> jx, jy;
    for (const auto& [record, t] : truth_x) {
        ++tx[t];
        std::int64_t p = result.x_blocks[record];
        if (p >= 0) {
            ++px[p];
            ++jx[{p, t}];
        }
    }
    for (const auto& [record, t] : truth_y) {
        ++ty[t];
        std::int64_t p = result.y_blocks[record];
        if (p >= 0) {
            ++py[p];
            ++jy[{p, t}];
        }
    }

    std::uint64_t total = static_cast<std::uint64_t>(truth_x.size()) *
                          static_cast<std::uint64_t>(truth_y.size());
    std::uint64_t act_pos = 0, pred_pos = 0, tp = 0;
    for (const auto& [t, c] : tx) {
        auto it = ty.find(t);
        if (it != ty.end()) act_pos += c * it->second;
    }
    for (const auto& [p, c] : px) {
        auto it = py.find(p);
        if (it != py.end()) pred_pos += c * it->second;
    }
    for (const auto& [pt, c] : jx) {
        auto it = jy.find(pt);
        if (it != jy.end()) tp += c * it->second;
    }

    ConfusionCounts counts;
    counts.tp = tp;
    counts.fp = pred_pos - tp;
    counts.fn = act_pos - tp;
    counts.tn = total - counts.tp - counts.fp - counts.fn;
    return counts;
}

}  // namespace

ConfusionCounts confusion(const BlockingResult& result, const TrueBlocks& truth) {
    if (truth.mode != result.mode) {
        throw ValidationError("truth mode does not match the blocking result mode");
    }
    return result.mode == BlockingMode::dedup ? confusion_dedup(result, truth)
                                              : confusion_linkage(result, truth);
}

MetricReport metrics(const ConfusionCounts& c) {
    MetricReport r;
    auto ratio = [&r](std::uint64_t num, std::uint64_t den, const char* name) {
        if (den == 0) {
            r.flagged.push_back(name);
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    r.recall = ratio(c.tp, c.tp + c.fn, "recall");
    r.precision = ratio(c.tp, c.tp + c.fp, "precision");
    r.fpr = ratio(c.fp, c.fp + c.tn, "fpr");
    r.fnr = ratio(c.fn, c.fn + c.tp, "fnr");
    r.accuracy = ratio(c.tp + c.tn, c.total(), "accuracy");
    r.specificity = ratio(c.tn, c.tn + c.fp, "specificity");
    double pr = r.precision + r.recall;
    if (pr == 0.0) {
        r.flagged.push_back("f1_score");
        r.f1_score = 0.0;
    } else {
        r.f1_score = 2.0 * r.precision * r.recall / pr;
    }
    return r;
}

std::string format_metrics(const MetricReport& report) {
    const std::pair<const char*, double> lines[] = {
        {"recall", report.recall},       {"precision", report.precision},
        {"fpr", report.fpr},             {"fnr", report.fnr},
        {"accuracy", report.accuracy},   {"specificity", report.specificity},
        {"f1_score", report.f1_score},
    };
    std::ostringstream out;
    char buf[64];
    for (const auto& [name, value] : lines) {
        std::snprintf(buf, sizeof(buf), "%-15s%.6f", name, value);
        out << buf << "\n";
    }
    return out.str();
}

std::string format_confusion(const ConfusionCounts& c) {
    std::ostringstream out;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-15s%19s%20s", "", "Predicted Positive",
                  "Predicted Negative");
    out << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%-15s%19llu%20llu", "Actual Positive",
                  static_cast<unsigned long long>(c.tp),
                  static_cast<unsigned long long>(c.fn));
    out << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%-15s%19llu%20llu", "Actual Negative",
                  static_cast<unsigned long long>(c.fp),
                  static_cast<unsigned long long>(c.tn));
    out << buf << "\n";
    return out.str();
}

}  // namespace annblock
