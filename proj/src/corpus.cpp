#include "annblock/corpus.hpp"

#include <algorithm>
#include <cstdint>

#include "annblock/csv.hpp"
#include "annblock/errors.hpp"

namespace annblock {

namespace {
#include "unicode_tables.inc"

bool is_alnum_cp(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') ||
               (cp >= 'a' && cp <= 'z');
    }
    std::size_t lo = 0, hi = kAlnumRangeCount;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (cp < kAlnumRanges[mid][0]) {
            hi = mid;
        } else if (cp > kAlnumRanges[mid][1]) {
            lo = mid + 1;
        } else {
            return true;
        }
    }
    return false;
}

char32_t to_lower_cp(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    }
    std::size_t lo = 0, hi = kLowerMapCount;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (kLowerMap[mid][0] < cp) {
            lo = mid + 1;
        } else if (kLowerMap[mid][0] > cp) {
            hi = mid;
        } else {
            return kLowerMap[mid][1];
        }
    }
    return cp;
}
}  // namespace

std::vector<char32_t> utf8_decode(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        char32_t cp = 0;
        int extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c >> 4) == 0xE) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c >> 3) == 0x1E) {
            cp = c & 0x07;
            extra = 3;
        } else {
            // Stray continuation or invalid lead byte: keep as U+FFFD so the
            // strip pass can drop it without losing alignment.
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (i + extra >= text.size()) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        bool ok = true;
        for (int k = 1; k <= extra; ++k) {
            unsigned char cc = static_cast<unsigned char>(text[i + k]);
            if ((cc >> 6) != 0x2) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!ok) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += 1 + extra;
    }
    return out;
}

void utf8_encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string normalize(std::string_view text, const TextControls& controls) {
    if (!controls.lowercase && !controls.strip_non_alphanum) {
        return std::string(text);
    }
    // ASCII fast path covers the common census-style inputs.
    bool ascii = std::all_of(text.begin(), text.end(),
                             [](char c) { return static_cast<unsigned char>(c) < 0x80; });
    std::string out;
    out.reserve(text.size());
    if (ascii) {
        for (char c : text) {
            char32_t cp = static_cast<unsigned char>(c);
            if (controls.lowercase) cp = to_lower_cp(cp);
            if (controls.strip_non_alphanum && !is_alnum_cp(cp)) continue;
            out.push_back(static_cast<char>(cp));
        }
        return out;
    }
    for (char32_t cp : utf8_decode(text)) {
        if (controls.lowercase) cp = to_lower_cp(cp);
        if (controls.strip_non_alphanum && !is_alnum_cp(cp)) continue;
        utf8_encode(cp, out);
    }
    return out;
}

Corpus load_csv(const std::string& path, const std::vector<std::string>& key_columns,
                const std::string& id_column) {
    csv::Table table = csv::read_file(path);

    std::vector<int> key_idx;
    key_idx.reserve(key_columns.size());
    for (const auto& name : key_columns) {
        int idx = table.column(name);
        if (idx < 0) {
            throw ValidationError(path + ": unknown key column \"" + name + "\"");
        }
        key_idx.push_back(idx);
    }
    int id_idx = -1;
    if (!id_column.empty()) {
        id_idx = table.column(id_column);
        if (id_idx < 0) {
            throw ValidationError(path + ": unknown id column \"" + id_column + "\"");
        }
    }
    if (table.rows.empty()) {
        throw ValidationError(path + ": no data rows");
    }

    Corpus corpus;
    corpus.source_name = path;
    corpus.has_ids = id_idx >= 0;
    corpus.records.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        Record rec;
        rec.row_index = r;
        for (int idx : key_idx) {
            rec.key_text += table.rows[r][static_cast<std::size_t>(idx)];
        }
        if (id_idx >= 0) {
            rec.id = table.rows[r][static_cast<std::size_t>(id_idx)];
        }
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

Corpus corpus_from_texts(const std::vector<std::string>& texts,
                         const std::string& source_name) {
    Corpus corpus;
    corpus.source_name = source_name;
    corpus.records.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        corpus.records.push_back(Record{i, texts[i], ""});
    }
    return corpus;
}

}  // namespace annblock
