#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace annblock {

/// Text preprocessing knobs applied to every blocking key before shingling.
struct TextControls {
    int n_shingles = 2;
    bool lowercase = true;
    bool strip_non_alphanum = true;
};

/// One input row: its 0-based position and the concatenated blocking key.
/// `id` carries the value of the requested id column (never used for
/// blocking, only echoed into exports).
struct Record {
    std::size_t row_index = 0;
    std::string key_text;
    std::string id;
};

/// Ordered collection of records; order matches the input file exactly.
struct Corpus {
    std::vector<Record> records;
    std::string source_name;
    bool has_ids = false;

    std::size_t size() const { return records.size(); }
};

/// Loads a CSV file and concatenates `key_columns` (in the given order,
/// missing cells as empty strings) into each record's key_text. Throws
/// IoError for a missing file, ValidationError for unknown columns or a
/// file with zero data rows.
Corpus load_csv(const std::string& path, const std::vector<std::string>& key_columns,
                const std::string& id_column = "");

/// Builds a corpus directly from key strings (one record per string).
Corpus corpus_from_texts(const std::vector<std::string>& texts,
                         const std::string& source_name = "memory");

/// Lowercases, then strips every character that is neither a letter nor a
/// digit (Unicode categories; whitespace included), per the controls.
/// Total and idempotent. Input and output are UTF-8; malformed bytes are
/// dropped by the strip pass and passed through otherwise.
std::string normalize(std::string_view text, const TextControls& controls);

/// UTF-8 helpers shared with the shingler.
std::vector<char32_t> utf8_decode(std::string_view text);
void utf8_encode(char32_t cp, std::string& out);

}  // namespace annblock
