#include "annblock/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "annblock/errors.hpp"

namespace annblock {

namespace {

struct Value {
    enum class Kind { string, integer, floating, boolean } kind;
    std::string str;
    std::int64_t integer = 0;
    double floating = 0.0;
    bool boolean = false;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

Value parse_value(std::string_view raw, const std::string& where) {
    raw = trim(raw);
    if (raw.empty()) {
        throw ValidationError(where + ": missing value");
    }
    Value v{};
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"') {
            throw ValidationError(where + ": unterminated string");
        }
        v.kind = Value::Kind::string;
        v.str = std::string(raw.substr(1, raw.size() - 2));
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.kind = Value::Kind::boolean;
        v.boolean = raw == "true";
        return v;
    }
    std::string text(raw);
    if (text.find_first_of(".eE") != std::string::npos &&
        text.find_first_not_of("+-0123456789.eE") == std::string::npos) {
        double d = 0.0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
        if (ec == std::errc() && p == text.data() + text.size()) {
            v.kind = Value::Kind::floating;
            v.floating = d;
            return v;
        }
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), i);
    if (ec == std::errc() && p == text.data() + text.size()) {
        v.kind = Value::Kind::integer;
        v.integer = i;
        return v;
    }
    throw ValidationError(where + ": cannot parse value \"" + text + "\"");
}

std::int64_t want_int(const Value& v, const std::string& where) {
    if (v.kind != Value::Kind::integer) {
        throw ValidationError(where + ": expected an integer");
    }
    return v.integer;
}

bool want_bool(const Value& v, const std::string& where) {
    if (v.kind != Value::Kind::boolean) {
        throw ValidationError(where + ": expected true or false");
    }
    return v.boolean;
}

std::string want_string(const Value& v, const std::string& where) {
    if (v.kind != Value::Kind::string) {
        throw ValidationError(where + ": expected a quoted string");
    }
    return v.str;
}

// Strips a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
    RunConfig config;

    using Setter = std::function<void(const Value&, const std::string&)>;
    std::map<std::pair<std::string, std::string>, Setter> setters;
    auto set = [&](const char* table, const char* key, Setter fn) {
        setters[{table, key}] = std::move(fn);
    };

    set("", "edge_k", [&](const Value& v, const std::string& w) {
        config.edge_k = static_cast<int>(want_int(v, w));
    });
    set("text", "n_shingles", [&](const Value& v, const std::string& w) {
        config.text.n_shingles = static_cast<int>(want_int(v, w));
    });
    set("text", "lowercase", [&](const Value& v, const std::string& w) {
        config.text.lowercase = want_bool(v, w);
    });
    set("text", "strip_non_alphanum", [&](const Value& v, const std::string& w) {
        config.text.strip_non_alphanum = want_bool(v, w);
    });
    set("ann", "algorithm", [&](const Value& v, const std::string& w) {
        config.ann.algorithm = algorithm_from_string(want_string(v, w));
    });
    set("ann", "distance", [&](const Value& v, const std::string& w) {
        config.ann.metric = metric_from_string(want_string(v, w));
    });
    set("ann", "k_search", [&](const Value& v, const std::string& w) {
        config.ann.k_search = static_cast<int>(want_int(v, w));
    });
    set("ann", "random_seed", [&](const Value& v, const std::string& w) {
        config.ann.random_seed = static_cast<std::uint64_t>(want_int(v, w));
    });
    set("ann.hnsw", "M", [&](const Value& v, const std::string& w) {
        config.ann.hnsw.m = static_cast<int>(want_int(v, w));
    });
    set("ann.hnsw", "ef_c", [&](const Value& v, const std::string& w) {
        config.ann.hnsw.ef_c = static_cast<int>(want_int(v, w));
    });
    set("ann.hnsw", "ef_s", [&](const Value& v, const std::string& w) {
        config.ann.hnsw.ef_s = static_cast<int>(want_int(v, w));
    });
    set("ann.hnsw", "n_threads", [&](const Value& v, const std::string& w) {
        config.ann.hnsw.n_threads = static_cast<int>(want_int(v, w));
    });
    set("ann.hnsw", "select_heuristic", [&](const Value& v, const std::string& w) {
        config.ann.hnsw.select_heuristic = want_bool(v, w);
    });
    set("ann.lsh", "n_tables", [&](const Value& v, const std::string& w) {
        config.ann.lsh.n_tables = static_cast<int>(want_int(v, w));
    });
    set("ann.lsh", "n_bits", [&](const Value& v, const std::string& w) {
        config.ann.lsh.n_bits = static_cast<int>(want_int(v, w));
    });

    const std::array<std::string, 5> known_tables = {"", "text", "ann", "ann.hnsw",
                                                     "ann.lsh"};

    std::string table;
    std::istringstream in(text);
    std::string raw_line;
    int line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        std::string where = origin + ":" + std::to_string(line_no);
        std::string_view line = trim(strip_comment(raw_line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ValidationError(where + ": malformed table header");
            }
            table = std::string(trim(line.substr(1, line.size() - 2)));
            bool known = false;
            for (const auto& t : known_tables) known = known || t == table;
            if (!known || table.empty()) {
                throw ValidationError(where + ": unknown config table [" + table + "]");
            }
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError(where + ": expected key = value");
        }
        std::string key(trim(line.substr(0, eq)));
        auto it = setters.find({table, key});
        if (it == setters.end()) {
            std::string loc = table.empty() ? key : "[" + table + "] " + key;
            throw ValidationError(where + ": unknown config key " + loc);
        }
        it->second(parse_value(line.substr(eq + 1), where), where);
    }

    if (config.edge_k < 1) {
        throw ValidationError(origin + ": edge_k must be >= 1");
    }
    if (config.text.n_shingles < 1) {
        throw ValidationError(origin + ": n_shingles must be >= 1");
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

}  // namespace annblock
