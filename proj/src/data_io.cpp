#include "inside/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <unordered_set>

#include <json.hpp>

namespace inside {

using nlohmann::json;

void SplitSpec::validate() const {
    if (train_fraction <= 0 || val_fraction <= 0 || test_fraction <= 0)
        throw Error("split fractions must be positive");
    if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9)
        throw Error("split fractions must sum to 1");
}

static std::string trim_copy(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    Corpus corpus;
    corpus.name = path;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim_copy(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(lineno, e.what());
        }
        NewsItem item;
        try {
            item.id = j.at("id").get<std::string>();
            item.text = j.at("text").get<std::string>();
            item.label = j.at("label").get<int>();
            if (j.contains("timestamp") && !j["timestamp"].is_null())
                item.timestamp = j["timestamp"].get<std::int64_t>();
            if (j.contains("language")) item.language = j["language"].get<std::string>();
        } catch (const json::exception& e) {
            throw ParseError(lineno, e.what());
        }
        if (item.label != 0 && item.label != 1) throw ParseError(lineno, "label must be 0 or 1");
        if (trim_copy(item.text).empty()) throw ParseError(lineno, "text empty after trim");
        if (!seen.insert(item.id).second) throw DuplicateId(item.id);
        corpus.items.push_back(std::move(item));
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write corpus file: " + path);
    for (const auto& item : corpus.items) {
        json j;
        j["id"] = item.id;
        j["text"] = item.text;
        j["label"] = item.label;
        if (item.timestamp) j["timestamp"] = *item.timestamp;
        j["language"] = item.language;
        out << j.dump() << "\n";
    }
}

Splits chronological_split(const Corpus& corpus, const SplitSpec& spec) {
    spec.validate();
    std::vector<NewsItem> items = corpus.items;
    if (spec.mode == SplitMode::chronological) {
        for (const auto& item : items)
            if (!item.timestamp) throw MissingTimestamp(item.id);
        std::sort(items.begin(), items.end(), [](const NewsItem& a, const NewsItem& b) {
            if (*a.timestamp != *b.timestamp) return *a.timestamp < *b.timestamp;
            return a.id < b.id;
        });
    } else {
        std::mt19937_64 rng(spec.seed);
        std::shuffle(items.begin(), items.end(), rng);
    }
    const std::size_t total = items.size();
    const std::size_t n_train = static_cast<std::size_t>(spec.train_fraction * total);
    const std::size_t n_val = static_cast<std::size_t>(spec.val_fraction * total);
    Splits out;
    out.train.name = corpus.name + ":train";
    out.val.name = corpus.name + ":val";
    out.test.name = corpus.name + ":test";
    for (std::size_t i = 0; i < total; ++i) {
        if (i < n_train)
            out.train.items.push_back(items[i]);
        else if (i < n_train + n_val)
            out.val.items.push_back(items[i]);
        else
            out.test.items.push_back(items[i]);
    }
    return out;
}

// ---- checkpoint -------------------------------------------------------

std::uint32_t crc32(const void* data, std::size_t len) {
    static std::uint32_t table[256];
    static bool init = false;
    if (!init) {
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            table[i] = c;
        }
        init = true;
    }
    std::uint32_t crc = 0xFFFFFFFFu;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

namespace {

void write_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void write_str(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    if (!in) throw IoError("truncated checkpoint");
    return v;
}
std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    if (!in) throw IoError("truncated checkpoint");
    return v;
}
std::string read_str(std::istream& in) {
    std::uint64_t n = read_u64(in);
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    if (!in) throw IoError("truncated checkpoint");
    return s;
}

constexpr char kMagic[4] = {'I', 'N', 'S', 'D'};

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    out.write(kMagic, 4);
    write_str(out, ckpt.version);
    write_str(out, ckpt.config_json);
    write_u64(out, ckpt.tensors.size());
    for (const auto& [name, mat] : ckpt.tensors) {
        write_str(out, name);
        write_u64(out, static_cast<std::uint64_t>(mat.rows()));
        write_u64(out, static_cast<std::uint64_t>(mat.cols()));
        const std::size_t bytes = sizeof(double) * static_cast<std::size_t>(mat.size());
        out.write(reinterpret_cast<const char*>(mat.data()), static_cast<std::streamsize>(bytes));
        write_u32(out, crc32(mat.data(), bytes));
    }
    if (!out) throw IoError("write failure: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw SchemaMismatch("INSD magic", "unrecognized header");
    Checkpoint ckpt;
    std::string version = read_str(in);
    if (version != ckpt.version) throw SchemaMismatch(ckpt.version, version);
    ckpt.config_json = read_str(in);
    std::uint64_t count = read_u64(in);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string name = read_str(in);
        auto rows = static_cast<Eigen::Index>(read_u64(in));
        auto cols = static_cast<Eigen::Index>(read_u64(in));
        Matrix mat(rows, cols);
        const std::size_t bytes = sizeof(double) * static_cast<std::size_t>(mat.size());
        in.read(reinterpret_cast<char*>(mat.data()), static_cast<std::streamsize>(bytes));
        if (!in) throw IoError("truncated tensor: " + name);
        std::uint32_t stored = read_u32(in);
        if (stored != crc32(mat.data(), bytes))
            throw SchemaMismatch("crc " + std::to_string(stored), "corrupt tensor " + name);
        ckpt.tensors.emplace_back(std::move(name), std::move(mat));
    }
    return ckpt;
}

}  // namespace inside
