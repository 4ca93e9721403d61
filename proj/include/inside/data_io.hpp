#ifndef INSIDE_DATA_IO_HPP
#define INSIDE_DATA_IO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "inside/common.hpp"

namespace inside {

struct NewsItem {
    std::string id;
    std::string text;
    int label = 0;  // 0 = real, 1 = fake
    std::optional<std::int64_t> timestamp;
    std::string language = "en";
};

struct Corpus {
    std::string name;
    std::vector<NewsItem> items;
};

enum class SplitMode { chronological, random };

struct SplitSpec {
    double train_fraction = 0.7;
    double val_fraction = 0.1;
    double test_fraction = 0.2;
    SplitMode mode = SplitMode::chronological;
    std::uint64_t seed = 0;  // used in random mode

    void validate() const;
};

/// Reads a jsonl corpus: one object per line with fields
/// {id, text, label, timestamp?, language?}.
Corpus load_corpus(const std::string& path);

/// Writes a corpus back out in the same jsonl schema.
void save_corpus(const Corpus& corpus, const std::string& path);

struct Splits {
    Corpus train, val, test;
};

/// Sorts by timestamp (ties broken by id) and cuts at cumulative fractions;
/// train and validation sizes round down, test takes the remainder.
/// Random mode shuffles with the spec seed instead of sorting.
Splits chronological_split(const Corpus& corpus, const SplitSpec& spec);

// ---- checkpoint container ---------------------------------------------

/// Versioned container of named tensors plus a configuration block.
/// Each tensor carries a CRC32 of its payload, verified on load.
struct Checkpoint {
    std::string version = "inside-ckpt-1";
    std::string config_json;  // opaque to this layer
    std::vector<std::pair<std::string, Matrix>> tensors;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

std::uint32_t crc32(const void* data, std::size_t len);

}  // namespace inside

#endif
