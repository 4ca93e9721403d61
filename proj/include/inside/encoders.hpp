#ifndef INSIDE_ENCODERS_HPP
#define INSIDE_ENCODERS_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "inside/common.hpp"
#include "inside/data_io.hpp"

namespace inside {

/// Text-to-vector seam. Implementations must be deterministic for a fixed
/// instance and return one finite row per input string.
class TextEncoder {
public:
    virtual ~TextEncoder() = default;
    virtual int dim() const = 0;
    virtual Matrix encode(const std::vector<std::string>& texts) const = 0;
};

/// Seeded pseudo-random unit-norm embedding derived solely from a stable
/// content hash; identical texts map to identical rows across processes.
Matrix deterministic_encode(const std::vector<std::string>& texts, int dim);

class DeterministicEncoder : public TextEncoder {
public:
    explicit DeterministicEncoder(int dim) : dim_(dim) {
        if (dim < 1) throw Error("encoder dim must be >= 1");
    }
    int dim() const override { return dim_; }
    Matrix encode(const std::vector<std::string>& texts) const override {
        return deterministic_encode(texts, dim_);
    }

private:
    int dim_;
};

// ---- intent generation -------------------------------------------------

struct Prompt {
    std::string perspective;  // e.g. "belief"
    std::string template_text;  // contains a {text} placeholder
    std::string render(const std::string& news_text) const;
    std::string digest() const;  // stable content digest, keys the cache
};

struct PromptSet {
    std::vector<Prompt> prompts;
    static PromptSet load(const std::string& path);
    static PromptSet builtin_default();  // belief, desire, plan, outcome
    void save(const std::string& path) const;
};

class IntentGenerator {
public:
    virtual ~IntentGenerator() = default;
    /// Returns exactly prompts.size() non-empty analyses, index-aligned.
    virtual std::vector<std::string> analyze(const std::string& text,
                                            const std::vector<Prompt>& prompts) = 0;
};

/// Offline generator: "<perspective>: <leading sentence of text>".
class StubGenerator : public IntentGenerator {
public:
    std::vector<std::string> analyze(const std::string& text,
                                     const std::vector<Prompt>& prompts) override;
};

struct RemoteGeneratorConfig {
    std::string endpoint;    // e.g. http://host:port
    std::string model;
    std::string credential_env = "INSIDE_GENERATOR_TOKEN";
    int max_attempts = 3;
    int backoff_ms = 200;    // doubled per retry
};

/// HTTP adapter for a hosted generative model. Retries with exponential
/// backoff, then throws GeneratorUnavailable.
class RemoteGenerator : public IntentGenerator {
public:
    explicit RemoteGenerator(RemoteGeneratorConfig config) : config_(std::move(config)) {}
    std::vector<std::string> analyze(const std::string& text,
                                     const std::vector<Prompt>& prompts) override;

private:
    RemoteGeneratorConfig config_;
};

/// Append-only on-disk store of generated analyses keyed by
/// (news id, perspective index, prompt digest).
class IntentCache {
public:
    IntentCache() = default;
    explicit IntentCache(std::string path);  // loads existing records

    bool get(const std::string& news_id, int perspective_index, const std::string& digest,
             std::string& out) const;
    void put(const std::string& news_id, int perspective_index, const std::string& digest,
             const std::string& analysis);
    std::size_t size() const { return store_.size(); }

private:
    using Key = std::tuple<std::string, int, std::string>;
    std::map<Key, std::string> store_;
    std::string path_;
    mutable std::mutex write_mutex_;
};

/// Cache-first intent analysis; misses call the generator and persist.
std::vector<std::string> analyze_intent(const NewsItem& item, const std::vector<Prompt>& prompts,
                                        IntentGenerator& generator, IntentCache& cache);

}  // namespace inside

#endif
