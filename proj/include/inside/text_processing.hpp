#ifndef INSIDE_TEXT_PROCESSING_HPP
#define INSIDE_TEXT_PROCESSING_HPP

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "inside/common.hpp"

namespace inside {

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;  // half-open, byte offsets into the original text
};

struct SentenceList {
    std::vector<std::string> sentences;
    std::vector<Span> offsets;
    std::size_t size() const { return sentences.size(); }
};

class SentenceSegmenter {
public:
    virtual ~SentenceSegmenter() = default;
    virtual SentenceList segment(const std::string& text) const = 0;
};

/// Splits on {., !, ?} followed by whitespace or end and on the full-width
/// marks {U+3002, U+FF01, U+FF1F}; never inside decimal numbers or after a
/// known abbreviation.
class RuleBasedSegmenter : public SentenceSegmenter {
public:
    RuleBasedSegmenter();  // built-in abbreviation list
    explicit RuleBasedSegmenter(std::set<std::string> abbreviations);
    SentenceList segment(const std::string& text) const override;

private:
    std::set<std::string> abbreviations_;
};

std::set<std::string> default_abbreviations();
std::set<std::string> load_abbreviations(const std::string& path);

SentenceList segment_sentences(const std::string& text);

// ---- entities ----------------------------------------------------------

struct Mention {
    std::string surface;
    std::size_t sentence_index = 0;
};

class EntityRecognizer {
public:
    virtual ~EntityRecognizer() = default;
    virtual std::vector<Mention> recognize(const SentenceList& sentences) const = 0;
};

/// Latin-script default: maximal runs of capitalized tokens.
class CapitalizedSpanRecognizer : public EntityRecognizer {
public:
    std::vector<Mention> recognize(const SentenceList& sentences) const override;
};

/// Dictionary lookup, for scripts without capitalization cues.
class DictionaryRecognizer : public EntityRecognizer {
public:
    explicit DictionaryRecognizer(std::vector<std::string> surfaces);
    std::vector<Mention> recognize(const SentenceList& sentences) const override;

private:
    std::vector<std::string> surfaces_;  // longest-first
};

struct EntityTable {
    std::vector<std::string> entities;  // representative surfaces, first-seen order
    std::vector<std::pair<std::size_t, std::size_t>> incidence;  // (sentence, entity)
};

/// Deduplicates mentions by case-folded surface and keeps at most
/// max_entities entities, highest mention frequency first, ties broken by
/// first occurrence.
EntityTable extract_entities(const SentenceList& sentences, const EntityRecognizer& recognizer,
                             std::size_t max_entities);

}  // namespace inside

#endif
