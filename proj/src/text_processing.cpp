#include "inside/text_processing.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

namespace inside {

std::set<std::string> default_abbreviations() {
    return {"Mr", "Mrs", "Ms", "Dr", "Prof", "Sen", "Rep", "Gov", "Gen", "Sgt",
            "Sr",  "Jr", "St", "vs", "etc", "Inc", "Ltd", "Co",  "Corp", "Fig",
            "No",  "Vol", "approx", "Jan", "Feb", "Mar", "Apr", "Jun", "Jul",
            "Aug", "Sep", "Oct", "Nov", "Dec"};
}

std::set<std::string> load_abbreviations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open abbreviation list: " + path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (!line.empty() && line[0] != '#') out.insert(line);
    }
    return out;
}

RuleBasedSegmenter::RuleBasedSegmenter() : abbreviations_(default_abbreviations()) {}
RuleBasedSegmenter::RuleBasedSegmenter(std::set<std::string> abbreviations)
    : abbreviations_(std::move(abbreviations)) {}

namespace {

bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Matches the 3-byte UTF-8 encodings of the full-width terminators.
std::size_t fullwidth_terminator_len(const std::string& s, std::size_t i) {
    if (i + 3 > s.size()) return 0;
    const unsigned char a = s[i], b = s[i + 1], c = s[i + 2];
    if (a == 0xE3 && b == 0x80 && c == 0x82) return 3;                 // U+3002
    if (a == 0xEF && b == 0xBC && (c == 0x81 || c == 0x9F)) return 3;  // U+FF01, U+FF1F
    return 0;
}

}  // namespace

SentenceList RuleBasedSegmenter::segment(const std::string& text) const {
    std::size_t first = 0;
    while (first < text.size() && is_space_byte(text[first])) ++first;
    if (first == text.size()) throw EmptyText();

    SentenceList out;
    std::size_t start = first;  // start of the current sentence (first non-space byte)
    auto emit = [&](std::size_t end) {
        while (start < end && is_space_byte(text[start])) ++start;
        std::size_t e = end;
        while (e > start && is_space_byte(text[e - 1])) --e;
        if (e > start) {
            out.sentences.push_back(text.substr(start, e - start));
            out.offsets.push_back(Span{start, e});
        }
        start = end;
    };

    std::size_t i = first;
    while (i < text.size()) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            bool boundary = (i + 1 == text.size()) || is_space_byte(text[i + 1]);
            if (boundary && c == '.') {
                // Decimal guard: digit on both sides never terminates, and a
                // trailing "3." right before a digit cannot occur at a boundary.
                if (i > 0 && std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                    i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))
                    boundary = false;
                // Abbreviation guard: token immediately before the period.
                if (boundary) {
                    std::size_t tb = i;
                    while (tb > start && (std::isalnum(static_cast<unsigned char>(text[tb - 1])) ||
                                          text[tb - 1] == '.'))
                        --tb;
                    std::string token = text.substr(tb, i - tb);
                    auto last_dot = token.rfind('.');
                    if (last_dot != std::string::npos) token = token.substr(last_dot + 1);
                    if (abbreviations_.count(token)) boundary = false;
                }
            }
            if (boundary) {
                emit(i + 1);
                i += 1;
                continue;
            }
            ++i;
            continue;
        }
        if (std::size_t len = fullwidth_terminator_len(text, i)) {
            emit(i + len);
            i += len;
            continue;
        }
        ++i;
    }
    emit(text.size());
    if (out.sentences.empty()) throw EmptyText();
    return out;
}

SentenceList segment_sentences(const std::string& text) {
    static const RuleBasedSegmenter segmenter;
    return segmenter.segment(text);
}

// ---- entities ----------------------------------------------------------

std::vector<Mention> CapitalizedSpanRecognizer::recognize(const SentenceList& sentences) const {
    std::vector<Mention> mentions;
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        const std::string& s = sentences.sentences[si];
        std::size_t i = 0;
        while (i < s.size()) {
            if (!std::isupper(static_cast<unsigned char>(s[i]))) {
                ++i;
                continue;
            }
            // Maximal run of capitalized tokens separated by single spaces.
            std::string span;
            std::size_t j = i;
            while (j < s.size() && std::isupper(static_cast<unsigned char>(s[j]))) {
                std::size_t tok_end = j + 1;
                while (tok_end < s.size() && std::isalnum(static_cast<unsigned char>(s[tok_end])))
                    ++tok_end;
                if (!span.empty()) span += ' ';
                span += s.substr(j, tok_end - j);
                j = tok_end;
                if (j + 1 < s.size() && s[j] == ' ' &&
                    std::isupper(static_cast<unsigned char>(s[j + 1])))
                    j += 1;  // continue the run
                else
                    break;
            }
            mentions.push_back(Mention{span, si});
            i = j;
        }
    }
    return mentions;
}

DictionaryRecognizer::DictionaryRecognizer(std::vector<std::string> surfaces)
    : surfaces_(std::move(surfaces)) {
    std::sort(surfaces_.begin(), surfaces_.end(),
              [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
}

std::vector<Mention> DictionaryRecognizer::recognize(const SentenceList& sentences) const {
    std::vector<Mention> mentions;
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        const std::string& s = sentences.sentences[si];
        for (const auto& surface : surfaces_) {
            std::size_t pos = 0;
            while ((pos = s.find(surface, pos)) != std::string::npos) {
                mentions.push_back(Mention{surface, si});
                pos += surface.size();
            }
        }
    }
    return mentions;
}

namespace {

std::string case_fold(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

EntityTable extract_entities(const SentenceList& sentences, const EntityRecognizer& recognizer,
                             std::size_t max_entities) {
    std::vector<Mention> mentions = recognizer.recognize(sentences);

    struct EntityInfo {
        std::string surface;           // first-seen surface
        std::size_t first_order;       // first mention index
        std::size_t frequency = 0;     // total mention count
        std::vector<std::size_t> sentence_hits;
    };
    std::map<std::string, EntityInfo> by_folded;
    std::vector<std::string> folded_order;
    for (std::size_t mi = 0; mi < mentions.size(); ++mi) {
        const auto& m = mentions[mi];
        if (m.surface.empty()) continue;
        if (m.sentence_index >= sentences.size())
            throw IndexOutOfRange("mention references sentence out of range");
        std::string key = case_fold(m.surface);
        auto [it, inserted] = by_folded.try_emplace(key);
        if (inserted) {
            it->second.surface = m.surface;
            it->second.first_order = mi;
            folded_order.push_back(key);
        }
        it->second.frequency += 1;
        it->second.sentence_hits.push_back(m.sentence_index);
    }

    // Cap: highest frequency first, ties broken by first occurrence.
    std::vector<std::string> kept = folded_order;
    if (kept.size() > max_entities) {
        std::stable_sort(kept.begin(), kept.end(), [&](const std::string& a, const std::string& b) {
            const auto& ea = by_folded[a];
            const auto& eb = by_folded[b];
            if (ea.frequency != eb.frequency) return ea.frequency > eb.frequency;
            return ea.first_order < eb.first_order;
        });
        kept.resize(max_entities);
        // Restore first-occurrence order among the survivors.
        std::sort(kept.begin(), kept.end(), [&](const std::string& a, const std::string& b) {
            return by_folded[a].first_order < by_folded[b].first_order;
        });
    }

    EntityTable table;
    std::set<std::pair<std::size_t, std::size_t>> incidence;
    for (std::size_t ei = 0; ei < kept.size(); ++ei) {
        const EntityInfo& info = by_folded[kept[ei]];
        table.entities.push_back(info.surface);
        for (std::size_t si : info.sentence_hits) incidence.insert({si, ei});
    }
    table.incidence.assign(incidence.begin(), incidence.end());
    return table;
}

}  // namespace inside
