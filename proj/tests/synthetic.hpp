#ifndef INSIDE_TESTS_SYNTHETIC_HPP
#define INSIDE_TESTS_SYNTHETIC_HPP

// Small labeled corpora for training tests: each class shares a signature
// sentence, so the deterministic encoder makes the classes separable.

#include <cstdint>
#include <string>

#include "inside/data_io.hpp"

namespace testutil {

inline inside::Corpus make_separable_corpus(int count, std::uint64_t seed = 1) {
    inside::Corpus corpus;
    corpus.name = "separable";
    for (int i = 0; i < count; ++i) {
        inside::NewsItem item;
        item.label = i % 2;
        item.id = "syn-" + std::to_string(i);
        std::string filler =
            "Reporter " + std::string(1, static_cast<char>('A' + (seed + static_cast<std::uint64_t>(i)) % 26)) +
            "Name filed story number " + std::to_string(seed % 1000) + "-" + std::to_string(i) + ".";
        if (item.label == 1) {
            item.text = "Shocking secret cure was hidden from everyone. " + filler +
                        " Insiders fear the truth.";
        } else {
            item.text = "The council published routine meeting minutes. " + filler +
                        " Officials confirmed the schedule.";
        }
        item.timestamp = 1000 + i;
        corpus.items.push_back(std::move(item));
    }
    return corpus;
}

}  // namespace testutil

#endif
