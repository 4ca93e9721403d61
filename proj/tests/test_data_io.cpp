#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "inside/data_io.hpp"
#include "test_util.hpp"

using namespace inside;

namespace {

Corpus make_corpus(int count, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    Corpus corpus;
    corpus.name = "synthetic";
    for (int i = 0; i < count; ++i) {
        NewsItem item;
        item.id = "item-" + std::to_string(i);
        item.text = "Sentence number " + std::to_string(i) + ". Another line follows.";
        item.label = static_cast<int>(rng() % 2);
        item.timestamp = static_cast<std::int64_t>(rng() % 100000);
        corpus.items.push_back(std::move(item));
    }
    return corpus;
}

}  // namespace

TEST_CASE("corpus jsonl round-trip") {
    Corpus corpus = make_corpus(3);
    std::string path = testutil::temp_path("corpus.jsonl");
    save_corpus(corpus, path);
    Corpus loaded = load_corpus(path);
    REQUIRE(loaded.items.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(loaded.items[i].id == corpus.items[i].id);
        CHECK(loaded.items[i].text == corpus.items[i].text);
        CHECK(loaded.items[i].label == corpus.items[i].label);
        CHECK(loaded.items[i].timestamp == corpus.items[i].timestamp);
    }
    std::remove(path.c_str());
}

TEST_CASE("reload idempotence") {
    Corpus corpus = make_corpus(25);
    std::string p1 = testutil::temp_path("c1.jsonl");
    std::string p2 = testutil::temp_path("c2.jsonl");
    save_corpus(corpus, p1);
    Corpus once = load_corpus(p1);
    save_corpus(once, p2);
    Corpus twice = load_corpus(p2);
    REQUIRE(once.items.size() == twice.items.size());
    for (std::size_t i = 0; i < once.items.size(); ++i) {
        CHECK(once.items[i].id == twice.items[i].id);
        CHECK(once.items[i].text == twice.items[i].text);
        CHECK(once.items[i].label == twice.items[i].label);
    }
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("duplicate ids rejected") {
    std::string path = testutil::temp_path("dup.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"a","text":"First article.","label":0})" << "\n";
        out << R"({"id":"a","text":"Second article.","label":1})" << "\n";
    }
    CHECK_THROWS_AS(load_corpus(path), DuplicateId);
    std::remove(path.c_str());
}

TEST_CASE("malformed line reports its line number") {
    std::string path = testutil::temp_path("bad.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"a","text":"Fine.","label":0})" << "\n";
        out << "{not json" << "\n";
    }
    try {
        load_corpus(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
    std::remove(path.c_str());
}

TEST_CASE("blank text and bad labels rejected") {
    std::string path = testutil::temp_path("blank.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"a","text":"   ","label":0})" << "\n";
    }
    CHECK_THROWS_AS(load_corpus(path), ParseError);
    {
        std::ofstream out(path);
        out << R"({"id":"a","text":"Fine.","label":2})" << "\n";
    }
    CHECK_THROWS_AS(load_corpus(path), ParseError);
    std::remove(path.c_str());
}

TEST_CASE("a 3446-line file loads with count 3446") {
    Corpus corpus = make_corpus(3446);
    std::string path = testutil::temp_path("big.jsonl");
    save_corpus(corpus, path);
    CHECK(load_corpus(path).items.size() == 3446);
    std::remove(path.c_str());
}

TEST_CASE("chronological split of timestamps 1..10 at (0.7,0.1,0.2)") {
    Corpus corpus;
    for (int i = 10; i >= 1; --i) {  // deliberately unsorted input
        NewsItem item;
        item.id = "n" + std::to_string(i);
        item.text = "Text " + std::to_string(i) + ".";
        item.label = i % 2;
        item.timestamp = i;
        corpus.items.push_back(item);
    }
    SplitSpec spec;
    Splits s = chronological_split(corpus, spec);
    REQUIRE(s.train.items.size() == 7);
    REQUIRE(s.val.items.size() == 1);
    REQUIRE(s.test.items.size() == 2);
    CHECK(*s.train.items.back().timestamp == 7);
    CHECK(*s.val.items[0].timestamp == 8);
    CHECK(*s.test.items[0].timestamp == 9);
    CHECK(*s.test.items[1].timestamp == 10);
}

TEST_CASE("missing timestamp in chronological mode") {
    Corpus corpus = make_corpus(4);
    corpus.items[2].timestamp.reset();
    SplitSpec spec;
    CHECK_THROWS_AS(chronological_split(corpus, spec), MissingTimestamp);
}

TEST_CASE("random mode is seed-stable") {
    Corpus corpus = make_corpus(100);
    SplitSpec spec;
    spec.mode = SplitMode::random;
    spec.seed = 99;
    Splits a = chronological_split(corpus, spec);
    Splits b = chronological_split(corpus, spec);
    REQUIRE(a.train.items.size() == b.train.items.size());
    for (std::size_t i = 0; i < a.train.items.size(); ++i)
        CHECK(a.train.items[i].id == b.train.items[i].id);
    for (std::size_t i = 0; i < a.test.items.size(); ++i)
        CHECK(a.test.items[i].id == b.test.items[i].id);
}

TEST_CASE("split spec fractions must sum to 1") {
    SplitSpec spec;
    spec.train_fraction = 0.5;
    spec.val_fraction = 0.2;
    spec.test_fraction = 0.2;
    CHECK_THROWS(spec.validate());
}

TEST_CASE("split partition property over random corpora") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        int count = 3 + static_cast<int>(rng() % 60);
        Corpus corpus = make_corpus(count, rng());
        SplitSpec spec;
        double a = 0.3 + 0.4 * static_cast<double>(rng() % 100) / 100.0;
        double b = 0.05 + 0.2 * static_cast<double>(rng() % 100) / 100.0;
        spec.train_fraction = a;
        spec.val_fraction = b;
        spec.test_fraction = 1.0 - a - b;
        Splits s = chronological_split(corpus, spec);

        std::set<std::string> seen;
        auto absorb = [&](const Corpus& c) {
            for (const auto& item : c.items) CHECK(seen.insert(item.id).second);
        };
        absorb(s.train);
        absorb(s.val);
        absorb(s.test);
        CHECK(seen.size() == corpus.items.size());

        auto max_ts = [](const Corpus& c) {
            std::int64_t mx = INT64_MIN;
            for (const auto& item : c.items) mx = std::max(mx, *item.timestamp);
            return mx;
        };
        auto min_ts = [](const Corpus& c) {
            std::int64_t mn = INT64_MAX;
            for (const auto& item : c.items) mn = std::min(mn, *item.timestamp);
            return mn;
        };
        if (!s.train.items.empty() && !s.val.items.empty()) CHECK(max_ts(s.train) <= min_ts(s.val));
        if (!s.val.items.empty() && !s.test.items.empty()) CHECK(max_ts(s.val) <= min_ts(s.test));
        if (!s.train.items.empty() && !s.test.items.empty()) CHECK(max_ts(s.train) <= min_ts(s.test));
    }
}

TEST_CASE("checkpoint round-trip is bit exact") {
    std::mt19937_64 rng(11);
    Checkpoint ckpt;
    ckpt.config_json = R"({"dim":8})";
    ckpt.tensors.emplace_back("alpha", testutil::random_matrix(rng, 3, 5));
    ckpt.tensors.emplace_back("beta", testutil::random_matrix(rng, 1, 1));
    std::string path = testutil::temp_path("ckpt.bin");
    save_checkpoint(ckpt, path);
    Checkpoint loaded = load_checkpoint(path);
    CHECK(loaded.version == ckpt.version);
    CHECK(loaded.config_json == ckpt.config_json);
    REQUIRE(loaded.tensors.size() == 2);
    CHECK(loaded.tensors[0].first == "alpha");
    CHECK((loaded.tensors[0].second.array() == ckpt.tensors[0].second.array()).all());
    CHECK((loaded.tensors[1].second.array() == ckpt.tensors[1].second.array()).all());
    std::remove(path.c_str());
}

TEST_CASE("checkpoint byte perturbation is detected") {
    std::mt19937_64 rng(12);
    Checkpoint ckpt;
    ckpt.tensors.emplace_back("theta", testutil::random_matrix(rng, 4, 4));
    std::string path = testutil::temp_path("ckpt_corrupt.bin");
    save_checkpoint(ckpt, path);

    // Flip one byte near the end of the file, inside the tensor payload.
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekg(0, std::ios::end);
    auto size = f.tellg();
    f.seekp(static_cast<std::streamoff>(size) - 9);
    char byte;
    f.seekg(static_cast<std::streamoff>(size) - 9);
    f.read(&byte, 1);
    byte = static_cast<char>(byte ^ 0x55);
    f.seekp(static_cast<std::streamoff>(size) - 9);
    f.write(&byte, 1);
    f.close();

    CHECK_THROWS(load_checkpoint(path));
    std::remove(path.c_str());
}

TEST_CASE("crc32 matches the standard check value") {
    const char* s = "123456789";
    CHECK(crc32(s, 9) == 0xCBF43926u);
}
