#include "inside/encoders.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace inside {

using nlohmann::json;

// ---- deterministic encoder --------------------------------------------

namespace {

// Uniform in (0,1) from the top 53 bits; avoids exact 0 for Box-Muller.
double next_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

}  // namespace

Matrix deterministic_encode(const std::vector<std::string>& texts, int dim) {
    if (dim < 1) throw Error("encoder dim must be >= 1");
    Matrix out(static_cast<Eigen::Index>(texts.size()), dim);
    for (std::size_t row = 0; row < texts.size(); ++row) {
        std::uint64_t seed = fnv1a64(texts[row]) ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(dim));
        std::mt19937_64 rng(seed);
        double norm_sq = 0.0;
        for (int c = 0; c < dim; ++c) {
            double u1 = next_unit(rng);
            double u2 = next_unit(rng);
            double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            out(static_cast<Eigen::Index>(row), c) = g;
            norm_sq += g * g;
        }
        out.row(static_cast<Eigen::Index>(row)) /= std::sqrt(norm_sq);
    }
    return out;
}

// ---- prompts -----------------------------------------------------------

std::string Prompt::render(const std::string& news_text) const {
    std::string out = template_text;
    const std::string placeholder = "{text}";
    auto pos = out.find(placeholder);
    if (pos != std::string::npos) out.replace(pos, placeholder.size(), news_text);
    return out;
}

std::string Prompt::digest() const {
    return hex_digest(fnv1a64(perspective + "\x1f" + template_text));
}

PromptSet PromptSet::builtin_default() {
    PromptSet set;
    const char* perspectives[] = {"belief", "desire", "plan", "outcome"};
    for (const char* p : perspectives) {
        Prompt prompt;
        prompt.perspective = p;
        prompt.template_text = std::string("Given the following news piece, analyze the ") + p +
                               " intent behind its creation and summarize it in one paragraph. News: {text}";
        set.prompts.push_back(std::move(prompt));
    }
    return set;
}

PromptSet PromptSet::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open prompt file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(0, e.what());
    }
    PromptSet set;
    for (const auto& entry : j) {
        Prompt p;
        p.perspective = entry.at("perspective").get<std::string>();
        p.template_text = entry.at("template").get<std::string>();
        set.prompts.push_back(std::move(p));
    }
    if (set.prompts.empty()) throw Error("prompt file contains no prompts");
    return set;
}

void PromptSet::save(const std::string& path) const {
    json j = json::array();
    for (const auto& p : prompts) j.push_back({{"perspective", p.perspective}, {"template", p.template_text}});
    std::ofstream out(path);
    if (!out) throw IoError("cannot write prompt file: " + path);
    out << j.dump(2) << "\n";
}

// ---- generators --------------------------------------------------------

std::vector<std::string> StubGenerator::analyze(const std::string& text,
                                                const std::vector<Prompt>& prompts) {
    // Leading sentence: up to the first terminal mark, capped for huge texts.
    std::string lead = text;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            lead = text.substr(0, i + 1);
            break;
        }
    }
    if (lead.size() > 200) lead = lead.substr(0, 200);
    std::vector<std::string> out;
    out.reserve(prompts.size());
    for (const auto& p : prompts) out.push_back(p.perspective + ": " + lead);
    return out;
}

std::vector<std::string> RemoteGenerator::analyze(const std::string& text,
                                                  const std::vector<Prompt>& prompts) {
    std::string token;
    if (const char* env = std::getenv(config_.credential_env.c_str())) token = env;

    std::string last_error = "no attempts made";
    int delay = config_.backoff_ms;
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            delay *= 2;
        }
        try {
            httplib::Client client(config_.endpoint);
            client.set_read_timeout(30, 0);
            json body;
            body["model"] = config_.model;
            body["text"] = text;
            body["prompts"] = json::array();
            for (const auto& p : prompts) body["prompts"].push_back(p.render(text));
            httplib::Headers headers;
            if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
            auto res = client.Post("/v1/analyze", headers, body.dump(), "application/json");
            if (!res) {
                last_error = "connection failed";
                continue;
            }
            if (res->status != 200) {
                last_error = "http status " + std::to_string(res->status);
                continue;
            }
            json parsed = json::parse(res->body);
            std::vector<std::string> out = parsed.at("analyses").get<std::vector<std::string>>();
            if (out.size() != prompts.size()) {
                last_error = "generator returned " + std::to_string(out.size()) + " analyses for " +
                             std::to_string(prompts.size()) + " prompts";
                continue;
            }
            for (const auto& s : out)
                if (s.empty()) throw GeneratorUnavailable("generator returned an empty analysis");
            return out;
        } catch (const GeneratorUnavailable&) {
            throw;
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    throw GeneratorUnavailable("generator unavailable after " + std::to_string(config_.max_attempts) +
                               " attempts: " + last_error);
}

// ---- cache -------------------------------------------------------------

IntentCache::IntentCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;  // fresh cache
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        Key key{j.at("news_id").get<std::string>(), j.at("perspective_index").get<int>(),
                j.at("prompt_digest").get<std::string>()};
        store_[key] = j.at("analysis").get<std::string>();
    }
}

bool IntentCache::get(const std::string& news_id, int perspective_index, const std::string& digest,
                      std::string& out) const {
    auto it = store_.find(Key{news_id, perspective_index, digest});
    if (it == store_.end()) return false;
    out = it->second;
    return true;
}

void IntentCache::put(const std::string& news_id, int perspective_index, const std::string& digest,
                      const std::string& analysis) {
    std::lock_guard<std::mutex> lock(write_mutex_);
    store_[Key{news_id, perspective_index, digest}] = analysis;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw IoError("cannot append to intent cache: " + path_);
    json j;
    j["news_id"] = news_id;
    j["perspective_index"] = perspective_index;
    j["prompt_digest"] = digest;
    j["analysis"] = analysis;
    out << j.dump() << "\n";
}

std::vector<std::string> analyze_intent(const NewsItem& item, const std::vector<Prompt>& prompts,
                                        IntentGenerator& generator, IntentCache& cache) {
    if (prompts.empty()) throw Error("analyze_intent requires at least one prompt");
    std::vector<std::string> out(prompts.size());
    std::vector<int> missing;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        if (!cache.get(item.id, static_cast<int>(i), prompts[i].digest(), out[i]))
            missing.push_back(static_cast<int>(i));
    }
    if (!missing.empty()) {
        std::vector<Prompt> subset;
        for (int i : missing) subset.push_back(prompts[i]);
        std::vector<std::string> generated = generator.analyze(item.text, subset);
        for (std::size_t j = 0; j < missing.size(); ++j) {
            int i = missing[j];
            out[i] = generated[j];
            cache.put(item.id, i, prompts[i].digest(), generated[j]);
        }
    }
    return out;
}

}  // namespace inside
