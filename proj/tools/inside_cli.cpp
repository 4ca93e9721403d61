// Command-line front end: prepare intent caches, train/evaluate/ablate the
// model, sweep hyperparameters, and dump per-article graphs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "inside/inspect.hpp"
#include "inside/training.hpp"

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "inside 1.0.0";

struct CommonOptions {
    std::string corpus_path;
    std::string prompts_path;
    std::string encoder = "offline";
    std::string generator = "stub";
    std::string out_dir = "out";
    std::uint64_t seed = 42;

    inside::ModelConfig model;
    int batch_size = 64;
    double learning_rate = 2e-4;
    double weight_decay = 0.01;
    int max_epochs = 100;
    int patience = 10;

    std::string split_mode = "chronological";
    double train_fraction = 0.7;
    double val_fraction = 0.1;
    double test_fraction = 0.2;

    std::vector<std::string> ablate_flags;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool needs_corpus = true) {
    auto* corpus = cmd->add_option("--corpus", opt.corpus_path, "corpus jsonl file");
    if (needs_corpus) corpus->required();
    cmd->add_option("--prompts", opt.prompts_path, "prompt set json (default: built-in 4 perspectives)");
    cmd->add_option("--encoder", opt.encoder, "offline | adapter:<name>")
        ->check(CLI::Validator(
            [](std::string& v) -> std::string {
                if (v == "offline" || v.rfind("adapter:", 0) == 0) return {};
                return "must be 'offline' or 'adapter:<name>'";
            },
            "ENCODER"));
    cmd->add_option("--generator", opt.generator, "stub | adapter:<name>")
        ->check(CLI::Validator(
            [](std::string& v) -> std::string {
                if (v == "stub" || v.rfind("adapter:", 0) == 0) return {};
                return "must be 'stub' or 'adapter:<name>'";
            },
            "GENERATOR"));
    cmd->add_option("--seed", opt.seed, "run seed");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--dim", opt.model.dim, "embedding dimension");
    cmd->add_option("--window", opt.model.window, "sentence window w");
    cmd->add_option("--fine-l", opt.model.l, "fine intent nodes per coarse node");
    cmd->add_option("--pseudo-r", opt.model.r, "pseudo node count");
    cmd->add_option("--depth", opt.model.depth, "dual-update layers per graph");
    cmd->add_option("--align-depth", opt.model.align_depth, "alignment layers");
    cmd->add_option("--max-entities", opt.model.max_entities, "entity cap per article");
    cmd->add_option("--batch-size", opt.batch_size, "mini-batch size");
    cmd->add_option("--learning-rate", opt.learning_rate, "optimizer step size");
    cmd->add_option("--weight-decay", opt.weight_decay, "decoupled weight decay");
    cmd->add_option("--max-epochs", opt.max_epochs, "epoch cap");
    cmd->add_option("--patience", opt.patience, "early-stopping patience");
    cmd->add_option("--split", opt.split_mode, "chronological | random")
        ->check(CLI::IsMember({"chronological", "random"}));
    cmd->add_option("--train-fraction", opt.train_fraction, "train split fraction");
    cmd->add_option("--val-fraction", opt.val_fraction, "validation split fraction");
    cmd->add_option("--test-fraction", opt.test_fraction, "test split fraction");
    cmd->add_option("--ablate", opt.ablate_flags,
                    "variant flag(s): no_entity no_window no_fine_intent no_global no_dpga")
        ->check(CLI::IsMember({"no_entity", "no_window", "no_fine_intent", "no_global", "no_dpga"}));
}

void apply_ablations(CommonOptions& opt) {
    for (const auto& flag : opt.ablate_flags) {
        if (flag == "no_entity") opt.model.ablation.no_entity = true;
        if (flag == "no_window") opt.model.ablation.no_window = true;
        if (flag == "no_fine_intent") opt.model.ablation.no_fine_intent = true;
        if (flag == "no_global") opt.model.ablation.no_global = true;
        if (flag == "no_dpga") opt.model.ablation.no_dpga = true;
    }
}

inside::PromptSet load_prompts(const CommonOptions& opt) {
    if (opt.prompts_path.empty()) return inside::PromptSet::builtin_default();
    return inside::PromptSet::load(opt.prompts_path);
}

std::unique_ptr<inside::TextEncoder> make_encoder(const CommonOptions& opt) {
    if (opt.encoder == "offline")
        return std::make_unique<inside::DeterministicEncoder>(opt.model.dim);
    // Remote encoders would plug in here; the offline encoder is the only
    // adapter shipped with this build.
    throw inside::Error("encoder adapter not available in this build: " + opt.encoder);
}

std::unique_ptr<inside::IntentGenerator> make_generator(const CommonOptions& opt) {
    if (opt.generator == "stub") return std::make_unique<inside::StubGenerator>();
    inside::RemoteGeneratorConfig config;
    const char* endpoint = std::getenv("INSIDE_GENERATOR_ENDPOINT");
    if (!endpoint)
        throw inside::Error("set INSIDE_GENERATOR_ENDPOINT for generator " + opt.generator);
    config.endpoint = endpoint;
    config.model = opt.generator.substr(std::string("adapter:").size());
    return std::make_unique<inside::RemoteGenerator>(std::move(config));
}

// Cache-only stand-in used by commands that must not hit the network: any
// miss means `prepare` has not been run for this corpus/prompt set.
struct CacheOnlyGenerator : inside::IntentGenerator {
    std::vector<std::string> analyze(const std::string&, const std::vector<inside::Prompt>&) override {
        throw inside::Error(
            "intent cache is missing entries for this corpus and prompt set; "
            "run `inside prepare` first");
    }
};

std::unique_ptr<inside::IntentGenerator> generator_for_modeling(const CommonOptions& opt) {
    // The stub is deterministic and free, so warm-miss regeneration is safe;
    // remote adapters must have been resolved by `prepare`.
    if (opt.generator == "stub") return std::make_unique<inside::StubGenerator>();
    return std::make_unique<CacheOnlyGenerator>();
}

std::string cache_path(const CommonOptions& opt) {
    return (fs::path(opt.out_dir) / "intent_cache.jsonl").string();
}

std::uint64_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return 0;
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return inside::fnv1a64(data);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw inside::IoError("cannot write " + path);
    out << text;
}

json manifest_json(const CommonOptions& opt, const inside::TrainConfig& tc) {
    json m;
    m["version"] = kVersion;
    m["seed"] = opt.seed;
    m["corpus"] = opt.corpus_path;
    m["corpus_digest"] = inside::hex_digest(file_digest(opt.corpus_path));
    m["prompts"] = opt.prompts_path.empty() ? "builtin" : opt.prompts_path;
    m["encoder"] = opt.encoder;
    m["generator"] = opt.generator;
    m["out"] = opt.out_dir;
    m["split"] = {{"mode", opt.split_mode},
                  {"train_fraction", opt.train_fraction},
                  {"val_fraction", opt.val_fraction},
                  {"test_fraction", opt.test_fraction}};
    m["model"] = json::parse(tc.model.to_json());
    m["train"] = {{"batch_size", tc.batch_size},
                  {"learning_rate", tc.learning_rate},
                  {"weight_decay", tc.weight_decay},
                  {"max_epochs", tc.max_epochs},
                  {"patience", tc.patience}};
    return m;
}

inside::TrainConfig train_config(const CommonOptions& opt) {
    inside::TrainConfig tc;
    tc.model = opt.model;
    tc.batch_size = opt.batch_size;
    tc.learning_rate = opt.learning_rate;
    tc.weight_decay = opt.weight_decay;
    tc.max_epochs = opt.max_epochs;
    tc.patience = opt.patience;
    tc.seed = opt.seed;
    return tc;
}

inside::Splits make_splits(const CommonOptions& opt, const inside::Corpus& corpus) {
    inside::SplitSpec spec;
    spec.train_fraction = opt.train_fraction;
    spec.val_fraction = opt.val_fraction;
    spec.test_fraction = opt.test_fraction;
    spec.mode = opt.split_mode == "random" ? inside::SplitMode::random
                                           : inside::SplitMode::chronological;
    spec.seed = opt.seed;
    return inside::chronological_split(corpus, spec);
}

void write_curve(const std::string& path, const std::vector<inside::EpochRecord>& history) {
    std::ofstream out(path);
    for (const auto& rec : history) {
        json j;
        j["epoch"] = rec.epoch;
        j["train_loss"] = rec.train_loss;
        j["train_acc"] = rec.train_acc;
        j["val"] = json::parse(rec.val.to_json());
        out << j.dump() << "\n";
    }
}

int cmd_prepare(const CommonOptions& opt) {
    inside::Corpus corpus = inside::load_corpus(opt.corpus_path);
    inside::PromptSet prompts = load_prompts(opt);
    fs::create_directories(opt.out_dir);
    inside::IntentCache cache(cache_path(opt));
    std::size_t before = cache.size();
    auto generator = make_generator(opt);
    for (const auto& item : corpus.items)
        inside::analyze_intent(item, prompts.prompts, *generator, cache);
    std::cout << "prepared " << corpus.items.size() << " items, " << (cache.size() - before)
              << " new cache records (total " << cache.size() << ") in " << cache_path(opt)
              << "\n";
    return 0;
}

struct PreparedSplits {
    std::vector<inside::PreparedItem> train, val, test;
};

PreparedSplits prepare_splits(const CommonOptions& opt, const inside::Splits& splits,
                              const inside::TextEncoder& encoder,
                              const std::vector<inside::Prompt>& prompts,
                              inside::IntentGenerator& generator, inside::IntentCache& cache) {
    PreparedSplits out;
    out.train = inside::prepare_corpus(splits.train, opt.model, encoder, prompts, generator, cache);
    out.val = inside::prepare_corpus(splits.val, opt.model, encoder, prompts, generator, cache);
    out.test = inside::prepare_corpus(splits.test, opt.model, encoder, prompts, generator, cache);
    return out;
}

int cmd_train(const CommonOptions& opt) {
    inside::Corpus corpus = inside::load_corpus(opt.corpus_path);
    inside::PromptSet prompts = load_prompts(opt);
    fs::create_directories(opt.out_dir);
    inside::TrainConfig tc = train_config(opt);
    write_text((fs::path(opt.out_dir) / "manifest.json").string(),
               manifest_json(opt, tc).dump(2) + "\n");

    inside::Splits splits = make_splits(opt, corpus);
    auto encoder = make_encoder(opt);
    auto generator = generator_for_modeling(opt);
    inside::IntentCache cache(cache_path(opt));
    PreparedSplits items = prepare_splits(opt, splits, *encoder, prompts.prompts, *generator, cache);

    inside::TrainResult result = inside::train(tc, items.train, items.val);
    inside::MetricReport test = inside::evaluate(result.params, items.test);

    inside::save_checkpoint(result.params.to_checkpoint(),
                            (fs::path(opt.out_dir) / "model.ckpt").string());
    write_curve((fs::path(opt.out_dir) / "curve.jsonl").string(), result.history);

    json metrics;
    metrics["best_epoch"] = result.best_epoch;
    metrics["val"] = json::parse(result.val_report.to_json());
    metrics["test"] = json::parse(test.to_json());
    write_text((fs::path(opt.out_dir) / "metrics.json").string(), metrics.dump(2) + "\n");

    std::string table = "split\tmacro_f1\tacc\tauc\tf1_real\tf1_fake\n" +
                        result.val_report.to_table_row("val") + "\n" + test.to_table_row("test") +
                        "\n";
    write_text((fs::path(opt.out_dir) / "metrics.txt").string(), table);
    std::cout << table;
    std::cout << "checkpoint: " << (fs::path(opt.out_dir) / "model.ckpt").string() << "\n";
    return 0;
}

int cmd_evaluate(const CommonOptions& opt, const std::string& checkpoint_path) {
    inside::Checkpoint ckpt = inside::load_checkpoint(checkpoint_path);
    inside::ModelParams params = inside::ModelParams::from_checkpoint(ckpt);
    CommonOptions resolved = opt;
    resolved.model = params.config;

    inside::Corpus corpus = inside::load_corpus(opt.corpus_path);
    inside::PromptSet prompts = load_prompts(opt);
    fs::create_directories(opt.out_dir);
    inside::Splits splits = make_splits(resolved, corpus);
    auto encoder = make_encoder(resolved);
    auto generator = generator_for_modeling(resolved);
    inside::IntentCache cache(cache_path(opt));
    PreparedSplits items =
        prepare_splits(resolved, splits, *encoder, prompts.prompts, *generator, cache);

    inside::MetricReport val = inside::evaluate(params, items.val);
    inside::MetricReport test = inside::evaluate(params, items.test);
    json metrics;
    metrics["val"] = json::parse(val.to_json());
    metrics["test"] = json::parse(test.to_json());
    write_text((fs::path(opt.out_dir) / "eval_metrics.json").string(), metrics.dump(2) + "\n");
    std::string table = "split\tmacro_f1\tacc\tauc\tf1_real\tf1_fake\n" + val.to_table_row("val") +
                        "\n" + test.to_table_row("test") + "\n";
    write_text((fs::path(opt.out_dir) / "eval_metrics.txt").string(), table);
    std::cout << table;
    return 0;
}

int cmd_ablate(const CommonOptions& opt) {
    inside::Corpus corpus = inside::load_corpus(opt.corpus_path);
    inside::PromptSet prompts = load_prompts(opt);
    fs::create_directories(opt.out_dir);
    inside::TrainConfig tc = train_config(opt);
    write_text((fs::path(opt.out_dir) / "manifest.json").string(),
               manifest_json(opt, tc).dump(2) + "\n");

    inside::Splits splits = make_splits(opt, corpus);
    auto encoder = make_encoder(opt);
    auto generator = generator_for_modeling(opt);
    inside::IntentCache cache(cache_path(opt));
    auto rows = inside::run_ablation(tc, splits, *encoder, prompts.prompts, *generator, cache);

    std::string table = inside::format_ablation_table(rows);
    write_text((fs::path(opt.out_dir) / "ablation.tsv").string(), table);
    json out = json::array();
    for (const auto& row : rows)
        out.push_back({{"variant", row.name},
                       {"val", json::parse(row.val.to_json())},
                       {"test", json::parse(row.test.to_json())}});
    write_text((fs::path(opt.out_dir) / "ablation.json").string(), out.dump(2) + "\n");
    std::cout << table;
    return 0;
}

int cmd_sweep(const CommonOptions& opt, const std::vector<int>& l_grid,
              const std::vector<int>& r_grid) {
    inside::Corpus corpus = inside::load_corpus(opt.corpus_path);
    inside::PromptSet prompts = load_prompts(opt);
    fs::create_directories(opt.out_dir);
    inside::TrainConfig base = train_config(opt);
    write_text((fs::path(opt.out_dir) / "manifest.json").string(),
               manifest_json(opt, base).dump(2) + "\n");

    inside::Splits splits = make_splits(opt, corpus);
    auto encoder = make_encoder(opt);
    auto generator = generator_for_modeling(opt);
    inside::IntentCache cache(cache_path(opt));

    std::vector<int> ls = l_grid.empty() ? std::vector<int>{opt.model.l} : l_grid;
    std::vector<int> rs = r_grid.empty() ? std::vector<int>{opt.model.r} : r_grid;

    std::ofstream curve((fs::path(opt.out_dir) / "sweep.jsonl").string());
    int records = 0;
    for (int l : ls) {
        for (int r : rs) {
            inside::TrainConfig tc = base;
            tc.model.l = l;
            tc.model.r = r;
            auto train_items =
                inside::prepare_corpus(splits.train, tc.model, *encoder, prompts.prompts, *generator, cache);
            auto val_items =
                inside::prepare_corpus(splits.val, tc.model, *encoder, prompts.prompts, *generator, cache);
            auto test_items =
                inside::prepare_corpus(splits.test, tc.model, *encoder, prompts.prompts, *generator, cache);
            inside::TrainResult result = inside::train(tc, train_items, val_items);
            inside::MetricReport test = inside::evaluate(result.params, test_items);
            json rec;
            rec["l"] = l;
            rec["r"] = r;
            rec["best_epoch"] = result.best_epoch;
            rec["val"] = json::parse(result.val_report.to_json());
            rec["test"] = json::parse(test.to_json());
            curve << rec.dump() << "\n";
            ++records;
            std::cout << "l=" << l << " r=" << r << " val_macro_f1=" << result.val_report.macro_f1
                      << " test_macro_f1=" << test.macro_f1 << "\n";
        }
    }
    std::cout << records << " sweep records in " << (fs::path(opt.out_dir) / "sweep.jsonl").string()
              << "\n";
    return 0;
}

int cmd_inspect_graph(const CommonOptions& opt, const std::string& checkpoint_path,
                      const std::string& item_id) {
    inside::Checkpoint ckpt = inside::load_checkpoint(checkpoint_path);
    inside::ModelParams params = inside::ModelParams::from_checkpoint(ckpt);
    CommonOptions resolved = opt;
    resolved.model = params.config;

    inside::Corpus corpus = inside::load_corpus(opt.corpus_path);
    const inside::NewsItem* found = nullptr;
    for (const auto& item : corpus.items)
        if (item.id == item_id) found = &item;
    if (!found) throw inside::UnknownItem(item_id);

    inside::PromptSet prompts = load_prompts(opt);
    fs::create_directories(opt.out_dir);
    auto encoder = make_encoder(resolved);
    auto generator = generator_for_modeling(resolved);
    inside::IntentCache cache(cache_path(opt));
    inside::PreparedItem prep =
        inside::prepare_item(*found, resolved.model, *encoder, prompts.prompts, *generator, cache);

    std::string dump = inside::inspect_item_json(params, prep);
    std::string path = (fs::path(opt.out_dir) / ("graph_" + item_id + ".json")).string();
    write_text(path, dump + "\n");
    std::cout << "wrote " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"intent-semantic joint graph model for fake news detection"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOptions opt;
    std::string checkpoint_path;
    std::string item_id;
    std::vector<int> l_grid, r_grid;

    auto* prepare = app.add_subcommand("prepare", "populate the intent cache for a corpus");
    add_common_flags(prepare, opt);

    auto* train = app.add_subcommand("train", "train a model and write checkpoint + metrics");
    add_common_flags(train, opt);

    auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on a corpus split");
    add_common_flags(evaluate, opt);
    evaluate->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();

    auto* ablate = app.add_subcommand("ablate", "train the base model and each single-flag variant");
    add_common_flags(ablate, opt);

    auto* sweep = app.add_subcommand("sweep", "train over grids of --fine-l and --pseudo-r");
    add_common_flags(sweep, opt);
    sweep->add_option("--sweep-l", l_grid, "fine-node counts to sweep");
    sweep->add_option("--sweep-r", r_grid, "pseudo-node counts to sweep");

    auto* inspect = app.add_subcommand("inspect-graph", "dump one article's graphs and attention");
    add_common_flags(inspect, opt);
    inspect->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
    inspect->add_option("--item", item_id, "news item id")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        apply_ablations(opt);
        if (prepare->parsed()) return cmd_prepare(opt);
        if (train->parsed()) return cmd_train(opt);
        if (evaluate->parsed()) return cmd_evaluate(opt, checkpoint_path);
        if (ablate->parsed()) return cmd_ablate(opt);
        if (sweep->parsed()) return cmd_sweep(opt, l_grid, r_grid);
        if (inspect->parsed()) return cmd_inspect_graph(opt, checkpoint_path, item_id);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
