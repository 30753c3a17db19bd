// mswe: sentiment-enriched word embeddings and the downstream CNN
// classifier, end to end. Subcommands cover corpus preparation, embedding
// and classifier training, prediction, evaluation, beta sweeps and
// embedding inspection. Exit codes: 0 success, 2 usage/config error,
// 3 numerical abort, 4 query error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mswe/cli_config.hpp"
#include "mswe/corpus.hpp"
#include "mswe/eval.hpp"
#include "mswe/model.hpp"
#include "mswe/synth.hpp"
#include "mswe/trainer.hpp"

namespace {

using namespace mswe;

void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

void require_exists(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string(what) + " path is required");
  if (!std::filesystem::exists(path)) {
    throw ConfigError(std::string(what) + " file does not exist: " + path);
  }
}

corpus::MarkerConfig load_markers(const std::string& path) {
  if (path.empty()) return corpus::MarkerConfig::defaults();
  require_exists(path, "markers");
  return corpus::MarkerConfig::load(path);
}

corpus::SentimentLexicon load_lexicon_pair(const cli::CliConfig& cfg) {
  require_exists(cfg.lexicon_pos, "positive lexicon");
  require_exists(cfg.lexicon_neg, "negative lexicon");
  auto lexicon = corpus::load_lexicon(cfg.lexicon_pos, cfg.lexicon_neg);
  if (lexicon.entries.empty()) {
    std::cerr << "warning: lexicon is empty\n";
  }
  return lexicon;
}

std::vector<corpus::LabeledTweet> encode_all(
    const std::vector<corpus::TokenizedTweet>& tweets,
    const corpus::Vocabulary& vocab) {
  std::vector<corpus::LabeledTweet> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) out.push_back(corpus::encode(t, vocab));
  return out;
}

// Predict inputs may be raw lines or "label<TAB>text"; a leading 0/1 + tab
// on the first non-empty line selects the labeled form.
std::vector<corpus::TokenizedTweet> load_predict_input(const std::string& path) {
  auto lines = corpus::load_raw_lines(path);
  bool gold = false;
  for (const auto& line : lines) {
    if (line.empty()) continue;
    gold = line.size() > 1 && (line[0] == '0' || line[0] == '1') && line[1] == '\t';
    break;
  }
  if (gold) return corpus::load_gold_corpus(path);
  std::vector<corpus::TokenizedTweet> out;
  for (const auto& line : lines) {
    corpus::TokenizedTweet tweet;
    tweet.tokens = corpus::tokenize(line);
    if (tweet.tokens.empty()) continue;
    out.push_back(std::move(tweet));
  }
  return out;
}

int cmd_prepare(const cli::CliConfig& cfg) {
  require_exists(cfg.input, "input corpus");
  if (cfg.output.empty()) throw ConfigError("output path is required");
  const auto markers = load_markers(cfg.markers);
  const auto lines = corpus::load_raw_lines(cfg.input);

  std::vector<corpus::TokenizedTweet> labeled;
  std::size_t unlabeled = 0, conflicts = 0;
  for (const auto& line : lines) {
    auto tokens = corpus::tokenize(line);
    if (tokens.empty()) continue;
    auto result = corpus::distant_label(tokens, markers);
    if (!result) {
      bool any_positive = false, any_negative = false;
      for (const auto& tok : tokens) {
        auto it = markers.markers.find(tok);
        if (it == markers.markers.end()) continue;
        (it->second == Polarity::positive ? any_positive : any_negative) = true;
      }
      if (any_positive && any_negative) {
        ++conflicts;
      } else {
        ++unlabeled;
      }
      continue;
    }
    corpus::TokenizedTweet tweet;
    tweet.tokens = std::move(result->tokens);
    tweet.label = result->label;
    tweet.provenance = result->provenance;
    labeled.push_back(std::move(tweet));
  }

  const std::size_t labeled_count = labeled.size();
  std::size_t too_short = 0;
  for (const auto& tweet : labeled) {
    if (tweet.tokens.size() < cfg.embedding.window) ++too_short;
  }
  auto kept = corpus::dedupe_and_filter(std::move(labeled), cfg.embedding.window);
  const std::size_t duplicates = labeled_count - too_short - kept.size();
  std::size_t positive = 0, negative = 0;
  for (const auto& tweet : kept) {
    (tweet.label == Polarity::positive ? positive : negative) += 1;
  }
  ensure_parent_dir(cfg.output);
  corpus::write_prepared(kept, cfg.output);

  std::printf("          Positive  Negative  Total\n");
  std::printf("kept      %8zu  %8zu  %5zu\n", positive, negative, positive + negative);
  std::printf("dropped: no_marker=%zu conflicts=%zu too_short=%zu duplicates=%zu\n",
              unlabeled, conflicts, too_short, duplicates);
  return 0;
}

int cmd_train_embeddings(const cli::CliConfig& cfg) {
  require_exists(cfg.corpus, "corpus");
  auto lexicon = load_lexicon_pair(cfg);
  if (cfg.embeddings_out.empty()) throw ConfigError("embeddings_out path is required");
  if (!cfg.resume.empty()) require_exists(cfg.resume, "resume checkpoint");

  auto tweets = corpus::load_gold_corpus(cfg.corpus);
  auto vocab = corpus::build_vocab(tweets, cfg.embedding.min_count);
  auto encoded = encode_all(tweets, vocab);

  train::TrainConfig train_cfg = cfg.embedding;
  if (train_cfg.checkpoint_path.empty()) train_cfg.checkpoint_path = cfg.checkpoint_out;
  ensure_parent_dir(cfg.embeddings_out);
  if (!train_cfg.checkpoint_path.empty()) ensure_parent_dir(train_cfg.checkpoint_path);
  auto result =
      train::train(encoded, vocab, lexicon, train_cfg, &std::cerr, cfg.resume);

  model::save_embeddings(result.params.embeddings, vocab, cfg.embeddings_out);
  std::printf("trained %zu epochs on %zu tweets (%zu skipped), %zu windows/epoch\n",
              cfg.embedding.epochs, result.report.tweets_used,
              result.report.tweets_skipped, result.report.total_windows);
  std::printf("untouched embedding rows: %zu\n",
              result.report.untouched_embedding_rows);
  if (!result.report.epochs.empty()) {
    std::printf("final mean loss: %.6f\n", result.report.epochs.back().mean_loss);
  }
  std::printf("embeddings written to %s\n", cfg.embeddings_out.c_str());
  if (!train_cfg.checkpoint_path.empty()) {
    std::printf("checkpoint written to %s\n", train_cfg.checkpoint_path.c_str());
  }
  return 0;
}

int cmd_train_classifier(const cli::CliConfig& cfg) {
  require_exists(cfg.embeddings, "embeddings");
  require_exists(cfg.corpus, "corpus");
  if (cfg.classifier_out.empty()) throw ConfigError("classifier_out path is required");

  auto [table, vocab] = model::load_embeddings(cfg.embeddings);
  if (table.dim() != cfg.embedding.dim) {
    throw ConfigError("embeddings file has dimension " + std::to_string(table.dim()) +
                      " but config dim is " + std::to_string(cfg.embedding.dim));
  }
  auto tweets = corpus::load_gold_corpus(cfg.corpus);
  auto encoded = encode_all(tweets, vocab);
  auto result = cls::train_classifier(encoded, cfg.classifier, table, &std::cerr);
  ensure_parent_dir(cfg.classifier_out);
  cls::save_classifier(result.params, cfg.classifier_out);
  if (!result.history.empty()) {
    std::printf("final train accuracy: %.4f\n", result.history.back().train_accuracy);
  }
  std::printf("classifier written to %s\n", cfg.classifier_out.c_str());
  return 0;
}

int cmd_predict(const cli::CliConfig& cfg) {
  require_exists(cfg.embeddings, "embeddings");
  require_exists(cfg.classifier_in, "classifier");
  require_exists(cfg.input, "input");
  if (cfg.output.empty()) throw ConfigError("output path is required");

  auto [table, vocab] = model::load_embeddings(cfg.embeddings);
  auto params = cls::load_classifier(cfg.classifier_in);
  if (params.embedding_dim != table.dim()) {
    throw ConfigError("classifier expects dimension " +
                      std::to_string(params.embedding_dim) +
                      " but embeddings file has " + std::to_string(table.dim()));
  }
  auto tweets = load_predict_input(cfg.input);
  auto encoded = encode_all(tweets, vocab);

  ensure_parent_dir(cfg.output);
  std::ofstream out(cfg.output);
  if (!out) throw ConfigError("cannot write file: " + cfg.output);
  nn::Rng unused(0);
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    auto dist = cls::classify_forward(table, encoded[i].tokens, params,
                                      cls::Mode::infer, cfg.classifier, unused);
    const bool positive = dist[kPositiveSlot] >= dist[kNegativeSlot];
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", dist[kPositiveSlot]);
    out << i << '\t' << (positive ? '1' : '0') << '\t' << buf << '\n';
  }
  return 0;
}

std::vector<Polarity> read_prediction_labels(const std::string& path) {
  auto lines = corpus::load_raw_lines(path);
  std::vector<Polarity> out;
  std::size_t lineno = 0;
  for (const auto& line : lines) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id, label;
    if (!(row >> id >> label) || (label != "0" && label != "1")) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'id<TAB>label<TAB>p_pos'");
    }
    out.push_back(label == "1" ? Polarity::positive : Polarity::negative);
  }
  return out;
}

int cmd_eval(const cli::CliConfig& cfg) {
  require_exists(cfg.corpus, "gold");
  require_exists(cfg.input, "predictions");
  auto gold_tweets = corpus::load_gold_corpus(cfg.corpus);
  auto pred = read_prediction_labels(cfg.input);
  std::vector<Polarity> gold;
  gold.reserve(gold_tweets.size());
  for (const auto& t : gold_tweets) gold.push_back(t.label);

  const double score = eval::macro_f1(gold, pred);
  std::printf("model  dataset  macro_f1\n");
  std::printf("mswe   %s  %.6f\n", cfg.corpus.c_str(), score);
  std::printf("macro_f1 %.6f\n", score);
  if (!cfg.csv.empty()) {
    ensure_parent_dir(cfg.csv);
    std::ofstream out(cfg.csv);
    if (!out) throw ConfigError("cannot write file: " + cfg.csv);
    out << "dataset,macro_f1\n" << cfg.corpus << ',' << score << '\n';
  }
  return 0;
}

int cmd_sweep_beta(const cli::CliConfig& cfg) {
  require_exists(cfg.corpus, "corpus");
  require_exists(cfg.dev, "dev set");
  auto lexicon = load_lexicon_pair(cfg);
  if (cfg.csv.empty()) throw ConfigError("csv output path is required");

  auto train_corpus = corpus::load_gold_corpus(cfg.corpus);
  auto dev_set = corpus::load_gold_corpus(cfg.dev);
  eval::PipelineConfig pipeline{cfg.embedding, cfg.classifier};
  auto rows =
      eval::sweep_beta(train_corpus, lexicon, dev_set, cfg.betas, pipeline, &std::cerr);
  ensure_parent_dir(cfg.csv);
  eval::write_sweep_csv(rows, cfg.csv);
  std::printf("beta  macro_f1\n");
  for (const auto& row : rows) std::printf("%-5g %.6f\n", row.beta, row.macro_f1);
  std::printf("csv written to %s\n", cfg.csv.c_str());
  return 0;
}

int cmd_neighbors(const cli::CliConfig& cfg, const std::string& word, std::size_t k) {
  require_exists(cfg.embeddings, "embeddings");
  auto [table, vocab] = model::load_embeddings(cfg.embeddings);
  if (word == corpus::Vocabulary::kUnkToken) {
    throw QueryError("the unknown word has no neighbors");
  }
  auto neighbors = model::nearest_neighbors(word, k, table, vocab);
  for (const auto& [neighbor, cosine] : neighbors) {
    std::printf("%s %.6f\n", neighbor.c_str(), cosine);
  }
  return 0;
}

struct SynthOptions {
  std::string out_dir;
  synth::SynthConfig config;
  double train_fraction = 0.7;
  double dev_fraction = 0.15;
};

int cmd_gen_synthetic(const SynthOptions& opt) {
  if (opt.out_dir.empty()) throw ConfigError("out-dir is required");
  std::filesystem::create_directories(opt.out_dir);
  const auto corpus = synth::generate(opt.config);
  const auto dir = std::filesystem::path(opt.out_dir);

  synth::write_raw_with_markers(corpus, (dir / "raw.txt").string(),
                                opt.config.seed + 1);
  synth::write_lexicon_files(corpus, (dir / "lexicon_positive.txt").string(),
                             (dir / "lexicon_negative.txt").string());

  const std::size_t n = corpus.tweets.size();
  const auto train_end = static_cast<std::size_t>(opt.train_fraction * n);
  const auto dev_end =
      train_end + static_cast<std::size_t>(opt.dev_fraction * n);
  auto write_slice = [&](std::size_t begin, std::size_t end, const char* name,
                         bool noisy) {
    synth::SynthCorpus part;
    part.tweets.assign(corpus.tweets.begin() + static_cast<std::ptrdiff_t>(begin),
                       corpus.tweets.begin() + static_cast<std::ptrdiff_t>(end));
    synth::write_gold(part, (dir / name).string(), noisy);
  };
  write_slice(0, train_end, "train.tsv", true);
  write_slice(train_end, dev_end, "dev.tsv", false);
  write_slice(dev_end, n, "test.tsv", false);

  std::printf("wrote %zu tweets under %s (train=%zu dev=%zu test=%zu)\n", n,
              opt.out_dir.c_str(), train_end, dev_end - train_end, n - dev_end);
  return 0;
}

// The config file is applied before CLI11 sees the flags, so flags win.
std::string prescan_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-level sentiment-enriched word embeddings"};
  app.require_subcommand(1);

  cli::CliConfig cfg;
  std::string config_path = prescan_config_path(argc, argv);
  try {
    if (!config_path.empty()) cli::apply_config_file(cfg, config_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::string config_path_sink;  // consumed above; registered so CLI11 accepts it

  std::string betas_arg, widths_arg;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--window", cfg.embedding.window, "context window size t (odd)");
    sub->add_option("--dim", cfg.embedding.dim, "embedding dimension d");
    sub->add_option("--hidden", cfg.embedding.hidden, "hidden layer size h");
    sub->add_option("--main-batch", cfg.embedding.main_batch, "tweet-level batch size");
    sub->add_option("--lr", cfg.embedding.lr, "SGD learning rate");
    sub->add_option("--init-scale", cfg.embedding.init_scale,
                    "uniform init range for weights and embeddings");
    sub->add_option("--alpha", cfg.embedding.alpha, "n-gram vs word-sentiment weight");
    sub->add_option("--beta", cfg.embedding.beta, "word vs tweet level weight");
    sub->add_option("--epochs", cfg.embedding.epochs, "training epochs");
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&cfg](const std::uint64_t& s) {
          cfg.embedding.seed = s;
          cfg.classifier.seed = s;
        },
        "RNG seed");
    sub->add_option("--min-count", cfg.embedding.min_count, "vocabulary cutoff");
    sub->add_option("--checkpoint-every", cfg.embedding.checkpoint_every,
                    "checkpoint period in epochs");
    sub->add_option("--lexicon-pos", cfg.lexicon_pos, "positive lexicon file");
    sub->add_option("--lexicon-neg", cfg.lexicon_neg, "negative lexicon file");
  };
  auto add_classifier_options = [&](CLI::App* sub) {
    sub->add_option("--cls-widths", widths_arg, "filter widths, e.g. 2,3,4,5");
    sub->add_option("--cls-filters", cfg.classifier.filters_per_width,
                    "filters per width N");
    sub->add_option("--cls-hidden", cfg.classifier.hidden, "hidden layer size H");
    sub->add_option("--keep-input", cfg.classifier.keep_input,
                    "input dropout keep probability");
    sub->add_option("--keep-hidden", cfg.classifier.keep_hidden,
                    "hidden dropout keep probability");
    sub->add_option("--cls-lr", cfg.classifier.lr, "AdaGrad learning rate");
    sub->add_option("--cls-batch", cfg.classifier.batch, "classifier batch size");
    sub->add_option("--cls-epochs", cfg.classifier.epochs, "classifier epochs");
  };

  auto* prepare = app.add_subcommand("prepare", "tokenize and distant-label raw tweets");
  prepare->add_option("--input", cfg.input, "raw corpus, one tweet per line");
  prepare->add_option("--output", cfg.output, "prepared corpus path");
  prepare->add_option("--markers", cfg.markers, "marker config file");
  prepare->add_option("--window", cfg.embedding.window, "minimum token count");

  auto* train_emb =
      app.add_subcommand("train-embeddings", "train the embedding model");
  add_common(train_emb);
  train_emb->add_option("--corpus", cfg.corpus, "prepared corpus (label<TAB>text)");
  train_emb->add_option("--embeddings-out", cfg.embeddings_out, "embeddings text file");
  train_emb->add_option("--checkpoint-out", cfg.checkpoint_out, "model checkpoint");
  train_emb->add_option("--resume", cfg.resume, "checkpoint to continue from");

  auto* train_cls = app.add_subcommand("train-classifier", "train the CNN classifier");
  add_classifier_options(train_cls);
  train_cls->add_option("--dim", cfg.embedding.dim, "expected embedding dimension");
  train_cls->add_option("--corpus", cfg.corpus, "labeled training set");
  train_cls->add_option("--embeddings", cfg.embeddings, "trained embeddings file");
  train_cls->add_option("--classifier-out", cfg.classifier_out, "classifier checkpoint");
  train_cls->add_option_function<std::uint64_t>(
      "--seed", [&cfg](const std::uint64_t& s) { cfg.classifier.seed = s; }, "RNG seed");

  auto* predict = app.add_subcommand("predict", "label tweets with a trained model");
  predict->add_option("--embeddings", cfg.embeddings, "trained embeddings file");
  predict->add_option("--classifier", cfg.classifier_in, "classifier checkpoint");
  predict->add_option("--input", cfg.input, "tweets to label (raw or labeled)");
  predict->add_option("--output", cfg.output, "predictions TSV: id, label, p_pos");

  auto* eval_cmd = app.add_subcommand("eval", "score predictions against gold labels");
  eval_cmd->add_option("--gold", cfg.corpus, "gold corpus (label<TAB>text)");
  eval_cmd->add_option("--pred", cfg.input, "predictions TSV from `predict`");
  eval_cmd->add_option("--csv", cfg.csv, "metrics CSV output");

  auto* sweep = app.add_subcommand("sweep-beta", "train and score across beta values");
  add_common(sweep);
  add_classifier_options(sweep);
  sweep->add_option("--corpus", cfg.corpus, "training corpus");
  sweep->add_option("--dev", cfg.dev, "dev set for scoring");
  sweep->add_option("--betas", betas_arg, "comma-separated beta list");
  sweep->add_option("--csv", cfg.csv, "sweep CSV output");

  std::string word;
  std::size_t k = 10;
  auto* neighbors = app.add_subcommand("neighbors", "print nearest embedding neighbors");
  neighbors->add_option("--embeddings", cfg.embeddings, "embeddings file");
  neighbors->add_option("--word", word, "query word")->required();
  neighbors->add_option("--k", k, "neighbor count");

  SynthOptions synth_opt;
  auto* gen = app.add_subcommand("gen-synthetic", "emit a synthetic labeled corpus");
  gen->add_option("--out-dir", synth_opt.out_dir, "output directory")->required();
  gen->add_option("--tweets", synth_opt.config.tweets, "corpus size");
  gen->add_option("--positive-words", synth_opt.config.positive_words,
                  "planted positive words");
  gen->add_option("--negative-words", synth_opt.config.negative_words,
                  "planted negative words");
  gen->add_option("--neutral-words", synth_opt.config.neutral_words, "filler words");
  gen->add_option("--noise", synth_opt.config.noise, "label flip rate");
  gen->add_option("--seed", synth_opt.config.seed, "RNG seed");

  // --config is accepted (and already consumed) everywhere
  app.add_option("--config", config_path_sink, "key = value config file");
  for (auto* sub : app.get_subcommands(nullptr)) {
    sub->add_option("--config", config_path_sink, "key = value config file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!betas_arg.empty()) cfg.betas = cli::parse_double_list(betas_arg);
    if (!widths_arg.empty()) cfg.classifier.filter_widths = cli::parse_size_list(widths_arg);
    for (double b : cfg.betas) {
      if (b < 0.0 || b > 1.0) {
        throw ConfigError("beta " + std::to_string(b) + " outside [0, 1]");
      }
    }

    if (prepare->parsed()) return cmd_prepare(cfg);
    if (train_emb->parsed()) return cmd_train_embeddings(cfg);
    if (train_cls->parsed()) return cmd_train_classifier(cfg);
    if (predict->parsed()) return cmd_predict(cfg);
    if (eval_cmd->parsed()) return cmd_eval(cfg);
    if (sweep->parsed()) return cmd_sweep_beta(cfg);
    if (neighbors->parsed()) return cmd_neighbors(cfg, word, k);
    if (gen->parsed()) return cmd_gen_synthetic(synth_opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return 3;
  } catch (const QueryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
