#include "mswe/cli_config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "tensor_io.hpp"

namespace mswe::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::uint64_t parse_u64(const std::string& value, const std::string& context) {
  char* end = nullptr;
  std::uint64_t v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError(context + ": expected an integer, got '" + value + "'");
  }
  return v;
}

using Setter = std::function<void(CliConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& key_registry() {
  static const std::map<std::string, Setter> registry = {
      // embedding training
      {"window", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.window = static_cast<std::size_t>(parse_u64(v, ctx));
       }},
      {"dim", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.dim = static_cast<std::size_t>(parse_u64(v, ctx));
       }},
      {"hidden", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.hidden = static_cast<std::size_t>(parse_u64(v, ctx));
       }},
      {"main_batch", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.main_batch = static_cast<std::size_t>(parse_u64(v, ctx));
       }},
      {"lr", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.lr = detail::parse_double(v, ctx);
       }},
      {"init_scale", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.init_scale = detail::parse_double(v, ctx);
       }},
      {"alpha", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.alpha = detail::parse_double(v, ctx);
       }},
      {"beta", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.beta = detail::parse_double(v, ctx);
       }},
      {"epochs", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.epochs = static_cast<std::size_t>(parse_u64(v, ctx));
       }},
      {"seed", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.seed = parse_u64(v, ctx);
         c.classifier.seed = c.embedding.seed;
       }},
      {"min_count", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.min_count = parse_u64(v, ctx);
       }},
      {"checkpoint_every", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.embedding.checkpoint_every = static_cast<std::size_t>(parse_u64(v, ctx));
       }},
      // classifier
      {"cls_widths", [](CliConfig& c, const std::string& v, const std::string&) {
         c.classifier.filter_widths = parse_size_list(v);
       }},
      {"cls_filters", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.classifier.filters_per_width = static_cast<std::size_t>(parse_u64(v, ctx));
       }},
      {"cls_hidden", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.classifier.hidden = static_cast<std::size_t>(parse_u64(v, ctx));
       }},
      {"keep_input", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.classifier.keep_input = detail::parse_double(v, ctx);
       }},
      {"keep_hidden", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.classifier.keep_hidden = detail::parse_double(v, ctx);
       }},
      {"cls_lr", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.classifier.lr = detail::parse_double(v, ctx);
       }},
      {"cls_batch", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.classifier.batch = static_cast<std::size_t>(parse_u64(v, ctx));
       }},
      {"cls_epochs", [](CliConfig& c, const std::string& v, const std::string& ctx) {
         c.classifier.epochs = static_cast<std::size_t>(parse_u64(v, ctx));
       }},
      // sweeps
      {"betas", [](CliConfig& c, const std::string& v, const std::string&) {
         c.betas = parse_double_list(v);
       }},
      // paths
      {"corpus", [](CliConfig& c, const std::string& v, const std::string&) { c.corpus = v; }},
      {"dev", [](CliConfig& c, const std::string& v, const std::string&) { c.dev = v; }},
      {"lexicon_pos", [](CliConfig& c, const std::string& v, const std::string&) { c.lexicon_pos = v; }},
      {"lexicon_neg", [](CliConfig& c, const std::string& v, const std::string&) { c.lexicon_neg = v; }},
      {"markers", [](CliConfig& c, const std::string& v, const std::string&) { c.markers = v; }},
      {"embeddings", [](CliConfig& c, const std::string& v, const std::string&) { c.embeddings = v; }},
      {"embeddings_out", [](CliConfig& c, const std::string& v, const std::string&) { c.embeddings_out = v; }},
      {"checkpoint_out", [](CliConfig& c, const std::string& v, const std::string&) { c.checkpoint_out = v; }},
      {"resume", [](CliConfig& c, const std::string& v, const std::string&) { c.resume = v; }},
      {"classifier", [](CliConfig& c, const std::string& v, const std::string&) { c.classifier_in = v; }},
      {"classifier_out", [](CliConfig& c, const std::string& v, const std::string&) { c.classifier_out = v; }},
      {"input", [](CliConfig& c, const std::string& v, const std::string&) { c.input = v; }},
      {"output", [](CliConfig& c, const std::string& v, const std::string&) { c.output = v; }},
      {"csv", [](CliConfig& c, const std::string& v, const std::string&) { c.csv = v; }},
  };
  return registry;
}

}  // namespace

void apply_config_file(CliConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string context = path + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      throw ConfigError(context + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = key_registry().find(key);
    if (it == key_registry().end()) {
      throw ConfigError(context + ": unknown key '" + key + "'");
    }
    it->second(config, value, context);
  }
}

std::vector<double> parse_double_list(const std::string& csv_list) {
  std::vector<double> out;
  std::istringstream stream(csv_list);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(detail::parse_double(item, "list value"));
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& csv_list) {
  std::vector<std::size_t> out;
  for (double v : parse_double_list(csv_list)) {
    if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw ConfigError("expected positive integers in list");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace mswe::cli
