#pragma once

#include <string>
#include <vector>

#include "mswe/classifier.hpp"
#include "mswe/common.hpp"
#include "mswe/trainer.hpp"

namespace mswe::cli {

// Merged view of the embedding-training and classifier configuration plus
// file paths, loadable from a "key = value" config file with command-line
// overrides applied afterwards (later wins).
struct CliConfig {
  train::TrainConfig embedding;
  cls::ClassifierConfig classifier;

  std::string corpus;
  std::string dev;
  std::string lexicon_pos;
  std::string lexicon_neg;
  std::string markers;  // empty -> built-in defaults
  std::string embeddings;
  std::string embeddings_out;
  std::string checkpoint_out;
  std::string resume;
  std::string classifier_in;
  std::string classifier_out;
  std::string input;
  std::string output;
  std::string csv;
  std::vector<double> betas = {0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0};
};

// Parses "key = value" lines ('#' comments). Unknown keys are rejected.
void apply_config_file(CliConfig& config, const std::string& path);

std::vector<double> parse_double_list(const std::string& csv_list);
std::vector<std::size_t> parse_size_list(const std::string& csv_list);

}  // namespace mswe::cli
