#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "elmdetect/cli.hpp"
#include "elmdetect/error.hpp"

using elmdetect::cli::RunConfig;

namespace {

struct Flags {
  RunConfig config;
  std::string sentiment;
  std::string urgency;
  std::vector<std::string> variants;
  std::string pad_mode = "dynamic";
  std::string head = "lstm";
};

void add_corpus_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--true-csv", f.config.true_csv, "CSV of authentic news items")->required();
  cmd.add_option("--fake-csv", f.config.fake_csv, "CSV of fake news items")->required();
  cmd.add_option("--sentiment-lexicon", f.sentiment, "word<TAB>polarity file (default: bundled)");
  cmd.add_option("--urgency-lexicon", f.urgency, "one urgency term per line (default: bundled)");
  cmd.add_option("--k", f.config.k, "number of folds")->capture_default_str();
  cmd.add_option("--seed", f.config.seed, "global seed")->capture_default_str();
  cmd.add_option("--out", f.config.out, "output directory")->capture_default_str();
}

void add_training_flags(CLI::App& cmd, Flags& f) {
  auto& t = f.config.train;
  cmd.add_option("--variants", f.variants, "base, features_only, enhanced, combined")
      ->delimiter(',')
      ->default_str("base,enhanced");
  cmd.add_option("--epochs", t.epochs, "maximum epochs")->capture_default_str();
  cmd.add_option("--patience", t.early_stop_patience, "early-stopping patience, 0 disables")
      ->capture_default_str();
  cmd.add_option("--max-seq-len", t.max_seq_len, "token sequence length")->capture_default_str();
  cmd.add_option("--batch-size", t.batch_size, "mini-batch size")->capture_default_str();
  cmd.add_option("--learning-rate", t.learning_rate, "Adam step size")->capture_default_str();
  cmd.add_option("--dropout", t.dropout_rate, "dropout rate")->capture_default_str();
  cmd.add_option("--val-fraction", t.val_fraction, "validation share of each training fold")
      ->capture_default_str();
  cmd.add_option("--embed-dim", t.embed_dim, "embedding width")->capture_default_str();
  cmd.add_option("--filters", t.filters, "convolution filters")->capture_default_str();
  cmd.add_option("--kernel", t.kernel, "convolution kernel size")->capture_default_str();
  cmd.add_option("--hidden", t.hidden, "LSTM hidden units")->capture_default_str();
  cmd.add_option("--min-token-freq", t.min_token_freq, "vocabulary frequency cutoff")->capture_default_str();
  cmd.add_option("--pad-mode", f.pad_mode, "dynamic or fixed")->capture_default_str();
  cmd.add_option("--head", f.head, "lstm or pool")->capture_default_str();
  cmd.add_flag("--dropout-on-features", t.dropout_on_features, "apply dropout to the ELM features");
  cmd.add_option("--jobs", f.config.jobs, "concurrent fold workers")->capture_default_str();
  cmd.add_flag("--plots", f.config.emit_plots, "also write roc.svg and improvement.svg");
}

void finish(Flags& f) {
  if (!f.sentiment.empty()) f.config.sentiment_lexicon = f.sentiment;
  if (!f.urgency.empty()) f.config.urgency_lexicon = f.urgency;
  if (!f.variants.empty()) {
    f.config.variants.clear();
    for (const auto& v : f.variants) f.config.variants.push_back(elmdetect::nn::parse_variant(v));
  }
  if (f.pad_mode == "dynamic") {
    f.config.train.pad_mode = elmdetect::train::PadMode::dynamic;
  } else if (f.pad_mode == "fixed") {
    f.config.train.pad_mode = elmdetect::train::PadMode::fixed;
  } else {
    throw elmdetect::Error(elmdetect::ErrorCode::kInvalidArgument, "unknown pad mode '" + f.pad_mode + "'");
  }
  f.config.train.head = elmdetect::nn::parse_text_head(f.head);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Health misinformation detection with CNN-LSTM and ELM features"};
  app.require_subcommand(1);

  Flags ingest, features, run;
  std::string plot_dir, verify_dir;

  auto* ingest_cmd = app.add_subcommand("ingest", "load the corpus and write the stratified fold plan");
  add_corpus_flags(*ingest_cmd, ingest);
  auto* features_cmd = app.add_subcommand("features", "write the unscaled ELM feature matrix");
  add_corpus_flags(*features_cmd, features);
  auto* run_cmd = app.add_subcommand("run", "cross-validate the requested variants and compare them");
  add_corpus_flags(*run_cmd, run);
  add_training_flags(*run_cmd, run);
  auto* plot_cmd = app.add_subcommand("plot", "render roc.svg and improvement.svg from a run directory");
  plot_cmd->add_option("--out", plot_dir, "run directory")->required();
  auto* verify_cmd = app.add_subcommand("verify", "re-hash inputs and outputs listed in the manifest");
  verify_cmd->add_option("--out", verify_dir, "run or ingest directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : elmdetect::cli::kExitInput;
  }

  try {
    if (*ingest_cmd) {
      finish(ingest);
      return elmdetect::cli::cmd_ingest(ingest.config, std::cout, std::cerr);
    }
    if (*features_cmd) {
      finish(features);
      return elmdetect::cli::cmd_features(features.config, std::cout, std::cerr);
    }
    if (*run_cmd) {
      finish(run);
      return elmdetect::cli::cmd_run(run.config, std::cout, std::cerr);
    }
    if (*plot_cmd) return elmdetect::cli::cmd_plot(plot_dir, std::cout, std::cerr);
    if (*verify_cmd) return elmdetect::cli::cmd_verify(verify_dir, std::cout, std::cerr);
  } catch (const elmdetect::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return elmdetect::cli::kExitInput;
  }
  return elmdetect::cli::kExitInput;
}
