#include "elmdetect/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>

#include "elmdetect/csv.hpp"
#include "elmdetect/error.hpp"
#include "elmdetect/evaluator.hpp"
#include "elmdetect/hashing.hpp"
#include "elmdetect/report.hpp"
#include "elmdetect/svg.hpp"

namespace elmdetect::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kManifestVersion = 1;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string content_hash(std::string_view bytes) { return to_hex(fnv1a(bytes)); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path sentiment_path(const RunConfig& c) {
  return c.sentiment_lexicon ? *c.sentiment_lexicon : text::bundled_sentiment_lexicon_path();
}
fs::path urgency_path(const RunConfig& c) {
  return c.urgency_lexicon ? *c.urgency_lexicon : text::bundled_urgency_lexicon_path();
}

features::LexiconSet load_lexicons(const RunConfig& c) {
  return {text::load_lexicon(sentiment_path(c), 0.0), text::load_lexicon(urgency_path(c), 0.0)};
}

json input_list(const RunConfig& c) {
  json inputs = json::array();
  const std::pair<const char*, fs::path> items[] = {
      {"true_csv", c.true_csv}, {"fake_csv", c.fake_csv}, {"sentiment_lexicon", sentiment_path(c)},
      {"urgency_lexicon", urgency_path(c)}};
  for (const auto& [role, path] : items) {
    inputs.push_back({{"role", role}, {"path", fs::absolute(path).string()}, {"hash", to_hex(fnv1a_file(path))}});
  }
  return inputs;
}

report::RunHeader header_for(const RunConfig& c) {
  return {run_config_hash(c), c.seed, utc_timestamp()};
}

json manifest(const std::string& command, const report::RunHeader& header, const json& inputs,
              const OutputSet& outputs) {
  json files = json::object();
  for (const auto& [name, contents] : outputs.files()) files[name] = content_hash(contents);
  return {{"schema_version", kManifestVersion},
          {"command", command},
          {"config_hash", header.config_hash},
          {"seed", header.seed},
          {"inputs", inputs},
          {"outputs", files}};
}

std::string csv_line(std::initializer_list<std::string> fields) {
  std::vector<std::string> v(fields);
  return csv::join_row(v) + "\n";
}

// Validation and input loading share one error path: anything thrown here is
// an input problem.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace

void RunConfig::validate() const {
  if (true_csv.empty() || fake_csv.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "both --true-csv and --fake-csv are required");
  }
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k must be at least 2");
  if (variants.empty()) throw Error(ErrorCode::kInvalidArgument, "variant list is empty");
  for (std::size_t i = 0; i < variants.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (variants[i] == variants[j]) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate variant " + std::string(nn::to_string(variants[i])));
      }
    }
  }
  if (jobs == 0) throw Error(ErrorCode::kInvalidArgument, "jobs must be at least 1");
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "output directory is empty");
  train.validate();
}

json hashed_config(const RunConfig& c) {
  json inputs = json::object();
  for (const auto& item : input_list(c)) inputs[item.at("role").get<std::string>()] = item.at("hash");
  json variants = json::array();
  for (auto v : c.variants) variants.push_back(nn::to_string(v));
  json train = train::to_json(c.train);
  train.erase("variant");
  train.erase("seed");
  return {{"inputs", inputs}, {"k", c.k}, {"seed", c.seed}, {"variants", variants}, {"train", train}};
}

std::string run_config_hash(const RunConfig& c) { return content_hash(hashed_config(c).dump()); }

void OutputSet::add(const std::string& name, std::string contents) { files_[name] = std::move(contents); }

void OutputSet::commit(const fs::path& dir) const {
  fs::create_directories(dir);
  std::vector<fs::path> staged;
  try {
    for (const auto& [name, contents] : files_) {
      const fs::path tmp = dir / (name + ".tmp");
      std::ofstream out(tmp, std::ios::binary);
      staged.push_back(tmp);
      if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + tmp.string());
      out << contents;
      out.close();
      if (!out) throw Error(ErrorCode::kInvalidArgument, "write failed: " + tmp.string());
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : staged) fs::remove(p, ec);
    throw;
  }
  for (const auto& [name, contents] : files_) fs::rename(dir / (name + ".tmp"), dir / name);
}

int cmd_ingest(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const auto header = header_for(config);
    const auto set = corpus::load_dataset(config.true_csv, config.fake_csv);
    const auto plan = corpus::stratified_folds(set, config.k, config.seed);

    std::string folds = report::header_comment(header) + "\n" + csv_line({"doc_id", "fold"});
    std::vector<std::size_t> fold_sizes(config.k, 0);
    for (std::size_t i = 0; i < set.size(); ++i) {
      folds += csv_line({set[i].id, std::to_string(plan.assignments[i])});
      ++fold_sizes[plan.assignments[i]];
    }
    const json summary = {{"schema_version", report::kSchemaVersion},
                          {"config_hash", header.config_hash},
                          {"seed", header.seed},
                          {"documents", set.size()},
                          {"true", set.n_true()},
                          {"fake", set.n_fake()},
                          {"fake_share", static_cast<double>(set.n_fake()) / static_cast<double>(set.size())},
                          {"dropped_rows", set.dropped_rows()},
                          {"empty_after_cleaning", set.empty_after_cleaning()},
                          {"k", config.k},
                          {"fold_sizes", fold_sizes}};

    OutputSet outputs;
    outputs.add("folds.csv", std::move(folds));
    outputs.add("corpus_summary.json", summary.dump(2) + "\n");
    outputs.add("manifest.json", manifest("ingest", header, input_list(config), outputs).dump(2) + "\n");
    outputs.commit(config.out);
    out << "documents=" << set.size() << " true=" << set.n_true() << " fake=" << set.n_fake()
        << " dropped=" << set.dropped_rows() << " k=" << config.k << "\n";
    return kExitOk;
  });
}

int cmd_features(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.validate();
    const auto header = header_for(config);
    const auto set = corpus::load_dataset(config.true_csv, config.fake_csv);
    const auto lexicons = load_lexicons(config);

    std::vector<std::string> columns{"doc_id", "label"};
    for (auto name : features::kFeatureNames) columns.emplace_back(name);
    std::string table = report::header_comment(header) + "\n" + csv::join_row(columns) + "\n";
    for (const auto& doc : set.documents()) {
      const auto v = features::elm_vector(doc, lexicons);
      std::vector<std::string> row{doc.id, std::to_string(doc.label)};
      for (double x : v.values) row.push_back(report::format_double(x));
      table += csv::join_row(row) + "\n";
    }
    OutputSet outputs;
    outputs.add("features.csv", std::move(table));
    outputs.add("manifest.json", manifest("features", header, input_list(config), outputs).dump(2) + "\n");
    outputs.commit(config.out);
    out << "documents=" << set.size() << " features=" << features::kFeatureNames.size() << "\n";
    return kExitOk;
  });
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  corpus::DocumentSet set;
  corpus::FoldPlan plan;
  std::vector<train::Sample> samples;
  std::vector<train::TrainConfig> configs;
  report::RunHeader header;
  json inputs;
  const int loaded = guarded(err, [&] {
    config.validate();
    header = header_for(config);
    inputs = input_list(config);
    set = corpus::load_dataset(config.true_csv, config.fake_csv);
    plan = corpus::stratified_folds(set, config.k, config.seed);
    samples = train::prepare_samples(set, load_lexicons(config));
    for (auto v : config.variants) {
      auto c = config.train;
      c.variant = v;
      c.seed = config.seed;
      c.validate();
      configs.push_back(c);
    }
    return kExitOk;
  });
  if (loaded != kExitOk) return loaded;

  std::mutex print_mutex;
  eval::CrossValidationOptions options;
  options.jobs = config.jobs;
  options.on_epoch = [&](std::size_t fold, nn::Variant v, const train::EpochRecord& r) {
    std::lock_guard lock(print_mutex);
    out << "fold=" << fold << " variant=" << nn::to_string(v) << " epoch=" << r.epoch
        << " train_loss=" << report::format_double(r.train_loss)
        << " val_loss=" << report::format_double(r.val_loss) << "\n"
        << std::flush;
  };

  eval::CrossValidationResult result;
  try {
    result = eval::cross_validate(samples, plan, configs, options);
  } catch (const std::exception& e) {
    err << "error: training failed: " << e.what() << "\n";
    return kExitTraining;
  }

  return guarded(err, [&] {
    OutputSet outputs;
    const auto& rep = result.report;
    const std::string comment = report::header_comment(header) + "\n";

    json run_config = hashed_config(config);
    outputs.add("report.json", report::report_to_json(rep, header, run_config).dump(2) + "\n");
    outputs.add("folds.csv", report::folds_csv(result.folds, header));
    for (const auto& f : result.folds) {
      outputs.add("scores_" + std::string(nn::to_string(f.variant)) + "_" + std::to_string(f.fold) + ".csv",
                  report::scores_csv(f, header));
    }
    std::vector<svg::RocSeries> curves;
    for (auto v : config.variants) {
      const std::string name(nn::to_string(v));
      auto curve = report::pooled_roc(result.folds, v);
      outputs.add("roc_" + name + ".csv", report::roc_csv(curve, header));
      outputs.add("confusion_" + name + ".csv", report::confusion_csv(result.folds, v, header));
      curves.push_back({name, std::move(curve)});
    }
    std::string assignments = comment + csv_line({"doc_id", "fold"});
    for (std::size_t i = 0; i < set.size(); ++i) {
      assignments += csv_line({set[i].id, std::to_string(plan.assignments[i])});
    }
    outputs.add("fold_assignments.csv", std::move(assignments));

    const std::string table = report::format_comparison_table(rep);
    outputs.add("table.txt", comment + table);
    if (config.emit_plots) {
      outputs.add("roc.svg", svg::roc_plot(curves, header));
      if (!rep.deltas.empty()) outputs.add("improvement.svg", svg::improvement_plot(rep, header));
    }
    outputs.add("manifest.json", manifest("run", header, inputs, outputs).dump(2) + "\n");
    outputs.commit(config.out);
    out << "\n" << table;
    return kExitOk;
  });
}

int cmd_plot(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json rep_json = json::parse(read_file(run_dir / "report.json"));
    report::RunHeader header{rep_json.at("config_hash").get<std::string>(),
                             rep_json.at("seed").get<std::uint64_t>(), utc_timestamp()};
    const std::size_t k = rep_json.at("folds").get<std::size_t>();
    std::vector<nn::Variant> variants;
    for (const auto& v : rep_json.at("variants")) {
      variants.push_back(nn::parse_variant(v.at("variant").get<std::string>()));
    }
    if (variants.empty()) throw Error(ErrorCode::kEmptyInput, "run directory lists no variants");

    std::vector<eval::FoldResult> folds;
    std::vector<svg::RocSeries> curves;
    for (auto v : variants) {
      const std::string name(nn::to_string(v));
      for (std::size_t f = 0; f < k; ++f) {
        auto scores =
            report::parse_scores_csv(read_file(run_dir / ("scores_" + name + "_" + std::to_string(f) + ".csv")));
        if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "no scores for " + name + " fold " + std::to_string(f));
        folds.push_back(eval::make_fold_result(f, v, std::move(scores)));
      }
      auto curve = report::parse_roc_csv(read_file(run_dir / ("roc_" + name + ".csv")));
      curves.push_back({name, std::move(curve)});
    }
    const auto rep = eval::build_report(folds, variants);

    OutputSet outputs;
    outputs.add("roc.svg", svg::roc_plot(curves, header));
    if (!rep.deltas.empty()) outputs.add("improvement.svg", svg::improvement_plot(rep, header));

    const fs::path manifest_path = run_dir / "manifest.json";
    if (fs::exists(manifest_path)) {
      json m = json::parse(read_file(manifest_path));
      for (const auto& [name, contents] : outputs.files()) m["outputs"][name] = content_hash(contents);
      outputs.add("manifest.json", m.dump(2) + "\n");
    }
    outputs.commit(run_dir);
    for (const auto& [name, contents] : outputs.files()) {
      if (name != "manifest.json") out << "wrote " << (run_dir / name).string() << "\n";
    }
    return kExitOk;
  });
}

int cmd_verify(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const json m = json::parse(read_file(run_dir / "manifest.json"));
    const std::string expected_config = m.at("config_hash").get<std::string>();
    std::size_t mismatches = 0;
    auto flag = [&](const std::string& what, const std::string& detail) {
      ++mismatches;
      out << "MISMATCH " << what << ": " << detail << "\n";
    };

    for (const auto& input : m.at("inputs")) {
      const std::string role = input.at("role").get<std::string>();
      const fs::path path = input.at("path").get<std::string>();
      if (!fs::exists(path)) {
        flag(role, "missing " + path.string());
        continue;
      }
      const std::string actual = to_hex(fnv1a_file(path));
      if (actual != input.at("hash").get<std::string>()) flag(role, "content changed (" + path.string() + ")");
      else out << "ok " << role << "\n";
    }
    for (const auto& [name, hash] : m.at("outputs").items()) {
      const fs::path path = run_dir / name;
      if (!fs::exists(path)) {
        flag(name, "missing");
        continue;
      }
      const std::string contents = read_file(path);
      if (content_hash(contents) != hash.get<std::string>()) {
        flag(name, "content changed");
        continue;
      }
      std::optional<std::string> embedded;
      if (path.extension() == ".csv" || path.extension() == ".txt") {
        const auto h = report::parse_header_comment(contents.substr(0, contents.find('\n')));
        if (h) embedded = h->config_hash;
      } else if (path.extension() == ".json") {
        embedded = json::parse(contents).value("config_hash", std::string());
      } else if (path.extension() == ".svg") {
        const auto at = contents.find("config_hash=");
        if (at != std::string::npos) embedded = contents.substr(at + 12, contents.find(' ', at) - at - 12);
      }
      if (!embedded || *embedded != expected_config) {
        flag(name, "config hash header does not match manifest");
        continue;
      }
      out << "ok " << name << "\n";
    }
    if (mismatches) {
      err << mismatches << " mismatch(es)\n";
      return kExitInput;
    }
    out << "verified config_hash=" << expected_config << "\n";
    return kExitOk;
  });
}

}  // namespace elmdetect::cli
