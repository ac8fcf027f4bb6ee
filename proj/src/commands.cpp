#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "patent/classifier.hpp"
#include "patent/cli.hpp"
#include "patent/error.hpp"

namespace patent::cli {

namespace {

using nlohmann::json;

/// Signals a usage problem found after parsing (exit code 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string model_path;
  std::string format;
  std::string kind = "svm";
  std::optional<std::size_t> folds;
  bool sentences = false;
  bool global_features = false;

  // command-specific
  std::string input;
  std::string output;
  std::string stats_path;
  std::string segments_path;
  std::string text;
  std::optional<std::size_t> k;
  bool surrogate = false;
  std::optional<std::size_t> samples;
  std::optional<double> kernel_width;
};

AppConfig resolve_config(const Options& o) {
  AppConfig c = o.config_path.empty() ? AppConfig{} : load_config(o.config_path);
  if (o.seed) c.set_seed(*o.seed);
  if (o.folds) c.folds = *o.folds;
  if (o.samples) c.surrogate.n_samples = *o.samples;
  if (o.kernel_width) c.surrogate.kernel_width = *o.kernel_width;
  if (o.k) c.surrogate.k = *o.k;
  return c;
}

std::string read_text_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  out << content;
}

std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

std::string counts_line(const corpus::ClassCounts& c) {
  return std::to_string(c[0]) + " " + std::to_string(c[1]) + " " + std::to_string(c[2]);
}

// ---------------------------------------------------------------------------
// build-corpus

int cmd_build_corpus(const Options& o, std::ostream& out) {
  const auto config = resolve_config(o);
  config.corpus.validate();
  const std::filesystem::path dir(o.input);
  if (!std::filesystem::is_directory(dir)) throw Error(Errc::IoFailure, "input directory not found: " + o.input);

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    const auto ext = entry.path().extension().string();
    if (name.rfind("ipg", 0) == 0 && (ext == ".xml" || ext == ".zip")) files.push_back(entry.path());
  }
  if (files.empty()) throw Error(Errc::IoFailure, "no bulk files found in " + o.input);
  std::sort(files.begin(), files.end());

  std::ofstream segments_dump;
  if (!o.segments_path.empty()) {
    segments_dump.open(o.segments_path, std::ios::binary | std::ios::trunc);
    if (!segments_dump) throw Error(Errc::IoFailure, "cannot write " + o.segments_path);
  }

  std::vector<ingest::TaggedSegment> segments;
  std::vector<corpus::DocMeta> docs;
  std::size_t n_grants = 0;
  for (const auto& path : files) {
    const auto raw = ingest::read_bulk_file(path);
    const auto fallback_year = ingest::year_from_bulk_name(raw.source_name);
    const auto chunks = ingest::split_bulk_file(raw);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      ingest::GrantDocument doc;
      try {
        doc = ingest::parse_grant(chunks[i], fallback_year);
      } catch (const Error& e) {
        throw Error(e.code(), raw.source_name + " document #" + std::to_string(i + 1) + ": " + e.what());
      }
      ++n_grants;
      for (auto& seg : ingest::extract_tagged_segments(doc, config.headings)) {
        if (segments_dump.is_open()) segments_dump << ingest::segment_to_json(seg, doc).dump() << '\n';
        segments.push_back(std::move(seg));
      }
      docs.push_back({doc.doc_number, doc.title, doc.year});
    }
  }

  const auto built = corpus::build_samples(segments, docs, config.corpus);
  corpus::ClassCounts built_counts{};
  std::map<int, corpus::ClassCounts> per_year;
  for (const auto& s : built) {
    ++built_counts[static_cast<std::size_t>(s.label)];
    ++per_year[s.year][static_cast<std::size_t>(s.label)];
  }
  corpus::ClassCounts empty_segments{};
  for (const auto& seg : segments) {
    if (seg.paragraphs.empty()) ++empty_segments[static_cast<std::size_t>(config.corpus.label_for(seg.tag))];
  }
  const auto filtered = corpus::filter_samples(built, config.corpus);
  const auto deduped = corpus::deduplicate(filtered.samples);
  const auto cleaned = corpus::Corpus::from_samples(deduped.samples);
  const auto final_corpus = corpus::balance(cleaned, config.corpus);

  const std::filesystem::path output(o.output);
  corpus::write_corpus(final_corpus, output);
  const auto stats = corpus::compute_stats(final_corpus, config.stoplist());
  const std::string stats_path = o.stats_path.empty() ? output.string() + ".stats.json" : o.stats_path;
  write_text_file(stats_path, corpus::to_json(stats).dump(2) + "\n");

  out << "bulk files: " << files.size() << "\n";
  out << "grants: " << n_grants << "\n";
  out << "segments: " << segments.size() << "\n";
  out << "counts by label (0 1 2)\n";
  out << "  empty segments:   " << counts_line(empty_segments) << "\n";
  out << "  samples built:    " << counts_line(built_counts) << "\n";
  out << "  removed empty:    " << counts_line(filtered.removed_empty) << "\n";
  out << "  removed short:    " << counts_line(filtered.removed_short) << "\n";
  out << "  duplicates:       " << counts_line(deduped.duplicates) << "\n";
  out << "  after cleaning:   " << counts_line(cleaned.per_class_counts) << "\n";
  out << "  after balancing:  " << counts_line(final_corpus.per_class_counts) << "\n";
  out << "per-year samples built (0 1 2)\n";
  for (auto it = per_year.rbegin(); it != per_year.rend(); ++it) {
    out << "  " << it->first << ": " << counts_line(it->second) << "\n";
  }
  out << "corpus written to " << output.string() << " (" << final_corpus.samples.size() << " rows)\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// stats

int cmd_stats(const Options& o, std::ostream& out) {
  const auto config = resolve_config(o);
  const auto c = corpus::read_corpus(o.input);
  if (c.samples.empty()) throw Error(Errc::EmptyCorpus, "corpus has no rows");
  const auto stats = corpus::compute_stats(c, config.stoplist());
  if (o.format == "json") {
    out << corpus::to_json(stats).dump(2) << "\n";
  } else {
    out << corpus::render_table(stats);
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// train / eval

models::ClassifierConfig classifier_config(const AppConfig& c) {
  models::ClassifierConfig cc;
  cc.ngram = c.ngram;
  cc.stoplist = c.stoplist();
  cc.train = c.train;
  cc.n_classes = corpus::kNumLabels;
  return cc;
}

void print_report(const eval::EvalReport& report, const std::string& format, std::ostream& out,
                  const json& extra = json::object()) {
  if (format == "json") {
    auto j = eval::to_json(report);
    for (const auto& [key, value] : extra.items()) j[key] = value;
    out << j.dump(2) << "\n";
    return;
  }
  for (const auto& [key, value] : extra.items()) out << key << ": " << value.dump() << "\n";
  out << eval::render_table(report);
  if (!report.fold_accuracy.empty()) out << "fold accuracy: " << json(report.fold_accuracy).dump() << "\n";
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  const auto config = resolve_config(o);
  const auto kind = models::model_kind_from_string(o.kind);
  const auto c = corpus::read_corpus(o.input);
  std::vector<int> labels;
  for (const auto& s : c.samples) labels.push_back(s.label);
  const auto split = eval::train_test_split(c.samples.size(), config.split, labels);

  std::vector<std::string> train_texts;
  std::vector<int> train_labels;
  for (const auto i : split.train) {
    train_texts.push_back(c.samples[i].text);
    train_labels.push_back(labels[i]);
  }
  const auto cc = classifier_config(config);
  const auto model = models::train_classifier(kind, train_texts, train_labels, cc);
  models::save_model(model, o.model_path);

  std::vector<int> gold;
  std::vector<int> pred;
  for (const auto i : split.test) {
    gold.push_back(labels[i]);
    pred.push_back(model.predict(c.samples[i].text).label);
  }
  const auto report = eval::evaluate(gold, pred, corpus::kNumLabels);
  if (model.featurizer.dimension() == 0) err << "warning: empty vocabulary\n";
  const json extra = {{"kind", std::string(models::to_string(kind))},
                      {"train_size", split.train.size()},
                      {"test_size", split.test.size()},
                      {"vocabulary_size", model.featurizer.dimension()},
                      {"model", o.model_path}};
  print_report(report, o.format, out, extra);
  return kSuccess;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const auto config = resolve_config(o);
  if (config.folds < 2) throw UsageError("--folds must be >= 2");
  const auto kind = models::model_kind_from_string(o.kind);
  const auto c = corpus::read_corpus(o.input);
  std::vector<std::string> texts;
  std::vector<int> labels;
  for (const auto& s : c.samples) {
    texts.push_back(s.text);
    labels.push_back(s.label);
  }
  const auto cc = classifier_config(config);

  eval::Trainer trainer;
  if (o.global_features) {
    // Compatibility mode: one vocabulary/idf fitted on the whole corpus.
    auto shared = std::make_shared<features::Featurizer>(cc.stoplist, cc.ngram, models::feature_mode_for(kind));
    shared->fit_transform(texts);
    trainer = [shared, kind, cc](std::span<const std::string> t, std::span<const int> l) -> eval::Predictor {
      auto model = std::make_shared<models::TextClassifier>(models::train_classifier(kind, *shared, t, l, cc));
      return [model](const std::string& text) { return model->predict(text).label; };
    };
  } else {
    trainer = [kind, cc](std::span<const std::string> t, std::span<const int> l) -> eval::Predictor {
      auto model = std::make_shared<models::TextClassifier>(models::train_classifier(kind, t, l, cc));
      return [model](const std::string& text) { return model->predict(text).label; };
    };
  }
  const auto report = eval::cross_validate(trainer, texts, labels, config.folds, config.split.seed, corpus::kNumLabels);
  const json extra = {{"kind", std::string(models::to_string(kind))},
                      {"folds", config.folds},
                      {"global_features", o.global_features}};
  print_report(report, o.format, out, extra);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// highlight

std::vector<std::string> split_paragraphs(const std::string& content) {
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content.compare(first, 5, "<?xml") == 0) {
    std::vector<std::string> paragraphs;
    for (const auto& doc : ingest::split_bulk_file({"input", content.substr(first)})) {
      for (auto& p : ingest::extract_paragraphs(doc)) paragraphs.push_back(std::move(p));
    }
    return paragraphs;
  }
  if (first != std::string::npos && content[first] == '<') return ingest::extract_paragraphs(content);
  std::vector<std::string> paragraphs;
  std::string current;
  std::istringstream in(content);
  std::string line;
  auto flush = [&] {
    auto words = text::tokenize(current);
    std::string joined;
    for (const auto& w : words) joined += (joined.empty() ? "" : " ") + w;
    if (!joined.empty()) paragraphs.push_back(joined);
    current.clear();
  };
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      flush();
    } else {
      current += line;
      current.push_back('\n');
    }
  }
  flush();
  return paragraphs;
}

std::vector<std::string> split_sentences(const std::string& paragraph) {
  std::vector<std::string> out;
  std::string current;
  for (std::size_t i = 0; i < paragraph.size(); ++i) {
    current.push_back(paragraph[i]);
    const char c = paragraph[i];
    const bool boundary = (c == '.' || c == '?' || c == '!') && (i + 1 == paragraph.size() || paragraph[i + 1] == ' ');
    if (boundary) {
      out.push_back(current);
      current.clear();
      while (i + 1 < paragraph.size() && paragraph[i + 1] == ' ') ++i;
    }
  }
  if (current.find_first_not_of(' ') != std::string::npos) out.push_back(current);
  return out;
}

double softmax_confidence(std::span<const double> scores, std::size_t top) {
  double denom = 0.0;
  for (const double s : scores) denom += std::exp(s - scores[top]);
  return 1.0 / denom;
}

int cmd_highlight(const Options& o, std::ostream& out) {
  const auto config = resolve_config(o);
  const auto model = models::load_model(o.model_path);
  const auto content = read_text_file(o.input);
  auto units = split_paragraphs(content);
  if (o.sentences) {
    std::vector<std::string> sentences;
    for (const auto& p : units) {
      for (auto& s : split_sentences(p)) sentences.push_back(std::move(s));
    }
    units = std::move(sentences);
  }
  if (units.empty()) throw Error(Errc::EmptyInput, "input has no paragraphs to highlight");

  struct Annotated {
    std::string text;
    models::Prediction prediction;
    double confidence;
  };
  std::vector<Annotated> annotated;
  for (const auto& u : units) {
    auto p = model.predict(u);
    const double confidence = softmax_confidence(p.scores, models::argmax(p.scores));
    annotated.push_back({u, std::move(p), confidence});
  }

  auto tag_name = [&](int label) { return std::string(ingest::to_string(config.corpus.tag_for(label))); };

  if (o.format == "html") {
    out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\"/>\n<title>Highlighted text</title>\n</head>\n"
           "<body style=\"font-family:sans-serif;max-width:60em;margin:2em auto;line-height:1.5\">\n";
    out << "<div class=\"legend\">";
    for (int label = 0; label < corpus::kNumLabels; ++label) {
      const auto tag = config.corpus.tag_for(label);
      out << "<div style=\"display:inline-block;margin-right:1em;padding:0 0.4em;background-color:"
          << config.tag_colors[static_cast<std::size_t>(tag)] << "\">label " << label << " (" << ingest::to_string(tag)
          << ")</div>";
    }
    out << "<div>confidence (uncalibrated) is a softmax over raw decision scores</div></div>\n";
    for (const auto& a : annotated) {
      const auto tag = config.corpus.tag_for(a.prediction.label);
      out << "<p><span class=\"label-" << a.prediction.label << "\" style=\"background-color:"
          << config.tag_colors[static_cast<std::size_t>(tag)] << "\" title=\"label " << a.prediction.label << " ("
          << ingest::to_string(tag) << "), confidence (uncalibrated) " << fixed(a.confidence, 3) << "\">"
          << html_escape(a.text) << "</span></p>\n";
    }
    out << "</body>\n</html>\n";
    return kSuccess;
  }

  json records = json::array();
  for (std::size_t i = 0; i < annotated.size(); ++i) {
    const auto& a = annotated[i];
    records.push_back({{"index", i},
                       {"text", a.text},
                       {"label", a.prediction.label},
                       {"tag", tag_name(a.prediction.label)},
                       {"scores", a.prediction.scores},
                       {"confidence", a.confidence}});
  }
  json doc = {{"model", std::string(models::to_string(model.kind))},
              {"unit", o.sentences ? "sentence" : "paragraph"},
              {"confidence", "uncalibrated softmax over decision scores"},
              {"paragraphs", std::move(records)}};
  out << doc.dump(2) << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// explain

int cmd_explain(const Options& o, std::ostream& out) {
  const auto config = resolve_config(o);
  const auto model = models::load_model(o.model_path);
  std::string text = o.text;
  if (!o.input.empty()) text = read_text_file(o.input);
  if (text::tokenize(text::normalize(text)).empty()) throw Error(Errc::EmptyInput, "nothing to explain");

  explain::Explanation explanation;
  const std::size_t k = o.k.value_or(config.surrogate.k);
  if (o.surrogate || model.linear() == nullptr) {
    const auto label = model.predict(text).label;
    auto options = config.surrogate;
    options.k = k;
    explanation = explain::surrogate_explain(
        [&model](const std::string& masked) { return model.predict(masked).scores; }, text, label, options);
  } else {
    explanation = explain::linear_attribution(model, text, k);
  }

  if (o.format == "html") {
    double scale = 0.0;
    std::map<std::string, double> unigram;
    for (const auto& tw : explanation.token_weights) {
      scale = std::max(scale, std::abs(tw.weight));
      if (tw.token.find(' ') == std::string::npos) unigram[tw.token] = tw.weight;
    }
    out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\"/>\n<title>Explanation</title>\n</head>\n"
           "<body style=\"font-family:sans-serif;max-width:60em;margin:2em auto;line-height:1.8\">\n";
    out << "<h1>label " << explanation.target_label << " (" << explain::to_string(explanation.method) << ")</h1>\n";
    out << "<p>";
    bool first = true;
    for (const auto& token : text::tokenize(text::normalize(text))) {
      if (!first) out << ' ';
      first = false;
      const auto it = unigram.find(token);
      if (it == unigram.end() || scale == 0.0) {
        out << html_escape(token);
        continue;
      }
      const double alpha = std::abs(it->second) / scale;
      const char* rgb = it->second >= 0 ? "0,160,0" : "200,0,0";
      out << "<mark style=\"background-color:rgba(" << rgb << "," << fixed(alpha, 3) << ")\" title=\""
          << fixed(it->second, 6) << "\">" << html_escape(token) << "</mark>";
    }
    out << "</p>\n<ol>\n";
    for (const auto& tw : explanation.token_weights) {
      out << "<li>" << html_escape(tw.token) << ": " << fixed(tw.weight, 6) << "</li>\n";
    }
    out << "</ol>\n</body>\n</html>\n";
    return kSuccess;
  }
  out << explain::to_json(explanation).dump(2) << "\n";
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Patent text highlighter: mine tagged paragraphs from USPTO grants, train classifiers, "
               "highlight advantage / problem / solution text."};
  app.require_subcommand(1);
  Options o;

  const std::vector<std::string> kinds = {"mnb", "logreg", "svm", "nbsvm", "forest"};
  auto add_shared = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "INI-style configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Seed for balancing, splitting, training and sampling");
  };

  auto* build = app.add_subcommand("build-corpus", "Parse ipg* bulk files and write the balanced corpus CSV");
  add_shared(build);
  build->add_option("input", o.input, "Directory holding ipgYYMMDD.xml / .zip files")->required();
  build->add_option("-o,--output", o.output, "Corpus CSV to write")->required();
  build->add_option("--stats", o.stats_path, "Statistics JSON (default: <output>.stats.json)");
  build->add_option("--segments", o.segments_path, "Also dump every tagged segment as JSON lines");

  auto* stats = app.add_subcommand("stats", "Descriptive statistics of a corpus CSV");
  add_shared(stats);
  stats->add_option("corpus", o.input, "Corpus CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "text"}));

  auto* train = app.add_subcommand("train", "Train on an 80/20 split, save the model, report held-out scores");
  add_shared(train);
  train->add_option("corpus", o.input, "Corpus CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--kind", o.kind, "Model kind")->check(CLI::IsMember(kinds));
  train->add_option("--model", o.model_path, "Model file to write")->required();
  train->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "text"}));

  auto* evaluate = app.add_subcommand("eval", "k-fold cross-validation report");
  add_shared(evaluate);
  evaluate->add_option("corpus", o.input, "Corpus CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--kind", o.kind, "Model kind")->check(CLI::IsMember(kinds));
  evaluate->add_option("--folds", o.folds, "Number of folds (>= 2)");
  evaluate->add_flag("--global-features", o.global_features,
                     "Fit one vocabulary/idf on the whole corpus before splitting into folds");
  evaluate->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "text"}));

  auto* highlight = app.add_subcommand("highlight", "Classify and highlight each paragraph of a grant or text file");
  add_shared(highlight);
  highlight->add_option("input", o.input, "Grant XML or plain-text file ('-' for stdin)")->required();
  highlight->add_option("--model", o.model_path, "Model file")->required()->check(CLI::ExistingFile);
  highlight->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "html"}));
  highlight->add_flag("--sentences", o.sentences, "Classify sentences instead of paragraphs");

  auto* expl = app.add_subcommand("explain", "Per-token attribution for one prediction");
  add_shared(expl);
  expl->add_option("text", o.text, "Text to explain");
  expl->add_option("--input", o.input, "Read the text from a file instead");
  expl->add_option("--model", o.model_path, "Model file")->required()->check(CLI::ExistingFile);
  expl->add_option("-k,--top", o.k, "Number of tokens to report");
  expl->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "html"}));
  expl->add_flag("--surrogate", o.surrogate, "Use the perturbation surrogate instead of exact linear attribution");
  expl->add_option("--samples", o.samples, "Surrogate perturbation samples");
  expl->add_option("--kernel-width", o.kernel_width, "Surrogate kernel width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    for (const auto* sub : app.get_subcommands()) err << sub->help();
    if (app.get_subcommands().empty()) err << app.help();
    return kUsageError;
  }

  try {
    if (build->parsed()) return cmd_build_corpus(o, out);
    if (stats->parsed()) return cmd_stats(o, out);
    if (train->parsed()) return cmd_train(o, out, err);
    if (evaluate->parsed()) return cmd_eval(o, out);
    if (highlight->parsed()) return cmd_highlight(o, out);
    if (expl->parsed()) {
      if (o.text.empty() && o.input.empty()) throw UsageError("explain needs text or --input");
      return cmd_explain(o, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::BadArgument ? kUsageError : kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace patent::cli
