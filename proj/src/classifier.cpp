#include "patent/classifier.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "patent/error.hpp"

namespace patent::models {

using nlohmann::json;

Prediction TextClassifier::predict(std::string_view text) const { return predict(featurizer.transform(text)); }

Prediction TextClassifier::predict(const SparseVector& features) const {
  return std::visit([&](const auto& m) { return models::predict(m, features); }, estimator);
}

std::size_t TextClassifier::n_classes() const {
  if (const auto* l = linear()) return l->n_classes();
  return forest()->classes.size();
}

features::FeatureMode feature_mode_for(ModelKind kind) {
  return kind == ModelKind::nbsvm ? features::FeatureMode::nb_scaled : features::FeatureMode::tfidf;
}

TextClassifier train_classifier(ModelKind kind, std::span<const std::string> texts, std::span<const int> labels,
                                const ClassifierConfig& config) {
  features::Featurizer featurizer(config.stoplist, config.ngram, feature_mode_for(kind));
  const auto x = featurizer.fit_transform(texts);
  return train_classifier(kind, featurizer, x, labels, config);
}

TextClassifier train_classifier(ModelKind kind, const features::Featurizer& fitted,
                                std::span<const std::string> texts, std::span<const int> labels,
                                const ClassifierConfig& config) {
  return train_classifier(kind, fitted, fitted.transform(texts), labels, config);
}

TextClassifier train_classifier(ModelKind kind, const features::Featurizer& fitted, const DocTermMatrix& x,
                                std::span<const int> labels, const ClassifierConfig& config) {
  if (fitted.mode() != feature_mode_for(kind)) {
    throw Error(Errc::BadArgument, std::string("featurizer mode ") + std::string(features::to_string(fitted.mode())) +
                                       " does not suit model kind " + std::string(to_string(kind)));
  }
  TextClassifier out;
  out.kind = kind;
  out.featurizer = fitted;
  out.config = config.train;
  switch (kind) {
    case ModelKind::mnb: out.estimator = train_mnb(x, labels, config.n_classes, config.train.mnb_alpha).model; break;
    case ModelKind::logreg: out.estimator = train_logreg(x, labels, config.n_classes, config.train).model; break;
    case ModelKind::svm: out.estimator = train_linear_svm(x, labels, config.n_classes, config.train).model; break;
    case ModelKind::nbsvm: out.estimator = train_nbsvm(x, labels, config.n_classes, config.train).model; break;
    case ModelKind::forest:
      out.estimator = train_random_forest(x, labels, config.n_classes, config.train);
      break;
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'P', 'H', 'L', 'T'};

json config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},       {"learning_rate", c.learning_rate}, {"l2_lambda", c.l2_lambda},
          {"svm_c", c.svm_c},         {"nbsvm_beta", c.nbsvm_beta},       {"nbsvm_alpha", c.nbsvm_alpha},
          {"mnb_alpha", c.mnb_alpha}, {"tolerance", c.tolerance},         {"n_trees", c.n_trees},
          {"max_depth", c.max_depth}, {"seed", c.seed}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.l2_lambda = j.at("l2_lambda").get<double>();
  c.svm_c = j.at("svm_c").get<double>();
  c.nbsvm_beta = j.at("nbsvm_beta").get<double>();
  c.nbsvm_alpha = j.at("nbsvm_alpha").get<double>();
  c.mnb_alpha = j.at("mnb_alpha").get<double>();
  c.tolerance = j.at("tolerance").get<double>();
  c.n_trees = j.at("n_trees").get<int>();
  c.max_depth = j.at("max_depth").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json forest_to_json(const ForestModel& f) {
  json trees = json::array();
  for (const auto& tree : f.trees) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right},
                       {"distribution", n.distribution}});
    }
    trees.push_back(std::move(nodes));
  }
  return {{"n_trees", f.n_trees}, {"max_depth", f.max_depth}, {"seed", f.seed},
          {"dimension", f.dimension}, {"classes", f.classes}, {"trees", std::move(trees)}};
}

ForestModel forest_from_json(const json& j) {
  ForestModel f;
  f.n_trees = j.at("n_trees").get<int>();
  f.max_depth = j.at("max_depth").get<int>();
  f.seed = j.at("seed").get<std::uint64_t>();
  f.dimension = j.at("dimension").get<std::size_t>();
  f.classes = j.at("classes").get<std::vector<int>>();
  for (const auto& nodes : j.at("trees")) {
    DecisionTree tree;
    for (const auto& n : nodes) {
      TreeNode node;
      node.feature = n.at("feature").get<std::int32_t>();
      node.threshold = n.at("threshold").get<double>();
      node.left = n.at("left").get<std::int32_t>();
      node.right = n.at("right").get<std::int32_t>();
      node.distribution = n.at("distribution").get<std::vector<double>>();
      tree.nodes.push_back(std::move(node));
    }
    const auto size = static_cast<std::int32_t>(tree.nodes.size());
    if (size == 0) throw Error(Errc::CorruptFile, "empty decision tree");
    for (const auto& node : tree.nodes) {
      if (node.distribution.size() != f.classes.size()) throw Error(Errc::CorruptFile, "leaf distribution size");
      if (!node.is_leaf() && (node.left <= 0 || node.left >= size || node.right <= 0 || node.right >= size ||
                              static_cast<std::size_t>(node.feature) >= f.dimension)) {
        throw Error(Errc::CorruptFile, "decision tree node out of range");
      }
    }
    f.trees.push_back(std::move(tree));
  }
  return f;
}

void check_linear(const LinearModel& m, std::size_t dimension) {
  const std::size_t k = m.classes.size();
  if (k < 2 || m.weights.size() != k || m.intercepts.size() != k) {
    throw Error(Errc::CorruptFile, "linear model class arrays disagree");
  }
  for (const auto& w : m.weights) {
    if (w.size() != dimension) throw Error(Errc::CorruptFile, "weight vector does not match vocabulary");
  }
  if (m.kind == ModelKind::nbsvm) {
    if (m.nb_ratios.size() != k) throw Error(Errc::CorruptFile, "missing log-count ratios");
    for (const auto& r : m.nb_ratios) {
      if (r.size() != dimension) throw Error(Errc::CorruptFile, "ratio vector does not match vocabulary");
    }
  } else if (!m.nb_ratios.empty()) {
    throw Error(Errc::CorruptFile, "unexpected log-count ratios");
  }
}

}  // namespace

std::string serialize_model(const TextClassifier& model) {
  const auto& fz = model.featurizer;
  json doc;
  doc["kind"] = std::string(to_string(model.kind));
  doc["config"] = config_to_json(model.config);
  doc["feature_mode"] = std::string(features::to_string(fz.mode()));
  doc["ngram"] = {{"min_n", fz.ngram().min_n},
                  {"max_n", fz.ngram().max_n},
                  {"min_df", fz.ngram().min_df},
                  {"max_vocab", fz.ngram().max_vocab ? json(*fz.ngram().max_vocab) : json(nullptr)}};
  doc["stopwords"] = fz.stoplist().sorted_terms();
  doc["vocabulary"] = {{"terms", fz.vocabulary().terms()},
                       {"doc_frequency", fz.vocabulary().doc_frequencies()},
                       {"n_docs", fz.vocabulary().n_docs()}};
  if (fz.mode() == features::FeatureMode::tfidf) {
    doc["idf"] = std::vector<double>(fz.idf().begin(), fz.idf().end());
  }
  if (const auto* l = model.linear()) {
    doc["linear"] = {{"classes", l->classes}, {"weights", l->weights}, {"intercepts", l->intercepts}};
    if (!l->nb_ratios.empty()) doc["linear"]["nb_ratios"] = l->nb_ratios;
  } else {
    doc["forest"] = forest_to_json(*model.forest());
  }

  std::string out(kMagic, sizeof kMagic);
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((kModelFormatVersion >> shift) & 0xFFu));
  }
  const auto payload = json::to_cbor(doc);
  out.append(payload.begin(), payload.end());
  return out;
}

TextClassifier deserialize_model(std::string_view bytes) {
  if (bytes.size() < 8 || bytes.substr(0, 4) != std::string_view(kMagic, 4)) {
    throw Error(Errc::CorruptFile, "missing PHLT header");
  }
  std::uint32_t version = 0;
  for (int b = 0; b < 4; ++b) {
    version |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 + static_cast<std::size_t>(b)])) << (8 * b);
  }
  if (version != kModelFormatVersion) {
    throw Error(Errc::VersionMismatch, "model file version " + std::to_string(version) + ", expected " +
                                           std::to_string(kModelFormatVersion));
  }
  try {
    const auto doc = json::from_cbor(bytes.substr(8));
    TextClassifier model;
    model.kind = model_kind_from_string(doc.at("kind").get<std::string>());
    model.config = config_from_json(doc.at("config"));

    text::NgramConfig ngram;
    const auto& ng = doc.at("ngram");
    ngram.min_n = ng.at("min_n").get<int>();
    ngram.max_n = ng.at("max_n").get<int>();
    ngram.min_df = ng.at("min_df").get<std::int64_t>();
    if (!ng.at("max_vocab").is_null()) ngram.max_vocab = ng.at("max_vocab").get<std::size_t>();
    ngram.validate();

    const auto stop = doc.at("stopwords").get<std::vector<std::string>>();
    text::Stoplist stoplist(std::unordered_set<std::string>(stop.begin(), stop.end()));
    const auto mode = features::feature_mode_from_string(doc.at("feature_mode").get<std::string>());
    if (mode != feature_mode_for(model.kind)) throw Error(Errc::CorruptFile, "feature mode does not match kind");

    const auto& v = doc.at("vocabulary");
    text::Vocabulary vocab(v.at("terms").get<std::vector<std::string>>(),
                           v.at("doc_frequency").get<std::vector<std::int64_t>>(), v.at("n_docs").get<std::int64_t>());
    std::vector<double> idf;
    if (mode == features::FeatureMode::tfidf) {
      idf = doc.at("idf").get<std::vector<double>>();
    } else {
      idf.assign(vocab.size(), 1.0);
    }
    model.featurizer = features::Featurizer(std::move(stoplist), ngram, mode);
    const std::size_t dim = vocab.size();
    model.featurizer.restore(std::move(vocab), std::move(idf));

    if (model.kind == ModelKind::forest) {
      auto forest = forest_from_json(doc.at("forest"));
      if (forest.dimension != dim) throw Error(Errc::CorruptFile, "forest dimension does not match vocabulary");
      model.estimator = std::move(forest);
    } else {
      const auto& l = doc.at("linear");
      LinearModel m;
      m.kind = model.kind;
      m.feature_mode = mode;
      m.classes = l.at("classes").get<std::vector<int>>();
      m.weights = l.at("weights").get<std::vector<std::vector<double>>>();
      m.intercepts = l.at("intercepts").get<std::vector<double>>();
      if (l.contains("nb_ratios")) m.nb_ratios = l.at("nb_ratios").get<std::vector<std::vector<double>>>();
      check_linear(m, dim);
      model.estimator = std::move(m);
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(Errc::CorruptFile, e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::CorruptFile) throw;
    throw Error(Errc::CorruptFile, e.what());
  }
}

void save_model(const TextClassifier& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write model file " + path.string());
  const auto bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoFailure, "failed writing model file " + path.string());
}

TextClassifier load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open model file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_model(buffer.str());
}

}  // namespace patent::models
