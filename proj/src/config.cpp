#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <sstream>

#include "patent/cli.hpp"
#include "patent/error.hpp"

namespace patent::cli {

namespace pt = boost::property_tree;

text::Stoplist AppConfig::stoplist() const {
  return stopwords_path ? text::Stoplist::load(stopwords_path->string()) : text::Stoplist::english();
}

void AppConfig::set_seed(std::uint64_t seed) {
  corpus.seed = seed;
  train.seed = seed;
  split.seed = seed;
  surrogate.seed = seed;
}

namespace {

std::vector<std::string> split_list(const std::string& value, char sep) {
  std::vector<std::string> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(Errc::BadArgument, "config key '" + key + "' expects a boolean, got '" + v + "'");
}

template <typename T>
void read(const pt::ptree& tree, const std::string& key, T& target) {
  if (const auto v = tree.get_optional<std::string>(key)) {
    try {
      if constexpr (std::is_same_v<T, bool>) {
        target = parse_bool(key, *v);
      } else if constexpr (std::is_same_v<T, std::string>) {
        target = *v;
      } else {
        target = tree.get<T>(key);
      }
    } catch (const pt::ptree_error&) {
      throw Error(Errc::BadArgument, "config key '" + key + "' has invalid value '" + *v + "'");
    }
  }
}

}  // namespace

AppConfig parse_config(const std::string& content) {
  pt::ptree tree;
  std::istringstream in(content);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(Errc::BadArgument, std::string("config: ") + e.what());
  }

  AppConfig c;
  if (const auto seed = tree.get_optional<std::uint64_t>("seed")) c.set_seed(*seed);
  read(tree, "min_word_count", c.corpus.min_word_count);
  read(tree, "balance", c.corpus.balance);
  if (const auto map = tree.get_optional<std::string>("label_map")) {
    for (const auto& pair : split_list(*map, ',')) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) throw Error(Errc::BadArgument, "label_map entries look like AEI:1");
      const auto tag = ingest::tag_class_from_string(pair.substr(0, colon));
      c.corpus.label_map[static_cast<std::size_t>(tag)] = std::stoi(pair.substr(colon + 1));
    }
    c.corpus.validate();
  }

  read(tree, "text.min_n", c.ngram.min_n);
  read(tree, "text.max_n", c.ngram.max_n);
  read(tree, "text.min_df", c.ngram.min_df);
  if (const auto cap = tree.get_optional<std::size_t>("text.max_vocab")) c.ngram.max_vocab = *cap;
  if (const auto path = tree.get_optional<std::string>("text.stopwords")) c.stopwords_path = *path;
  c.ngram.validate();

  read(tree, "train.epochs", c.train.epochs);
  read(tree, "train.learning_rate", c.train.learning_rate);
  read(tree, "train.l2_lambda", c.train.l2_lambda);
  read(tree, "train.svm_c", c.train.svm_c);
  read(tree, "train.nbsvm_beta", c.train.nbsvm_beta);
  read(tree, "train.nbsvm_alpha", c.train.nbsvm_alpha);
  read(tree, "train.mnb_alpha", c.train.mnb_alpha);
  read(tree, "train.tolerance", c.train.tolerance);
  read(tree, "train.n_trees", c.train.n_trees);
  read(tree, "train.max_depth", c.train.max_depth);
  c.train.validate();

  read(tree, "split.test_fraction", c.split.test_fraction);
  read(tree, "split.stratified", c.split.stratified);
  read(tree, "eval.folds", c.folds);

  for (const auto tag : {ingest::TagClass::AEI, ingest::TagClass::TP, ingest::TagClass::SP}) {
    std::string key = "headings.";
    key += ingest::to_string(tag);
    if (const auto v = tree.get_optional<std::string>(key)) c.headings.set_patterns(tag, split_list(*v, '|'));
    std::string color = "highlight.color_";
    color += ingest::to_string(tag);
    read(tree, color, c.tag_colors[static_cast<std::size_t>(tag)]);
  }

  read(tree, "explain.samples", c.surrogate.n_samples);
  read(tree, "explain.kernel_width", c.surrogate.kernel_width);
  read(tree, "explain.ridge", c.surrogate.ridge);
  read(tree, "explain.k", c.surrogate.k);
  return c;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace patent::cli
