// Command-line front end: analysis, comparison, training, evaluation,
// ground-truth extraction, language profiles and the HTTP API.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "geoprov/analysis.hpp"
#include "geoprov/backend.hpp"
#include "geoprov/classifier.hpp"
#include "geoprov/csv.hpp"
#include "geoprov/dataset.hpp"
#include "geoprov/evaluation.hpp"
#include "geoprov/fixtures.hpp"
#include "geoprov/ground_truth.hpp"
#include "geoprov/langid.hpp"
#include "geoprov/resources.hpp"
#include "geoprov/server.hpp"
#include "geoprov/strings.hpp"
#include "geoprov/synthetic.hpp"

namespace fs = std::filesystem;
using namespace geoprov;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

struct GlobalOptions {
  std::string resources = default_resource_dir().string();
  std::string data_dir = env_or("GEOPROV_DATA_DIR", "./data");
  std::string fixtures = env_or("GEOPROV_FIXTURES", "");
  std::string record;
  std::string fixed_time = env_or("GEOPROV_FIXED_TIME", "");
};

std::shared_ptr<Backend> make_backend(const GlobalOptions& g) {
  if (!g.fixtures.empty()) return std::make_shared<FixtureBackend>(g.fixtures);
  auto live = std::make_shared<LiveBackend>();
  if (!g.record.empty()) return std::make_shared<RecordingBackend>(live, g.record);
  return live;
}

service::AnalyzerOptions analyzer_options(const GlobalOptions& g) {
  service::AnalyzerOptions options;
  if (!g.fixed_time.empty()) {
    std::string t = g.fixed_time;
    options.clock = [t] { return t; };
  }
  return options;
}

std::string pad(const std::string& s, size_t width) {
  size_t len = utf8_decode(s).size();
  return len >= width ? s : s + std::string(width - len, ' ');
}

void print_analysis_table(const service::ArticleAnalysis& a, std::ostream& out) {
  out << a.article.lang << ":" << a.article.title << "  (" << a.references.size() << " references, model "
      << a.model_edition << ", " << a.generated_at << ")\n\n";
  for (const auto& method : service::aggregate_methods()) {
    const auto& counts = a.aggregates.at(method);
    std::vector<std::pair<int, std::string>> sorted;
    for (const auto& [code, n] : counts) sorted.emplace_back(-n, code);
    std::sort(sorted.begin(), sorted.end());
    out << pad(method, 14);
    for (const auto& [neg, code] : sorted) out << " " << code << ":" << -neg;
    out << "\n";
  }
  out << "\n" << pad("predicted", 10) << pad("ip", 9) << pad("tld", 9) << pad("lang", 9) << "url\n";
  for (const auto& r : a.references) {
    out << pad(r.predicted.code(), 10) << pad(r.features.ip_country.code(), 9) << pad(r.features.tld_country.code(), 9)
        << pad(r.features.page_language, 9) << r.url << "\n";
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> out;
  for (auto& line : split(read_file(path), '\n')) {
    std::string t(trim(line));
    if (!t.empty() && t[0] != '#') out.push_back(t);
  }
  return out;
}

service::ApiServer* g_server = nullptr;
void handle_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geographic provenance of Wikipedia references"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--resources", g.resources, "Resource directory (tables, profiles, models)");
  app.add_option("--fixtures", g.fixtures, "Replay network requests from a fixture directory");
  app.add_option("--record", g.record, "Record live network responses into a fixture directory");
  app.add_option("--fixed-time", g.fixed_time, "Timestamp stamped on new analyses");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Classify the references of one article");
  std::string url, model = "general";
  bool as_json = false, as_table = false, refresh = false;
  analyze->add_option("url", url, "Wikipedia article URL")->required();
  analyze->add_option("--model", model, "Model edition");
  analyze->add_option("--data-dir", g.data_dir, "Analysis cache directory");
  analyze->add_flag("--json", as_json, "Print the analysis as JSON");
  analyze->add_flag("--table", as_table, "Print a text summary (default)");
  analyze->add_flag("--refresh", refresh, "Ignore the cache");

  // compare
  auto* compare = app.add_subcommand("compare", "Analyze an article and its sibling editions");
  std::string editions;
  compare->add_option("url", url, "Wikipedia article URL")->required();
  compare->add_option("--editions", editions, "Comma-separated language editions")->required();
  compare->add_option("--model", model, "Model edition");
  compare->add_option("--data-dir", g.data_dir, "Analysis cache directory");
  compare->add_flag("--json", as_json, "Print JSON");
  compare->add_flag("--refresh", refresh, "Ignore the cache");

  // train
  auto* train = app.add_subcommand("train", "Train a one-vs-one SVM model from a training CSV");
  std::string data_path, out_path, edition = "general";
  classify::SvmParams svm;
  train->add_option("--data", data_path, "Training CSV")->required();
  train->add_option("--out", out_path, "Model file")->required();
  train->add_option("--lambda", svm.lambda, "Regularization strength")->check(CLI::PositiveNumber);
  train->add_option("--epochs", svm.epochs, "Passes over the data")->check(CLI::PositiveNumber);
  train->add_option("--seed", svm.seed, "Shuffle seed");
  train->add_option("--edition", edition, "Model name stored in the metadata");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate the model against single-feature baselines");
  size_t folds = 10;
  uint64_t seed = 42;
  evaluate->add_option("--data", data_path, "Training CSV")->required();
  evaluate->add_option("--folds", folds, "Number of folds")->check(CLI::Range(2, 1000));
  evaluate->add_option("--seed", seed, "Fold shuffle seed");
  evaluate->add_option("--lambda", svm.lambda, "Regularization strength")->check(CLI::PositiveNumber);
  evaluate->add_option("--epochs", svm.epochs, "Passes over the data")->check(CLI::PositiveNumber);
  evaluate->add_option("--edition", edition, "Report label");
  evaluate->add_flag("--json", as_json, "Print the report as JSON");

  // build-ground-truth
  auto* truth_cmd = app.add_subcommand("build-ground-truth", "Label reference hosts through a SPARQL endpoint");
  std::string endpoint, articles_path;
  size_t max_depth = 3;
  truth_cmd->add_option("--endpoint", endpoint, "SPARQL endpoint URL")->required();
  truth_cmd->add_option("--articles", articles_path, "File with one article URL per line")->required();
  truth_cmd->add_option("--out", out_path, "Training CSV to write")->required();
  truth_cmd->add_option("--edition", edition, "Source edition (default: derived from the endpoint)");
  truth_cmd->add_option("--max-depth", max_depth, "Longest ownership chain")->check(CLI::PositiveNumber);

  // train-profiles
  auto* profiles_cmd = app.add_subcommand("train-profiles", "Build n-gram language profiles from text corpora");
  std::string corpus_dir, profiles_out;
  profiles_cmd->add_option("--corpus", corpus_dir, "Directory of <lang>.txt files")->required();
  profiles_cmd->add_option("--out", profiles_out, "Output directory")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the JSON API");
  int port = 8080;
  std::string host = "0.0.0.0";
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--data-dir", g.data_dir, "Analysis cache directory");
  serve->add_option("--fixtures", g.fixtures, "Replay network requests from a fixture directory");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic labeled dataset");
  eval::SyntheticConfig synth_config;
  std::string synth_classes;
  synth->add_option("--out", out_path, "Training CSV to write")->required();
  synth->add_option("--n", synth_config.n, "Rows");
  synth->add_option("--classes", synth_classes, "Comma-separated country codes");
  synth->add_option("--noise-ip", synth_config.noise_ip, "IP noise rate");
  synth->add_option("--noise-tld", synth_config.noise_tld, "TLD noise rate");
  synth->add_option("--noise-language", synth_config.noise_language, "Language noise rate");
  synth->add_option("--unknown-share", synth_config.unknown_share, "Share of noisy draws reported as UNKNOWN");
  synth->add_option("--seed", synth_config.seed, "Generator seed");
  synth->add_option("--edition", synth_config.edition, "source_edition column value");

  // compile-fixtures
  auto* fixtures_cmd = app.add_subcommand("compile-fixtures", "Render fixture manifests into a fixture directory");
  std::string fixtures_src;
  fixtures_cmd->add_option("--src", fixtures_src, "Manifest directory")->required();
  fixtures_cmd->add_option("--out", out_path, "Fixture directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze || *compare || *serve) {
      Resources resources = Resources::load(g.resources);
      auto backend = make_backend(g);
      service::AnalysisCache cache(g.data_dir);
      service::Analyzer analyzer(*backend, resources, cache, analyzer_options(g));

      if (*analyze) {
        auto result = analyzer.analyze(url, model, refresh);
        if (as_json) {
          std::cout << service::analysis_to_json(result);
        } else {
          print_analysis_table(result, std::cout);
        }
      } else if (*compare) {
        std::vector<std::string> langs;
        for (auto& e : split(editions, ',')) {
          if (!trim(e).empty()) langs.emplace_back(trim(e));
        }
        auto result = analyzer.compare(url, langs, model, refresh);
        if (as_json) {
          std::cout << service::comparison_to_json(result);
        } else {
          for (const auto& [lang, entry] : result.editions) {
            if (const auto* a = std::get_if<service::ArticleAnalysis>(&entry)) {
              print_analysis_table(*a, std::cout);
            } else {
              const auto& err = std::get<service::EditionError>(entry);
              std::cout << lang << ": " << err.code << " (" << err.message << ")\n";
            }
            std::cout << "\n";
          }
        }
      } else {
        service::ApiServer server(analyzer);
        g_server = &server;
        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        std::cerr << "serving on http://" << host << ":" << port << " (cache " << g.data_dir << ")\n";
        if (!server.listen(host, port)) {
          std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
          return 1;
        }
      }
    } else if (*train) {
      auto dataset = read_training_csv(data_path);
      classify::TrainConfig config{svm, edition, true};
      auto trained = classify::train(dataset, config);
      classify::save_model(trained, out_path);
      std::cerr << "trained " << trained.pairs.size() << " pairwise SVMs over " << trained.classes.size()
                << " classes from " << dataset.size() << " rows -> " << out_path << "\n";
    } else if (*evaluate) {
      Resources resources = Resources::load(g.resources, false);
      auto dataset = read_training_csv(data_path);
      eval::EvalConfig config;
      config.folds = folds;
      config.seed = seed;
      config.train.svm = svm;
      config.train.edition = edition;
      auto report = eval::evaluate(dataset, resources.lang_to_country, config);
      std::cout << (as_json ? eval::report_to_json(report) : eval::render_report_table({report}));
    } else if (*truth_cmd) {
      Resources resources = Resources::load(g.resources, false);
      auto backend = make_backend(g);
      wiki::WikiClient wiki(*backend);
      features::FeatureExtractor extractor(resources.ip_db, resources.tld_table, resources.detector, *backend);
      truth::SparqlClient sparql(*backend, endpoint);
      truth::ResolverConfig resolver_config;
      resolver_config.max_depth = max_depth;
      truth::LocationResolver resolver(sparql, resources.country_names, resolver_config);
      std::vector<wiki::ArticleRef> articles;
      for (const auto& line : read_lines(articles_path)) articles.push_back(wiki::parse_article_url(line));
      std::string source = truth_cmd->count("--edition") ? edition : truth::edition_of_endpoint(endpoint);
      auto set = truth::build_training_set(articles, wiki, extractor, resolver, source);
      write_training_csv(out_path, set.examples);
      std::cerr << "articles " << set.summary.articles << " (missing " << set.summary.articles_missing << "), hosts "
                << set.summary.hosts << ", labeled " << set.summary.labeled << ", not found "
                << set.summary.not_found << " -> " << out_path << "\n";
    } else if (*profiles_cmd) {
      fs::create_directories(profiles_out);
      std::vector<fs::path> corpora;
      for (const auto& entry : fs::directory_iterator(corpus_dir)) {
        if (entry.path().extension() == ".txt") corpora.push_back(entry.path());
      }
      std::sort(corpora.begin(), corpora.end());
      for (const auto& path : corpora) {
        auto profile = features::train_profile(path.stem().string(), read_file(path.string()));
        write_file_atomic((fs::path(profiles_out) / (profile.lang + ".json")).string(),
                          features::profile_to_json(profile));
        std::cerr << profile.lang << ": " << profile.ngrams.size() << " n-grams\n";
      }
    } else if (*synth) {
      Resources resources = Resources::load(g.resources, false);
      if (synth_classes.empty()) {
        synth_config.classes = eval::default_synthetic_classes();
      } else {
        for (auto& c : split(synth_classes, ',')) synth_config.classes.push_back(CountryLabel::parse(trim(c)));
      }
      auto rows = eval::generate_synthetic(synth_config, resources.lang_to_country);
      write_training_csv(out_path, rows);
      std::cerr << "wrote " << rows.size() << " rows -> " << out_path << "\n";
    } else if (*fixtures_cmd) {
      size_t n = compile_fixtures(fixtures_src, out_path);
      std::cerr << "wrote " << n << " fixture files -> " << out_path << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error (" << e.code() << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
