#include "geoprov/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <random>
#include <set>

#include "geoprov/csv.hpp"
#include "geoprov/error.hpp"

namespace geoprov::classify {

using nlohmann::json;

const char* slot_name(Slot slot) {
  switch (slot) {
    case Slot::kIp:
      return "ip";
    case Slot::kTld:
      return "tld";
    case Slot::kLanguage:
      return "lang";
  }
  return "?";
}

static const std::string& slot_value(const features::FeatureVector& fv, int slot) {
  switch (slot) {
    case 0:
      return fv.ip_country.code();
    case 1:
      return fv.tld_country.code();
    default:
      return fv.page_language;
  }
}

// ---------------------------------------------------------------------------
// FeatureEncoder

FeatureEncoder FeatureEncoder::from_values(std::array<std::vector<std::string>, kSlotCount> values) {
  FeatureEncoder enc;
  uint32_t next = 0;
  for (int s = 0; s < kSlotCount; ++s) {
    bool has_unknown = false;
    for (const auto& v : values[s]) {
      if (!enc.lookup_[s].emplace(v, next++).second) {
        throw ModelFormatError(std::string("encoder slot ") + slot_name(Slot(s)) + " repeats value '" + v + "'");
      }
      has_unknown |= v == kUnknown;
    }
    if (!has_unknown) throw ModelFormatError(std::string("encoder slot ") + slot_name(Slot(s)) + " lacks UNKNOWN");
  }
  enc.values_ = std::move(values);
  enc.dimension_ = next;
  return enc;
}

FeatureEncoder FeatureEncoder::build(std::span<const LabeledExample> examples) {
  std::array<std::set<std::string>, kSlotCount> seen;
  for (auto& s : seen) s.insert(std::string(kUnknown));
  for (const auto& ex : examples) {
    for (int s = 0; s < kSlotCount; ++s) seen[s].insert(slot_value(ex.features, s));
  }
  std::array<std::vector<std::string>, kSlotCount> values;
  for (int s = 0; s < kSlotCount; ++s) values[s].assign(seen[s].begin(), seen[s].end());
  return from_values(std::move(values));
}

SparseRow FeatureEncoder::encode(const features::FeatureVector& fv) const {
  SparseRow row(kSlotCount);
  for (int s = 0; s < kSlotCount; ++s) {
    const auto& table = lookup_[s];
    auto it = table.find(slot_value(fv, s));
    row[s] = it != table.end() ? it->second : table.at(std::string(kUnknown));
  }
  return row;
}

uint32_t FeatureEncoder::index(Slot slot, const std::string& value) const {
  return lookup_[static_cast<int>(slot)].at(value);
}

bool FeatureEncoder::contains(Slot slot, const std::string& value) const {
  return lookup_[static_cast<int>(slot)].count(value) > 0;
}

std::map<std::pair<Slot, std::string>, uint32_t> FeatureEncoder::vocabulary() const {
  std::map<std::pair<Slot, std::string>, uint32_t> out;
  for (int s = 0; s < kSlotCount; ++s) {
    for (const auto& [v, idx] : lookup_[s]) out.emplace(std::make_pair(Slot(s), v), idx);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairwise SVM

double PairwiseSvm::decision(const SparseRow& x) const {
  double f = bias;
  for (uint32_t j : x) f += weights[j];
  return f;
}

namespace {

// Pegasos over rows[indices[k]] with labels[k]. The weight vector is kept as
// scale * v so that the (1 - 1/t) shrink step costs O(1).
PairwiseSvm pegasos(std::span<const SparseRow> rows, std::span<const size_t> indices, std::span<const int> labels,
                    uint32_t dimension, const CountryLabel& class_a, const CountryLabel& class_b,
                    const SvmParams& params) {
  if (!(params.lambda > 0)) throw InvalidArgument("lambda must be positive");
  if (params.epochs < 1) throw InvalidArgument("epochs must be at least 1");
  size_t positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == labels.size()) {
    throw DegenerateClassPair("class pair " + class_a.code() + "/" + class_b.code() + " lacks examples of one class");
  }

  const uint32_t bias_col = dimension;
  std::vector<double> v(dimension + 1, 0.0);
  double scale = 1.0;
  std::vector<size_t> order(indices.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(params.seed);
  uint64_t t = 0;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
    for (size_t k : order) {
      ++t;
      const SparseRow& x = rows[indices[k]];
      const double y = labels[k];
      double f = v[bias_col];
      for (uint32_t j : x) f += v[j];
      const double margin = y * scale * f;

      scale *= 1.0 - 1.0 / static_cast<double>(t);
      if (scale == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        scale = 1.0;
      }
      if (margin < 1.0) {
        const double step = y / (params.lambda * static_cast<double>(t) * scale);
        for (uint32_t j : x) v[j] += step;
        v[bias_col] += step;
      }
      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
    }
  }

  PairwiseSvm svm{class_a, class_b, std::vector<double>(dimension), v[bias_col] * scale};
  for (uint32_t j = 0; j < dimension; ++j) svm.weights[j] = v[j] * scale;
  return svm;
}

}  // namespace

PairwiseSvm train_pairwise(std::span<const SparseRow> rows, std::span<const int> labels, uint32_t dimension,
                           const CountryLabel& class_a, const CountryLabel& class_b, const SvmParams& params) {
  if (rows.size() != labels.size()) throw InvalidArgument("rows and labels differ in length");
  for (const auto& row : rows) {
    for (uint32_t j : row) {
      if (j >= dimension) throw InvalidArgument("column index out of range");
    }
  }
  std::vector<size_t> indices(rows.size());
  std::iota(indices.begin(), indices.end(), 0);
  return pegasos(rows, indices, labels, dimension, class_a, class_b, params);
}

uint64_t pair_seed(uint64_t seed, size_t i, size_t j) {
  // splitmix64 finalizer over the combined key
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (1 + ((static_cast<uint64_t>(i) << 32) | j));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrainedModel train(std::span<const LabeledExample> dataset, const TrainConfig& config) {
  std::set<CountryLabel> label_set;
  for (const auto& ex : dataset) label_set.insert(ex.label);
  if (label_set.size() < 2) {
    throw InsufficientClasses("training needs at least two distinct labels, found " + std::to_string(label_set.size()));
  }

  if (!(config.svm.lambda > 0)) throw InvalidArgument("lambda must be positive");
  if (config.svm.epochs < 1) throw InvalidArgument("epochs must be at least 1");

  TrainedModel model;
  model.encoder = FeatureEncoder::build(dataset);
  model.classes.assign(label_set.begin(), label_set.end());
  model.metadata = {dataset.size(), config.svm.lambda, config.svm.epochs, config.svm.seed, config.edition};

  const size_t k = model.classes.size();
  std::vector<SparseRow> rows;
  std::vector<size_t> class_of;
  rows.reserve(dataset.size());
  for (const auto& ex : dataset) {
    rows.push_back(model.encoder.encode(ex.features));
    class_of.push_back(std::lower_bound(model.classes.begin(), model.classes.end(), ex.label) - model.classes.begin());
  }
  std::vector<std::vector<size_t>> members(k);
  for (size_t r = 0; r < rows.size(); ++r) members[class_of[r]].push_back(r);

  std::vector<std::pair<size_t, size_t>> pair_ids;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) pair_ids.emplace_back(i, j);
  }
  model.pairs.resize(pair_ids.size());

  auto train_one = [&](size_t p) {
    auto [i, j] = pair_ids[p];
    std::vector<size_t> indices;
    std::vector<int> labels;
    std::merge(members[i].begin(), members[i].end(), members[j].begin(), members[j].end(),
               std::back_inserter(indices));
    labels.reserve(indices.size());
    for (size_t r : indices) labels.push_back(class_of[r] == i ? 1 : -1);
    SvmParams params = config.svm;
    params.seed = pair_seed(config.svm.seed, i, j);
    model.pairs[p] = pegasos(rows, indices, labels, model.encoder.dimension(), model.classes[i], model.classes[j], params);
  };

  const auto n_pairs = static_cast<std::ptrdiff_t>(pair_ids.size());
  if (config.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t p = 0; p < n_pairs; ++p) train_one(static_cast<size_t>(p));
  } else {
    for (std::ptrdiff_t p = 0; p < n_pairs; ++p) train_one(static_cast<size_t>(p));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Prediction

Prediction predict(const TrainedModel& model, const features::FeatureVector& fv) {
  Prediction out;
  for (const auto& c : model.classes) {
    out.votes[c] = 0;
    out.margins[c] = 0.0;
  }
  SparseRow x = model.encoder.encode(fv);
  for (const auto& pair : model.pairs) {
    double f = pair.decision(x);
    out.votes[f > 0 ? pair.class_a : pair.class_b] += 1;
    out.margins[pair.class_a] += std::abs(f);
    out.margins[pair.class_b] += std::abs(f);
  }
  const CountryLabel* best = nullptr;
  for (const auto& c : model.classes) {  // canonical order: first wins remaining ties
    if (!best || out.votes[c] > out.votes[*best] ||
        (out.votes[c] == out.votes[*best] && out.margins[c] > out.margins[*best])) {
      best = &c;
    }
  }
  if (best) out.label = *best;
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

void validate_model(const TrainedModel& model) {
  const size_t k = model.classes.size();
  if (k < 2) throw ModelFormatError("model needs at least two classes");
  if (!(model.metadata.lambda > 0) || !std::isfinite(model.metadata.lambda) || model.metadata.epochs < 1) {
    throw ModelFormatError("metadata needs lambda > 0 and epochs >= 1");
  }
  for (size_t i = 0; i < k; ++i) {
    if (model.classes[i].is_unknown()) throw ModelFormatError("UNKNOWN is not a valid class");
    if (i > 0 && !(model.classes[i - 1] < model.classes[i])) {
      throw ModelFormatError("classes must be sorted and unique");
    }
  }
  if (model.pairs.size() != k * (k - 1) / 2) {
    throw ModelFormatError("expected " + std::to_string(k * (k - 1) / 2) + " class pairs, found " +
                           std::to_string(model.pairs.size()));
  }
  size_t p = 0;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j, ++p) {
      const auto& pair = model.pairs[p];
      if (pair.class_a != model.classes[i] || pair.class_b != model.classes[j]) {
        throw ModelFormatError("pair " + std::to_string(p) + " should be " + model.classes[i].code() + "/" +
                               model.classes[j].code());
      }
      if (pair.weights.size() != model.encoder.dimension()) {
        throw ModelFormatError("pair " + std::to_string(p) + " has " + std::to_string(pair.weights.size()) +
                               " weights, encoder dimension is " + std::to_string(model.encoder.dimension()));
      }
      if (!std::isfinite(pair.bias) ||
          !std::all_of(pair.weights.begin(), pair.weights.end(), [](double w) { return std::isfinite(w); })) {
        throw ModelFormatError("pair " + std::to_string(p) + " has non-finite weights");
      }
    }
  }
}

std::string model_to_json(const TrainedModel& model) {
  json encoder = json::object();
  for (int s = 0; s < kSlotCount; ++s) encoder[slot_name(Slot(s))] = model.encoder.values()[s];
  json classes = json::array();
  for (const auto& c : model.classes) classes.push_back(c.code());
  json pairs = json::array();
  for (const auto& pair : model.pairs) {
    pairs.push_back({{"a", pair.class_a.code()}, {"b", pair.class_b.code()}, {"weights", pair.weights}, {"bias", pair.bias}});
  }
  json doc = {
      {"version", 1},
      {"classes", classes},
      {"encoder", encoder},
      {"pairs", pairs},
      {"metadata",
       {{"training_rows", model.metadata.training_rows},
        {"lambda", model.metadata.lambda},
        {"epochs", model.metadata.epochs},
        {"seed", model.metadata.seed},
        {"edition", model.metadata.edition}}},
  };
  return doc.dump(1) + "\n";
}

TrainedModel model_from_json(std::string_view text) {
  TrainedModel model;
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) throw ModelFormatError("model file is not a JSON object");
    if (!doc.contains("version") || doc["version"] != 1) {
      throw ModelFormatError("unsupported model version " + (doc.contains("version") ? doc["version"].dump() : "<missing>"));
    }
    for (const auto& c : doc.at("classes")) {
      auto label = CountryLabel::try_parse(c.get<std::string>());
      if (!label) throw ModelFormatError("invalid class '" + c.get<std::string>() + "'");
      model.classes.push_back(*label);
    }
    std::array<std::vector<std::string>, kSlotCount> values;
    const json& enc = doc.at("encoder");
    for (int s = 0; s < kSlotCount; ++s) values[s] = enc.at(slot_name(Slot(s))).get<std::vector<std::string>>();
    model.encoder = FeatureEncoder::from_values(std::move(values));
    for (const auto& p : doc.at("pairs")) {
      auto a = CountryLabel::try_parse(p.at("a").get<std::string>());
      auto b = CountryLabel::try_parse(p.at("b").get<std::string>());
      if (!a || !b) throw ModelFormatError("invalid class in pair");
      model.pairs.push_back({*a, *b, p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>()});
    }
    const json& meta = doc.at("metadata");
    model.metadata.training_rows = meta.at("training_rows").get<uint64_t>();
    model.metadata.lambda = meta.at("lambda").get<double>();
    model.metadata.epochs = meta.at("epochs").get<int>();
    model.metadata.seed = meta.at("seed").get<uint64_t>();
    model.metadata.edition = meta.at("edition").get<std::string>();
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  }
  validate_model(model);
  return model;
}

void save_model(const TrainedModel& model, const std::string& path) {
  validate_model(model);
  write_file_atomic(path, model_to_json(model));
}

TrainedModel load_model(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataFormatError& e) {
    throw ModelFormatError(e.what());
  }
  return model_from_json(text);
}

}  // namespace geoprov::classify
