#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "geoprov/country.hpp"
#include "geoprov/dataset.hpp"
#include "geoprov/features.hpp"

namespace geoprov::classify {

enum class Slot : int { kIp = 0, kTld = 1, kLanguage = 2 };
inline constexpr int kSlotCount = 3;
const char* slot_name(Slot slot);

// Indices of the active columns of a binary feature vector.
using SparseRow = std::vector<uint32_t>;

// One-hot encoding of the three categorical slots. Columns are laid out slot
// by slot, values sorted within a slot; every slot owns an UNKNOWN column.
class FeatureEncoder {
 public:
  FeatureEncoder() = default;

  static FeatureEncoder build(std::span<const LabeledExample> examples);
  // Values per slot in column order. Throws ModelFormatError when a slot lacks
  // UNKNOWN or repeats a value.
  static FeatureEncoder from_values(std::array<std::vector<std::string>, kSlotCount> values);

  // Exactly one active column per slot; unseen values map to the slot's UNKNOWN.
  SparseRow encode(const features::FeatureVector& fv) const;

  uint32_t index(Slot slot, const std::string& value) const;
  bool contains(Slot slot, const std::string& value) const;
  uint32_t dimension() const { return dimension_; }
  const std::array<std::vector<std::string>, kSlotCount>& values() const { return values_; }
  std::map<std::pair<Slot, std::string>, uint32_t> vocabulary() const;

  friend bool operator==(const FeatureEncoder& a, const FeatureEncoder& b) { return a.values_ == b.values_; }

 private:
  std::array<std::vector<std::string>, kSlotCount> values_;
  std::array<std::map<std::string, uint32_t>, kSlotCount> lookup_;
  uint32_t dimension_ = 0;
};

struct SvmParams {
  double lambda = 1e-3;
  int epochs = 200;
  uint64_t seed = 42;
};

// Linear decision function w.x + b for the pair (class_a, class_b); positive
// values vote for class_a.
struct PairwiseSvm {
  CountryLabel class_a;
  CountryLabel class_b;
  std::vector<double> weights;
  double bias = 0;

  double decision(const SparseRow& x) const;

  friend bool operator==(const PairwiseSvm&, const PairwiseSvm&) = default;
};

// Pegasos stochastic subgradient training of a hinge-loss linear SVM. The
// bias is trained as the weight of an implicit constant column. `labels`
// holds +1 for class_a and -1 for class_b. Throws DegenerateClassPair when
// either class has no examples and InvalidArgument for lambda <= 0.
PairwiseSvm train_pairwise(std::span<const SparseRow> rows, std::span<const int> labels, uint32_t dimension,
                           const CountryLabel& class_a, const CountryLabel& class_b, const SvmParams& params);

struct TrainConfig {
  SvmParams svm;
  std::string edition = "general";
  // Pairs are independent and may be trained concurrently; the result is
  // identical either way.
  bool parallel = true;
};

struct ModelMetadata {
  uint64_t training_rows = 0;
  double lambda = 0;
  int epochs = 0;
  uint64_t seed = 0;
  std::string edition;

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

struct TrainedModel {
  FeatureEncoder encoder;
  std::vector<CountryLabel> classes;  // canonical (sorted) order
  std::vector<PairwiseSvm> pairs;     // (classes[i], classes[j]) for i < j, row-major
  ModelMetadata metadata;

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

// Per-pair seed derived from the model seed, so that pair training does not
// depend on scheduling.
uint64_t pair_seed(uint64_t seed, size_t i, size_t j);

// Throws InsufficientClasses when fewer than two labels are present.
TrainedModel train(std::span<const LabeledExample> dataset, const TrainConfig& config);

struct Prediction {
  CountryLabel label;
  std::map<CountryLabel, int> votes;
  std::map<CountryLabel, double> margins;
};

// One-vs-one vote. Ties go to the larger summed |decision| over the class's
// pairs, then to canonical class order.
Prediction predict(const TrainedModel& model, const features::FeatureVector& fv);

// Byte-stable JSON (version 1).
std::string model_to_json(const TrainedModel& model);
// Throws ModelFormatError on version mismatch, malformed JSON or an invariant
// violation.
TrainedModel model_from_json(std::string_view text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

// Throws ModelFormatError describing the first violated invariant.
void validate_model(const TrainedModel& model);

}  // namespace geoprov::classify
