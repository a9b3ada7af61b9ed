// Serial reference vs OpenMP kernels: pairwise training, fold evaluation and
// batch IP lookup. Checks that both paths agree before reporting timings.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <random>

#include "geoprov/classifier.hpp"
#include "geoprov/evaluation.hpp"
#include "geoprov/ip_db.hpp"
#include "geoprov/resources.hpp"
#include "geoprov/synthetic.hpp"

using namespace geoprov;

namespace {

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

int mismatches = 0;

void report(const char* name, double serial, double parallel, bool agree) {
  mismatches += !agree;
  std::printf("%-22s serial %9.4f s   parallel %9.4f s   speedup %5.2fx   %s\n", name, serial, parallel,
              serial / parallel, agree ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel kernel timings"};
  size_t rows = 4000, classes = 12, lookups = 2'000'000, ranges = 100'000;
  int epochs = 200, reps = 3;
  app.add_option("--rows", rows, "Synthetic training rows");
  app.add_option("--classes", classes, "Synthetic classes (at most 12)")->check(CLI::Range(2, 12));
  app.add_option("--epochs", epochs, "Training epochs");
  app.add_option("--lookups", lookups, "IP addresses per batch");
  app.add_option("--ranges", ranges, "Random IP ranges");
  app.add_option("--reps", reps, "Repetitions, best time reported");
  CLI11_PARSE(app, argc, argv);

  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
  auto resources = Resources::load(default_resource_dir(), false);

  eval::SyntheticConfig sc;
  const char* pool[] = {"DE", "ES", "FR", "IT", "NL", "SK", "UA", "US", "PL", "RU", "CZ", "SE"};
  for (size_t i = 0; i < classes; ++i) sc.classes.push_back(CountryLabel::parse(pool[i]));
  sc.n = rows;
  auto data = eval::generate_synthetic(sc, resources.lang_to_country);

  classify::TrainConfig serial_cfg{{1e-3, epochs, 42}, "bench", false};
  classify::TrainConfig parallel_cfg = serial_cfg;
  parallel_cfg.parallel = true;
  classify::TrainedModel a, b;
  double ts = best_of(reps, [&] { a = classify::train(data, serial_cfg); });
  double tp = best_of(reps, [&] { b = classify::train(data, parallel_cfg); });
  report("pairwise training", ts, tp, a == b);

  eval::EvalConfig ecfg;
  ecfg.train.svm.epochs = epochs / 4;
  ecfg.parallel = false;
  eval::EvalReport ra, rb;
  ts = best_of(1, [&] { ra = eval::evaluate(data, resources.lang_to_country, ecfg); });
  ecfg.parallel = true;
  tp = best_of(1, [&] { rb = eval::evaluate(data, resources.lang_to_country, ecfg); });
  report("10-fold evaluation", ts, tp, ra == rb);

  std::mt19937_64 rng(1);
  std::vector<uint32_t> cuts;
  while (cuts.size() < 2 * ranges) {
    for (size_t i = cuts.size(); i < 2 * ranges; ++i) cuts.push_back(static_cast<uint32_t>(rng()));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  }
  std::vector<features::IpRange> table;
  for (size_t i = 0; i < ranges; ++i) table.push_back({cuts[2 * i], cuts[2 * i + 1], CountryLabel::parse(pool[i % 12])});
  auto db = features::IpRangeDb::from_ranges(std::move(table));
  std::vector<uint32_t> addresses(lookups);
  for (auto& x : addresses) x = static_cast<uint32_t>(rng());
  std::vector<CountryLabel> la, lb;
  ts = best_of(reps, [&] { la = db.lookup_batch_serial(addresses); });
  tp = best_of(reps, [&] { lb = db.lookup_batch(addresses); });
  report("batch ip lookup", ts, tp, la == lb);
  return mismatches ? 1 : 0;
}
