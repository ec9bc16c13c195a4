// Serial vs OpenMP assembly of the two hot integrals: the L^2 Gram of the
// Bergman endomorphism and the moment-map integral on PE*.

#include "klab/balancing.hpp"
#include "klab/bergman.hpp"

#include <benchmark/benchmark.h>

#include <memory>

namespace {

void bm_bergman_gram(benchmark::State& state, klab::Exec exec) {
  klab::BergmanProblem bp = klab::standard_problem(klab::ModelSpace::line_bundle_sum_over_p1({0, 1}, 0));
  bp.exec = exec;
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    klab::BergmanEndomorphism b(bp, k);
    benchmark::DoNotOptimize(b.gram().data());
  }
}

void bm_state_integrals(benchmark::State& state, klab::Exec exec) {
  klab::BalancingSetup s;
  s.model = klab::ModelSpace::trivial_bundle_over_pm(1, 2, static_cast<int>(state.range(0)));
  const auto geo = std::make_shared<const klab::EmbeddingGeometry>(s);
  const klab::EmbeddingState es(geo, klab::CMat::Identity(geo->dimension(), geo->dimension()));
  for (auto _ : state) {
    auto si = klab::state_integrals(es, exec);
    benchmark::DoNotOptimize(si.k_t.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(bm_bergman_gram, serial, klab::Exec::serial)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_bergman_gram, parallel, klab::Exec::parallel)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_state_integrals, serial, klab::Exec::serial)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_state_integrals, parallel, klab::Exec::parallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
