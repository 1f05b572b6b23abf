#include <benchmark/benchmark.h>

#include "hqkd/attacks.hpp"
#include "hqkd/infotheory.hpp"
#include "hqkd/optics.hpp"
#include "hqkd/protocol.hpp"

namespace {

using namespace hqkd;

void BM_ExactEveStats(benchmark::State& state) {
  const auto basis = LetterBasis::two_zero_two();
  const auto attack = state.range(0) == 0 ? ancilla_swap() : intercept_resend(LocalBasisSpec{30, 0}, LocalBasisSpec{60, 0});
  for (auto _ : state) benchmark::DoNotOptimize(exact_eve_stats(basis, attack));
}
BENCHMARK(BM_ExactEveStats)->Arg(0)->Arg(1)->ArgNames({"intercept"});

void BM_RunProtocol(benchmark::State& state) {
  ProtocolConfig cfg;
  cfg.steps = static_cast<std::uint64_t>(state.range(0));
  cfg.attack = ancilla_swap();
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunProtocol)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_AnalyzerDistribution(benchmark::State& state) {
  const auto rho = DensityMatrix::maximally_mixed(4);
  for (auto _ : state) benchmark::DoNotOptimize(analyzer_distribution(rho));
}
BENCHMARK(BM_AnalyzerDistribution);

void BM_SampleClick(benchmark::State& state) {
  const auto basis = LetterBasis::two_zero_two();
  const auto dist = click_distribution(apply_mode_transform(encode_letter(1, basis), analyzer_transform()));
  auto rng = Rng::derive(1, StreamId::analyzer_check);
  for (auto _ : state) benchmark::DoNotOptimize(sample_click(dist, rng));
}
BENCHMARK(BM_SampleClick);

void BM_HolevoChi(benchmark::State& state) {
  const auto b = LetterBasis::two_zero_two();
  std::vector<DensityMatrix> reduced;
  for (std::size_t i = 0; i < 4; ++i) reduced.push_back(reduced_density(b.state(i), std::vector<int>{0}));
  const EnsembleSpec e{reduced, Distribution::uniform(4)};
  for (auto _ : state) benchmark::DoNotOptimize(holevo_chi(e));
}
BENCHMARK(BM_HolevoChi);

}  // namespace

BENCHMARK_MAIN();
