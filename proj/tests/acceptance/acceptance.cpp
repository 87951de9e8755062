// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "zfprob/decode.hpp"
#include "zfprob/experiments.hpp"
#include "zfprob/linalg.hpp"
#include "zfprob/matrix_io.hpp"
#include "zfprob/probability.hpp"
#include "zfprob/reduction.hpp"

using namespace zfprob;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

bool near(double a, double b, double tolerance) { return std::abs(a - b) <= tolerance; }

Outcome gain_reproduction() {
  using namespace reference;
  const auto start = std::chrono::steady_clock::now();
  const DenseMatrix r = gain_2x2();
  const DenseMatrix r1 = size_reduce_entry(r, IntMatrix::identity(2), 0, 1).r;
  const DenseMatrix r2 = lll_reduce(r).r_bar;
  const double p0 = pzf_quadrature(r, kGainSigma).value;
  const double p1 = pzf_quadrature(r1, kGainSigma).value;
  const double p2 = pzf_quadrature(r2, kGainSigma).value;
  const double elapsed = seconds_since(start);
  const bool ok = near(p0, kGainOriginal, kTolerance) && near(p1, kGainSizeReduced, kTolerance) &&
                  near(p2, kGainLll, kTolerance) && elapsed < 5.0;
  return {ok, fmt("P_ZF %.6f %.6f %.6f in %.3fs", p0, p1, p2, elapsed)};
}

Outcome gain_closed_form() {
  using namespace reference;
  const DenseMatrix d{{std::sqrt(2.0), 0.0}, {0.0, 2.0 * std::sqrt(2.0)}};
  const double closed = pzf_diagonal(d, kGainSigma).value;
  const double product = std::erf(1.0) * std::erf(2.0);
  const double quad = pzf_quadrature(d, kGainSigma).value;
  const bool ok = near(closed, kGainLll, kTolerance) && near(closed, product, 1e-15) &&
                  near(closed, quad, 1e-6);
  return {ok, fmt("closed %.10f, erf(1)erf(2) %.10f, quad %.10f", closed, product, quad)};
}

Outcome residual_reproduction() {
  using namespace reference;
  const ILSInstance inst{residual_2x2(), residual_observation(), 1.0, std::nullopt};
  const ILSInstance reduced = reduce_instance(inst, lll_reduce(inst.r));
  const double before = zf_decode(inst).residual;
  const double after = zf_decode(reduced).residual;
  const bool ok = near(before, kResidualOriginal, kTolerance) &&
                  near(after, kResidualLll, kTolerance) && after > before;
  return {ok, fmt("residual %.6f -> %.6f", before, after)};
}

Outcome loss_reproduction() {
  using namespace reference;
  const DenseMatrix r = loss_3x3();
  const DenseMatrix r_bar = lll_reduce(r).r_bar;
  const ProbabilityEstimate p0 = pzf_quadrature(r, kLossSigma);
  const ProbabilityEstimate p1 = pzf_quadrature(r_bar, kLossSigma);
  bool ok = near(p0.value, kLossOriginal, kTolerance) && near(p1.value, kLossLll, kTolerance) &&
            p0.value - p1.value > p0.error_bound + p1.error_bound;

  const DenseMatrix big = embed_block(r, 4);
  const DenseMatrix big_bar = lll_reduce(big).r_bar;
  const ProbabilityEstimate b0 = pzf_block_product(big, 1, kLossSigma);
  const ProbabilityEstimate b1 = pzf_block_product(big_bar, 1, kLossSigma);
  const ProbabilityEstimate f0 = pzf_quadrature(big, kLossSigma);
  const ProbabilityEstimate f1 = pzf_quadrature(big_bar, kLossSigma);
  ok = ok && b0.value - b1.value > b0.error_bound + b1.error_bound &&
       f0.value - f1.value > f0.error_bound + f1.error_bound &&
       near(b0.value, f0.value, b0.error_bound + f0.error_bound) &&
       near(b1.value, f1.value, b1.error_bound + f1.error_bound);
  return {ok, fmt("n=3 %.6f -> %.6f; n=4 %.6f -> %.6f", p0.value, p1.value, f0.value, f1.value)};
}

Outcome permutation_suite() {
  ExperimentConfig cfg;
  cfg.command = "invariance";
  cfg.trials = 1000;
  cfg.seed = 20240601;
  const auto start = std::chrono::steady_clock::now();
  const ExperimentReport report = cmd_invariance(cfg);
  const double elapsed = seconds_since(start);
  const Verdict* failure = report.first_failure();
  return {failure == nullptr && report.cases.size() == 1000 && elapsed < 60.0,
          fmt("%zu instances in %.2fs, first failure: %s", report.cases.size(), elapsed,
              failure ? failure->name.c_str() : "none")};
}

Outcome size_reduction_suite() {
  CounterRng rng(RngSpec{777});
  const auto draw = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  std::size_t gain_failures = 0, lll_failures = 0;
  double smallest_gap = 1.0;
  for (int i = 0; i < 500; ++i) {
    const double r11 = draw(0.5, 2.0);
    const double r22 = draw(0.5, 2.0);
    const double ratio = draw(0.55, 3.5) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    const double sigma = draw(0.3, 1.0);
    const DenseMatrix r{{r11, ratio * r11}, {0.0, r22}};
    const DenseMatrix reduced = size_reduce_entry(r, IntMatrix::identity(2), 0, 1).r;
    const ProbabilityEstimate p0 = pzf_quadrature(r, sigma);
    const ProbabilityEstimate p1 = pzf_quadrature(reduced, sigma);
    const ProbabilityEstimate p2 = pzf_quadrature(lll_reduce(r).r_bar, sigma);
    const double gap = p1.value - p0.value;
    smallest_gap = std::min(smallest_gap, gap);
    gain_failures += !(gap > p0.error_bound + p1.error_bound);
    lll_failures += p2.value < p0.value - (p0.error_bound + p2.error_bound);
  }
  return {gain_failures == 0 && lll_failures == 0,
          fmt("500 instances, size-reduction failures %zu (min gap %.3g), LLL decreases %zu",
              gain_failures, smallest_gap, lll_failures)};
}

Outcome delta_monotonicity() {
  ExperimentConfig cfg;
  cfg.command = "sweep-delta";
  cfg.trials = 200;
  cfg.seed = 4242;
  cfg.delta_grid = std::vector<double>{0.3, 0.5, 0.75, 0.99, 1.0};
  const ExperimentReport report = cmd_sweep_delta(cfg);
  const auto violations = report.summary.at("monotone_violations").get<std::size_t>();
  return {report.passed() && report.cases.size() == 200 && violations == 0,
          fmt("200 instances, %zu violations", violations)};
}

Outcome method_agreement() {
  constexpr std::uint64_t kSamples = 100'000;
  const RngSpec root{9001};
  int mc_ok = 0, emp_ok = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const RngSpec spec = root.derive(i);
    const std::size_t n = 2 + i % 2;
    const DenseMatrix r = random_triangular(n, n, spec);
    const double sigma = 0.4 + 0.04 * static_cast<double>(i);
    const double exact = pzf_quadrature(r, sigma).value;
    const ProbabilityEstimate mc = pzf_monte_carlo(r, sigma, kSamples, spec.derive(1));
    const ProbabilityEstimate emp = pzf_empirical(r, sigma, kSamples, spec.derive(2));
    mc_ok += std::abs(mc.value - exact) <= 3.0 * mc.error_bound;
    emp_ok += std::abs(emp.value - exact) <= 3.0 * emp.error_bound;
  }
  return {mc_ok >= 19 && emp_ok >= 19, fmt("within 3 SE: mc %d/20, empirical %d/20", mc_ok, emp_ok)};
}

Outcome reduction_contracts() {
  const RngSpec root{31337};
  std::size_t failures = 0;
  std::size_t checked = 0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    const RngSpec spec = root.derive(i);
    const std::size_t n = 2 + i % 5;
    const std::size_t m = n + i % 3;
    const double delta = 0.3 + 0.7 * static_cast<double>(i % 8) / 7.0;
    GaussianStream stream(spec);
    const DenseMatrix a = gaussian_matrix(m, n, stream);
    const DenseMatrix r = qr_factorize(a).r;
    const double defect = orthogonality_defect(r);

    const ReductionResult lll = lll_reduce(r, {delta});
    failures += !audit_reduction(lll).ok() || !is_lll_reduced(lll.r_bar, delta).ok();
    for (const ReductionResult& perm : {sqrd(a), vblast(r)}) {
      failures += !audit_reduction(perm).ok() || !is_permutation(perm.z) ||
                  std::abs(orthogonality_defect(perm.r_bar) - defect) > 1e-9;
    }
    checked += 3;
  }
  return {failures == 0, fmt("%zu reductions over 500 instances, %zu failures", checked, failures)};
}

Outcome determinism() {
  const std::filesystem::path dir = std::filesystem::temp_directory_path();
  const std::filesystem::path matrix = dir / "zfprob_acceptance_matrix.csv";
  {
    std::ofstream out(matrix);
    out << format_matrix_csv(random_triangular(3, 3, RngSpec{5}));
  }
  std::size_t mismatches = 0;
  for (const char* method : {"mc", "empirical"}) {
    ExperimentConfig cfg;
    cfg.command = "pzf";
    cfg.matrix_path = matrix.string();
    cfg.sigma = 0.7;
    cfg.method = method;
    cfg.trials = 50'000;
    cfg.seed = 123456789;
    const ExperimentReport first = run_command(cfg);
    const std::string text = serialize_json(first);
    // Replay only from what the report itself records.
    const ExperimentReport replay = run_command(parse_report(text).config);
    mismatches += !(first == replay);
    mismatches += first.cases.at(0).data.dump() != replay.cases.at(0).data.dump();
  }
  {
    ExperimentConfig cfg;
    cfg.command = "ensemble";
    cfg.n = 5;
    cfg.trials = 3;
    cfg.sigma = 0.5;
    cfg.seed = 99;
    const ExperimentReport first = run_command(cfg);
    const ExperimentReport replay = run_command(parse_report(serialize_json(first)).config);
    mismatches += !(first == replay);
  }
  std::filesystem::remove(matrix);
  return {mismatches == 0, fmt("%zu replay mismatches", mismatches)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 lll gain 2x2 reproduction", gain_reproduction},
      {"2 lll gain 2x2 closed form", gain_closed_form},
      {"3 residual increase 2x2", residual_reproduction},
      {"4 lll loss 3x3 and n=4 embedding", loss_reproduction},
      {"5 permutation reductions leave ZF unchanged", permutation_suite},
      {"6 size reduction raises P_ZF for n=2", size_reduction_suite},
      {"7 P_ZF non-decreasing in delta", delta_monotonicity},
      {"8 monte carlo and empirical agree with quadrature", method_agreement},
      {"9 reduction contracts", reduction_contracts},
      {"10 seeded replay is bit-exact", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome{false, {}};
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome.detail = std::string("exception: ") + e.what();
    }
    failed += !outcome.passed;
    std::printf("%s  criterion %s: %s\n", outcome.passed ? "PASS" : "FAIL", name.c_str(),
                outcome.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
