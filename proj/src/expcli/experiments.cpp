#include "zfprob/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "zfprob/decode.hpp"
#include "zfprob/linalg.hpp"
#include "zfprob/matrix_io.hpp"
#include "zfprob/reduction.hpp"

namespace zfprob {

using nlohmann::json;

namespace {

const std::vector<double> kDefaultSigmaGrid{0.1, 0.5, 1.0};
const std::vector<double> kDefaultDeltaGrid{0.3, 0.5, 0.75, 0.99, 1.0};
constexpr std::uint64_t kDefaultSamples = 100'000;
constexpr std::uint64_t kEnsembleEmpiricalTrials = 20'000;
constexpr double kInvarianceTolerance = 1e-9;

json compare(double computed, double expected) {
  return json{{"computed", computed},
              {"expected", expected},
              {"abs_diff", std::abs(computed - expected)}};
}

bool within(double computed, double expected, double tolerance) {
  return std::abs(computed - expected) <= tolerance;
}

std::string describe(double computed, double expected) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "computed %.6f, expected %.4f", computed, expected);
  return buf;
}

DenseMatrix require_matrix(const ExperimentConfig& config) {
  if (!config.matrix_path) throw Error(Errc::InvalidArgument, "--matrix is required");
  return load_matrix_csv(*config.matrix_path);
}

double require_sigma(const ExperimentConfig& config) {
  if (!config.sigma) throw Error(Errc::InvalidArgument, "--sigma is required");
  return *config.sigma;
}

double sigma_for_case(const ExperimentConfig& config, std::size_t index) {
  return config.sigma.value_or(kDefaultSigmaGrid[index % kDefaultSigmaGrid.size()]);
}

// Runs fn(i) for every case. With workers > 1 the cases are spread over
// threads; results land at their index, so the merge order never changes.
template <typename Fn>
std::vector<CaseRecord> run_cases(std::size_t count, unsigned workers, Fn fn) {
  std::vector<CaseRecord> out(count);
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const std::size_t threads = std::min<std::size_t>(workers, count);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

json audit_json(const ReductionAudit& audit) {
  return json{{"det_z", audit.det_z},
              {"reconstruction_error", audit.reconstruction_error},
              {"determinant_error", audit.determinant_error},
              {"orthogonality_error", audit.orthogonality_error},
              {"ok", audit.ok()}};
}

json reduction_json(const ReductionResult& red) {
  return json{{"r_bar", to_json(red.r_bar)},
              {"z", to_json(red.z)},
              {"stats", to_json(red.stats)},
              {"audit", audit_json(audit_reduction(red))}};
}

ProbabilityEstimate estimate_with(const DenseMatrix& r, double sigma, Method method,
                                  std::uint64_t samples, const RngSpec& rng) {
  switch (method) {
    case Method::Diagonal: return pzf_diagonal(r, sigma);
    case Method::Quadrature: return pzf_quadrature(r, sigma);
    case Method::MonteCarlo: return pzf_monte_carlo(r, sigma, samples, rng);
    case Method::Empirical: return pzf_empirical(r, sigma, samples, rng);
  }
  throw Error(Errc::InvalidArgument, "unknown method");
}

// Case builders for the reference instances.

void reproduce_gain(const LLLParams& params, ExperimentReport& report) {
  using namespace reference;
  const DenseMatrix r = gain_2x2();
  const DenseMatrix size_reduced =
      size_reduce_entry(r, IntMatrix::identity(2), 0, 1).r;
  const ReductionResult lll = lll_reduce(r, params);

  const ProbabilityEstimate p0 = pzf_quadrature(r, kGainSigma);
  const ProbabilityEstimate p1 = pzf_quadrature(size_reduced, kGainSigma);
  const ProbabilityEstimate p2 = pzf_quadrature(lll.r_bar, kGainSigma);
  const ProbabilityEstimate closed = pzf_diagonal(lll.r_bar, kGainSigma);

  report.cases.push_back(
      {"lll_gain_2x2",
       json{{"sigma", kGainSigma},
            {"r", to_json(r)},
            {"r_size_reduced", to_json(size_reduced)},
            {"lll", reduction_json(lll)},
            {"pzf_original", compare(p0.value, kGainOriginal)},
            {"pzf_size_reduced", compare(p1.value, kGainSizeReduced)},
            {"pzf_lll", compare(p2.value, kGainLll)},
            {"pzf_lll_closed_form", to_json(closed)}}});

  report.add_verdict("lll_gain_2x2.pzf_original", within(p0.value, kGainOriginal, kTolerance),
                     describe(p0.value, kGainOriginal));
  report.add_verdict("lll_gain_2x2.pzf_size_reduced",
                     within(p1.value, kGainSizeReduced, kTolerance),
                     describe(p1.value, kGainSizeReduced));
  report.add_verdict("lll_gain_2x2.pzf_lll", within(p2.value, kGainLll, kTolerance),
                     describe(p2.value, kGainLll));
  report.add_verdict("lll_gain_2x2.closed_form_matches_quadrature",
                     std::abs(closed.value - p2.value) <= 1e-6);
  report.add_verdict("lll_gain_2x2.each_step_improves",
                     p1.value - p0.value > p0.error_bound + p1.error_bound &&
                         p2.value - p1.value > p1.error_bound + p2.error_bound);
}

void reproduce_residual(const LLLParams& params, ExperimentReport& report) {
  using namespace reference;
  const ILSInstance inst{residual_2x2(), residual_observation(), 1.0, std::nullopt};
  const ReductionResult lll = lll_reduce(inst.r, params);
  const ILSInstance reduced = reduce_instance(inst, lll);
  const DecodeResult before = zf_decode(inst);
  const DecodeResult after = zf_decode(reduced);

  report.cases.push_back(
      {"residual_increase_2x2",
       json{{"r", to_json(inst.r)},
            {"y_tilde", inst.y_tilde},
            {"lll", reduction_json(lll)},
            {"y_bar", reduced.y_tilde},
            {"zf_original", to_json(before)},
            {"zf_lll", to_json(after)},
            {"zf_lll_lifted", lift_estimate(lll.z, after.estimate)},
            {"residual_original", compare(before.residual, kResidualOriginal)},
            {"residual_lll", compare(after.residual, kResidualLll)}}});

  report.add_verdict("residual_increase_2x2.residual_original",
                     within(before.residual, kResidualOriginal, kTolerance),
                     describe(before.residual, kResidualOriginal));
  report.add_verdict("residual_increase_2x2.residual_lll",
                     within(after.residual, kResidualLll, kTolerance),
                     describe(after.residual, kResidualLll));
  report.add_verdict("residual_increase_2x2.lll_increased_residual",
                     after.residual > before.residual);
}

void reproduce_loss(const LLLParams& params, ExperimentReport& report) {
  using namespace reference;
  const DenseMatrix r = loss_3x3();
  const ReductionResult lll = lll_reduce(r, params);
  const ProbabilityEstimate p0 = pzf_quadrature(r, kLossSigma);
  const ProbabilityEstimate p1 = pzf_quadrature(lll.r_bar, kLossSigma);

  report.cases.push_back({"lll_loss_3x3",
                          json{{"sigma", kLossSigma},
                               {"r", to_json(r)},
                               {"lll", reduction_json(lll)},
                               {"pzf_original", compare(p0.value, kLossOriginal)},
                               {"pzf_lll", compare(p1.value, kLossLll)}}});
  report.add_verdict("lll_loss_3x3.pzf_original", within(p0.value, kLossOriginal, kTolerance),
                     describe(p0.value, kLossOriginal));
  report.add_verdict("lll_loss_3x3.pzf_lll", within(p1.value, kLossLll, kTolerance),
                     describe(p1.value, kLossLll));
  report.add_verdict("lll_loss_3x3.lll_decreased_pzf",
                     p0.value - p1.value > p0.error_bound + p1.error_bound);

  for (const std::size_t n : {std::size_t{4}, std::size_t{5}}) {
    const DenseMatrix big = embed_block(r, n);
    const ReductionResult big_lll = lll_reduce(big, params);
    const double block_gap = frobenius_distance(big_lll.r_bar, embed_block(lll.r_bar, n));
    const std::size_t split = n - 3;
    const ProbabilityEstimate q0 = pzf_block_product(big, split, kLossSigma);
    const ProbabilityEstimate q1 = pzf_block_product(big_lll.r_bar, split, kLossSigma);

    json data{{"n", n},
              {"lll_stats", to_json(big_lll.stats)},
              {"reduced_block_distance", block_gap},
              {"pzf_original_block_product", to_json(q0)},
              {"pzf_lll_block_product", to_json(q1)}};
    bool decreased = q0.value - q1.value > q0.error_bound + q1.error_bound;
    if (n <= tol::kMaxQuadratureDimension) {
      const ProbabilityEstimate f0 = pzf_quadrature(big, kLossSigma);
      const ProbabilityEstimate f1 = pzf_quadrature(big_lll.r_bar, kLossSigma);
      data["pzf_original_full"] = to_json(f0);
      data["pzf_lll_full"] = to_json(f1);
      decreased = decreased && f0.value - f1.value > f0.error_bound + f1.error_bound;
      report.add_verdict("lll_loss_embedded_n" + std::to_string(n) + ".block_product",
                         std::abs(f0.value - q0.value) <= f0.error_bound + q0.error_bound &&
                             std::abs(f1.value - q1.value) <= f1.error_bound + q1.error_bound);
    }
    report.cases.push_back({"lll_loss_embedded_n" + std::to_string(n), std::move(data)});
    report.add_verdict("lll_loss_embedded_n" + std::to_string(n) + ".block_structure_kept",
                       block_gap <= 1e-12);
    report.add_verdict("lll_loss_embedded_n" + std::to_string(n) + ".lll_decreased_pzf",
                       decreased);
  }
}

void reproduce_delta_independence(ExperimentReport& report) {
  using namespace reference;
  double worst = 0.0;
  for (const DenseMatrix& r : {gain_2x2(), residual_2x2(), loss_3x3()}) {
    const DenseMatrix base = lll_reduce(r, {0.75}).r_bar;
    for (const double delta : {0.3, 1.0}) {
      worst = std::max(worst, frobenius_distance(base, lll_reduce(r, {delta}).r_bar));
    }
  }
  report.summary["reference_delta_independence_max_distance"] = worst;
  report.add_verdict("reference.delta_independent", worst <= 1e-12,
                     "LLL outputs agree for delta in {0.3, 0.75, 1.0}");
}

}  // namespace

DenseMatrix embed_block(const DenseMatrix& block, std::size_t n) {
  const std::size_t k = block.rows();
  if (!block.is_square() || n < k) {
    throw Error(Errc::DimensionMismatch, "cannot embed block into smaller matrix");
  }
  DenseMatrix out = DenseMatrix::identity(n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) out(n - k + i, n - k + j) = block(i, j);
  return out;
}

ProbabilityEstimate pzf_block_product(const DenseMatrix& r, std::size_t split, double sigma,
                                      double target_abs_error) {
  const std::size_t n = r.rows();
  if (!is_upper_triangular(r) || split == 0 || split >= n) {
    throw Error(Errc::InvalidArgument, "block split outside the matrix");
  }
  for (std::size_t i = 0; i < split; ++i)
    for (std::size_t j = split; j < n; ++j)
      if (std::abs(r(i, j)) > 1e-12) {
        throw Error(Errc::InvalidArgument, "matrix is not block diagonal at the split");
      }
  DenseMatrix lead(split, split);
  for (std::size_t i = 0; i < split; ++i)
    for (std::size_t j = 0; j < split; ++j) lead(i, j) = r(i, j);
  DenseMatrix trail(n - split, n - split);
  for (std::size_t i = split; i < n; ++i)
    for (std::size_t j = split; j < n; ++j) trail(i - split, j - split) = r(i, j);

  const ProbabilityEstimate a = pzf_diagonal(lead, sigma);
  const ProbabilityEstimate b = pzf_quadrature(trail, sigma, target_abs_error);
  return {a.value * b.value, Method::Quadrature, a.error_bound + b.error_bound,
          a.evaluations + b.evaluations, std::nullopt};
}

DenseMatrix random_triangular(std::size_t m, std::size_t n, const RngSpec& spec) {
  GaussianStream stream(spec);
  return qr_factorize(gaussian_matrix(m, n, stream)).r;
}

ExperimentReport cmd_reproduce(const ExperimentConfig& config) {
  ExperimentReport report;
  report.config = config;
  report.config.command = "reproduce";
  const LLLParams params{config.delta};
  reproduce_gain(params, report);
  reproduce_residual(params, report);
  reproduce_loss(params, report);
  reproduce_delta_independence(report);
  return report;
}

ExperimentReport cmd_reduce(const ExperimentConfig& config) {
  ExperimentReport report;
  report.config = config;
  const DenseMatrix a = require_matrix(config);
  const DenseMatrix r = qr_factorize(a).r;
  const double defect_before = orthogonality_defect(r);
  report.summary = json{{"m", a.rows()},
                        {"n", a.cols()},
                        {"digest", matrix_digest(a)},
                        {"r", to_json(r)},
                        {"orthogonality_defect", defect_before}};

  const ReductionResult lll = lll_reduce(r, {config.delta});
  const LLLCheck check = is_lll_reduced(lll.r_bar, config.delta);
  json lll_data = reduction_json(lll);
  lll_data["q_bar"] = to_json(lll.q_bar);
  lll_data["size_reduced"] = check.size_ok;
  lll_data["lovasz"] = check.lovasz_ok;
  lll_data["orthogonality_defect_before"] = defect_before;
  lll_data["orthogonality_defect_after"] = orthogonality_defect(lll.r_bar);
  report.cases.push_back({"lll", std::move(lll_data)});
  report.add_verdict("lll.reduction_contract", audit_reduction(lll).ok());
  report.add_verdict("lll.output_is_lll_reduced", check.ok());

  const auto permutation_case = [&](const std::string& label, const ReductionResult& red) {
    const double defect_after = orthogonality_defect(red.r_bar);
    json data = reduction_json(red);
    data["q_bar"] = to_json(red.q_bar);
    data["orthogonality_defect_before"] = defect_before;
    data["orthogonality_defect_after"] = defect_after;
    report.cases.push_back({label, std::move(data)});
    report.add_verdict(label + ".reduction_contract", audit_reduction(red).ok());
    report.add_verdict(label + ".is_permutation", is_permutation(red.z));
    report.add_verdict(label + ".defect_preserved",
                       std::abs(defect_after - defect_before) <= kInvarianceTolerance);
  };
  permutation_case("sqrd", sqrd(a));
  permutation_case("vblast", vblast(r));
  return report;
}

ExperimentReport cmd_decode(const ExperimentConfig& config) {
  ExperimentReport report;
  report.config = config;
  const DenseMatrix a = require_matrix(config);
  if (!config.y_path) throw Error(Errc::InvalidArgument, "--y is required");
  const RealVector y = load_vector_csv(*config.y_path);
  if (y.size() != a.rows()) {
    throw Error(Errc::DimensionMismatch, "observation length differs from matrix rows");
  }
  const QRFactorization qr = qr_factorize(a);
  const ILSInstance inst{qr.r, multiply(transpose(qr.q1), y), config.sigma.value_or(1.0),
                         std::nullopt};

  const DecodeResult zf = zf_decode(inst);
  const DecodeResult sic = sic_decode(inst);
  json original{{"r", to_json(inst.r)},
                {"y_tilde", inst.y_tilde},
                {"zf", to_json(zf)},
                {"sic", to_json(sic)}};
  if (inst.r.rows() <= tol::kMaxBruteForceDimension) {
    const DecodeResult best = ils_brute_force(inst, tol::kDefaultBoxRadius);
    original["brute_force"] = to_json(best);
    report.add_verdict("decode.brute_force_bounds_zf", best.residual <= zf.residual);
    report.add_verdict("decode.brute_force_bounds_sic", best.residual <= sic.residual);
  }
  report.cases.push_back({"original", std::move(original)});

  const ReductionResult lll = lll_reduce(inst.r, {config.delta});
  const ILSInstance reduced = reduce_instance(inst, lll);
  const DecodeResult zf_red = zf_decode(reduced);
  const DecodeResult sic_red = sic_decode(reduced);
  const IntVector zf_lifted = lift_estimate(lll.z, zf_red.estimate);
  const IntVector sic_lifted = lift_estimate(lll.z, sic_red.estimate);
  report.cases.push_back({"lll",
                          json{{"reduction", reduction_json(lll)},
                               {"y_bar", reduced.y_tilde},
                               {"zf", to_json(zf_red)},
                               {"sic", to_json(sic_red)},
                               {"zf_lifted", zf_lifted},
                               {"sic_lifted", sic_lifted}}});
  const double lifted_residual = residual_norm(inst.r, inst.y_tilde, zf_lifted);
  report.add_verdict("decode.lifted_residual_consistent",
                     std::abs(lifted_residual - zf_red.residual) <= kInvarianceTolerance);
  return report;
}

ExperimentReport cmd_pzf(const ExperimentConfig& config) {
  ExperimentReport report;
  report.config = config;
  const DenseMatrix a = require_matrix(config);
  const double sigma = require_sigma(config);
  const DenseMatrix r = qr_factorize(a).r;
  const Method method = method_from_string(config.method);
  if (method == Method::Quadrature && r.rows() > tol::kMaxQuadratureDimension) {
    throw Error(Errc::DimensionTooLarge, "quad supports n <= 4; use mc or empirical");
  }
  const ProbabilityEstimate estimate = estimate_with(
      r, sigma, method, config.trials.value_or(kDefaultSamples), RngSpec{config.seed});
  report.cases.push_back({"pzf",
                          json{{"digest", matrix_digest(a)},
                               {"n", r.rows()},
                               {"sigma", sigma},
                               {"estimate", to_json(estimate)}}});
  report.add_verdict("pzf.in_unit_interval", estimate.value >= 0.0 && estimate.value <= 1.0);
  return report;
}

ExperimentReport cmd_sweep_delta(const ExperimentConfig& config) {
  ExperimentReport report;
  report.config = config;
  const std::vector<double> grid = config.delta_grid.value_or(kDefaultDeltaGrid);
  if (grid.empty()) throw Error(Errc::InvalidGrid, "empty delta grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.25 && grid[i] <= 1.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw Error(Errc::InvalidGrid, "delta grid must increase strictly within (0.25, 1]");
    }
  }

  std::vector<DenseMatrix> instances;
  if (config.matrix_path) {
    instances.push_back(qr_factorize(load_matrix_csv(*config.matrix_path)).r);
  } else {
    const std::size_t count = config.trials.value_or(200);
    const RngSpec root{config.seed};
    for (std::size_t i = 0; i < count; ++i) {
      instances.push_back(random_triangular(2, 2, root.derive(i)));
    }
  }
  for (const auto& r : instances) {
    if (r.rows() != 2) throw Error(Errc::DimensionMismatch, "delta sweep needs n = 2");
  }

  report.cases = run_cases(instances.size(), config.parallel, [&](std::size_t i) {
    const DenseMatrix& r = instances[i];
    const double sigma = sigma_for_case(config, i);
    json table = json::array();
    std::vector<ProbabilityEstimate> estimates;
    for (const double delta : grid) {
      const ReductionResult lll = lll_reduce(r, {delta});
      estimates.push_back(pzf_quadrature(lll.r_bar, sigma));
      table.push_back(json{{"delta", delta},
                           {"stats", to_json(lll.stats)},
                           {"pzf", to_json(estimates.back())}});
    }
    bool monotone = true;
    for (std::size_t k = 1; k < estimates.size(); ++k) {
      monotone = monotone && estimates[k].value >= estimates[k - 1].value -
                                                       estimates[k].error_bound -
                                                       estimates[k - 1].error_bound;
    }
    return CaseRecord{"instance_" + std::to_string(i),
                      json{{"r", to_json(r)},
                           {"sigma", sigma},
                           {"per_delta", std::move(table)},
                           {"monotone", monotone}}};
  });

  std::size_t violations = 0;
  for (const auto& c : report.cases) violations += !c.data.at("monotone").get<bool>();
  report.summary = json{{"instances", report.cases.size()},
                        {"grid", grid},
                        {"monotone_violations", violations}};
  report.add_verdict("delta_sweep.pzf_monotone_in_delta", violations == 0,
                     std::to_string(violations) + " violations");
  return report;
}

ExperimentReport cmd_invariance(const ExperimentConfig& config) {
  ExperimentReport report;
  report.config = config;
  const std::size_t count = config.trials.value_or(1000);
  const RngSpec root{config.seed};

  report.cases = run_cases(count, config.parallel, [&](std::size_t i) {
    const RngSpec spec = root.derive(i);
    const std::size_t n = config.n.value_or(2 + i % 2);
    const std::size_t m = config.m.value_or(n);
    const double sigma = sigma_for_case(config, i);

    GaussianStream stream(spec);
    const DenseMatrix a = gaussian_matrix(m, n, stream);
    IntVector x_true(n);
    for (auto& x : x_true) x = round_nearest(2.0 * stream.next());
    RealVector y = multiply(a, std::span<const std::int64_t>(x_true));
    for (auto& v : y) v += sigma * stream.next();

    const QRFactorization qr = qr_factorize(a);
    const ILSInstance inst{qr.r, multiply(transpose(qr.q1), y), sigma, x_true};
    const DecodeResult zf = zf_decode(inst);
    const double defect = orthogonality_defect(inst.r);
    const bool quad = n <= tol::kMaxQuadratureDimension;
    const ProbabilityEstimate p = quad ? pzf_quadrature(inst.r, sigma) : ProbabilityEstimate{};

    json data{{"n", n}, {"m", m}, {"sigma", sigma}, {"digest", matrix_digest(a)}};
    for (const auto& [label, red] :
         {std::pair{"sqrd", sqrd(a)}, std::pair{"vblast", vblast(inst.r)}}) {
      const ILSInstance reduced = reduce_instance(inst, red);
      const DecodeResult zf_red = zf_decode(reduced);
      const IntVector mapped = multiply(unimodular_inverse(red.z), zf.estimate);
      json entry{{"zf_identity", mapped == zf_red.estimate},
                 {"residual_delta", std::abs(zf_red.residual - zf.residual)},
                 {"defect_delta", std::abs(orthogonality_defect(red.r_bar) - defect)}};
      if (quad) {
        const ProbabilityEstimate p_red = pzf_quadrature(red.r_bar, sigma);
        entry["pzf_delta"] = std::abs(p_red.value - p.value);
        entry["pzf_bound"] = p.error_bound + p_red.error_bound;
      }
      data[label] = std::move(entry);
    }
    return CaseRecord{"instance_" + std::to_string(i), std::move(data)};
  });

  std::size_t identity_fail = 0, residual_fail = 0, defect_fail = 0, pzf_fail = 0;
  double worst_residual = 0.0, worst_defect = 0.0;
  for (const auto& c : report.cases) {
    for (const char* label : {"sqrd", "vblast"}) {
      const json& e = c.data.at(label);
      identity_fail += !e.at("zf_identity").get<bool>();
      const double rd = e.at("residual_delta").get<double>();
      const double dd = e.at("defect_delta").get<double>();
      worst_residual = std::max(worst_residual, rd);
      worst_defect = std::max(worst_defect, dd);
      residual_fail += rd > kInvarianceTolerance;
      defect_fail += dd > kInvarianceTolerance;
      if (e.contains("pzf_delta")) {
        pzf_fail += e.at("pzf_delta").get<double>() > e.at("pzf_bound").get<double>();
      }
    }
  }
  const auto rate = [count](std::size_t fails) {
    return count == 0 ? 1.0 : 1.0 - static_cast<double>(fails) / (2.0 * count);
  };
  report.summary = json{{"instances", count},
                        {"zf_identity_pass_rate", rate(identity_fail)},
                        {"residual_pass_rate", rate(residual_fail)},
                        {"defect_pass_rate", rate(defect_fail)},
                        {"pzf_pass_rate", rate(pzf_fail)},
                        {"max_residual_delta", worst_residual},
                        {"max_defect_delta", worst_defect}};
  report.add_verdict("permutation.zf_identity", identity_fail == 0,
                     std::to_string(identity_fail) + " failures");
  report.add_verdict("permutation.residual_invariant", residual_fail == 0,
                     std::to_string(residual_fail) + " failures");
  report.add_verdict("permutation.defect_invariant", defect_fail == 0,
                     std::to_string(defect_fail) + " failures");
  report.add_verdict("permutation.pzf_invariant", pzf_fail == 0,
                     std::to_string(pzf_fail) + " failures");
  return report;
}

ExperimentReport cmd_ensemble(const ExperimentConfig& config) {
  ExperimentReport report;
  report.config = config;
  const std::size_t n = config.n.value_or(2);
  const std::size_t m = config.m.value_or(n);
  const std::size_t count = config.trials.value_or(100);
  const std::vector<double> sigmas =
      config.sigma ? std::vector<double>{*config.sigma} : kDefaultSigmaGrid;
  const bool quad = n <= tol::kMaxQuadratureDimension;
  const RngSpec root{config.seed};

  const std::size_t total = count * sigmas.size();
  report.cases = run_cases(total, config.parallel, [&](std::size_t idx) {
    const std::size_t s = idx / std::max<std::size_t>(count, 1);
    const double sigma = sigmas[s];
    const RngSpec spec = root.derive(idx);
    const DenseMatrix r = random_triangular(m, n, spec);
    const ReductionResult lll = lll_reduce(r, {config.delta});
    const ProbabilityEstimate before =
        quad ? pzf_quadrature(r, sigma)
             : pzf_empirical(r, sigma, kEnsembleEmpiricalTrials, spec.derive(1));
    const ProbabilityEstimate after =
        quad ? pzf_quadrature(lll.r_bar, sigma)
             : pzf_empirical(lll.r_bar, sigma, kEnsembleEmpiricalTrials, spec.derive(2));
    // Empirical estimates are compared at three combined standard errors.
    const double band = (quad ? 1.0 : 3.0) * (before.error_bound + after.error_bound);
    const double change = after.value - before.value;
    const char* outcome = change > band ? "increased" : (change < -band ? "decreased" : "unchanged");
    return CaseRecord{"sigma_" + std::to_string(s) + "_instance_" + std::to_string(idx % count),
                      json{{"sigma", sigma},
                           {"seed", spec.seed},
                           {"stats", to_json(lll.stats)},
                           {"pzf_before", to_json(before)},
                           {"pzf_after", to_json(after)},
                           {"outcome", outcome}}};
  });

  json per_sigma = json::array();
  std::size_t total_decreased = 0;
  for (std::size_t s = 0; s < sigmas.size() && count > 0; ++s) {
    std::size_t inc = 0, same = 0, dec = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const std::string outcome = report.cases[s * count + i].data.at("outcome");
      inc += outcome == "increased";
      same += outcome == "unchanged";
      dec += outcome == "decreased";
    }
    total_decreased += dec;
    const double c = static_cast<double>(count);
    per_sigma.push_back(json{{"sigma", sigmas[s]},
                             {"increased", inc / c},
                             {"unchanged", same / c},
                             {"decreased", dec / c}});
  }
  report.summary = json{{"n", n},
                        {"m", m},
                        {"instances_per_sigma", count},
                        {"method", quad ? "quad" : "empirical"},
                        {"fractions", std::move(per_sigma)}};
  if (n == 2 && quad) {
    report.add_verdict("ensemble.lll_never_decreases_pzf_n2", total_decreased == 0,
                       std::to_string(total_decreased) + " decreases");
  }
  return report;
}

ExperimentReport run_command(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  if (config.command == "reproduce") {
    report = cmd_reproduce(config);
  } else if (config.command == "reduce") {
    report = cmd_reduce(config);
  } else if (config.command == "decode") {
    report = cmd_decode(config);
  } else if (config.command == "pzf") {
    report = cmd_pzf(config);
  } else if (config.command == "sweep-delta") {
    report = cmd_sweep_delta(config);
  } else if (config.command == "invariance") {
    report = cmd_invariance(config);
  } else if (config.command == "ensemble") {
    report = cmd_ensemble(config);
  } else {
    throw Error(Errc::InvalidArgument, "unknown command '" + config.command + "'");
  }
  report.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_report(const ExperimentReport& report) {
  const std::string text = report.config.out_format == "csv" ? serialize_csv(report)
                                                              : serialize_json(report);
  if (!report.config.out_path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*report.config.out_path);
  if (!out) throw Error(Errc::FileNotFound, "cannot write " + *report.config.out_path);
  out << text;
}

}  // namespace zfprob
