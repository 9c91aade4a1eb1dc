#include "clf/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace clf {

void SpectrumBounds::validate() const {
  if (!(lambda_min_bar > 0.0) || !(lambda_max_bar > lambda_min_bar))
    throw DomainError("spectrum bounds must satisfy 0 < lambda_min < lambda_max");
}

void StabilizerDiagonal::validate() const {
  for (size_t i = 0; i < d.size(); ++i) {
    if (!(std::abs(d[i]) > 0.0))
      throw DomainError("stabilizer diagonal entry " + std::to_string(i) +
                        " is zero; D must be invertible");
  }
}

void GAParams::validate() const {
  if (population_size < 4) throw DomainError("population must be at least 4");
  if (generations < 1) throw DomainError("generation budget must be positive");
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate_ok(crossover_rate) || !rate_ok(mutation_rate))
    throw DomainError("crossover/mutation rates must lie in [0,1]");
  if (mutation_sigma < 0.0) throw DomainError("mutation sigma must be nonnegative");
  if (tournament_size < 1) throw DomainError("tournament size must be positive");
  if (elitism_count < 0 || elitism_count >= population_size)
    throw DomainError("elitism count must be in [0, population)");
  if (stability_penalty_weight < 0.0)
    throw DomainError("penalty weight must be nonnegative");
}

std::pair<double, double> spectrum_objectives(const Spectrum& spec,
                                              const SpectrumBounds& bounds) {
  bounds.validate();
  double min_re = std::numeric_limits<double>::infinity();
  double max_re = -std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(spec.eigenvalues.size());
  for (int i = 0; i < n; ++i) {
    if (spec.is_structural_zero(i)) continue;
    min_re = std::min(min_re, spec.eigenvalues[i].real());
    max_re = std::max(max_re, spec.eigenvalues[i].real());
  }
  if (!std::isfinite(min_re))
    throw DomainError("spectrum has no nonzero eigenvalues");
  const double target = bounds.lambda_min_bar + bounds.lambda_max_bar;
  return {std::abs(2.0 * min_re - target), std::abs(2.0 * max_re - target)};
}

double fitness_from_spectrum(const Spectrum& spec, const SpectrumBounds& bounds,
                             double penalty_weight) {
  if (spec.zero_count != 2) return std::numeric_limits<double>::infinity();
  const auto [tau, sigma] = spectrum_objectives(spec, bounds);
  double penalty = 0.0;
  const int n = static_cast<int>(spec.eigenvalues.size());
  for (int i = 0; i < n; ++i) {
    if (spec.is_structural_zero(i)) continue;
    penalty += std::max(0.0, kStabilityMargin - spec.eigenvalues[i].real());
  }
  return tau + sigma + penalty_weight * penalty;
}

double fitness(const StabilizerDiagonal& d, const ComplexLaplacian& l,
               const SpectrumBounds& bounds, double penalty_weight) {
  if (static_cast<int>(d.d.size()) != l.matrix.rows())
    throw DomainError("diagonal length does not match the Laplacian dimension");
  const ComplexMatrix dl = l.matrix.scale_rows(d.d);
  return fitness_from_spectrum(eigenvalues(dl), bounds, penalty_weight);
}

namespace {

using Genome = std::vector<double>;

StabilizerDiagonal decode(const Genome& g) {
  StabilizerDiagonal d;
  d.d.resize(g.size() / 2);
  for (size_t i = 0; i < d.d.size(); ++i) d.d[i] = cplx(g[2 * i], g[2 * i + 1]);
  return d;
}

double genome_fitness(const Genome& g, const ComplexLaplacian& l,
                      const SpectrumBounds& bounds, double penalty_weight) {
  const ComplexMatrix dl = l.matrix.scale_rows(decode(g).d);
  return fitness_from_spectrum(eigenvalues(dl), bounds, penalty_weight);
}

// Evaluates fitness for every genome; pure per genome, so chunked threads
// cannot change the results.
void evaluate_all(const std::vector<Genome>& pop, const ComplexLaplacian& l,
                  const SpectrumBounds& bounds, double penalty_weight,
                  std::vector<double>& out) {
  const size_t n = pop.size();
  out.assign(n, 0.0);
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, 8u);
  if (workers <= 1 || n < 8) {
    for (size_t i = 0; i < n; ++i)
      out[i] = genome_fitness(pop[i], l, bounds, penalty_weight);
    return;
  }
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w]() {
      for (size_t i = w; i < n; i += workers)
        out[i] = genome_fitness(pop[i], l, bounds, penalty_weight);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

std::pair<StabilizerDiagonal, DesignReport> design_stabilizer(
    const ComplexLaplacian& l, const SpectrumBounds& bounds, const GAParams& ga) {
  bounds.validate();
  ga.validate();
  const ConditionReport cond = verify_formation_conditions(l);
  if (!cond.pass)
    throw DomainError("Laplacian fails the formation conditions: " +
                      cond.to_json());

  const int n = l.matrix.rows();
  std::mt19937_64 rng(ga.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Initial diagonals in a disc around 1 sized so the first DL spectra
  // straddle the target band.
  const double radius = bounds.lambda_max_bar / std::max(l.matrix.frobenius_norm(), 1e-12);
  std::vector<Genome> pop(ga.population_size, Genome(2 * n, 0.0));
  for (Genome& g : pop) {
    for (int i = 0; i < n; ++i) {
      const double r = radius * std::sqrt(u01(rng));
      const double theta = 2.0 * M_PI * u01(rng);
      if (ga.real_diagonal) {
        g[2 * i] = 1.0 + r * std::cos(theta);
        g[2 * i + 1] = 0.0;
      } else {
        g[2 * i] = 1.0 + r * std::cos(theta);
        g[2 * i + 1] = r * std::sin(theta);
      }
    }
  }

  std::vector<double> fit;
  Genome best_genome;
  double best_fitness = std::numeric_limits<double>::infinity();
  DesignReport report;
  report.seed = ga.seed;

  auto tournament = [&](const std::vector<double>& scores) -> int {
    int winner = -1;
    for (int t = 0; t < ga.tournament_size; ++t) {
      const int cand = static_cast<int>(u01(rng) * ga.population_size) %
                       ga.population_size;
      if (winner < 0 || scores[cand] < scores[winner]) winner = cand;
    }
    return winner;
  };

  int generations_run = 0;
  for (int gen = 0; gen < ga.generations; ++gen) {
    evaluate_all(pop, l, bounds, ga.stability_penalty_weight, fit);
    std::vector<int> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (fit[a] != fit[b]) return fit[a] < fit[b];
      return a < b;
    });
    if (fit[order[0]] < best_fitness) {
      best_fitness = fit[order[0]];
      best_genome = pop[order[0]];
    }
    report.fitness_history.push_back(best_fitness);
    generations_run = gen + 1;
    if (best_fitness <= ga.target_fitness) break;
    if (gen == ga.generations - 1) break;

    std::vector<Genome> next;
    next.reserve(pop.size());
    for (int e = 0; e < ga.elitism_count; ++e) next.push_back(pop[order[e]]);
    while (static_cast<int>(next.size()) < ga.population_size) {
      const Genome& p1 = pop[tournament(fit)];
      const Genome& p2 = pop[tournament(fit)];
      Genome child = p1;
      if (u01(rng) < ga.crossover_rate) {
        for (size_t k = 0; k < child.size(); ++k)
          if (u01(rng) < 0.5) child[k] = p2[k];
      }
      for (size_t k = 0; k < child.size(); ++k) {
        if (ga.real_diagonal && (k % 2 == 1)) continue;
        if (u01(rng) < ga.mutation_rate) child[k] += ga.mutation_sigma * gauss(rng);
      }
      next.push_back(std::move(child));
    }
    pop = std::move(next);
  }

  if (best_genome.empty())
    throw DesignError("stabilizer search produced no evaluable candidate");

  StabilizerDiagonal best = decode(best_genome);
  const ComplexMatrix dl = l.matrix.scale_rows(best.d);
  const Spectrum spec = eigenvalues(dl);
  bool feasible = spec.zero_count == 2;
  if (feasible) {
    for (int i = 0; i < static_cast<int>(spec.eigenvalues.size()); ++i) {
      if (spec.is_structural_zero(i)) continue;
      if (!(spec.eigenvalues[i].real() > 0.0)) feasible = false;
    }
  }
  if (!feasible) {
    std::ostringstream msg;
    msg << "no stabilizing diagonal found within " << generations_run
        << " generations (best fitness " << best_fitness
        << ", structural zeros " << spec.zero_count << ")";
    throw DesignError(msg.str());
  }

  report.best_fitness = best_fitness;
  report.generations = generations_run;
  const auto [la, lmax] = connectivity_metrics(spec);
  report.lambda_a = la;
  report.lambda_max = lmax;
  report.band_membership = true;
  for (int i = 0; i < static_cast<int>(spec.eigenvalues.size()); ++i) {
    if (spec.is_structural_zero(i)) continue;
    const double re = spec.eigenvalues[i].real();
    if (re < bounds.lambda_min_bar || re > bounds.lambda_max_bar)
      report.band_membership = false;
  }
  return {std::move(best), std::move(report)};
}

std::string DesignReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"band_membership\":" << (band_membership ? "true" : "false")
     << ",\"best_fitness\":" << best_fitness << ",\"generations\":" << generations
     << ",\"lambda_a\":[" << lambda_a.real() << "," << lambda_a.imag()
     << "],\"lambda_max\":[" << lambda_max.real() << "," << lambda_max.imag()
     << "],\"seed\":" << seed << "}";
  return os.str();
}

StabilizerDiagonal scale_system(const StabilizerDiagonal& d, double k) {
  if (!(k > 0.0) || k > 1.0)
    throw DomainError("scaling factor must lie in (0, 1]");
  d.validate();
  StabilizerDiagonal out;
  out.d.reserve(d.d.size());
  for (const cplx& z : d.d) out.d.push_back(k * z);
  return out;
}

}  // namespace clf
