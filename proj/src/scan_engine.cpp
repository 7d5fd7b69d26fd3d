#include "ifm/scan_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <thread>

#include "ifm/beam_optics.hpp"
#include "ifm/errors.hpp"

namespace ifm::scan {

namespace {

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> kGlNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                         0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGlWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                           0.4786286704993665, 0.2369268850561891};

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform in [0, 1) from the top 53 bits.
double unit_double(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += threads) fn(i);
    });
  }
}

}  // namespace

std::string to_string(ScanMode mode) {
  switch (mode) {
    case ScanMode::point_sampled: return "point-sampled";
    case ScanMode::coherent_convolved: return "coherent-convolved";
    case ScanMode::intensity_averaged: return "intensity-averaged";
  }
  return "unknown";
}

ScanMode parse_scan_mode(const std::string& name) {
  if (name == "point-sampled") return ScanMode::point_sampled;
  if (name == "coherent-convolved") return ScanMode::coherent_convolved;
  if (name == "intensity-averaged") return ScanMode::intensity_averaged;
  throw DomainError("unknown scan mode '" + name +
                    "' (expected point-sampled, coherent-convolved or intensity-averaged)");
}

void ScanPlan::validate() const {
  if (!(std::isfinite(start_um) && std::isfinite(stop_um))) throw DomainError("scan limits must be finite");
  if (!(step_um > 0.0)) throw DomainError("scan step must be positive");
  if (!(start_um < stop_um)) throw DomainError("scan start must be below stop");
  if (drift && !(drift->leak_rate >= 0.0)) throw DomainError("drift leak rate must be non-negative");
}

std::vector<double> ScanPlan::positions() const {
  validate();
  const auto count = static_cast<std::size_t>(std::floor((stop_um - start_um) / step_um + 1e-9)) + 1;
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = start_um + static_cast<double>(i) * step_um;
  return xs;
}

double noise_floor_at(const ScanPlan& plan, const EvConfig& config, double x_um) {
  double sigma = config.noise_floor();
  if (plan.drift) sigma += plan.drift->leak_rate * std::max(0.0, x_um - plan.start_um);
  return std::clamp(sigma, 0.0, 1.0);
}

EffectiveSample effective_sample(const objects::ObjectProfile& profile, double beam_fwhm_um, double x0_um,
                                 ScanMode mode, const QuadratureOptions& quad) {
  if (!(beam_fwhm_um > 0.0)) throw DomainError("beam fwhm must be positive");
  if (!(quad.step_fraction > 0.0 && quad.half_window > 0.0)) {
    throw DomainError("quadrature step and window must be positive");
  }
  const double lo = x0_um - quad.half_window * beam_fwhm_um;
  const double hi = x0_um + quad.half_window * beam_fwhm_um;
  const double max_panel = quad.step_fraction * beam_fwhm_um;

  // Panels never straddle a jump or kink of the object, so each panel
  // integrates a smooth function.
  std::vector<double> edges{lo};
  for (double b : profile.breakpoints(lo, hi)) edges.push_back(b);
  edges.push_back(hi);

  double weight_sum = 0.0;
  double power_sum = 0.0;
  Complex amp_sum{0.0, 0.0};
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double a = edges[s];
    const double b = edges[s + 1];
    const auto panels = static_cast<int>(std::max(1.0, std::ceil((b - a) / max_panel - 1e-12)));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * h;
      for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
        const double x = mid + 0.5 * h * kGlNodes[k];
        const double w = 0.5 * h * kGlWeights[k] * beam::gaussian_profile(x - x0_um, beam_fwhm_um);
        const auto tr = profile.amplitude_at(x);
        weight_sum += w;
        power_sum += w * tr.t * tr.t;
        amp_sum += w * std::polar(tr.t, tr.phi);
      }
    }
  }

  EffectiveSample out;
  out.p_norm = std::clamp(power_sum / weight_sum, 0.0, 1.0);
  if (mode == ScanMode::point_sampled) {
    out.a_obj = std::polar(std::sqrt(out.p_norm), profile.amplitude_at(x0_um).phi);
  } else {
    out.a_obj = amp_sum / weight_sum;
  }
  return out;
}

ScanResult run_scan(const ScanPlan& plan, const EvConfig& config, const objects::ObjectProfile& profile,
                    double beam_fwhm_um, const ScanOptions& options) {
  plan.validate();
  config.validate();
  if (!(beam_fwhm_um > 0.0)) throw DomainError("beam fwhm must be positive");

  std::vector<double> xs = plan.positions();
  if (plan.drift) {
    std::erase_if(xs, [&](double x) { return x > plan.drift->lock_loss_um; });
  }

  ScanResult result;
  result.records.resize(xs.size());
  parallel_for(xs.size(), options.threads, [&](std::size_t i) {
    const double x = xs[i];
    const EffectiveSample es = effective_sample(profile, beam_fwhm_um, x, plan.mode, options.quadrature);
    const double ideal = plan.mode == ScanMode::coherent_convolved
                             ? dark_port_probability(config, es.a_obj)
                             : dark_port_probability_bucket(config, es.p_norm, es.a_obj);
    const double p_ifm = apply_noise_floor(ideal, noise_floor_at(plan, config, x));
    const auto triple = make_triple(p_ifm, absorption_probability(config, es.p_norm));
    result.records[i] = {x, es.p_norm, triple.p_ifm, triple.p_abs, triple.p_noresult};
  });

  auto& meta = result.metadata;
  meta.config = config;
  meta.beam_fwhm_um = beam_fwhm_um;
  meta.object = profile.describe();
  meta.plan = plan;
  meta.quadrature_step_fraction = options.quadrature.step_fraction;
  return result;
}

std::uint64_t shard_seed(std::uint64_t seed, unsigned index) {
  std::uint64_t state = seed;
  std::uint64_t out = 0;
  for (unsigned i = 0; i <= index; ++i) out = splitmix64(state);
  return out;
}

OutcomeTally monte_carlo(const EvConfig& config, const ObjectSample& sample, std::uint64_t n,
                         std::uint64_t seed, unsigned shards) {
  if (n < 1) throw DomainError("Monte Carlo photon count must be at least 1");
  if (shards < 1) throw DomainError("shard count must be at least 1");
  const ProbabilityTriple p = measure(config, sample);
  const double cut_ifm = p.p_ifm;
  const double cut_abs = p.p_ifm + p.p_abs;

  std::vector<OutcomeTally> parts(shards);
  parallel_for(shards, shards, [&](std::size_t s) {
    const std::uint64_t begin = n * s / shards;
    const std::uint64_t end = n * (s + 1) / shards;
    std::mt19937_64 gen(shard_seed(seed, static_cast<unsigned>(s)));
    OutcomeTally& t = parts[s];
    for (std::uint64_t i = begin; i < end; ++i) {
      const double u = unit_double(gen);
      if (u < cut_ifm) {
        ++t.n_ifm;
      } else if (u < cut_abs) {
        ++t.n_abs;
      } else {
        ++t.n_noresult;
      }
    }
  });

  OutcomeTally total;
  total.seed = seed;
  for (const auto& t : parts) {
    total.n_ifm += t.n_ifm;
    total.n_abs += t.n_abs;
    total.n_noresult += t.n_noresult;
  }
  total.n_total = total.n_ifm + total.n_abs + total.n_noresult;
  return total;
}

}  // namespace ifm::scan
