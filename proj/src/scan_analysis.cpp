#include "ifm/scan_analysis.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ifm/beam_optics.hpp"
#include "ifm/errors.hpp"

namespace ifm::analysis {

namespace {

using Kind = AnalysisError::Kind;

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double edge_baseline(std::span<const double> signal) {
  const std::size_t n = signal.size();
  const std::size_t k = std::max<std::size_t>(1, n / 10);
  std::vector<double> edge(signal.begin(), signal.begin() + static_cast<std::ptrdiff_t>(k));
  edge.insert(edge.end(), signal.end() - static_cast<std::ptrdiff_t>(k), signal.end());
  return median(std::move(edge));
}

std::vector<double> median_of_3(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    double a = v[i - 1], b = v[i], c = v[i + 1];
    out[i] = std::max(std::min(a, b), std::min(std::max(a, b), c));
  }
  return out;
}

}  // namespace

std::string to_string(Channel channel) { return channel == Channel::transmission ? "transmission" : "ifm"; }

WidthEstimate feature_fwhm(std::span<const double> xs, std::span<const double> signal) {
  if (xs.size() != signal.size()) throw DomainError("position and signal lengths differ");
  if (xs.size() < 3) throw AnalysisError(Kind::no_feature, "too few samples to locate a feature");

  const double base = edge_baseline(signal);
  std::vector<double> s(signal.size());
  std::transform(signal.begin(), signal.end(), s.begin(), [base](double v) { return v - base; });
  const auto top = std::max_element(s.begin(), s.end());
  double peak = *top;
  if (!(peak > 1e-9)) throw AnalysisError(Kind::no_feature, "profile is flat: no feature above baseline");
  // A sharp maximum usually falls between samples; take the vertex of the
  // parabola through the top three samples. Plateaus are left alone.
  const auto k = static_cast<std::size_t>(top - s.begin());
  if (k > 0 && k + 1 < s.size() && s[k - 1] < peak && s[k + 1] < peak) {
    const double curvature = s[k - 1] - 2.0 * peak + s[k + 1];
    const double offset = 0.5 * (s[k - 1] - s[k + 1]) / curvature;
    if (std::abs(offset) <= 0.5) peak -= 0.25 * (s[k - 1] - s[k + 1]) * offset;
  }

  const double half = 0.5 * peak;
  std::vector<double> crossings;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double a = s[i] - half;
    const double b = s[i + 1] - half;
    // A sample sitting exactly on the level counts once, with the interval it opens.
    if ((a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)) {
      crossings.push_back(xs[i] + (xs[i + 1] - xs[i]) * a / (a - b));
    }
  }
  if (crossings.size() != 2) {
    throw AnalysisError(Kind::ambiguous_feature,
                        fmt::format("expected 2 half-maximum crossings, found {}", crossings.size()));
  }
  WidthEstimate w;
  w.left_um = crossings[0];
  w.right_um = crossings[1];
  w.fwhm_um = crossings[1] - crossings[0];
  w.half_max_level = base + half;
  return w;
}

WidthEstimate width_fwhm(const scan::ScanResult& scan, Channel channel) {
  std::vector<double> xs, sig;
  xs.reserve(scan.records.size());
  sig.reserve(scan.records.size());
  for (const auto& r : scan.records) {
    xs.push_back(r.x_um);
    sig.push_back(channel == Channel::transmission ? 1.0 - r.p_norm : r.p_ifm);
  }
  WidthEstimate w = feature_fwhm(xs, sig);
  w.channel = channel;
  return w;
}

ResolutionEstimate knife_edge_resolution(const scan::ScanResult& scan) {
  const auto& recs = scan.records;
  if (recs.size() < 5) throw AnalysisError(Kind::not_an_edge, "too few samples for an edge scan");
  std::vector<double> xs, p;
  for (const auto& r : recs) {
    xs.push_back(r.x_um);
    p.push_back(r.p_norm);
  }
  const std::vector<double> smooth = median_of_3(p);

  const bool falling = smooth.front() > smooth.back();
  constexpr double kSlack = 1e-9;
  for (std::size_t i = 0; i + 1 < smooth.size(); ++i) {
    const double d = smooth[i + 1] - smooth[i];
    if (falling ? d > kSlack : d < -kSlack) {
      throw AnalysisError(Kind::not_an_edge, "transmission is not monotone: not a knife-edge scan");
    }
  }
  const double hi = std::max(smooth.front(), smooth.back());
  const double lo = std::min(smooth.front(), smooth.back());
  if (!(hi > 0.9 && lo < 0.1)) {
    throw AnalysisError(Kind::not_an_edge, "transmission does not run between ~1 and ~0");
  }

  // Central differences on the half-step grid: (p[i+1] - p[i]) / h sits at the
  // midpoint of each sample pair.
  std::vector<double> mids, slope;
  for (std::size_t i = 0; i + 1 < smooth.size(); ++i) {
    mids.push_back(0.5 * (xs[i] + xs[i + 1]));
    slope.push_back(std::abs((smooth[i + 1] - smooth[i]) / (xs[i + 1] - xs[i])));
  }
  ResolutionEstimate out;
  try {
    out.spot_fwhm_um = feature_fwhm(mids, slope).fwhm_um;
  } catch (const AnalysisError& e) {
    throw AnalysisError(Kind::not_an_edge, std::string("edge derivative has no single peak: ") + e.what());
  }
  out.rayleigh_um = beam::kRayleighFactor * out.spot_fwhm_um;
  return out;
}

std::vector<PhasePoint> phase_profile(const scan::ScanResult& scan, const EvConfig& config) {
  if (scan.metadata.plan.mode != scan::ScanMode::point_sampled) {
    throw AnalysisError(Kind::wrong_mode, "phase inversion needs a point-sampled scan, got " +
                                              scan::to_string(scan.metadata.plan.mode));
  }
  std::vector<PhasePoint> out;
  out.reserve(scan.records.size());
  for (const auto& r : scan.records) {
    PhasePoint pt{r.x_um, std::nullopt};
    if (r.p_norm >= kMinPhasePnorm) {
      const double sigma = scan::noise_floor_at(scan.metadata.plan, config, r.x_um);
      try {
        pt.phi = invert_phase(remove_noise_floor(r.p_ifm, sigma), r.p_norm, config);
      } catch (const Error&) {
        // inconsistent or unobservable: leave undefined
      }
    }
    out.push_back(pt);
  }
  return out;
}

SweepTable efficiency_sweep(std::span<const double> r_values, const ObjectSample& object, double eps) {
  SweepTable table;
  double prev = 0.0;
  for (double r : r_values) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("sweep reflectances must lie in (0, 1)");
    if (!table.rows.empty() && !(r > prev)) throw DomainError("sweep reflectances must be strictly increasing");
    prev = r;
    const EvConfig config{1.0 - r, r, 1.0, eps};
    const ProbabilityTriple p = measure(config, object);
    table.rows.push_back({r, p.p_ifm, efficiency(p)});
  }
  return table;
}

std::vector<double> reflectance_grid(int n) {
  if (n < 1) throw DomainError("sweep needs at least one point");
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) r[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) / (n + 1);
  return r;
}

}  // namespace ifm::analysis
