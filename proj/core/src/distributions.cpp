#include "batchlearn/distributions.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <system_error>

#include "batchlearn/errors.hpp"

namespace batchlearn {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("invalid number for " + std::string(what) + ": '" + std::string(text) +
                      "'");
  }
  return value;
}

std::string_view strip_key(std::string_view kv, std::string_view key) {
  if (kv.substr(0, key.size()) != key || kv.size() <= key.size() || kv[key.size()] != '=') {
    throw ConfigError("expected '" + std::string(key) + "=' in distribution spec, got '" +
                      std::string(kv) + "'");
  }
  return kv.substr(key.size() + 1);
}

void check_unit_interval(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("argument " + format_double(x) + " outside [0, 1]");
  }
}

}  // namespace

OverlapDistribution::OverlapDistribution(Family family, double beta, double a,
                                         std::shared_ptr<const OverlapDistribution> inner)
    : family_(family), beta_(beta), a_(a), inner_(std::move(inner)) {}

OverlapDistribution OverlapDistribution::uniform() {
  return OverlapDistribution(Family::Uniform, 0.0, 1.0, nullptr);
}

OverlapDistribution OverlapDistribution::power_tail(double beta) {
  if (!(beta > -1.0) || !std::isfinite(beta)) {
    throw DomainError("power tail exponent beta must be finite and > -1, got " +
                      format_double(beta));
  }
  return OverlapDistribution(Family::PowerTail, beta, 1.0, nullptr);
}

OverlapDistribution OverlapDistribution::scaled(double a, const OverlapDistribution& inner) {
  if (!(a > 0.0 && a <= 1.0)) {
    throw DomainError("support endpoint a must lie in (0, 1], got " + format_double(a));
  }
  return OverlapDistribution(Family::ScaledSupport, inner.beta_, a,
                             std::make_shared<const OverlapDistribution>(inner));
}

OverlapDistribution OverlapDistribution::parse(std::string_view spec) {
  if (spec == "uniform") return uniform();
  if (spec.starts_with("powertail:")) {
    return power_tail(parse_double(strip_key(spec.substr(10), "beta"), "beta"));
  }
  if (spec.starts_with("scaled:")) {
    std::string_view rest = spec.substr(7);
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos) {
      throw ConfigError("scaled spec needs 'a=<float>,inner=<spec>'");
    }
    const double a = parse_double(strip_key(rest.substr(0, comma), "a"), "a");
    const auto inner = parse(strip_key(rest.substr(comma + 1), "inner"));
    try {
      return scaled(a, inner);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown distribution spec '" + std::string(spec) +
                    "' (expected uniform, powertail:beta=<float>, scaled:a=<float>,inner=<spec>)");
}

std::string OverlapDistribution::spec() const {
  switch (family_) {
    case Family::Uniform:
      return "uniform";
    case Family::PowerTail:
      return "powertail:beta=" + format_double(beta_);
    case Family::ScaledSupport:
      return "scaled:a=" + format_double(a_) + ",inner=" + inner_->spec();
  }
  return {};
}

const OverlapDistribution& OverlapDistribution::inner() const {
  if (!inner_) throw DomainError("distribution has no inner law");
  return *inner_;
}

double OverlapDistribution::density(double x) const {
  check_unit_interval(x);
  switch (family_) {
    case Family::Uniform:
      return 1.0;
    case Family::PowerTail:
      return (1.0 + beta_) * std::pow(1.0 - x, beta_);
    case Family::ScaledSupport:
      if (x > a_) return 0.0;
      return inner_->density(std::min(1.0, x / a_)) / a_;
  }
  return 0.0;
}

double OverlapDistribution::cdf(double x) const {
  check_unit_interval(x);
  switch (family_) {
    case Family::Uniform:
      return x;
    case Family::PowerTail:
      return -std::expm1((1.0 + beta_) * std::log1p(-x));
    case Family::ScaledSupport:
      return inner_->cdf(std::min(1.0, x / a_));
  }
  return 0.0;
}

double OverlapDistribution::moment(long long k) const {
  if (k < 1) throw DomainError("moment order must be >= 1");
  if (family_ == Family::Uniform) return 1.0 / (static_cast<double>(k) + 1.0);
  return moment_at(static_cast<double>(k));
}

double OverlapDistribution::moment_at(double x) const {
  if (!(x > -1.0)) throw DomainError("moment index must exceed -1");
  if (std::isinf(x)) return 0.0;
  switch (family_) {
    case Family::Uniform:
      return 1.0 / (x + 1.0);
    case Family::PowerTail:
      return boost::math::tgamma(beta_ + 2.0) *
             boost::math::tgamma_delta_ratio(x + 1.0, beta_ + 1.0);
    case Family::ScaledSupport:
      if (a_ == 1.0) return inner_->moment_at(x);
      return std::exp(x * std::log(a_)) * inner_->moment_at(x);
  }
  return 0.0;
}

bool OverlapDistribution::has_power_tail() const noexcept {
  return family_ != Family::ScaledSupport || (a_ == 1.0 && inner_->has_power_tail());
}

TailParameters OverlapDistribution::tail_parameters() const {
  switch (family_) {
    case Family::Uniform:
      return {1.0, 0.0, 1.0, 1.0};
    case Family::PowerTail:
      return {beta_ + 1.0, beta_, beta_ + 1.0, boost::math::tgamma(beta_ + 2.0)};
    case Family::ScaledSupport:
      if (a_ == 1.0) return inner_->tail_parameters();
      throw NoPowerTailError("support ends at a = " + format_double(a_) +
                             " < 1; moments decay geometrically and there is no power tail");
  }
  return {};
}

double OverlapDistribution::convergence_exponent() const {
  if (!has_power_tail()) return std::numeric_limits<double>::infinity();
  return tail_parameters().alpha;
}

double OverlapDistribution::gap_from_uniform(double v) const {
  switch (family_) {
    case Family::Uniform:
      return v;
    case Family::PowerTail:
      // P(1 - X <= t) = t^(1 + beta)
      return beta_ == 0.0 ? v : std::pow(v, 1.0 / (1.0 + beta_));
    case Family::ScaledSupport:
      return (1.0 - a_) + a_ * inner_->gap_from_uniform(v);
  }
  return v;
}

double OverlapDistribution::sample_gap(Rng& rng) const {
  for (;;) {
    const double q = gap_from_uniform(1.0 - uniform01(rng));
    if (q > 0.0) return q;
  }
}

double OverlapDistribution::sample(Rng& rng) const {
  for (;;) {
    const double p = 1.0 - sample_gap(rng);
    if (p < 1.0) return p;
  }
}

bool operator==(const OverlapDistribution& a, const OverlapDistribution& b) {
  if (a.family_ != b.family_ || a.beta_ != b.beta_ || a.a_ != b.a_) return false;
  if (a.inner_ && b.inner_) return *a.inner_ == *b.inner_;
  return !a.inner_ && !b.inner_;
}

OverlapVector sample(const OverlapDistribution& dist, std::size_t n, Rng& rng) {
  OverlapVector v;
  v.p.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.p.push_back(dist.sample(rng));
  return v;
}

std::vector<double> parse_float_list(std::string_view csv) {
  std::vector<double> out;
  if (csv.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = csv.find(',', start);
    auto field = csv.substr(start, comma == std::string_view::npos ? csv.npos : comma - start);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    out.push_back(parse_double(field, "list entry"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace batchlearn
