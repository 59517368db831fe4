#include "mgem/sampling.hpp"

#include <algorithm>

#include "mgem/coordinator.hpp"

namespace mgem {
namespace {

double uniform(Rng& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

Vector sample_dg(const Generator& g, int slots, Rng& rng) {
  Vector p(slots);
  std::optional<double> prev = g.initial_output;
  for (int t = 0; t < slots; ++t) {
    double lo = g.p_min;
    double hi = g.p_max;
    if (prev) {
      lo = std::max(lo, *prev - g.ramp_down);
      hi = std::min(hi, *prev + g.ramp_up);
    }
    p[t] = uniform(rng, lo, hi);
    prev = p[t];
  }
  return p;
}

Vector sample_class1(const Class1Load& d, int slots, Rng& rng) {
  Vector p(slots);
  for (int t = 0; t < slots; ++t) p[t] = uniform(rng, d.p_min, d.p_max);
  return p;
}

Vector sample_class2(const Class2Load& e, int slots, Rng& rng) {
  // p^t = min(cap^t, theta w^t) with theta found by bisection so the total
  // equals the energy requirement.
  Vector w = Vector::Zero(slots);
  for (int t = e.start_slot; t <= e.stop_slot; ++t) w[t] = uniform(rng, 0.05, 1.0);
  auto fill = [&](double theta) { return (theta * w).cwiseMin(e.p_max_per_slot); };
  double lo = 0.0;
  double hi = 1.0;
  while (fill(hi).sum() < e.energy_total && hi < 1e12) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2.0;
    (fill(mid).sum() < e.energy_total ? lo : hi) = mid;
  }
  Vector p = fill(hi);
  // Absorb the bisection residue in the slot with the most slack.
  const double excess = p.sum() - e.energy_total;
  Index k = 0;
  if (excess > 0.0) {
    p.maxCoeff(&k);
  } else {
    (e.p_max_per_slot - p).maxCoeff(&k);
  }
  p[k] -= excess;
  return p;
}

Vector sample_storage(const StorageUnit& u, int slots, Rng& rng) {
  Vector p(slots);
  double level = u.b_initial;
  for (int t = 0; t < slots; ++t) {
    const int after = slots - 1 - t;
    const double lo = std::max({u.p_chg_min, -u.efficiency * level, -level,
                                u.b_min_final - level - after * u.p_chg_max});
    const double hi = std::min(u.p_chg_max, u.b_max - level);
    p[t] = uniform(rng, lo, std::max(lo, hi));
    level += p[t];
  }
  return p;
}

Vector sample_p_tilde(const Scenario& s, Rng& rng) {
  const auto [lo, hi] = p_tilde_box(s);
  Vector p(s.slots());
  for (int t = 0; t < s.slots(); ++t) p[t] = uniform(rng, lo[t], hi[t]);
  return p;
}

std::optional<Schedule> sample_schedule(const Scenario& s, Rng& rng, int max_tries) {
  const int T = s.slots();
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    Schedule x = Schedule::zeros(s);
    for (std::size_t m = 0; m < s.generators.size(); ++m) {
      x.p_g.row(m) = sample_dg(s.generators[m], T, rng).transpose();
    }
    for (std::size_t n = 0; n < s.class1.size(); ++n) {
      x.p_d.row(n) = sample_class1(s.class1[n], T, rng).transpose();
    }
    for (std::size_t q = 0; q < s.class2.size(); ++q) {
      x.p_e.row(q) = sample_class2(s.class2[q], T, rng).transpose();
    }
    for (std::size_t j = 0; j < s.storage.size(); ++j) {
      const Vector pb = sample_storage(s.storage[j], T, rng);
      x.p_b.row(j) = pb.transpose();
      x.b.row(j) = storage_levels(s.storage[j], pb).transpose();
    }
    if (recover_feasible(s, x)) return x;
  }
  return std::nullopt;
}

Multipliers sample_multipliers(int slots, double center, double scale, Rng& rng) {
  Multipliers z = Multipliers::zeros(slots);
  for (int t = 0; t < slots; ++t) {
    z.mu[t] = uniform(rng, 0.0, scale);
    z.lambda[t] = center + uniform(rng, -scale, scale);
    z.nu[t] = center + uniform(rng, -scale, scale);
  }
  return z;
}

}  // namespace mgem
