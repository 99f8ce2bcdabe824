#include "fermibox/spectrum.hpp"

#include <cmath>
#include <string>

#include "fermibox/error.hpp"

namespace fermibox {

std::vector<Level> enumerate_levels(std::int64_t gamma_sq_max) {
  if (gamma_sq_max < 3) {
    throw DomainError("enumerate_levels: gamma_sq_max must be >= 3, got " +
                      std::to_string(gamma_sq_max));
  }
  // counts[g] = number of signed, ordered triples with n_x² + n_y² + n_z² = g.
  std::vector<std::int64_t> counts(static_cast<std::size_t>(gamma_sq_max) + 1, 0);
  const auto limit = static_cast<std::int64_t>(std::sqrt(static_cast<double>(gamma_sq_max))) + 1;
  for (std::int64_t a = 1; a <= limit; ++a) {
    for (std::int64_t b = a; b <= limit; ++b) {
      const std::int64_t ab = a * a + b * b;
      if (ab + b * b > gamma_sq_max) break;
      for (std::int64_t c = b; c <= limit; ++c) {
        const std::int64_t g = ab + c * c;
        if (g > gamma_sq_max) break;
        std::int64_t permutations = 6;
        if (a == b && b == c) {
          permutations = 1;
        } else if (a == b || b == c) {
          permutations = 3;
        }
        counts[static_cast<std::size_t>(g)] += 8 * permutations;
      }
    }
  }
  std::vector<Level> levels;
  for (std::int64_t g = 3; g <= gamma_sq_max; ++g) {
    const auto c = counts[static_cast<std::size_t>(g)];
    if (c == 0) continue;
    levels.push_back({levels.size() + 1, g, 2 * c, 0.0});
  }
  return levels;
}

Spectrum bind_spectrum(std::vector<Level> levels, double box_size) {
  if (!(box_size > 0.0) || !std::isfinite(box_size)) {
    throw DomainError("bind_spectrum: box size must be positive, got " + std::to_string(box_size));
  }
  const double inv_area = 1.0 / (box_size * box_size);
  for (auto& level : levels) level.energy = static_cast<double>(level.gamma_sq) * inv_area;
  return {box_size, std::move(levels), false};
}

std::int64_t cumulative_capacity(const Spectrum& spectrum, std::size_t level_count) {
  if (level_count > spectrum.size()) {
    throw DomainError("cumulative_capacity: level count " + std::to_string(level_count) +
                      " exceeds the " + std::to_string(spectrum.size()) + " enumerated levels");
  }
  std::int64_t total = 0;
  for (std::size_t j = 0; j < level_count; ++j) total += spectrum.levels[j].degeneracy;
  return total;
}

Spectrum truncate_spectrum(const Spectrum& spectrum, std::size_t level_count) {
  if (level_count == 0 || level_count > spectrum.size()) {
    throw DomainError("truncate_spectrum: cannot keep " + std::to_string(level_count) + " of " +
                      std::to_string(spectrum.size()) + " levels");
  }
  Spectrum out = spectrum;
  out.levels.resize(level_count);
  out.closed = true;
  return out;
}

SpectrumPtr make_spectrum(const CavityModel& model, double box_size, std::int64_t gamma_sq_max) {
  if (!model.is_truncated()) {
    return std::make_shared<const Spectrum>(bind_spectrum(enumerate_levels(gamma_sq_max), box_size));
  }
  const std::size_t want = *model.level_count;
  if (want == 0) throw DomainError("make_spectrum: truncated model needs at least one level");
  std::int64_t g = 32;
  auto levels = enumerate_levels(g);
  while (levels.size() < want) {
    g *= 2;
    levels = enumerate_levels(g);
  }
  return std::make_shared<const Spectrum>(
      truncate_spectrum(bind_spectrum(std::move(levels), box_size), want));
}

}  // namespace fermibox
