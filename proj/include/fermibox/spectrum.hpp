#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace fermibox {

/// One energy shell of the cubic cavity. Energies are in units of
/// ε_* = (ħ²/2m)(2π/a_*)², so ε̃ = γ²/L̃².
struct Level {
  std::size_t index = 0;       // 1-based ordinal
  std::int64_t gamma_sq = 0;   // n_x² + n_y² + n_z², all n_α ≠ 0
  std::int64_t degeneracy = 0; // z, signs and spin included
  double energy = 0.0;         // set by bind_spectrum
};

struct Spectrum {
  double box_size = 1.0;  // L̃ = L / a_*
  std::vector<Level> levels;
  // A closed spectrum is the complete level set of the model (a deliberate
  // truncation). An open one is a prefix of the infinite cavity spectrum.
  bool closed = false;

  std::size_t size() const { return levels.size(); }
  const Level& operator[](std::size_t i) const { return levels[i]; }
};

using SpectrumPtr = std::shared_ptr<const Spectrum>;

/// Every γ² ≤ gamma_sq_max representable with three nonzero integers, in
/// ascending order, with z = 2 × (number of signed triples).
/// DomainError if gamma_sq_max < 3.
std::vector<Level> enumerate_levels(std::int64_t gamma_sq_max);

/// Attaches energies ε̃_j = γ_j² / L̃². DomainError if box_size ≤ 0.
Spectrum bind_spectrum(std::vector<Level> levels, double box_size);

/// Σ_{j ≤ level_count} z_j. DomainError if level_count > spectrum size.
std::int64_t cumulative_capacity(const Spectrum& spectrum, std::size_t level_count);

/// Keeps the bottom `level_count` levels and marks the result closed.
Spectrum truncate_spectrum(const Spectrum& spectrum, std::size_t level_count);

/// Which levels the thermodynamics is built on: the full cavity spectrum, or
/// only the bottom M levels.
struct CavityModel {
  std::optional<std::size_t> level_count;

  static CavityModel full() { return {}; }
  static CavityModel truncated(std::size_t m) { return {m}; }
  bool is_truncated() const { return level_count.has_value(); }
};

/// Builds a spectrum for the model. For the full model, `gamma_sq_max`
/// bounds the enumeration; for a truncated model it is grown as needed.
SpectrumPtr make_spectrum(const CavityModel& model, double box_size, std::int64_t gamma_sq_max);

}  // namespace fermibox
