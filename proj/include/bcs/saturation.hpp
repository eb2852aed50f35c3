#pragma once

#include "bcs/valence_system.hpp"

namespace bcs {

/// How one saturation shortcut was derived: the bracketing operation
/// transitions (indices into the base system) it cancels.
struct ShortcutDerivation {
  uint32_t first;   // +o transition for rule (1), -o for rule (2)
  uint32_t second;  // the matching transition of opposite polarity
};

/// A dependent valence system closed under the saturation rules, together
/// with the epsilon shortcuts the fixpoint added.
struct SaturatedSystem {
  ValenceSystem base;
  std::vector<Transition> added;  // epsilon transitions only
  std::vector<ShortcutDerivation> derivations;  // parallel to `added`

  /// Base and added transitions as one system.
  ValenceSystem combined() const;

  /// Rewrites a path over the combined system into a path over the base
  /// system by expanding every shortcut into the bracketing operations plus
  /// the epsilon path available when the shortcut was derived. The expanded
  /// word is congruent to the original path word (shortcuts stand for
  /// identity factors). Transitions are given and returned as triples.
  std::vector<Transition> expand_path(
      const std::vector<Transition>& combined_path) const;
};

/// Saturation fixpoint on a dependent valence system: whenever a +o
/// transition reaches, via epsilon steps, a matching -o transition (or -o
/// then +o for a self-looped o), an epsilon shortcut is added between the
/// outer endpoints. Epsilon reachability includes shortcuts added earlier.
/// At most |P|^2 transitions are added. Rejects systems that are not
/// dependent.
SaturatedSystem saturate(const ValenceSystem& sys);

}  // namespace bcs
