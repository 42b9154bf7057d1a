#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace holo {

// Arrows and objects are indices. compose(a, b) = a b is defined iff source(a) == target(b).
class FiniteGroupoid {
 public:
  FiniteGroupoid(int objects, std::vector<int> source, std::vector<int> target, std::vector<int> identity,
                 std::vector<int> inverse, std::vector<int> table);

  // One-object groupoid from a group multiplication table.
  static FiniteGroupoid from_group(const std::vector<std::vector<int>>& table);
  // Transitive groupoid objects x objects x group: arrow (i, j, g) runs from j to i.
  static FiniteGroupoid transitive(int objects, const std::vector<std::vector<int>>& group_table);
  static FiniteGroupoid disjoint_union(const FiniteGroupoid& a, const FiniteGroupoid& b);
  // Random disjoint union of transitive groupoids with at most max_arrows arrows.
  static FiniteGroupoid random(std::uint64_t seed, int max_arrows = 20);

  int object_count() const { return objects_; }
  int arrow_count() const { return static_cast<int>(source_.size()); }
  int source(int g) const { return source_[static_cast<std::size_t>(g)]; }
  int target(int g) const { return target_[static_cast<std::size_t>(g)]; }
  int identity(int x) const { return identity_[static_cast<std::size_t>(x)]; }
  int inverse(int g) const { return inverse_[static_cast<std::size_t>(g)]; }
  bool composable(int a, int b) const { return source(a) == target(b); }
  // -1 when not composable.
  int compose(int a, int b) const;

  friend bool operator==(const FiniteGroupoid&, const FiniteGroupoid&) = default;

 private:
  int objects_;
  std::vector<int> source_;
  std::vector<int> target_;
  std::vector<int> identity_;
  std::vector<int> inverse_;
  std::vector<int> table_;
};

std::vector<std::vector<int>> cyclic_group(int n);
std::vector<std::vector<int>> symmetric_group_3();

struct AxiomReport {
  std::string name;
  std::size_t checked = 0;
  std::size_t failures = 0;
  bool pass() const { return failures == 0; }
};

AxiomReport check_groupoid_axioms(const FiniteGroupoid& g, const std::string& name = "groupoid");

// Arrow (a, b) has index a * |H| + b; object (x, y) has index x * |X_H| + y.
FiniteGroupoid product_groupoid(const FiniteGroupoid& g, const FiniteGroupoid& h);
FiniteGroupoid opposite_groupoid(const FiniteGroupoid& g);

struct GroupoidMorphism {
  std::vector<int> arrows;
  std::vector<int> objects;
};

AxiomReport check_morphism(const FiniteGroupoid& from, const FiniteGroupoid& to, const GroupoidMorphism& f,
                           const std::string& name = "morphism");
// Morphism plus bijectivity on arrows and objects.
AxiomReport check_isomorphism(const FiniteGroupoid& from, const FiniteGroupoid& to, const GroupoidMorphism& f,
                              const std::string& name = "isomorphism");
// The inversion map with the identity on objects, G -> G^op.
GroupoidMorphism inversion_morphism(const FiniteGroupoid& g);

enum class ActionSide { Left, Right };

struct GroupoidAction {
  std::shared_ptr<const FiniteGroupoid> groupoid;
  int carrier_size = 0;
  std::vector<int> momentum;
  // act(arrow, m); -1 when the momentum does not match.
  std::function<int(int, int)> act;
  ActionSide side = ActionSide::Right;
  std::string name;
};

// Left: J(g m) = t(g), g1 (g2 m) = (g1 g2) m, id m = m. Right: J(m g) = s(g), (m g1) g2 = m (g1 g2), m id = m.
AxiomReport check_action_axioms(const GroupoidAction& action);

// Right action of G x G on the arrows of G: (g1, g2) sends g3 to g2^{-1} g3 g1, momentum (s, t).
GroupoidAction generalized_conjugation_action(const FiniteGroupoid& g);
// The right actions g2^{-1} g3 g1 (momentum (s, t)) and g1^{-1} g3 g2 (momentum (t, s)), then the left actions
// g2 g3 g1^{-1} (momentum (s, t)) and g1 g3 g2^{-1} (momentum (t, s)).
std::vector<GroupoidAction> variant_conjugations(const FiniteGroupoid& g);

// theta maps the carrier of act_m to that of act_n; the morphism maps act_m's groupoid to act_n's.
AxiomReport check_equivariant(const std::vector<int>& theta, const GroupoidMorphism& morphism,
                              const GroupoidAction& act_m, const GroupoidAction& act_n,
                              const std::string& name = "equivariant");

}  // namespace holo
