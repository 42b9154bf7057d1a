#include "holo/groupoid.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "holo/errors.hpp"

namespace holo {

FiniteGroupoid::FiniteGroupoid(int objects, std::vector<int> source, std::vector<int> target,
                               std::vector<int> identity, std::vector<int> inverse, std::vector<int> table)
    : objects_(objects),
      source_(std::move(source)),
      target_(std::move(target)),
      identity_(std::move(identity)),
      inverse_(std::move(inverse)),
      table_(std::move(table)) {
  const std::size_t n = source_.size();
  if (target_.size() != n || inverse_.size() != n || table_.size() != n * n ||
      identity_.size() != static_cast<std::size_t>(objects_))
    throw Error(ErrorCode::InvalidArgument, "inconsistent groupoid tables");
}

int FiniteGroupoid::compose(int a, int b) const {
  if (!composable(a, b)) return -1;
  return table_[static_cast<std::size_t>(a) * source_.size() + static_cast<std::size_t>(b)];
}

std::vector<std::vector<int>> cyclic_group(int n) {
  std::vector<std::vector<int>> t(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a + b) % n;
  return t;
}

std::vector<std::vector<int>> symmetric_group_3() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p{0, 1, 2};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  const std::size_t n = perms.size();
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[static_cast<std::size_t>(i)] = perms[a][static_cast<std::size_t>(perms[b][static_cast<std::size_t>(i)])];
      t[a][b] = static_cast<int>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  return t;
}

FiniteGroupoid FiniteGroupoid::from_group(const std::vector<std::vector<int>>& table) {
  return transitive(1, table);
}

FiniteGroupoid FiniteGroupoid::transitive(int objects, const std::vector<std::vector<int>>& group_table) {
  const int k = static_cast<int>(group_table.size());
  int unit = -1;
  for (int e = 0; e < k && unit < 0; ++e) {
    bool ok = true;
    for (int a = 0; a < k; ++a) ok = ok && group_table[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)] == a;
    if (ok) unit = e;
  }
  if (unit < 0) throw Error(ErrorCode::InvalidArgument, "group table has no unit");
  auto index = [&](int i, int j, int g) { return (i * objects + j) * k + g; };
  const int n = objects * objects * k;
  std::vector<int> src(static_cast<std::size_t>(n)), tgt(static_cast<std::size_t>(n)), inv(static_cast<std::size_t>(n));
  std::vector<int> ident(static_cast<std::size_t>(objects));
  std::vector<int> table(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
  for (int i = 0; i < objects; ++i)
    for (int j = 0; j < objects; ++j)
      for (int g = 0; g < k; ++g) {
        const int a = index(i, j, g);
        src[static_cast<std::size_t>(a)] = j;
        tgt[static_cast<std::size_t>(a)] = i;
        int gi = 0;
        while (group_table[static_cast<std::size_t>(g)][static_cast<std::size_t>(gi)] != unit) ++gi;
        inv[static_cast<std::size_t>(a)] = index(j, i, gi);
        for (int l = 0; l < objects; ++l)
          for (int h = 0; h < k; ++h)
            table[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(index(j, l, h))] =
                index(i, l, group_table[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)]);
      }
  for (int i = 0; i < objects; ++i) ident[static_cast<std::size_t>(i)] = index(i, i, unit);
  return FiniteGroupoid(objects, src, tgt, ident, inv, table);
}

FiniteGroupoid FiniteGroupoid::disjoint_union(const FiniteGroupoid& a, const FiniteGroupoid& b) {
  const int na = a.arrow_count(), nb = b.arrow_count(), n = na + nb;
  const int oa = a.object_count();
  std::vector<int> src, tgt, inv, ident;
  std::vector<int> table(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
  for (int g = 0; g < na; ++g) {
    src.push_back(a.source(g));
    tgt.push_back(a.target(g));
    inv.push_back(a.inverse(g));
  }
  for (int g = 0; g < nb; ++g) {
    src.push_back(oa + b.source(g));
    tgt.push_back(oa + b.target(g));
    inv.push_back(na + b.inverse(g));
  }
  for (int x = 0; x < oa; ++x) ident.push_back(a.identity(x));
  for (int x = 0; x < b.object_count(); ++x) ident.push_back(na + b.identity(x));
  for (int g = 0; g < na; ++g)
    for (int h = 0; h < na; ++h)
      table[static_cast<std::size_t>(g) * static_cast<std::size_t>(n) + static_cast<std::size_t>(h)] = a.compose(g, h);
  for (int g = 0; g < nb; ++g)
    for (int h = 0; h < nb; ++h) {
      const int c = b.compose(g, h);
      table[static_cast<std::size_t>(na + g) * static_cast<std::size_t>(n) + static_cast<std::size_t>(na + h)] =
          c < 0 ? -1 : na + c;
    }
  return FiniteGroupoid(oa + b.object_count(), src, tgt, ident, inv, table);
}

FiniteGroupoid FiniteGroupoid::random(std::uint64_t seed, int max_arrows) {
  std::mt19937_64 rng(seed);
  struct Block {
    int objects;
    int group;  // 0: trivial, 1: Z2, 2: Z3, 3: S3
    int arrows;
  };
  const std::vector<Block> blocks{{1, 0, 1}, {1, 1, 2}, {1, 2, 3}, {1, 3, 6}, {2, 0, 4},
                                  {2, 1, 8}, {2, 2, 12}, {3, 0, 9}, {3, 1, 18}, {4, 0, 16}};
  auto table_of = [](int group) {
    switch (group) {
      case 0: return cyclic_group(1);
      case 1: return cyclic_group(2);
      case 2: return cyclic_group(3);
      default: return symmetric_group_3();
    }
  };
  int remaining = max_arrows;
  std::vector<Block> chosen;
  while (true) {
    std::vector<Block> fits;
    for (const auto& b : blocks)
      if (b.arrows <= remaining) fits.push_back(b);
    if (fits.empty() || (chosen.size() >= 2 && rng() % 3 == 0)) break;
    const Block b = fits[rng() % fits.size()];
    chosen.push_back(b);
    remaining -= b.arrows;
  }
  if (chosen.empty()) throw Error(ErrorCode::InvalidArgument, "max_arrows too small");
  FiniteGroupoid out = transitive(chosen[0].objects, table_of(chosen[0].group));
  for (std::size_t i = 1; i < chosen.size(); ++i)
    out = disjoint_union(out, transitive(chosen[i].objects, table_of(chosen[i].group)));
  return out;
}

AxiomReport check_groupoid_axioms(const FiniteGroupoid& g, const std::string& name) {
  AxiomReport r{name, 0, 0};
  auto expect = [&r](bool ok) {
    ++r.checked;
    if (!ok) ++r.failures;
  };
  const int n = g.arrow_count();
  for (int x = 0; x < g.object_count(); ++x) {
    const int e = g.identity(x);
    expect(g.source(e) == x && g.target(e) == x);
  }
  for (int a = 0; a < n; ++a) {
    expect(g.compose(a, g.identity(g.source(a))) == a);
    expect(g.compose(g.identity(g.target(a)), a) == a);
    const int ai = g.inverse(a);
    expect(g.compose(a, ai) == g.identity(g.target(a)));
    expect(g.compose(ai, a) == g.identity(g.source(a)));
    for (int b = 0; b < n; ++b) {
      const int ab = g.compose(a, b);
      expect((ab >= 0) == g.composable(a, b));
      if (ab < 0) continue;
      expect(g.source(ab) == g.source(b) && g.target(ab) == g.target(a));
      for (int c = 0; c < n; ++c) {
        if (!g.composable(b, c)) continue;
        expect(g.compose(ab, c) == g.compose(a, g.compose(b, c)));
      }
    }
  }
  return r;
}

FiniteGroupoid product_groupoid(const FiniteGroupoid& g, const FiniteGroupoid& h) {
  const int ng = g.arrow_count(), nh = h.arrow_count(), n = ng * nh;
  const int oh = h.object_count();
  std::vector<int> src(static_cast<std::size_t>(n)), tgt(static_cast<std::size_t>(n)), inv(static_cast<std::size_t>(n));
  std::vector<int> ident(static_cast<std::size_t>(g.object_count() * oh));
  std::vector<int> table(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
  for (int a = 0; a < ng; ++a)
    for (int b = 0; b < nh; ++b) {
      const int i = a * nh + b;
      src[static_cast<std::size_t>(i)] = g.source(a) * oh + h.source(b);
      tgt[static_cast<std::size_t>(i)] = g.target(a) * oh + h.target(b);
      inv[static_cast<std::size_t>(i)] = g.inverse(a) * nh + h.inverse(b);
      for (int c = 0; c < ng; ++c)
        for (int d = 0; d < nh; ++d) {
          const int ac = g.compose(a, c), bd = h.compose(b, d);
          if (ac >= 0 && bd >= 0)
            table[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(c * nh + d)] =
                ac * nh + bd;
        }
    }
  for (int x = 0; x < g.object_count(); ++x)
    for (int y = 0; y < oh; ++y) ident[static_cast<std::size_t>(x * oh + y)] = g.identity(x) * nh + h.identity(y);
  return FiniteGroupoid(g.object_count() * oh, src, tgt, ident, inv, table);
}

FiniteGroupoid opposite_groupoid(const FiniteGroupoid& g) {
  const int n = g.arrow_count();
  std::vector<int> src, tgt, inv, ident;
  std::vector<int> table(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
  for (int a = 0; a < n; ++a) {
    src.push_back(g.target(a));
    tgt.push_back(g.source(a));
    inv.push_back(g.inverse(a));
    for (int b = 0; b < n; ++b)
      table[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)] = g.compose(b, a);
  }
  for (int x = 0; x < g.object_count(); ++x) ident.push_back(g.identity(x));
  return FiniteGroupoid(g.object_count(), src, tgt, ident, inv, table);
}

AxiomReport check_morphism(const FiniteGroupoid& from, const FiniteGroupoid& to, const GroupoidMorphism& f,
                           const std::string& name) {
  AxiomReport r{name, 0, 0};
  auto expect = [&r](bool ok) {
    ++r.checked;
    if (!ok) ++r.failures;
  };
  if (static_cast<int>(f.arrows.size()) != from.arrow_count() ||
      static_cast<int>(f.objects.size()) != from.object_count()) {
    expect(false);
    return r;
  }
  auto arrow = [&](int a) { return f.arrows[static_cast<std::size_t>(a)]; };
  auto object = [&](int x) { return f.objects[static_cast<std::size_t>(x)]; };
  for (int a = 0; a < from.arrow_count(); ++a) {
    const int fa = arrow(a);
    expect(fa >= 0 && fa < to.arrow_count());
    if (fa < 0 || fa >= to.arrow_count()) continue;
    expect(to.source(fa) == object(from.source(a)));
    expect(to.target(fa) == object(from.target(a)));
    for (int b = 0; b < from.arrow_count(); ++b) {
      const int ab = from.compose(a, b);
      if (ab < 0) continue;
      expect(arrow(ab) == to.compose(fa, arrow(b)));
    }
  }
  for (int x = 0; x < from.object_count(); ++x) expect(arrow(from.identity(x)) == to.identity(object(x)));
  return r;
}

AxiomReport check_isomorphism(const FiniteGroupoid& from, const FiniteGroupoid& to, const GroupoidMorphism& f,
                              const std::string& name) {
  AxiomReport r = check_morphism(from, to, f, name);
  auto bijective = [](std::vector<int> v, int size) {
    if (static_cast<int>(v.size()) != size) return false;
    std::sort(v.begin(), v.end());
    for (int i = 0; i < size; ++i)
      if (v[static_cast<std::size_t>(i)] != i) return false;
    return true;
  };
  r.checked += 2;
  if (!bijective(f.arrows, to.arrow_count())) ++r.failures;
  if (!bijective(f.objects, to.object_count())) ++r.failures;
  return r;
}

GroupoidMorphism inversion_morphism(const FiniteGroupoid& g) {
  GroupoidMorphism m;
  for (int a = 0; a < g.arrow_count(); ++a) m.arrows.push_back(g.inverse(a));
  for (int x = 0; x < g.object_count(); ++x) m.objects.push_back(x);
  return m;
}

AxiomReport check_action_axioms(const GroupoidAction& action) {
  AxiomReport r{action.name, 0, 0};
  auto expect = [&r](bool ok) {
    ++r.checked;
    if (!ok) ++r.failures;
  };
  const FiniteGroupoid& g = *action.groupoid;
  const bool right = action.side == ActionSide::Right;
  auto momentum = [&](int m) { return action.momentum[static_cast<std::size_t>(m)]; };
  for (int m = 0; m < action.carrier_size; ++m) {
    expect(action.act(g.identity(momentum(m)), m) == m);
    for (int a = 0; a < g.arrow_count(); ++a) {
      const bool matches = right ? momentum(m) == g.target(a) : momentum(m) == g.source(a);
      const int am = action.act(a, m);
      expect((am >= 0) == matches);
      if (am < 0) continue;
      expect(momentum(am) == (right ? g.source(a) : g.target(a)));
      for (int b = 0; b < g.arrow_count(); ++b) {
        if (right) {
          // (m a) b = m (a b)
          if (!g.composable(a, b)) continue;
          expect(action.act(b, am) == action.act(g.compose(a, b), m));
        } else {
          // b (a m) = (b a) m
          if (!g.composable(b, a)) continue;
          expect(action.act(b, am) == action.act(g.compose(b, a), m));
        }
      }
    }
  }
  return r;
}

namespace {

// Builds one of the four conjugation actions of G x G on the arrows of G.
GroupoidAction conjugation_action(const FiniteGroupoid& g, ActionSide side, bool swapped, std::string name) {
  auto gg = std::make_shared<const FiniteGroupoid>(product_groupoid(g, g));
  const int n = g.arrow_count();
  const int o = g.object_count();
  GroupoidAction act;
  act.groupoid = gg;
  act.carrier_size = n;
  act.side = side;
  act.name = std::move(name);
  for (int k = 0; k < n; ++k)
    act.momentum.push_back(swapped ? g.target(k) * o + g.source(k) : g.source(k) * o + g.target(k));
  act.act = [g, gg, n, side, swapped, momentum = act.momentum](int pair, int k) {
    const int m = momentum[static_cast<std::size_t>(k)];
    const bool matches = side == ActionSide::Right ? m == gg->target(pair) : m == gg->source(pair);
    if (!matches) return -1;
    const int g1 = pair / n, g2 = pair % n;
    if (side == ActionSide::Right) {
      // g2^{-1} k g1, or g1^{-1} k g2 when swapped
      const int left = swapped ? g.inverse(g1) : g.inverse(g2);
      const int right = swapped ? g2 : g1;
      return g.compose(g.compose(left, k), right);
    }
    // g2 k g1^{-1}, or g1 k g2^{-1} when swapped
    const int left = swapped ? g1 : g2;
    const int right = swapped ? g.inverse(g2) : g.inverse(g1);
    return g.compose(g.compose(left, k), right);
  };
  return act;
}

}  // namespace

GroupoidAction generalized_conjugation_action(const FiniteGroupoid& g) {
  return conjugation_action(g, ActionSide::Right, false, "conjugation right (s,t)");
}

std::vector<GroupoidAction> variant_conjugations(const FiniteGroupoid& g) {
  return {conjugation_action(g, ActionSide::Right, false, "conjugation right (s,t)"),
          conjugation_action(g, ActionSide::Right, true, "conjugation right (t,s)"),
          conjugation_action(g, ActionSide::Left, false, "conjugation left (s,t)"),
          conjugation_action(g, ActionSide::Left, true, "conjugation left (t,s)")};
}

AxiomReport check_equivariant(const std::vector<int>& theta, const GroupoidMorphism& morphism,
                              const GroupoidAction& act_m, const GroupoidAction& act_n, const std::string& name) {
  const FiniteGroupoid& g = *act_m.groupoid;
  const FiniteGroupoid& h = *act_n.groupoid;
  if (act_m.side != act_n.side) throw Error(ErrorCode::IncompatibleActions, "actions act on different sides");
  if (static_cast<int>(theta.size()) != act_m.carrier_size)
    throw Error(ErrorCode::IncompatibleActions, "map does not cover the carrier");
  if (static_cast<int>(morphism.arrows.size()) != g.arrow_count() ||
      static_cast<int>(morphism.objects.size()) != g.object_count())
    throw Error(ErrorCode::IncompatibleActions, "morphism does not start at the acting groupoid");
  for (int a : morphism.arrows)
    if (a < 0 || a >= h.arrow_count()) throw Error(ErrorCode::IncompatibleActions, "morphism leaves the target groupoid");
  for (int m : theta)
    if (m < 0 || m >= act_n.carrier_size) throw Error(ErrorCode::IncompatibleActions, "map leaves the target carrier");
  AxiomReport r{name, 0, 0};
  auto expect = [&r](bool ok) {
    ++r.checked;
    if (!ok) ++r.failures;
  };
  for (int m = 0; m < act_m.carrier_size; ++m) {
    const int tm = theta[static_cast<std::size_t>(m)];
    expect(act_n.momentum[static_cast<std::size_t>(tm)] ==
           morphism.objects[static_cast<std::size_t>(act_m.momentum[static_cast<std::size_t>(m)])]);
    for (int a = 0; a < g.arrow_count(); ++a) {
      const int am = act_m.act(a, m);
      if (am < 0) continue;
      expect(theta[static_cast<std::size_t>(am)] == act_n.act(morphism.arrows[static_cast<std::size_t>(a)], tm));
    }
  }
  return r;
}

}  // namespace holo
