#include "nexus/relcore.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <unordered_map>

#include "nexus/errors.hpp"

namespace nexus {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(line == 0 ? message
                                   : std::to_string(line) + ":" + std::to_string(column) +
                                         ": " + message),
      bare_(message),
      line_(line),
      column_(column) {}

Term Term::constant(std::string name) { return indexed(TermKind::constant, std::move(name), {}); }

Term Term::variable(std::string name) { return indexed(TermKind::variable, std::move(name), {}); }

Term Term::indexed(TermKind kind, std::string name, std::vector<std::string> index) {
  if (name.empty()) throw SemanticError("term name must be nonempty");
  Term t;
  t.kind_ = kind;
  t.name_ = std::move(name);
  t.index_ = std::move(index);
  return t;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (auto c = a.name_ <=> b.name_; c != 0) return c;
  if (auto c = a.index_ <=> b.index_; c != 0) return c;
  return a.kind_ <=> b.kind_;
}

std::size_t TermHash::operator()(const Term& t) const noexcept {
  std::size_t h = std::hash<std::string>{}(t.name());
  for (const auto& s : t.index()) h = h * 1000003u ^ std::hash<std::string>{}(s);
  return h * 31u + static_cast<std::size_t>(t.kind());
}

Atom::Atom(std::string predicate, std::vector<Term> args)
    : predicate_(std::move(predicate)), args_(std::move(args)) {
  if (predicate_.empty()) throw SemanticError("predicate name must be nonempty");
  if (predicate_ == kTop && args_.size() != 1)
    throw SemanticError("predicate 'top' has arity 1, got " + std::to_string(args_.size()));
}

bool Atom::is_ground() const {
  return std::all_of(args_.begin(), args_.end(), [](const Term& t) { return t.is_constant(); });
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
  if (auto c = a.predicate_ <=> b.predicate_; c != 0) return c;
  return a.args_ <=> b.args_;
}

Atom top_atom(Term t) { return Atom(std::string(kTop), {std::move(t)}); }

bool is_ground(const AtomSet& s) {
  return std::all_of(s.begin(), s.end(), [](const Atom& a) { return a.is_ground(); });
}

std::set<Term> domain_of(const AtomSet& s) {
  std::set<Term> out;
  for (const auto& a : s) out.insert(a.args().begin(), a.args().end());
  return out;
}

AtomSet close_under_top(const AtomSet& s) {
  AtomSet out = s;
  for (const auto& t : domain_of(s)) out.insert(top_atom(t));
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

bool is_connected(const AtomSet& s) {
  if (s.empty()) throw SemanticError("empty structure");
  std::vector<const Atom*> atoms;
  for (const auto& a : s) atoms.push_back(&a);
  UnionFind uf(atoms.size());
  std::unordered_map<Term, std::size_t, TermHash> first_atom;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (const auto& t : atoms[i]->args()) {
      auto [it, fresh] = first_atom.emplace(t, i);
      if (!fresh) uf.unite(it->second, i);
    }
  }
  for (std::size_t i = 1; i < atoms.size(); ++i)
    if (uf.find(i) != uf.find(0)) return false;
  return true;
}

Term apply_mapping(const TermMapping& h, const Term& t) {
  auto it = h.find(t);
  return it == h.end() ? t : it->second;
}

AtomSet apply_mapping(const TermMapping& h, const AtomSet& s) {
  AtomSet out;
  for (const auto& a : s) {
    std::vector<Term> args;
    args.reserve(a.arity());
    for (const auto& t : a.args()) args.push_back(apply_mapping(h, t));
    out.emplace(a.predicate(), std::move(args));
  }
  return out;
}

bool is_homomorphism(const AtomSet& src, const AtomSet& dst, const TermMapping& h) {
  for (const auto& t : domain_of(src)) {
    auto it = h.find(t);
    if (it == h.end()) return false;
    if (t.is_constant() && it->second != t) return false;
  }
  for (const auto& a : apply_mapping(h, src))
    if (!dst.count(a)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Homomorphism search

struct HomSearch::Impl {
  struct SrcAtom {
    std::vector<int> slots;
    std::vector<int> first;  // position -> first position holding the same slot
    int pred = -1;           // index into tables, -1 when dst has no such predicate
  };

  HomOptions options;
  std::vector<Term> src_terms;  // slot -> term, sorted
  std::vector<SrcAtom> atoms;
  std::vector<std::vector<int>> atoms_of;  // slot -> atom indices
  std::vector<Term> dst_terms;
  std::unordered_map<Term, int, TermHash> dst_id;
  std::vector<std::vector<std::vector<int>>> tables;  // pred -> tuples
  std::map<std::pair<std::string, std::size_t>, int> pred_id;
  struct Rows {
    std::vector<int> ids;
    mutable std::size_t last = 0;  // where the latest support was found
  };
  // pred -> position -> dst value -> rows holding it
  std::vector<std::vector<std::vector<Rows>>> by_value;
  bool impossible = false;  // some src atom has no dst predicate of that arity

  struct State {
    std::vector<int> val;
    std::vector<int> used;  // injective: value -> count
    std::vector<int> stamp;
    int generation = 0;
    // Values still consistent with every atom, per unassigned slot.
    std::vector<std::vector<int>> domain;
    std::vector<std::pair<int, std::vector<int>>> trail;
    // Destination tuple treated as absent.
    int skip_pred = -1;
    int skip_row = -1;
    bool skipped(int pred, int row) const { return pred == skip_pred && row == skip_row; }
    // atom -> slot whose change queued it, kNone or kMany.
    std::vector<int> queued_by;
  };

  // Narrows the domains of slots sharing an atom with `slot`; false on a
  // wipeout. The trail is unwound by unassign either way.
  bool assign(State& st, int slot, int v) const;
  void unassign(State& st, int slot, std::size_t mark) const;
  static constexpr int kNone = -1;
  static constexpr int kMany = -2;
  // Generalized arc consistency from the atoms of `changed` slots plus
  // `seeds` (atoms already consistent with `seed_slot`): every value left in a
  // domain has a supporting dst tuple within the other domains.
  bool propagate(State& st, const std::vector<int>& changed, const std::vector<int>& seeds = {},
                 int seed_slot = kNone) const;
  // Drops values of slot position j of atom a without support; true when the
  // domain shrank.
  bool revise(State& st, const SrcAtom& a, int j) const;

  bool init_state(const TermMapping& pins, State& st) const;
  void candidates(int slot, State& st, std::vector<int>& out) const;
  // Stamps values of `slot` supported by rows of a's table (all rows when
  // `rows` is null); appends them to out when `first`.
  void scan(const SrcAtom& a, int slot, int pos, const std::vector<int>* rows, State& st,
            std::vector<int>& out, bool first) const;
  int choose(const std::vector<char>& allowed, State& st, std::vector<int>& best) const;

  std::optional<TermMapping> first_leaf(State& st) const;
  // Removes the values that lose their only support once `row` of `pred`
  // is skipped; false on a wipeout.
  bool skip_row(State& st, int pred, int row) const;

  // Initial state for the last pins passed to find_avoiding.
  mutable std::optional<TermMapping> base_pins;
  mutable State base;
  mutable bool base_ok = false;

  // Enumerate assignments; `on_leaf` returns false to stop.
  template <class Leaf>
  bool search(State& st, const std::vector<char>& allowed, int remaining, Leaf&& on_leaf) const;
};

bool HomSearch::Impl::init_state(const TermMapping& pins, State& st) const {
  if (impossible) return false;
  st.val.assign(src_terms.size(), -1);
  st.used.assign(dst_terms.size(), 0);
  st.stamp.assign(dst_terms.size(), 0);
  st.domain.assign(src_terms.size(), {});
  st.trail.clear();
  for (std::size_t s = 0; s < src_terms.size(); ++s) {
    const Term& t = src_terms[s];
    auto pin = pins.find(t);
    const Term* image = nullptr;
    if (t.is_constant()) {
      if (pin != pins.end() && pin->second != t) return false;
      image = &t;
    } else if (pin != pins.end()) {
      image = &pin->second;
    }
    if (!image) continue;
    auto it = dst_id.find(*image);
    if (it == dst_id.end()) return false;
    if (options.injective && st.used[it->second]) return false;
    st.val[s] = it->second;
    st.used[it->second]++;
  }
  // Atoms with every slot fixed must already hold.
  for (const auto& a : atoms) {
    bool fixed = std::all_of(a.slots.begin(), a.slots.end(), [&](int s) { return st.val[s] >= 0; });
    if (!fixed) continue;
    bool found = false;
    for (std::size_t ti = 0; ti < tables[a.pred].size(); ++ti) {
      if (st.skipped(a.pred, static_cast<int>(ti))) continue;
      const auto& tup = tables[a.pred][ti];
      bool ok = true;
      for (std::size_t j = 0; j < tup.size() && ok; ++j) ok = tup[j] == st.val[a.slots[j]];
      if (ok) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  for (std::size_t s = 0; s < src_terms.size(); ++s) {
    if (st.val[s] >= 0) continue;
    candidates(static_cast<int>(s), st, st.domain[s]);
    if (st.domain[s].empty()) return false;
  }
  st.queued_by.assign(atoms.size(), kNone);
  std::vector<int> all(src_terms.size());
  std::iota(all.begin(), all.end(), 0);
  return propagate(st, all);
}

bool HomSearch::Impl::assign(State& st, int slot, int v) const {
  st.val[slot] = v;
  st.used[v]++;
  std::vector<int> changed;
  for (int ai : atoms_of[slot]) {
    const SrcAtom& a = atoms[ai];
    int pos = static_cast<int>(std::find(a.slots.begin(), a.slots.end(), slot) - a.slots.begin());
    const Rows& hits = by_value[a.pred][pos][v];
    if (hits.ids.empty()) return false;
    const auto& table = tables[a.pred];
    for (std::size_t j = 0; j < a.slots.size(); ++j) {
      int o = a.slots[j];
      if (st.val[o] >= 0) continue;
      if (std::find(a.slots.begin(), a.slots.begin() + j, o) != a.slots.begin() + j) continue;
      ++st.generation;
      for (int ti : hits.ids) {
        if (st.skipped(a.pred, ti)) continue;
        const auto& tup = table[ti];
        int w = tup[j];
        bool ok = true;
        for (std::size_t k = 0; k < tup.size() && ok; ++k) {
          int sk = a.slots[k];
          if (sk == o)
            ok = tup[k] == w;
          else if (st.val[sk] >= 0)
            ok = tup[k] == st.val[sk];
        }
        if (ok) st.stamp[w] = st.generation;
      }
      auto& dom = st.domain[o];
      auto keep = [&](int w) { return st.stamp[w] == st.generation; };
      if (std::all_of(dom.begin(), dom.end(), keep)) continue;
      st.trail.emplace_back(o, dom);
      std::erase_if(dom, [&](int w) { return !keep(w); });
      if (dom.empty()) return false;
      changed.push_back(o);
    }
  }
  // The filter above is exact for atoms with one open slot; the rest still
  // need support within the remaining domains.
  std::vector<int> seeds;
  for (int ai : atoms_of[slot]) {
    const SrcAtom& a = atoms[ai];
    int open = 0;
    for (std::size_t j = 0; j < a.slots.size(); ++j)
      open += a.first[j] == static_cast<int>(j) && st.val[a.slots[j]] < 0;
    if (open > 1) seeds.push_back(ai);
  }
  return propagate(st, changed, seeds, slot);
}

bool HomSearch::Impl::revise(State& st, const SrcAtom& a, int j) const {
  int o = a.slots[j];
  const auto& idx = by_value[a.pred][j];
  const auto& table = tables[a.pred];
  auto supported = [&](int w) {
    const Rows& rows = idx[w];
    std::size_t n = rows.ids.size();
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t at = rows.last + r < n ? rows.last + r : rows.last + r - n;
      int ti = rows.ids[at];
      if (st.skipped(a.pred, ti)) continue;
      const auto& tup = table[ti];
      bool ok = true;
      for (std::size_t k = 0; k < tup.size() && ok; ++k) {
        int sk = a.slots[k];
        if (a.first[k] != static_cast<int>(k))
          ok = tup[k] == tup[a.first[k]];
        else if (sk == o)
          ok = true;
        else if (st.val[sk] >= 0)
          ok = tup[k] == st.val[sk];
        else
          ok = std::binary_search(st.domain[sk].begin(), st.domain[sk].end(), tup[k]);
      }
      if (ok) {
        rows.last = at;
        return true;
      }
    }
    return false;
  };
  auto& dom = st.domain[o];
  auto bad = std::find_if_not(dom.begin(), dom.end(), supported);
  if (bad == dom.end()) return false;
  st.trail.emplace_back(o, dom);
  std::vector<int> kept(dom.begin(), bad);
  for (auto it = bad + 1; it != dom.end(); ++it)
    if (supported(*it)) kept.push_back(*it);
  dom = std::move(kept);
  return true;
}

bool HomSearch::Impl::propagate(State& st, const std::vector<int>& changed, const std::vector<int>& seeds,
                                int seed_slot) const {
  std::vector<int> queue;
  auto enqueue = [&](int slot) {
    for (int ai : atoms_of[slot]) {
      int& by = st.queued_by[ai];
      if (by == kNone) queue.push_back(ai);
      by = by == kNone || by == slot ? slot : kMany;
    }
  };
  for (int ai : seeds) {
    st.queued_by[ai] = seed_slot;
    queue.push_back(ai);
  }
  for (int s : changed) enqueue(s);
  while (!queue.empty()) {
    int ai = queue.back();
    queue.pop_back();
    int by = st.queued_by[ai];
    st.queued_by[ai] = kNone;
    const SrcAtom& a = atoms[ai];
    for (std::size_t j = 0; j < a.slots.size(); ++j) {
      int o = a.slots[j];
      if (a.first[j] != static_cast<int>(j) || st.val[o] >= 0 || o == by) continue;
      if (!revise(st, a, static_cast<int>(j))) continue;
      if (st.domain[o].empty()) {
        for (int q : queue) st.queued_by[q] = kNone;
        return false;
      }
      enqueue(o);
    }
  }
  return true;
}

void HomSearch::Impl::unassign(State& st, int slot, std::size_t mark) const {
  st.used[st.val[slot]]--;
  st.val[slot] = -1;
  while (st.trail.size() > mark) {
    st.domain[st.trail.back().first] = std::move(st.trail.back().second);
    st.trail.pop_back();
  }
}

// Values v such that every atom mentioning `slot` has a dst tuple agreeing
// with the current partial assignment once slot := v.
void HomSearch::Impl::candidates(int slot, State& st, std::vector<int>& out) const {
  out.clear();
  bool first = true;
  for (int ai : atoms_of[slot]) {
    const SrcAtom& a = atoms[ai];
    int pos = -1;
    int bound = -1;
    for (std::size_t j = 0; j < a.slots.size(); ++j) {
      int s = a.slots[j];
      if (s == slot && pos < 0) pos = static_cast<int>(j);
      if (s != slot && st.val[s] >= 0 && bound < 0) bound = static_cast<int>(j);
    }
    const std::vector<int>* rows = nullptr;
    if (bound >= 0) {
      const auto& idx = by_value[a.pred][bound];
      rows = &idx[st.val[a.slots[bound]]].ids;
      if (rows->empty()) {
        out.clear();
        return;
      }
    }
    ++st.generation;
    std::vector<int> sorted = a.slots;
    std::sort(sorted.begin(), sorted.end());
    bool distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    if (!rows && distinct) {
      // Unconstrained by the rest of the atom: the column's values are the
      // candidates.
      const auto& column = by_value[a.pred][pos];
      for (int v = 0; v < static_cast<int>(column.size()); ++v) {
        const auto& where = column[v].ids;
        if (where.empty() || (where.size() == 1 && st.skipped(a.pred, where[0]))) continue;
        if (first && st.stamp[v] != st.generation) out.push_back(v);
        st.stamp[v] = st.generation;
      }
    } else {
      scan(a, slot, pos, rows, st, out, first);
    }
    if (first) {
      std::sort(out.begin(), out.end());
      first = false;
    } else {
      std::erase_if(out, [&](int v) { return st.stamp[v] != st.generation; });
    }
    if (out.empty()) return;
  }
}

void HomSearch::Impl::scan(const SrcAtom& a, int slot, int pos, const std::vector<int>* rows, State& st,
                           std::vector<int>& out, bool first) const {
  const auto& table = tables[a.pred];
  std::size_t n = rows ? rows->size() : table.size();
  for (std::size_t r = 0; r < n; ++r) {
    int ti = rows ? (*rows)[r] : static_cast<int>(r);
    if (st.skipped(a.pred, ti)) continue;
    const auto& tup = table[ti];
    int v = tup[pos];
    bool ok = true;
    for (std::size_t j = 0; j < tup.size() && ok; ++j) {
      int s = a.slots[j];
      if (s == slot)
        ok = tup[j] == v;
      else if (st.val[s] >= 0)
        ok = tup[j] == st.val[s];
    }
    if (!ok) continue;
    if (first && st.stamp[v] != st.generation) out.push_back(v);
    st.stamp[v] = st.generation;
  }
}

int HomSearch::Impl::choose(const std::vector<char>& allowed, State& st,
                            std::vector<int>& best) const {
  int chosen = -1;
  std::size_t best_size = 0;
  for (std::size_t s = 0; s < src_terms.size(); ++s) {
    if (st.val[s] >= 0 || !allowed[s]) continue;
    // Domains do not track injectivity, which depends on every assigned slot.
    std::size_t size = st.domain[s].size();
    if (options.injective)
      size = static_cast<std::size_t>(
          std::count_if(st.domain[s].begin(), st.domain[s].end(), [&](int v) { return st.used[v] == 0; }));
    bool better = chosen < 0 || size < best_size ||
                  (size == best_size && atoms_of[s].size() > atoms_of[chosen].size());
    if (better) {
      chosen = static_cast<int>(s);
      best_size = size;
      if (size == 0) break;
    }
  }
  if (chosen >= 0) {
    best = st.domain[chosen];
    if (options.injective) std::erase_if(best, [&](int v) { return st.used[v] > 0; });
  }
  return chosen;
}

template <class Leaf>
bool HomSearch::Impl::search(State& st, const std::vector<char>& allowed, int remaining,
                             Leaf&& on_leaf) const {
  if (remaining == 0) return on_leaf(st);
  std::vector<int> cand;
  int slot = choose(allowed, st, cand);
  for (int v : cand) {
    std::size_t mark = st.trail.size();
    bool go_on = !assign(st, slot, v) || search(st, allowed, remaining - 1, on_leaf);
    unassign(st, slot, mark);
    if (!go_on) return false;
  }
  return true;
}

bool HomSearch::Impl::skip_row(State& st, int pred, int row) const {
  st.skip_pred = pred;
  st.skip_row = row;
  const auto& skipped = tables[pred][row];
  std::vector<int> changed;
  auto consistent = [&](const SrcAtom& a, const std::vector<int>& tup) {
    for (std::size_t j = 0; j < tup.size(); ++j) {
      int s = a.slots[j];
      int want = st.val[s] >= 0 ? st.val[s] : tup[std::find(a.slots.begin(), a.slots.end(), s) - a.slots.begin()];
      if (tup[j] != want) return false;
    }
    return true;
  };
  for (const auto& a : atoms) {
    if (a.pred != pred) continue;
    bool fixed = std::all_of(a.slots.begin(), a.slots.end(), [&](int s) { return st.val[s] >= 0; });
    if (fixed) {
      // Rows are distinct, so a fixed atom matching the skipped row has no
      // other support.
      if (consistent(a, skipped)) return false;
      continue;
    }
    for (std::size_t j = 0; j < a.slots.size(); ++j) {
      int s = a.slots[j];
      if (st.val[s] >= 0 || std::find(a.slots.begin(), a.slots.end(), s) != a.slots.begin() + j) continue;
      int w = skipped[j];
      auto& dom = st.domain[s];
      auto at = std::lower_bound(dom.begin(), dom.end(), w);
      if (at == dom.end() || *at != w) continue;
      const auto& rows = by_value[pred][j][w].ids;
      bool supported = std::any_of(rows.begin(), rows.end(), [&](int ti) {
        return ti != row && consistent(a, tables[pred][ti]);
      });
      if (supported) continue;
      dom.erase(at);
      if (dom.empty()) return false;
      changed.push_back(s);
    }
  }
  return propagate(st, changed);
}

std::optional<TermMapping> HomSearch::Impl::first_leaf(State& st) const {
  std::vector<char> allowed(src_terms.size(), 1);
  int remaining = static_cast<int>(std::count(st.val.begin(), st.val.end(), -1));
  std::optional<TermMapping> result;
  search(st, allowed, remaining, [&](const State& s) {
    TermMapping h;
    for (std::size_t i = 0; i < src_terms.size(); ++i) h.emplace(src_terms[i], dst_terms[s.val[i]]);
    result = std::move(h);
    return false;
  });
  return result;
}

HomSearch::HomSearch(const AtomSet& src, const AtomSet& dst, HomOptions options)
    : impl_(std::make_unique<Impl>()) {
  Impl& m = *impl_;
  m.options = options;
  for (const auto& t : domain_of(dst)) {
    m.dst_id.emplace(t, static_cast<int>(m.dst_terms.size()));
    m.dst_terms.push_back(t);
  }
  auto& pred_id = m.pred_id;
  for (const auto& a : dst) {
    auto [it, fresh] = pred_id.emplace(std::make_pair(a.predicate(), a.arity()),
                                       static_cast<int>(m.tables.size()));
    if (fresh) m.tables.emplace_back();
    std::vector<int> tup;
    for (const auto& t : a.args()) tup.push_back(m.dst_id.at(t));
    m.tables[it->second].push_back(std::move(tup));
  }
  std::unordered_map<Term, int, TermHash> slot_of;
  for (const auto& t : domain_of(src)) {
    slot_of.emplace(t, static_cast<int>(m.src_terms.size()));
    m.src_terms.push_back(t);
  }
  m.atoms_of.resize(m.src_terms.size());
  for (const auto& a : src) {
    Impl::SrcAtom sa;
    auto it = pred_id.find({a.predicate(), a.arity()});
    if (it == pred_id.end()) {
      m.impossible = true;
      continue;
    }
    sa.pred = it->second;
    for (const auto& t : a.args()) sa.slots.push_back(slot_of.at(t));
    for (std::size_t j = 0; j < sa.slots.size(); ++j)
      sa.first.push_back(static_cast<int>(std::find(sa.slots.begin(), sa.slots.end(), sa.slots[j]) - sa.slots.begin()));
    int index = static_cast<int>(m.atoms.size());
    std::vector<int> seen;
    for (int s : sa.slots)
      if (std::find(seen.begin(), seen.end(), s) == seen.end()) {
        seen.push_back(s);
        m.atoms_of[s].push_back(index);
      }
    m.atoms.push_back(std::move(sa));
  }
  m.by_value.resize(m.tables.size());
  for (std::size_t p = 0; p < m.tables.size(); ++p) {
    const auto& table = m.tables[p];
    m.by_value[p].assign(table.empty() ? 0 : table[0].size(), std::vector<Impl::Rows>(m.dst_terms.size()));
    for (std::size_t ti = 0; ti < table.size(); ++ti)
      for (std::size_t j = 0; j < table[ti].size(); ++j)
        m.by_value[p][j][table[ti][j]].ids.push_back(static_cast<int>(ti));
  }
}

HomSearch::~HomSearch() = default;
HomSearch::HomSearch(HomSearch&&) noexcept = default;
HomSearch& HomSearch::operator=(HomSearch&&) noexcept = default;

std::optional<TermMapping> HomSearch::find(const TermMapping& pins) const {
  const Impl& m = *impl_;
  Impl::State st;
  if (!m.init_state(pins, st)) return std::nullopt;
  return m.first_leaf(st);
}

std::optional<TermMapping> HomSearch::find_avoiding(const Atom& excluded, const TermMapping& pins) const {
  const Impl& m = *impl_;
  if (!m.base_pins || *m.base_pins != pins) {
    m.base = Impl::State{};
    m.base_ok = m.init_state(pins, m.base);
    m.base_pins = pins;
  }
  if (!m.base_ok) return std::nullopt;
  Impl::State st = m.base;
  auto pred = m.pred_id.find({excluded.predicate(), excluded.arity()});
  if (pred != m.pred_id.end()) {
    std::vector<int> tup;
    for (const auto& t : excluded.args()) {
      auto it = m.dst_id.find(t);
      if (it == m.dst_id.end()) break;
      tup.push_back(it->second);
    }
    const auto& table = m.tables[pred->second];
    auto row = std::find(table.begin(), table.end(), tup);
    if (row != table.end() && !m.skip_row(st, pred->second, static_cast<int>(row - table.begin())))
      return std::nullopt;
  }
  return m.first_leaf(st);
}

std::set<Tuple> HomSearch::project(const Tuple& keys, const TermMapping& pins) const {
  const Impl& m = *impl_;
  std::set<Tuple> out;
  Impl::State st;
  if (!m.init_state(pins, st)) return out;
  std::vector<int> key_slots;
  for (const auto& k : keys) {
    auto it = std::lower_bound(m.src_terms.begin(), m.src_terms.end(), k);
    if (it == m.src_terms.end() || *it != k)
      throw SemanticError("projection key " + to_string(k) + " does not occur in the source");
    key_slots.push_back(static_cast<int>(it - m.src_terms.begin()));
  }
  std::vector<char> key_allowed(m.src_terms.size(), 0);
  for (int s : key_slots) key_allowed[s] = 1;
  std::vector<char> rest_allowed(m.src_terms.size(), 1);
  int key_remaining = 0;
  for (std::size_t s = 0; s < m.src_terms.size(); ++s)
    if (key_allowed[s] && st.val[s] < 0) ++key_remaining;
  int total_remaining = static_cast<int>(std::count(st.val.begin(), st.val.end(), -1));
  m.search(st, key_allowed, key_remaining, [&](Impl::State& s) {
    bool extends = false;
    m.search(s, rest_allowed, total_remaining - key_remaining, [&](const Impl::State&) {
      extends = true;
      return false;
    });
    if (extends) {
      Tuple tup;
      for (int ks : key_slots) tup.push_back(m.dst_terms[s.val[ks]]);
      out.insert(std::move(tup));
    }
    return true;
  });
  return out;
}

std::size_t HomSearch::count(const TermMapping& pins, std::size_t limit) const {
  const Impl& m = *impl_;
  Impl::State st;
  if (!m.init_state(pins, st)) return 0;
  std::vector<char> allowed(m.src_terms.size(), 1);
  int remaining = static_cast<int>(std::count(st.val.begin(), st.val.end(), -1));
  std::size_t n = 0;
  m.search(st, allowed, remaining, [&](const Impl::State&) { return ++n < limit; });
  return n;
}

std::optional<TermMapping> find_homomorphism(const AtomSet& src, const AtomSet& dst,
                                             const TermMapping& pins) {
  return HomSearch(src, dst).find(pins);
}

std::optional<TermMapping> find_isomorphism(const AtomSet& s1, const AtomSet& s2,
                                            const TermMapping& pins) {
  if (s1.size() != s2.size()) return std::nullopt;
  std::set<Term> d1 = domain_of(s1), d2 = domain_of(s2);
  if (d1.size() != d2.size()) return std::nullopt;
  auto constants = [](const std::set<Term>& d) {
    std::set<Term> out;
    for (const auto& t : d)
      if (t.is_constant()) out.insert(t);
    return out;
  };
  // With equal constant sets, an injective hom between equal-size structures
  // is onto on atoms and sends variables onto variables, so its inverse is a
  // hom as well.
  if (constants(d1) != constants(d2)) return std::nullopt;
  return HomSearch(s1, s2, HomOptions{.injective = true}).find(pins);
}

bool is_isomorphic(const AtomSet& s1, const AtomSet& s2) {
  return find_isomorphism(s1, s2).has_value();
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

bool bare_constant(const std::string& s) {
  if (s.empty()) return false;
  unsigned char c0 = static_cast<unsigned char>(s[0]);
  if (!(std::islower(c0) || std::isdigit(c0) || c0 == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    unsigned char c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c == '_';
  });
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string constant_token(const std::string& s) { return bare_constant(s) ? s : quoted(s); }

bool bare_variable(const std::string& s) {
  if (s.empty()) return false;
  unsigned char c0 = static_cast<unsigned char>(s[0]);
  if (!(std::isupper(c0) || c0 == '?')) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char ch) {
    unsigned char c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c == '_';
  });
}

}  // namespace

std::string to_string(const Term& t) {
  std::string out;
  if (t.is_constant())
    out = constant_token(t.name());
  else
    out = bare_variable(t.name()) ? t.name() : "?" + t.name();
  if (!t.index().empty()) {
    out += '[';
    for (std::size_t i = 0; i < t.index().size(); ++i) {
      if (i) out += ',';
      out += constant_token(t.index()[i]);
    }
    out += ']';
  }
  return out;
}

std::string to_string(const Atom& a) {
  std::string out = a.predicate() + "(";
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (i) out += ',';
    out += to_string(a.args()[i]);
  }
  return out + ")";
}

std::string to_string(const AtomSet& s) {
  std::string out;
  for (const auto& a : s) {
    if (!out.empty()) out += ", ";
    out += to_string(a);
  }
  return out;
}

std::string to_string(const Tuple& t) {
  std::string out = "<";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ',';
    out += to_string(t[i]);
  }
  return out + ">";
}

}  // namespace nexus
