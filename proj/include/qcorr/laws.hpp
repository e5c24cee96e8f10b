#pragma once

// Conservation laws and inequalities between entanglement of formation and
// discord as data: named catalog entries, generators for the N-party
// families, an exact entropy-telescoping certifier, and a numerical evaluator.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qcorr/hilbert.hpp"
#include "qcorr/measures.hpp"

namespace qcorr {

enum class TermKind { EF, Discord, ClassicalCorr, Entropy, CondEntropy };
enum class Relation { Eq, Le, Ge };

inline std::string to_string(TermKind k) {
  switch (k) {
    case TermKind::EF: return "EF";
    case TermKind::Discord: return "Discord";
    case TermKind::ClassicalCorr: return "ClassicalCorr";
    case TermKind::Entropy: return "Entropy";
    case TermKind::CondEntropy: return "CondEntropy";
  }
  return "?";
}

inline std::string to_string(Relation r) {
  switch (r) {
    case Relation::Eq: return "Eq";
    case Relation::Le: return "Le";
    case Relation::Ge: return "Ge";
  }
  return "?";
}

/// Party labels as letters (a = 0) for N <= 26, else 1-based numbers.
inline std::string party_labels(const SubsystemSet& s, int n_parties) {
  std::string out;
  for (int i : s) {
    if (n_parties <= 26)
      out += static_cast<char>('a' + i);
    else
      out += (out.empty() ? "" : ",") + std::to_string(i + 1);
  }
  return out;
}

/// One summand. For EF `other` is the second side of the cut; for Discord and
/// ClassicalCorr it is the measured side; for CondEntropy the conditioning side.
struct CorrelationTerm {
  TermKind kind = TermKind::EF;
  SubsystemSet target;
  SubsystemSet other;
  int coefficient = 1;

  std::string to_string(int n_parties) const {
    const std::string t = party_labels(target, n_parties);
    const std::string o = party_labels(other, n_parties);
    std::string body;
    switch (kind) {
      case TermKind::EF: body = "E_{" + t + "|" + o + "}"; break;
      case TermKind::Discord: body = "D_{" + t + "|" + o + "}"; break;
      case TermKind::ClassicalCorr: body = "J_{" + t + "|" + o + "}"; break;
      case TermKind::Entropy: body = "S_{" + t + "}"; break;
      case TermKind::CondEntropy: body = "S_{" + t + "|" + o + "}"; break;
    }
    return coefficient == 1 ? body : std::to_string(coefficient) + " " + body;
  }

  /// Identity up to the symmetry of EF.
  std::tuple<int, std::uint64_t, std::uint64_t> key() const {
    std::uint64_t t = target.mask();
    std::uint64_t o = other.mask();
    if (kind == TermKind::EF && o < t) std::swap(t, o);
    return {static_cast<int>(kind), t, o};
  }
};

struct LawSpec {
  std::string name;
  int n_parties = 0;
  Relation relation = Relation::Eq;
  std::vector<CorrelationTerm> lhs;
  std::vector<CorrelationTerm> rhs;

  void validate() const {
    if (n_parties < 2 || n_parties > 26) throw ArityError(name + ": party count " + std::to_string(n_parties));
    for (const auto* side : {&lhs, &rhs})
      for (const auto& term : *side) {
        if (term.target.empty()) throw InvalidPartition(name + ": empty target");
        if (!term.target.disjoint(term.other)) throw InvalidPartition(name + ": overlapping term " + term.to_string(n_parties));
        if (term.target.max() >= n_parties || term.other.max() >= n_parties)
          throw InvalidPartition(name + ": label out of range in " + term.to_string(n_parties));
        const bool needs_other = term.kind == TermKind::EF || term.kind == TermKind::Discord || term.kind == TermKind::ClassicalCorr;
        if (needs_other && term.other.empty()) throw InvalidPartition(name + ": term without second side");
      }
  }

  std::string to_string() const {
    const auto side = [&](const std::vector<CorrelationTerm>& terms) {
      std::string s;
      for (std::size_t i = 0; i < terms.size(); ++i) s += (i ? " + " : "") + terms[i].to_string(n_parties);
      return s;
    };
    const char* rel = relation == Relation::Eq ? " = " : relation == Relation::Le ? " <= " : " >= ";
    return side(lhs) + rel + side(rhs);
  }
};

namespace laws_detail {

inline SubsystemSet letters(const std::string& s) {
  std::vector<int> out;
  for (char ch : s) out.push_back(ch - 'a');
  return SubsystemSet(std::move(out));
}
inline CorrelationTerm ef(const std::string& x, const std::string& y) { return {TermKind::EF, letters(x), letters(y), 1}; }
inline CorrelationTerm dc(const std::string& x, const std::string& y) { return {TermKind::Discord, letters(x), letters(y), 1}; }

inline LawSpec law(std::string name, int n, Relation rel, std::vector<CorrelationTerm> lhs, std::vector<CorrelationTerm> rhs) {
  LawSpec out{std::move(name), n, rel, std::move(lhs), std::move(rhs)};
  out.validate();
  return out;
}

/// Label i + offset taken cyclically mod n.
inline int wrap(int i, int n) { return ((i % n) + n) % n; }

/// {i + first, ..., i + last} cyclically (first <= last).
inline SubsystemSet cyclic_run(int i, int first, int last, int n) {
  std::vector<int> out;
  for (int k = first; k <= last; ++k) out.push_back(wrap(i + k, n));
  return SubsystemSet(std::move(out));
}

/// {i - 1, ..., i - count} cyclically.
inline SubsystemSet cyclic_left(int i, int count, int n) { return cyclic_run(i, -count, -1, n); }

}  // namespace laws_detail

/// Sum over i of E(i | i+1..i+n) = sum over i of D(i | i-1..i-n), n = (N-1)/2.
inline LawSpec gen_odd_cycle_law(int n_parties) {
  using namespace laws_detail;
  if (n_parties < 3 || n_parties % 2 == 0) throw ArityError("odd cycle law needs odd N >= 3, got " + std::to_string(n_parties));
  const int half = (n_parties - 1) / 2;
  LawSpec out{"gen:odd:" + std::to_string(n_parties), n_parties, Relation::Eq, {}, {}};
  for (int i = 0; i < n_parties; ++i) {
    out.lhs.push_back({TermKind::EF, SubsystemSet{i}, cyclic_run(i, 1, half, n_parties), 1});
    out.rhs.push_back({TermKind::Discord, SubsystemSet{i}, cyclic_left(i, half, n_parties), 1});
  }
  out.validate();
  return out;
}

/// Even N, n = N/2: for each party i the cuts i | i+1..i+n-1 and i | i+1..i+n
/// on the left, matched by D(i | i-1..i-n) and D(i | i-1..i-(n-1)).
inline LawSpec gen_even_cycle_law(int n_parties) {
  using namespace laws_detail;
  if (n_parties < 4 || n_parties % 2 != 0) throw ArityError("even cycle law needs even N >= 4, got " + std::to_string(n_parties));
  const int half = n_parties / 2;
  LawSpec out{"gen:even:" + std::to_string(n_parties), n_parties, Relation::Eq, {}, {}};
  for (int i = 0; i < n_parties; ++i) {
    out.lhs.push_back({TermKind::EF, SubsystemSet{i}, cyclic_run(i, 1, half - 1, n_parties), 1});
    out.lhs.push_back({TermKind::EF, SubsystemSet{i}, cyclic_run(i, 1, half, n_parties), 1});
    out.rhs.push_back({TermKind::Discord, SubsystemSet{i}, cyclic_left(i, half, n_parties), 1});
    out.rhs.push_back({TermKind::Discord, SubsystemSet{i}, cyclic_left(i, half - 1, n_parties), 1});
  }
  out.validate();
  return out;
}

/// Sum of D(i | L_i) = sum of D(i | R_i); L_i drops i and its right
/// neighbour i+1, R_i drops i and its left neighbour i-1.
inline LawSpec gen_discord_law(int n_parties) {
  using namespace laws_detail;
  if (n_parties < 3) throw ArityError("discord law needs N >= 3, got " + std::to_string(n_parties));
  LawSpec out{"gen:discord:" + std::to_string(n_parties), n_parties, Relation::Eq, {}, {}};
  for (int i = 0; i < n_parties; ++i) {
    out.lhs.push_back({TermKind::Discord, SubsystemSet{i}, cyclic_run(i, 2, n_parties - 1, n_parties), 1});
    out.rhs.push_back({TermKind::Discord, SubsystemSet{i}, cyclic_run(i, 1, n_parties - 2, n_parties), 1});
  }
  out.validate();
  return out;
}

/// Sum over k of E(k+1..k+N-2 | k) = sum over k of D(k+1..k+N-2 | k-1):
/// every discord measures a single party.
inline LawSpec gen_one_measured_law(int n_parties) {
  using namespace laws_detail;
  if (n_parties < 3) throw ArityError("one-measured law needs N >= 3, got " + std::to_string(n_parties));
  LawSpec out{"gen:onemeasured:" + std::to_string(n_parties), n_parties, Relation::Eq, {}, {}};
  for (int k = 0; k < n_parties; ++k) {
    const SubsystemSet block = cyclic_run(k, 1, n_parties - 2, n_parties);
    out.lhs.push_back({TermKind::EF, block, SubsystemSet{k}, 1});
    out.rhs.push_back({TermKind::Discord, block, SubsystemSet{wrap(k - 1, n_parties)}, 1});
  }
  out.validate();
  return out;
}

/// The fixed named relations (parties a, b, c, ... are labels 0, 1, 2, ...).
inline std::vector<LawSpec> catalog() {
  using namespace laws_detail;
  const auto eq = Relation::Eq;
  std::vector<LawSpec> out;
  out.push_back(law("tri_conservation", 3, eq, {ef("a", "b"), ef("a", "c")}, {dc("a", "b"), dc("a", "c")}));
  out.push_back(law("tri_cycle", 3, eq, {ef("a", "b"), ef("b", "c"), ef("c", "a")}, {dc("b", "a"), dc("c", "b"), dc("a", "c")}));
  out.push_back(law("tri_discord_cycle", 3, eq, {dc("a", "b"), dc("b", "c"), dc("c", "a")},
                    {dc("b", "a"), dc("c", "b"), dc("a", "c")}));
  out.push_back(law("four_central_ge", 4, Relation::Ge, {ef("a", "bc"), ef("a", "cd")}, {dc("a", "d"), dc("a", "b")}));
  out.push_back(law("four_central_le", 4, Relation::Le, {ef("a", "b"), ef("a", "d")}, {dc("a", "bc"), dc("a", "cd")}));
  out.push_back(law("four_all_ge", 4, Relation::Ge, {ef("a", "bc"), ef("a", "cd"), ef("a", "db")},
                    {dc("a", "b"), dc("a", "c"), dc("a", "d")}));
  // Third discord is D_{a|bc}: the one matching E_{ad} through its purification.
  out.push_back(law("four_all_le", 4, Relation::Le, {ef("a", "b"), ef("a", "c"), ef("a", "d")},
                    {dc("a", "cd"), dc("a", "db"), dc("a", "bc")}));
  out.push_back(law("four_cycle_ge", 4, Relation::Ge, {ef("a", "bc"), ef("b", "cd"), ef("c", "da"), ef("d", "ab")},
                    {dc("a", "d"), dc("d", "c"), dc("c", "b"), dc("b", "a")}));
  out.push_back(law("four_cycle_le", 4, Relation::Le, {ef("a", "b"), ef("b", "c"), ef("c", "d"), ef("d", "a")},
                    {dc("a", "cd"), dc("b", "da"), dc("c", "ab"), dc("d", "bc")}));
  out.push_back(law("five_central_triplet.1", 5, eq, {ef("a", "bc"), ef("a", "de")}, {dc("a", "bc"), dc("a", "de")}));
  out.push_back(law("five_central_triplet.2", 5, eq, {ef("a", "bd"), ef("a", "ce")}, {dc("a", "bd"), dc("a", "ce")}));
  out.push_back(law("five_central_triplet.3", 5, eq, {ef("a", "be"), ef("a", "cd")}, {dc("a", "be"), dc("a", "cd")}));
  out.push_back(law("five_central_triplet.sum", 5, eq,
                    {ef("a", "bc"), ef("a", "de"), ef("a", "bd"), ef("a", "ce"), ef("a", "be"), ef("a", "cd")},
                    {dc("a", "de"), dc("a", "bc"), dc("a", "ce"), dc("a", "bd"), dc("a", "cd"), dc("a", "be")}));
  out.push_back(law("five_cycle", 5, eq, {ef("a", "bc"), ef("b", "cd"), ef("c", "de"), ef("d", "ea"), ef("e", "ab")},
                    {dc("a", "de"), dc("b", "ea"), dc("c", "ab"), dc("d", "bc"), dc("e", "cd")}));
  out.push_back(law("four_alternating", 4, eq, {ef("a", "bc"), ef("c", "d"), ef("d", "ab"), ef("b", "c")},
                    {dc("a", "d"), dc("c", "ba"), dc("d", "c"), dc("b", "ad")}));
  out.push_back(law("four_mixed_conservation", 4, eq,
                    {ef("a", "bc"), ef("a", "b"), ef("b", "cd"), ef("b", "c"), ef("c", "da"), ef("c", "d"), ef("d", "ab"), ef("d", "a")},
                    {dc("a", "cd"), dc("a", "d"), dc("b", "ad"), dc("b", "a"), dc("c", "ab"), dc("c", "b"), dc("d", "bc"), dc("d", "c")}));
  out.push_back(law("four_mixed_symmetric", 4, eq,
                    {ef("a", "bc"), ef("a", "b"), ef("b", "cd"), ef("b", "c"), ef("c", "da"), ef("c", "d"), ef("d", "ab"), ef("d", "a")},
                    {dc("a", "bc"), dc("b", "a"), dc("b", "cd"), dc("c", "b"), dc("c", "da"), dc("d", "c"), dc("d", "ab"), dc("a", "d")}));
  out.push_back(law("four_discord", 4, eq, {dc("a", "bc"), dc("b", "cd"), dc("c", "ad"), dc("d", "ab")},
                    {dc("a", "cd"), dc("b", "ad"), dc("c", "ab"), dc("d", "bc")}));
  out.push_back(law("five_discord", 5, eq, {dc("a", "cde"), dc("b", "ade"), dc("c", "abe"), dc("d", "abc"), dc("e", "bcd")},
                    {dc("a", "bcd"), dc("b", "cde"), dc("c", "ade"), dc("d", "abe"), dc("e", "abc")}));
  out.push_back(law("four_one_measured", 4, eq, {ef("bc", "a"), ef("cd", "b"), ef("da", "c"), ef("ab", "d")},
                    {dc("bc", "d"), dc("cd", "a"), dc("da", "b"), dc("ab", "c")}));
  return out;
}

/// Catalog name, or gen:odd:N, gen:even:N, gen:discord:N, gen:onemeasured:N.
/// `five_central_triplet` alone resolves to its four members.
inline std::vector<LawSpec> resolve_laws(const std::string& id) {
  if (id.rfind("gen:", 0) == 0) {
    const auto colon = id.find(':', 4);
    if (colon == std::string::npos) throw std::invalid_argument("unknown law '" + id + "'");
    const std::string family = id.substr(4, colon - 4);
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(id.substr(colon + 1), &used);
      if (used != id.size() - colon - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad party count in law '" + id + "'");
    }
    if (family == "odd") return {gen_odd_cycle_law(n)};
    if (family == "even") return {gen_even_cycle_law(n)};
    if (family == "discord") return {gen_discord_law(n)};
    if (family == "onemeasured") return {gen_one_measured_law(n)};
    throw std::invalid_argument("unknown law family '" + family + "'");
  }
  std::vector<LawSpec> out;
  for (auto& l : catalog())
    if (l.name == id || l.name.rfind(id + ".", 0) == 0) out.push_back(std::move(l));
  if (out.empty()) throw std::invalid_argument("unknown law '" + id + "'");
  return out;
}

inline LawSpec find_law(const std::string& id) {
  auto laws = resolve_laws(id);
  if (laws.size() != 1) throw std::invalid_argument("'" + id + "' names a group of " + std::to_string(laws.size()) + " laws");
  return std::move(laws.front());
}

/// Apply label i -> perm[i] to every term.
inline LawSpec relabel(const LawSpec& law, const std::vector<int>& perm) {
  const auto map_set = [&](const SubsystemSet& s) {
    std::vector<int> out;
    for (int i : s) out.push_back(perm[static_cast<std::size_t>(i)]);
    return SubsystemSet(std::move(out));
  };
  LawSpec out = law;
  for (auto* side : {&out.lhs, &out.rhs})
    for (auto& term : *side) {
      term.target = map_set(term.target);
      term.other = map_set(term.other);
    }
  return out;
}

/// Same relation and term multisets under some relabeling of the parties;
/// an equality may also have its sides exchanged, and Le matches a swapped Ge.
inline bool equivalent(const LawSpec& a, const LawSpec& b) {
  if (a.n_parties != b.n_parties) return false;
  using Bag = std::vector<std::tuple<int, std::uint64_t, std::uint64_t, int>>;
  const auto bag = [](const std::vector<CorrelationTerm>& terms) {
    Bag out;
    for (const auto& t : terms) {
      auto [k, x, y] = t.key();
      out.emplace_back(k, x, y, t.coefficient);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  const Bag bl = bag(b.lhs);
  const Bag br = bag(b.rhs);
  const bool straight = a.relation == b.relation;
  const bool swapped = (a.relation == Relation::Eq && b.relation == Relation::Eq) ||
                       (a.relation == Relation::Le && b.relation == Relation::Ge) ||
                       (a.relation == Relation::Ge && b.relation == Relation::Le);
  if (!straight && !swapped) return false;
  std::vector<int> perm(static_cast<std::size_t>(a.n_parties));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    const LawSpec r = relabel(a, perm);
    const Bag al = bag(r.lhs);
    const Bag ar = bag(r.rhs);
    if (straight && al == bl && ar == br) return true;
    if (swapped && al == br && ar == bl) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

/// One use of E(X|Y) = D(X|Z) + S(X|Z) on a pure state, Y = complement of XZ.
struct KwInstance {
  SubsystemSet target;
  SubsystemSet kept;
  SubsystemSet measured;
};

/// Entropy combination left after every discord is traded for an EF through
/// its KW instance. Subsets are canonicalized to the side holding label 0.
struct Certificate {
  int n_parties = 0;
  std::vector<KwInstance> kw_instances;
  std::map<std::uint64_t, int> residue;

  bool zero() const { return residue.empty(); }

  std::string residue_string() const {
    if (residue.empty()) return "0";
    std::string out;
    for (const auto& [mask, c] : residue) {
      out += c < 0 ? (out.empty() ? "-" : " - ") : (out.empty() ? "" : " + ");
      if (std::abs(c) != 1) out += std::to_string(std::abs(c)) + " ";
      out += "S_{" + party_labels(SubsystemSet::from_mask(mask), n_parties) + "}";
    }
    return out;
  }

  /// Value of the residue on a concrete pure state.
  double evaluate(const PureState& psi) const {
    double total = 0.0;
    for (const auto& [mask, c] : residue) total += c * subset_entropy(psi, SubsystemSet::from_mask(mask));
    return total;
  }
};

/// Canonical key of S_T on a pure state: T or its complement, whichever holds
/// label 0 (the lexicographically smaller index list). Empty and full sets
/// carry zero entropy and map to nullopt.
inline std::optional<std::uint64_t> canonical_entropy_key(std::uint64_t mask, int n_parties) {
  const std::uint64_t full = (std::uint64_t{1} << n_parties) - 1;
  mask &= full;
  if (mask == 0 || mask == full) return std::nullopt;
  return (mask & 1U) ? mask : (full ^ mask);
}

/// Rewrites lhs - rhs with every discord replaced through its KW instance
/// (and J, S_{X|Y} expanded into entropies). The EF terms must then cancel
/// exactly, or CertificationFailure names the leftovers. Equalities also
/// require a zero entropy residue; inequalities keep it.
inline Certificate certify(const LawSpec& law) {
  law.validate();
  const int n = law.n_parties;
  Certificate cert;
  cert.n_parties = n;
  std::map<std::pair<std::uint64_t, std::uint64_t>, int> ef_balance;
  const auto add_entropy = [&](std::uint64_t mask, int c) {
    if (auto key = canonical_entropy_key(mask, n)) {
      if ((cert.residue[*key] += c) == 0) cert.residue.erase(*key);
    }
  };
  const auto add_ef = [&](const SubsystemSet& x, const SubsystemSet& y, int c) {
    const std::uint64_t mx = x.mask();
    const std::uint64_t my = y.mask();
    const std::pair key{std::min(mx, my), std::max(mx, my)};
    if ((ef_balance[key] += c) == 0) ef_balance.erase(key);
  };

  for (int side = 0; side < 2; ++side) {
    const int sign = side == 0 ? 1 : -1;
    for (const auto& term : side == 0 ? law.lhs : law.rhs) {
      const int c = sign * term.coefficient;
      const SubsystemSet& x = term.target;
      const SubsystemSet& y = term.other;
      const SubsystemSet z = (x | y).complement(n);
      switch (term.kind) {
        case TermKind::EF:
          if (z.empty())
            add_entropy(x.mask(), c);  // pure cut
          else
            add_ef(x, y, c);
          break;
        case TermKind::Discord:
          if (z.empty()) {
            add_entropy(x.mask(), c);  // pure-state discord is the entanglement entropy
          } else {
            cert.kw_instances.push_back({x, z, y});
            add_ef(x, z, c);
            add_entropy((x | y).mask(), -c);
            add_entropy(y.mask(), c);
          }
          break;
        case TermKind::ClassicalCorr:
          add_entropy(x.mask(), c);
          if (!z.empty()) add_ef(x, z, -c);
          break;
        case TermKind::Entropy: add_entropy(x.mask(), c); break;
        case TermKind::CondEntropy:
          add_entropy((x | y).mask(), c);
          add_entropy(y.mask(), -c);
          break;
      }
    }
  }

  if (!ef_balance.empty()) {
    std::string msg = law.name + ": unmatched entanglement terms after KW substitution:";
    for (const auto& [key, c] : ef_balance) {
      const CorrelationTerm t{TermKind::EF, SubsystemSet::from_mask(key.first), SubsystemSet::from_mask(key.second), c};
      msg += " " + t.to_string(n);
    }
    throw CertificationFailure(msg);
  }
  if (law.relation == Relation::Eq && !cert.zero())
    throw CertificationFailure(law.name + ": entropies do not cancel, residue " + cert.residue_string());
  return cert;
}

/// Default tolerance by law class: 5e-3 for inequalities, 1e-2 for
/// three-party equalities (Wootters-exact EF), 2e-2 for the rest.
inline double default_tolerance(const LawSpec& law) {
  if (law.relation != Relation::Eq) return tolerance::kSingleOptimizer;
  if (law.n_parties == 3) return tolerance::kStackedOptimizers;
  return tolerance::kLargeConvexRoof;
}

struct TermValue {
  CorrelationTerm term;
  bool left = true;
  double value = 0.0;
  bool converged = true;
};

struct EvalReport {
  std::string law;
  std::string state;
  Relation relation = Relation::Eq;
  std::vector<TermValue> terms;
  double lhs_sum = 0.0;
  double rhs_sum = 0.0;
  double slack = 0.0;  // lhs - rhs
  double tolerance = 0.0;
  bool pass = false;
  OptimizerConfig optimizer;

  bool converged() const {
    return std::all_of(terms.begin(), terms.end(), [](const TermValue& t) { return t.converged; });
  }
};

inline bool relation_holds(Relation rel, double slack, double tol) {
  switch (rel) {
    case Relation::Eq: return std::abs(slack) <= tol;
    case Relation::Ge: return slack >= -tol;
    case Relation::Le: return slack <= tol;
  }
  return false;
}

/// Numerical value of one term on a pure state.
inline Estimate evaluate_term(const CorrelationTerm& term, const PureState& psi, const OptimizerConfig& cfg) {
  switch (term.kind) {
    case TermKind::EF: return ef_marginal(psi, term.target, term.other, cfg);
    case TermKind::Discord: return discord_marginal(psi, term.target, term.other, cfg);
    case TermKind::ClassicalCorr: {
      const auto j = classical_correlation_marginal(psi, term.target, term.other, cfg);
      return {j.value, j.converged};
    }
    case TermKind::Entropy: return {subset_entropy(psi, term.target), true};
    case TermKind::CondEntropy: return {conditional_entropy(psi, term.target, term.other), true};
  }
  return {};
}

/// Evaluates every term (optimizer seed derived from (cfg.seed, term index);
/// a term repeated within the law reuses its first value) and grades the slack.
inline EvalReport evaluate(const LawSpec& law, const PureState& psi, const OptimizerConfig& cfg, double tol,
                           std::string state_id = {}) {
  law.validate();
  cfg.validate();
  if (psi.n_parties() != law.n_parties)
    throw ArityError(law.name + " needs " + std::to_string(law.n_parties) + " parties, state has " +
                     std::to_string(psi.n_parties()));
  EvalReport rep;
  rep.law = law.name;
  rep.state = std::move(state_id);
  rep.relation = law.relation;
  rep.tolerance = tol;
  rep.optimizer = cfg;
  std::map<std::tuple<int, std::uint64_t, std::uint64_t>, Estimate> seen;
  std::uint64_t index = 0;
  for (int side = 0; side < 2; ++side)
    for (const auto& term : side == 0 ? law.lhs : law.rhs) {
      const auto key = term.key();
      auto it = seen.find(key);
      if (it == seen.end()) it = seen.emplace(key, evaluate_term(term, psi, with_seed(cfg, index))).first;
      ++index;
      const double weighted = term.coefficient * it->second.value;
      (side == 0 ? rep.lhs_sum : rep.rhs_sum) += weighted;
      rep.terms.push_back({term, side == 0, it->second.value, it->second.converged});
    }
  rep.slack = rep.lhs_sum - rep.rhs_sum;
  rep.pass = relation_holds(law.relation, rep.slack, tol);
  return rep;
}

}  // namespace qcorr
