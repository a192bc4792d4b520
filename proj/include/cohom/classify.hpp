#pragma once

// Re-derivation of the Ricci-flat and Einstein members of the quadratic
// family: an explicit case tree over the coefficient conditions of the
// symbolic Ricci residuals, then an exhaustive falsification sweep over an
// integer grid.

#include "cohom/errors.hpp"
#include "cohom/family.hpp"
#include "cohom/laurent.hpp"
#include "cohom/param_poly.hpp"
#include "cohom/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace cohom {

/// A polynomial condition "poly = 0" together with where it came from,
/// e.g. "L11[x^3]" for the coefficient of x^3 in L11.
struct Condition {
    ParamPoly poly;
    std::string origin;
};

struct Stage {
    std::string name;
    std::vector<Condition> conditions;
};

/// Every coefficient of a Laurent polynomial in x, highest power first.
inline Stage coefficient_stage(const std::string& name, const LaurentPoly<ParamPoly>& p) {
    Stage s{name, {}};
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        std::string power = it->first == 0 ? "1" : it->first == 1 ? "x" : "x^" + std::to_string(it->first);
        s.conditions.push_back({it->second, name + "[" + power + "]"});
    }
    return s;
}

struct CaseLeaf {
    std::string label;
    /// Remaining free parameters stay symbolic; empty when fully determined.
    std::vector<Param> free;
    std::map<Param, ParamPoly> assignment;

    bool determined() const { return free.empty(); }

    ParamSet params() const {
        ParamSet p;
        for (Param v : all_params) {
            auto it = assignment.find(v);
            if (it == assignment.end() || !it->second.is_constant())
                throw DomainError("leaf '" + label + "' is not fully determined");
            p[v] = it->second.constant_term();
        }
        return p;
    }
};

struct ExcludedBranch {
    std::string label;
    std::string reason;
};

struct StuckBranch {
    std::string label;
    std::vector<std::string> conditions;
};

struct CaseTreeResult {
    std::vector<CaseLeaf> leaves;
    std::vector<ExcludedBranch> excluded;
    std::vector<StuckBranch> stuck;
};

namespace detail {

inline std::vector<Integer> positive_divisors(Integer n) {
    if (n < 0) n = -n;
    std::vector<Integer> out;
    for (Integer d = 1; d * d <= n; ++d)
        if (n % d == 0) {
            out.push_back(d);
            if (d * d != n) out.push_back(n / d);
        }
    std::sort(out.begin(), out.end());
    return out;
}

/// Rational roots of a univariate polynomial with rational coefficients
/// (rational root theorem), ascending.
inline std::vector<Rational> rational_roots(const RationalLaurent& p) {
    if (p.is_zero()) throw DomainError("rational_roots of the zero polynomial");
    std::vector<Rational> roots;
    RationalLaurent q = p;
    if (q.min_exponent() > 0) {
        roots.push_back(0);
        q = q.shifted(-q.min_exponent());
    }
    if (q.max_exponent() == 0) return roots;
    Integer lcm = 1;
    for (const auto& [n, c] : q.terms()) {
        Integer d = denominator_of(c);
        lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    const Integer a0 = numerator_of(q.coefficient(0) * lcm);
    const Integer an = numerator_of(q.coefficient(q.max_exponent()) * lcm);
    for (const Integer& num : positive_divisors(a0))
        for (const Integer& den : positive_divisors(an))
            for (int sign : {1, -1}) {
                Rational r = Rational(num * sign) / Rational(den);
                if (q.eval_exact(r).is_zero() && std::find(roots.begin(), roots.end(), r) == roots.end())
                    roots.push_back(r);
            }
    std::sort(roots.begin(), roots.end());
    return roots;
}

inline std::string no_root_witness(const ParamPoly& c, Param v) {
    RationalLaurent u = c.as_univariate(v);
    if (u.min_exponent() == 0 && u.max_exponent() == 2) {
        Rational a = u.coefficient(2), b = u.coefficient(1), k = u.coefficient(0);
        Rational disc = b * b - 4 * a * k;
        if (disc < 0) {
            ParamPoly pos = a > 0 ? c : ParamPoly(-c);
            return pos.to_string() + " > 0 (discriminant " + to_string(disc) + " < 0)";
        }
    }
    return c.to_string() + " has no rational root";
}

} // namespace detail

/// Staged branching solver for systems of polynomial conditions in the six
/// family parameters. Stages are worked in order; within the first stage
/// that still has a nonvanishing condition the rules are tried in priority:
/// nonzero constant (branch excluded), linear substitution with constant
/// coefficient, univariate root split, monomial split, common-factor split.
/// Anything else is recorded as stuck rather than guessed.
class CaseTreeSolver {
public:
    CaseTreeResult solve(const std::string& root, std::vector<Stage> stages) const {
        CaseTreeResult out;
        recurse(root, {}, std::move(stages), out);
        return out;
    }

private:
    using Assignment = std::map<Param, ParamPoly>;

    static ParamPoly apply(const Assignment& a, ParamPoly p) {
        for (const auto& [v, val] : a) p = p.substitute(v, val);
        return p;
    }

    static Assignment assign(Assignment a, Param v, const ParamPoly& val) {
        for (auto& [k, existing] : a) existing = existing.substitute(v, val);
        a[v] = val;
        return a;
    }

    static std::string extend(const std::string& label, const std::string& step) {
        return label + (label.back() == ':' ? " " : ", ") + step;
    }

    void recurse(const std::string& label, const Assignment& a, std::vector<Stage> stages,
                 CaseTreeResult& out) const {
        std::size_t si = 0;
        std::vector<Condition> live;
        for (; si < stages.size(); ++si) {
            live.clear();
            for (const auto& c : stages[si].conditions) {
                ParamPoly p = apply(a, c.poly);
                if (!p.is_zero()) live.push_back({p, c.origin});
            }
            if (!live.empty()) break;
        }
        if (si == stages.size()) {
            CaseLeaf leaf{label, {}, a};
            for (Param v : all_params)
                if (!a.count(v)) leaf.free.push_back(v);
            out.leaves.push_back(std::move(leaf));
            return;
        }

        for (const auto& c : live)
            if (c.poly.is_constant()) {
                out.excluded.push_back({label, c.origin + " reduces to the nonzero constant " + c.poly.to_string()});
                return;
            }

        for (const auto& c : live)
            for (Param v : all_params) {
                if (c.poly.degree_in(v) != 1) continue;
                ParamPoly coef = c.poly.coefficient_of(v, 1);
                if (!coef.is_constant()) continue;
                ParamPoly val = -c.poly.coefficient_of(v, 0) * ParamPoly(Rational(1) / coef.constant_term());
                recurse(extend(label, std::string(param_name(v)) + "=" + val.to_string()), assign(a, v, val),
                        std::move(stages), out);
                return;
            }

        for (const auto& c : live) {
            auto vars = c.poly.variables();
            if (vars.size() != 1) continue;
            Param v = vars.front();
            auto roots = detail::rational_roots(c.poly.as_univariate(v));
            if (roots.empty()) {
                out.excluded.push_back({label, c.origin + ": " + detail::no_root_witness(c.poly, v)});
                return;
            }
            for (const auto& r : roots)
                recurse(extend(label, std::string(param_name(v)) + "=" + to_string(r)), assign(a, v, ParamPoly(r)),
                        stages, out);
            return;
        }

        for (const auto& c : live) {
            if (c.poly.size() != 1) continue;
            for (Param v : c.poly.variables())
                recurse(extend(label, std::string(param_name(v)) + "=0"), assign(a, v, ParamPoly(0)), stages, out);
            return;
        }

        for (const auto& c : live)
            for (Param v : all_params) {
                auto quotient = c.poly.divided_by(v);
                if (!quotient) continue;
                const std::string name = param_name(v);
                recurse(extend(label, name + "=0"), assign(a, v, ParamPoly(0)), stages, out);
                stages[si].conditions.push_back({*quotient, c.origin + "/" + name});
                recurse(extend(label, "[" + name + "!=0]"), a, std::move(stages), out);
                return;
            }

        StuckBranch s{label, {}};
        for (const auto& c : live) s.conditions.push_back(c.origin + ": " + c.poly.to_string() + " = 0");
        out.stuck.push_back(std::move(s));
    }
};

/// The family with symbolic coefficients.
inline Coefficients<ParamPoly> symbolic_params() {
    Coefficients<ParamPoly> p;
    for (Param v : all_params) p[v] = ParamPoly::variable(v);
    return p;
}

/// Checks L00 = -2 x^-1 P Q identically in all six parameters.
inline bool l00_factorization_holds() {
    auto f = family_polys(symbolic_params());
    auto s = symbolic_ricci_from(f);
    using L = LaurentPoly<ParamPoly>;
    return s.l00 == L::monomial(ParamPoly(-2), -1) * f.P * f.Q;
}

/// Result of the grid falsification sweep.
struct SweepReport {
    int bound = 0;
    long long points = 0;
    long long ricci_flat_hits = 0;
    long long einstein_hits = 0;
    /// Grid points that pass but are not sign-equivalent to a listed family.
    std::vector<ParamSet> unexpected_ricci_flat;
    std::vector<ParamSet> unexpected_einstein;
};

struct ClassificationResult {
    std::vector<ParamSet> ricci_flat_families;
    std::vector<ParamSet> einstein_families;
    std::vector<ExcludedBranch> excluded_branches;
    std::vector<StuckBranch> unresolved;
    std::vector<CaseLeaf> leaves;
    bool l00_factorization = false;
    SweepReport sweep;

    bool complete() const {
        return unresolved.empty() && sweep.unexpected_ricci_flat.empty() && sweep.unexpected_einstein.empty();
    }
};

namespace detail {

struct GridHit {
    long long points = 0, flat = 0, einstein = 0;
    std::vector<ParamSet> flat_sets, einstein_sets;
};

inline bool integer_einstein(const Coefficients<Integer>& p, const SymbolicRicci<Integer>& s) {
    if (s.l00.is_zero() || s.l00 != s.l11 || s.l00 != s.l22) return false;
    return einstein_constancy_poly(family_polys(p), s).is_zero();
}

// Grid points whose first coordinate is in [first_lo, first_hi].
inline GridHit sweep_slab(int bound, int first_lo, int first_hi) {
    GridHit h;
    std::array<int, 6> v{};
    const int width = 2 * bound + 1;
    long long per_slab = 1;
    for (int i = 0; i < 5; ++i) per_slab *= width;
    for (int a = first_lo; a <= first_hi; ++a)
        for (long long idx = 0; idx < per_slab; ++idx) {
            v[0] = a;
            long long r = idx;
            for (int i = 5; i >= 1; --i) {
                v[i] = static_cast<int>(r % width) - bound;
                r /= width;
            }
            if (std::all_of(v.begin(), v.end(), [](int z) { return z == 0; })) continue;
            ++h.points;
            Coefficients<Integer> p(v[0], v[1], v[2], v[3], v[4], v[5]);
            auto s = symbolic_ricci(p);
            const bool flat = s.l00.is_zero() && s.l11.is_zero() && s.l22.is_zero();
            if (flat) {
                ++h.flat;
                h.flat_sets.push_back(make_params(v[0], v[1], v[2], v[3], v[4], v[5]));
            } else if (integer_einstein(p, s)) {
                ++h.einstein;
                h.einstein_sets.push_back(make_params(v[0], v[1], v[2], v[3], v[4], v[5]));
            }
        }
    return h;
}

inline bool listed(const std::vector<ParamSet>& families, const ParamSet& p) {
    return std::any_of(families.begin(), families.end(), [&](const ParamSet& f) { return sign_equivalent(f, p); });
}

} // namespace detail

/// Exhaustive check of every nonzero point of [-bound, bound]^6. Integer
/// parameters give integer coefficients, so the sweep runs in the exact
/// integer ring. Work is split by the first coordinate across `workers`
/// threads; the merged report does not depend on the split.
inline SweepReport falsification_sweep(int bound, const std::vector<ParamSet>& flat_families,
                                       const std::vector<ParamSet>& einstein_families, int workers = 1) {
    if (bound < 0) throw InvalidArgument("sweep bound must be non-negative");
    workers = std::clamp(workers, 1, 2 * bound + 1);
    std::vector<detail::GridHit> parts(static_cast<std::size_t>(workers));
    const int width = 2 * bound + 1;
    auto slab = [&](int w) {
        int lo = -bound + w * width / workers;
        int hi = -bound + (w + 1) * width / workers - 1;
        parts[static_cast<std::size_t>(w)] = detail::sweep_slab(bound, lo, hi);
    };
    if (workers == 1) {
        slab(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(slab, w);
        for (auto& t : pool) t.join();
    }
    SweepReport r;
    r.bound = bound;
    for (const auto& h : parts) {
        r.points += h.points;
        r.ricci_flat_hits += h.flat;
        r.einstein_hits += h.einstein;
        for (const auto& p : h.flat_sets)
            if (!detail::listed(flat_families, p)) r.unexpected_ricci_flat.push_back(p);
        for (const auto& p : h.einstein_sets)
            if (!detail::listed(einstein_families, p)) r.unexpected_einstein.push_back(p);
    }
    std::sort(r.unexpected_ricci_flat.begin(), r.unexpected_ricci_flat.end());
    std::sort(r.unexpected_einstein.begin(), r.unexpected_einstein.end());
    return r;
}

inline void add_family(std::vector<ParamSet>& families, const ParamSet& p) {
    ParamSet c = canonical_sign(p);
    if (std::find(families.begin(), families.end(), c) == families.end()) families.push_back(c);
}

/// Ricci-flat tree: L00 = -2 x^-1 P Q splits into Q = 0 (branch a) and
/// P = 0 (branch b), followed by L11 = 0 and L22 = 0.
inline CaseTreeResult ricci_flat_tree() {
    auto f = family_polys(symbolic_params());
    auto s = symbolic_ricci_from(f);
    CaseTreeSolver solver;
    Stage l11 = coefficient_stage("L11", s.l11), l22 = coefficient_stage("L22", s.l22);
    CaseTreeResult a = solver.solve("a:", {coefficient_stage("Q", f.Q), l11, l22});
    CaseTreeResult b = solver.solve("b:", {coefficient_stage("P", f.P), l11, l22});
    a.leaves.insert(a.leaves.end(), b.leaves.begin(), b.leaves.end());
    a.excluded.insert(a.excluded.end(), b.excluded.begin(), b.excluded.end());
    a.stuck.insert(a.stuck.end(), b.stuck.begin(), b.stuck.end());
    return a;
}

/// Einstein tree: L00 - L11 = 0 and L00 - L22 = 0; leaves are then sorted
/// into Ricci-flat, Einstein (Ric00 constant along solutions) or excluded.
inline CaseTreeResult einstein_tree() {
    auto s = symbolic_ricci(symbolic_params());
    CaseTreeSolver solver;
    return solver.solve("E:", {coefficient_stage("L00-L11", s.l00 - s.l11), coefficient_stage("L00-L22", s.l00 - s.l22)});
}

inline ClassificationResult classify(int search_bound, int workers = 1) {
    if (search_bound < 3) throw InvalidArgument("classify requires search_bound >= 3");
    ClassificationResult r;
    r.l00_factorization = l00_factorization_holds();
    if (!r.l00_factorization) throw NumericalFailure("L00 does not factor as -2 x^-1 P Q");

    auto take = [&](CaseTreeResult t) {
        r.excluded_branches.insert(r.excluded_branches.end(), t.excluded.begin(), t.excluded.end());
        r.unresolved.insert(r.unresolved.end(), t.stuck.begin(), t.stuck.end());
        return t.leaves;
    };

    for (auto& leaf : take(ricci_flat_tree())) {
        if (!leaf.determined()) {
            r.unresolved.push_back({leaf.label, {"leaf leaves parameters free"}});
            continue;
        }
        ParamSet p = leaf.params();
        if (all_zero(p) || !is_ricci_flat(p)) {
            r.excluded_branches.push_back({leaf.label, "leaf " + to_string(p) + " fails the direct Ricci check"});
            continue;
        }
        add_family(r.ricci_flat_families, p);
        r.leaves.push_back(std::move(leaf));
    }

    for (auto& leaf : take(einstein_tree())) {
        if (!leaf.determined()) {
            r.unresolved.push_back({leaf.label, {"leaf leaves parameters free"}});
            continue;
        }
        ParamSet p = leaf.params();
        FamilyPolys<Rational> f = family_polys(p);
        SymbolicRicci<Rational> s = symbolic_ricci_from(f);
        if (all_zero(p)) {
            r.excluded_branches.push_back({leaf.label, "all coefficients vanish"});
        } else if (s.l00.is_zero()) {
            add_family(r.ricci_flat_families, p);
            r.leaves.push_back(std::move(leaf));
        } else if (auto e = einstein_constancy_poly(f, s); !e.is_zero()) {
            r.excluded_branches.push_back({leaf.label, "Ric00 not constant along solutions: L00' P - 2 L00 G = " +
                                                           e.to_string()});
        } else {
            add_family(r.einstein_families, p);
            r.leaves.push_back(std::move(leaf));
        }
    }

    std::sort(r.ricci_flat_families.begin(), r.ricci_flat_families.end());
    std::sort(r.einstein_families.begin(), r.einstein_families.end());
    r.sweep = falsification_sweep(search_bound, r.ricci_flat_families, r.einstein_families, workers);
    return r;
}

} // namespace cohom
