#ifndef RPS_SWEEP_HPP
#define RPS_SWEEP_HPP

#include <atomic>
#include <cstdint>
#include <future>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <vector>

#include "rps/algebra.hpp"
#include "rps/poly.hpp"

namespace rps {

// ---------------------------------------------------------------------------
// Shared-subtree evaluation DAG. Monomial trees are deduplicated by their
// canonical key; each node is tagged with the largest variable it contains,
// so a depth-first odometer over basis tuples recomputes only the nodes that
// depend on the innermost loop variable. Tuple order is the row-major
// odometer: variable 1 is the slowest digit, the last variable the fastest.

struct EvalDag {
    struct Node {
        int var = -1; // leaf variable, or -1 for products
        std::int32_t l = -1, r = -1;
        int level = 0; // largest variable index in the subtree
    };

    std::vector<Node> nodes; // children precede parents
    std::vector<std::int32_t> roots;
    std::vector<std::vector<std::int32_t>> level_nodes; // per variable
    int arity = 0;

    static EvalDag build(const std::vector<MonomialTree>& trees, int arity)
    {
        EvalDag dag;
        dag.arity = arity;
        dag.level_nodes.resize(static_cast<std::size_t>(arity));
        std::unordered_map<std::string, std::int32_t> index;
        for (const auto& t : trees)
            dag.roots.push_back(dag.insert(t, index));
        return dag;
    }

private:
    std::int32_t insert(const MonomialTree& t, std::unordered_map<std::string, std::int32_t>& index)
    {
        auto it = index.find(t.key());
        if (it != index.end())
            return it->second;
        Node n;
        if (t.is_leaf()) {
            n.var = t.var();
            n.level = t.var();
        }
        else {
            n.l = insert(t.left(), index);
            n.r = insert(t.right(), index);
            n.level = t.max_var();
        }
        std::int32_t id = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(n);
        level_nodes[static_cast<std::size_t>(n.level)].push_back(id);
        index.emplace(t.key(), id);
        return id;
    }
};

// ---------------------------------------------------------------------------
// Coefficient rings. from_field throws RingUnrepresentable when a value does
// not fit, letting the caller pick a wider ring; the int64 ring throws
// RingOverflow from checked arithmetic, with the same fallback contract.

struct RingUnrepresentable : std::exception {
    const char* what() const noexcept override { return "value not representable in this ring"; }
};
struct RingOverflow : std::exception {
    const char* what() const noexcept override { return "int64 overflow during sweep"; }
};

/// Exact machine integers with overflow detection, for integral data over Q.
struct Int64Ring {
    using Value = std::int64_t;
    Value zero() const { return 0; }
    Value one() const { return 1; }
    bool is_zero(Value v) const { return v == 0; }
    Value add(Value a, Value b) const
    {
        Value r;
        if (__builtin_add_overflow(a, b, &r))
            throw RingOverflow{};
        return r;
    }
    Value mul(Value a, Value b) const
    {
        Value r;
        if (__builtin_mul_overflow(a, b, &r))
            throw RingOverflow{};
        return r;
    }
    Value from_field(const FieldElement& x) const
    {
        if (x.spec().kind() != FieldSpec::Kind::Rationals)
            throw RingUnrepresentable{};
        const Rational& q = x.rat();
        if (denominator(q) != 1)
            throw RingUnrepresentable{};
        const Int& n = numerator(q);
        if (n > Int(INT64_MAX / 4) || n < Int(INT64_MIN / 4))
            throw RingUnrepresentable{};
        return n.convert_to<std::int64_t>();
    }
    FieldElement to_field(Value v, const FieldSpec& spec) const
    {
        return FieldElement::from_integer(spec, Int(v));
    }
};

/// Arbitrary-precision integers; the exact fallback over Q.
struct BigIntRing {
    using Value = Int;
    Value zero() const { return Int(0); }
    Value one() const { return Int(1); }
    bool is_zero(const Value& v) const { return v.is_zero(); }
    Value add(const Value& a, const Value& b) const { return a + b; }
    Value mul(const Value& a, const Value& b) const { return a * b; }
    Value from_field(const FieldElement& x) const
    {
        if (x.spec().kind() != FieldSpec::Kind::Rationals)
            throw RingUnrepresentable{};
        const Rational& q = x.rat();
        if (denominator(q) != 1)
            throw RingUnrepresentable{};
        return numerator(q);
    }
    FieldElement to_field(const Value& v, const FieldSpec& spec) const
    {
        return FieldElement::from_integer(spec, v);
    }
};

/// Residues mod p.
struct ModRing {
    std::uint64_t p;
    using Value = std::uint64_t;
    Value zero() const { return 0; }
    Value one() const { return 1 % p; }
    bool is_zero(Value v) const { return v == 0; }
    Value add(Value a, Value b) const
    {
        Value s = a + b;
        return s >= p ? s - p : s;
    }
    Value mul(Value a, Value b) const { return detail::mulmod(a, b, p); }
    Value from_field(const FieldElement& x) const
    {
        if (x.spec().kind() != FieldSpec::Kind::Prime || x.spec().prime_modulus() != p)
            throw RingUnrepresentable{};
        return x.residue();
    }
    FieldElement to_field(Value v, const FieldSpec& spec) const
    {
        return FieldElement::from_integer(spec, Int(v));
    }
};

/// Any FieldSpec field; always applicable.
struct FieldRing {
    FieldSpec spec;
    using Value = FieldElement;
    Value zero() const { return FieldElement::zero(spec); }
    Value one() const { return FieldElement::one(spec); }
    bool is_zero(const Value& v) const { return v.is_zero(); }
    Value add(const Value& a, const Value& b) const { return a + b; }
    Value mul(const Value& a, const Value& b) const { return a * b; }
    Value from_field(const FieldElement& x) const
    {
        if (x.spec() != spec)
            throw RingUnrepresentable{};
        return x;
    }
    FieldElement to_field(const Value& v, const FieldSpec&) const { return v; }
};

// ---------------------------------------------------------------------------

/// A polynomial and algebra lowered into a ring: deduplicated monomial DAG,
/// nonzero structure constants, and per-root coefficients.
template <class Ring>
struct SweepSystem {
    using Value = typename Ring::Value;

    Ring ring;
    std::size_t dim = 0;
    EvalDag dag;
    std::vector<std::vector<std::pair<std::size_t, Value>>> table; // index i*dim+j
    std::vector<Value> coeffs; // parallel to dag.roots

    static SweepSystem lower(const Polynomial& p, const MonadAlgebra& A, Ring ring)
    {
        std::vector<MonomialTree> trees;
        std::vector<FieldElement> cs;
        for (const auto& [t, c] : p.terms()) {
            trees.push_back(t);
            cs.push_back(c);
        }
        SweepSystem sys = lower_trees(trees, p.arity(), A, std::move(ring));
        for (const auto& c : cs)
            sys.coeffs.push_back(sys.ring.from_field(c));
        return sys;
    }

    static SweepSystem lower_trees(const std::vector<MonomialTree>& trees, int arity,
                                   const MonadAlgebra& A, Ring ring)
    {
        SweepSystem sys{std::move(ring), 0, {}, {}, {}};
        sys.dim = A.dim();
        sys.dag = EvalDag::build(trees, arity);
        sys.table.resize(sys.dim * sys.dim);
        for (std::size_t i = 0; i < sys.dim; ++i) {
            for (std::size_t j = 0; j < sys.dim; ++j) {
                const auto& coords = A.table_at(i, j);
                for (std::size_t k = 0; k < sys.dim; ++k)
                    if (!coords[k].is_zero())
                        sys.table[i * sys.dim + j].emplace_back(k, sys.ring.from_field(coords[k]));
            }
        }
        return sys;
    }

    std::uint64_t total_tuples() const
    {
        std::uint64_t total = 1;
        for (int v = 0; v < dag.arity; ++v) {
            if (total > UINT64_MAX / dim)
                throw Error(Err::CapExceeded, "tuple grid exceeds 2^64");
            total *= dim;
        }
        return total;
    }

    std::vector<Value> make_values() const
    {
        return std::vector<Value>(dag.nodes.size() * dim, ring.zero());
    }

    void compute_node(std::vector<Value>& vals, std::int32_t id, const std::vector<int>& tuple) const
    {
        const auto& n = dag.nodes[static_cast<std::size_t>(id)];
        Value* out = &vals[static_cast<std::size_t>(id) * dim];
        if (n.var >= 0) {
            for (std::size_t k = 0; k < dim; ++k)
                out[k] = ring.zero();
            out[static_cast<std::size_t>(tuple[static_cast<std::size_t>(n.var)])] = ring.one();
            return;
        }
        const Value* x = &vals[static_cast<std::size_t>(n.l) * dim];
        const Value* y = &vals[static_cast<std::size_t>(n.r) * dim];
        for (std::size_t k = 0; k < dim; ++k)
            out[k] = ring.zero();
        for (std::size_t i = 0; i < dim; ++i) {
            if (ring.is_zero(x[i]))
                continue;
            for (std::size_t j = 0; j < dim; ++j) {
                if (ring.is_zero(y[j]))
                    continue;
                Value xy = ring.mul(x[i], y[j]);
                for (const auto& [k, c] : table[i * dim + j])
                    out[k] = ring.add(out[k], ring.mul(xy, c));
            }
        }
    }

    /// Combined polynomial value (sum of coefficient * root) at the current
    /// node values.
    void combined(const std::vector<Value>& vals, std::vector<Value>& out) const
    {
        out.assign(dim, ring.zero());
        for (std::size_t t = 0; t < dag.roots.size(); ++t) {
            std::size_t base = static_cast<std::size_t>(dag.roots[t]) * dim;
            for (std::size_t k = 0; k < dim; ++k) {
                const Value& v = vals[base + k];
                if (!ring.is_zero(v))
                    out[k] = ring.add(out[k], ring.mul(coeffs[t], v));
            }
        }
    }

    bool combined_is_zero(const std::vector<Value>& vals, std::vector<Value>& scratch) const
    {
        combined(vals, scratch);
        for (const auto& v : scratch)
            if (!ring.is_zero(v))
                return false;
        return true;
    }

    /// Evaluates all nodes for one explicit tuple (no incremental reuse).
    void eval_tuple(const std::vector<int>& tuple, std::vector<Value>& vals) const
    {
        for (std::int32_t id = 0; id < static_cast<std::int32_t>(dag.nodes.size()); ++id)
            compute_node(vals, id, tuple);
    }
};

// ---------------------------------------------------------------------------
// Depth-first odometer sweep. visit(tuple, vals) returns false to stop early.

namespace detail {

template <class Ring, class Visit>
bool sweep_rec(const SweepSystem<Ring>& sys, std::vector<int>& tuple,
               std::vector<typename Ring::Value>& vals, int var, Visit&& visit)
{
    int m = sys.dag.arity;
    for (int b = 0; b < static_cast<int>(sys.dim); ++b) {
        tuple[static_cast<std::size_t>(var)] = b;
        for (std::int32_t id : sys.dag.level_nodes[static_cast<std::size_t>(var)])
            sys.compute_node(vals, id, tuple);
        if (var + 1 == m) {
            if (!visit(tuple, vals))
                return false;
        }
        else if (!sweep_rec(sys, tuple, vals, var + 1, visit)) {
            return false;
        }
    }
    return true;
}

/// Digits of chunk index c over the first k variables (variable 1 slowest).
inline std::vector<int> chunk_prefix(std::uint64_t c, std::uint64_t d, int k)
{
    std::vector<int> prefix(static_cast<std::size_t>(k));
    for (int v = k - 1; v >= 0; --v) {
        prefix[static_cast<std::size_t>(v)] = static_cast<int>(c % d);
        c /= d;
    }
    return prefix;
}

} // namespace detail

/// Sweeps all basis tuples extending `prefix` (which fixes the leading
/// variables), in odometer order.
template <class Ring, class Visit>
bool sweep_tuples(const SweepSystem<Ring>& sys, const std::vector<int>& prefix, Visit&& visit)
{
    int m = sys.dag.arity;
    if (m == 0)
        return true;
    std::vector<int> tuple(static_cast<std::size_t>(m), 0);
    auto vals = sys.make_values();
    for (std::size_t v = 0; v < prefix.size(); ++v) {
        tuple[v] = prefix[v];
        for (std::int32_t id : sys.dag.level_nodes[v])
            sys.compute_node(vals, id, tuple);
    }
    if (static_cast<int>(prefix.size()) == m)
        return visit(tuple, vals);
    return detail::sweep_rec(sys, tuple, vals, static_cast<int>(prefix.size()), visit);
}

/// Runs fn(chunk_index) for chunk_index = 0..chunks-1 across threads, pulling
/// indices from a shared counter. fn must be safe to call concurrently on
/// distinct indices.
template <class Fn>
void run_chunks(std::uint64_t chunks, int threads, Fn&& fn)
{
    threads = std::max(1, threads);
    if (threads == 1 || chunks <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c)
            fn(c);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::uint64_t c = next.fetch_add(1);
            if (c >= chunks)
                return;
            fn(c);
        }
    };
    std::vector<std::future<void>> futures;
    int n = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), chunks));
    futures.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        futures.push_back(std::async(std::launch::async, worker));
    for (auto& f : futures)
        f.get(); // propagates worker exceptions
}

/// Picks a prefix length k (1 <= k < m) so the chunk count d^k comfortably
/// exceeds the worker count, and returns {k, d^k}.
inline std::pair<int, std::uint64_t> choose_chunking(std::size_t dim, int arity, int threads)
{
    if (arity <= 1 || threads <= 1)
        return {0, 1};
    std::uint64_t d = dim;
    std::uint64_t chunks = d;
    int k = 1;
    while (chunks < 4ull * static_cast<std::uint64_t>(threads) && k < arity - 1) {
        chunks *= d;
        ++k;
    }
    return {k, chunks};
}

struct FirstHit {
    bool found = false;
    std::uint64_t index = UINT64_MAX; // odometer position of the first hit
    std::vector<int> tuple;
};

/// Finds the first tuple (in odometer order) where pred(tuple, vals) is true.
/// Deterministic for any thread count: workers that could still produce an
/// earlier hit keep running until the minimum is settled.
template <class Ring, class Pred>
FirstHit sweep_find_first(const SweepSystem<Ring>& sys, int threads, Pred&& pred)
{
    std::uint64_t total = sys.total_tuples();
    auto [k, chunks] = choose_chunking(sys.dim, sys.dag.arity, threads);
    std::uint64_t per = total / (chunks == 0 ? 1 : chunks);

    std::atomic<std::uint64_t> best{UINT64_MAX};
    std::mutex mu;
    FirstHit hit;

    auto record = [&](std::uint64_t index, const std::vector<int>& tuple) {
        std::uint64_t cur = best.load();
        while (index < cur && !best.compare_exchange_weak(cur, index)) {
        }
        std::lock_guard<std::mutex> lock(mu);
        if (!hit.found || index < hit.index) {
            hit.found = true;
            hit.index = index;
            hit.tuple = tuple;
        }
    };

    run_chunks(chunks, threads, [&](std::uint64_t c) {
        std::uint64_t begin = c * per;
        if (best.load() < begin)
            return; // an earlier chunk already hit
        std::vector<int> prefix = detail::chunk_prefix(c, sys.dim, k);
        std::uint64_t index = begin;
        sweep_tuples(sys, prefix, [&](const std::vector<int>& tuple, const auto& vals) {
            if (pred(tuple, vals)) {
                record(index, tuple);
                return false;
            }
            ++index;
            if ((index & 0xFFF) == 0 && best.load(std::memory_order_relaxed) < begin)
                return false;
            return true;
        });
    });
    return hit;
}

} // namespace rps

#endif // RPS_SWEEP_HPP
