#include <gtest/gtest.h>

#include "support.hpp"

using namespace aprabe;
namespace t = aprabe::testing;

namespace {

RingPtr ring15() {
    static const RingPtr r = make_ring(15);
    return r;
}

const RingPtr& big_ring() { return t::debug_params().ring(); }

struct Pq {
    std::shared_ptr<const AttributeMatrix> m = t::grid_matrix(2, 4);
    AttributeVector p = make_vector(*m, {"a1_1"});
    AttributeVector q = make_vector(*m, {"a1_2"});
};

AttributeSet set_of(std::vector<AttributeVector> vs) { return AttributeSet(std::move(vs)); }

}  // namespace

TEST(Compile, SingleLeaf) {
    Pq x;
    const auto s = compile(PolicyFormula::leaf(x.p), ring15());
    EXPECT_EQ(s.matrix(), MatrixZN::from_rows(ring15(), {{1}}));
    EXPECT_EQ(s.rho(0), x.p);
}

TEST(Compile, Conjunction) {
    Pq x;
    const auto s = compile(PolicyFormula::both(PolicyFormula::leaf(x.p), PolicyFormula::leaf(x.q)), ring15());
    EXPECT_EQ(s.matrix(), MatrixZN::from_rows(ring15(), {{1, 1}, {0, -1}}));
    EXPECT_EQ(s.rho(0), x.p);
    EXPECT_EQ(s.rho(1), x.q);
}

TEST(Compile, Disjunction) {
    Pq x;
    const auto s = compile(PolicyFormula::either(PolicyFormula::leaf(x.p), PolicyFormula::leaf(x.q)), ring15());
    EXPECT_EQ(s.matrix(), MatrixZN::from_rows(ring15(), {{1}, {1}}));
}

TEST(Compile, NestedLabels) {
    // (P AND Q) AND R: root (1); first AND gives (1,1) / (0,-1); second pads (1,1) to c=2 and splits.
    const auto m = t::grid_matrix(1, 3);
    const auto f = parse_policy("([a1_1] AND [a1_2]) AND [a1_3]", *m);
    const auto s = compile(f, ring15());
    EXPECT_EQ(s.matrix(), MatrixZN::from_rows(ring15(), {{1, 1, 1}, {0, 0, -1}, {0, -1, 0}}));
}

TEST(Satisfies, Examples) {
    Pq x;
    const auto pq = compile(PolicyFormula::both(PolicyFormula::leaf(x.p), PolicyFormula::leaf(x.q)), ring15());
    EXPECT_TRUE(satisfies(set_of({x.p, x.q}), pq));
    EXPECT_FALSE(satisfies(set_of({x.p}), pq));
    const auto leaf = compile(PolicyFormula::leaf(x.p), ring15());
    EXPECT_TRUE(satisfies(set_of({x.p}), leaf));
    EXPECT_EQ(reconstruction(set_of({x.p}), leaf), (Reconstruction{{0, Scalar(ring15(), 1L)}}));
}

TEST(Satisfies, DepthMismatch) {
    Pq x;
    const auto s = compile(PolicyFormula::leaf(x.p), ring15());
    EXPECT_THROW(satisfies(set_of({make_vector(*x.m, {"a1_1", "∅"})}), s), DepthMismatch);
}

TEST(Reconstruction, Examples) {
    Pq x;
    const auto pq = compile(PolicyFormula::both(PolicyFormula::leaf(x.p), PolicyFormula::leaf(x.q)), ring15());
    EXPECT_EQ(reconstruction(set_of({x.p, x.q}), pq),
              (Reconstruction{{0, Scalar(ring15(), 1L)}, {1, Scalar(ring15(), 1L)}}));
    const auto p_or_q = compile(PolicyFormula::either(PolicyFormula::leaf(x.p), PolicyFormula::leaf(x.q)), ring15());
    EXPECT_EQ(reconstruction(set_of({x.p}), p_or_q), (Reconstruction{{0, Scalar(ring15(), 1L)}}));
    EXPECT_THROW(reconstruction(set_of({x.p}), pq), NotAuthorized);
}

TEST(Reconstruction, UsesOnlyMatchingRows) {
    Pq x;
    const auto r = make_vector(*x.m, {"a1_3"});
    const auto s = compile(PolicyFormula::either(PolicyFormula::leaf(x.p), PolicyFormula::leaf(x.q)), ring15());
    const auto omega = reconstruction(set_of({x.q, r}), s);
    EXPECT_EQ(omega.size(), 1u);
    EXPECT_EQ(omega.count(1), 1u);
}

TEST(DeriveChild, ScaledLeafReconstructsWithInverse) {
    Pq x;
    const auto parent = compile(PolicyFormula::leaf(x.p), ring15());
    const auto plan = check_delegation(parent, ChildSpec{{{0, "a2_1"}}}, *x.m);
    const auto child = derive_child(parent, plan, {Scalar(ring15(), 7L)});
    EXPECT_EQ(child.matrix(), MatrixZN::from_rows(ring15(), {{7}}));
    EXPECT_EQ(child.row_scale(0).value(), 7);
    EXPECT_TRUE(child.is_delegated());
    const auto cv = make_vector(*x.m, {"a1_1", "a2_1"});
    EXPECT_EQ(child.rho(0), cv);
    EXPECT_EQ(reconstruction(set_of({cv}), child), (Reconstruction{{0, Scalar(ring15(), 13L)}}));
}

TEST(DeriveChild, RejectsNonUnitGamma) {
    Pq x;
    const auto parent = compile(PolicyFormula::leaf(x.p), ring15());
    const auto plan = check_delegation(parent, ChildSpec{{{0, "a2_1"}}}, *x.m);
    EXPECT_THROW(derive_child(parent, plan, {Scalar(ring15(), 5L)}), ValidationError);
    EXPECT_THROW(derive_child(parent, plan, {}), ValidationError);
}

TEST(DeriveChild, IdentityScalingPreservesAuthorizedSets) {
    const auto m = t::grid_matrix(2, 4);
    const auto f = parse_policy("[a1_1] AND ([a1_2] OR [a1_3])", *m);
    const auto parent = compile(f, big_ring());
    ChildSpec spec;
    for (std::size_t i = 0; i < 3; ++i) spec.assignments.push_back({i, "a2_" + std::to_string(i + 1)});
    const auto plan = check_delegation(parent, spec, *m);
    const auto child = derive_child(parent, plan, std::vector<Scalar>(3, Scalar::one(big_ring())));
    const auto leaves = parent.labels();
    for (unsigned mask = 1; mask < 8; ++mask) {
        std::vector<AttributeVector> ps, cs;
        for (std::size_t i = 0; i < 3; ++i)
            if (mask & (1u << i)) {
                ps.push_back(leaves[i]);
                cs.push_back(child.rho(i));
            }
        EXPECT_EQ(satisfies(set_of(ps), parent), satisfies(set_of(cs), child)) << mask;
    }
}

TEST(DeriveChild, ParallelChildrenEachAuthorizeLikeTheirParent) {
    const auto m = t::grid_matrix(2, 4);
    const auto parent = compile(parse_policy("[a1_1] OR ([a1_2] AND [a1_3])", *m), big_ring());
    ChildSpec spec{{{0, "a2_1"}, {0, "a2_2"}, {1, "a2_1"}, {2, "a2_1"}}};
    const auto plan = check_delegation(parent, spec, *m);
    const auto child = derive_child(parent, plan,
                                    {Scalar(big_ring(), 2L), Scalar(big_ring(), 4L), Scalar(big_ring(), 9L),
                                     Scalar(big_ring(), 11L)});
    EXPECT_TRUE(satisfies(set_of({child.rho(0)}), child));
    EXPECT_TRUE(satisfies(set_of({child.rho(1)}), child));
    EXPECT_FALSE(satisfies(set_of({child.rho(2)}), child));
    EXPECT_TRUE(satisfies(set_of({child.rho(2), child.rho(3)}), child));
}

TEST(CheckDelegation, ScenarioPlan) {
    const auto m = t::ehr_matrix();
    const auto parent = compile(parse_policy("[HospA] AND [Prof]", *m), big_ring());
    const auto plan = check_delegation(parent, ChildSpec{{{0, "Cardio"}, {1, "∅"}}}, *m);
    ASSERT_EQ(plan.children.size(), 2u);
    EXPECT_EQ(plan.children[0].vector, make_vector(*m, {"HospA", "Cardio"}));
    EXPECT_EQ(plan.children[1].vector, make_vector(*m, {"Prof", "∅"}));
    for (const auto& c : plan.children) EXPECT_TRUE(is_prefix(parent.rho(c.parent_row), c.vector));
}

TEST(CheckDelegation, Violations) {
    const auto m = t::ehr_matrix();
    const auto parent = compile(parse_policy("[HospA] AND [Prof]", *m), big_ring());
    EXPECT_THROW(check_delegation(parent, ChildSpec{{{0, "Cardio"}}}, *m), DelegationError);
    EXPECT_THROW(check_delegation(parent, ChildSpec{{{0, "Cardio"}, {0, "Cardio"}, {1, "∅"}}}, *m), DelegationError);
    EXPECT_THROW(check_delegation(parent, ChildSpec{{{0, "HospB"}, {1, "∅"}}}, *m), DelegationError);
    EXPECT_THROW(check_delegation(parent, ChildSpec{{{0, "Nurse"}, {1, "∅"}}}, *m), DelegationError);
    EXPECT_THROW(check_delegation(parent, ChildSpec{{{0, "Cardio"}, {2, "∅"}}}, *m), DelegationError);
    EXPECT_THROW(check_delegation(parent, ChildSpec{}, *m), DelegationError);
    const auto deep = compile(parse_policy("[HospA,Cardio]", *m), big_ring());
    EXPECT_THROW(check_delegation(deep, ChildSpec{{{0, "∅"}}}, *m), DelegationError);
}

TEST(AccessStructure, InjectivityEnforced) {
    Pq x;
    EXPECT_THROW(AccessStructure(MatrixZN::from_rows(ring15(), {{1}, {1}}), {x.p, x.p},
                                 {Scalar::one(ring15()), Scalar::one(ring15())}, CompiledOrigin{"x"}),
                 ValidationError);
}

TEST(AccessStructure, EncodingRoundTrip) {
    const auto m = t::ehr_matrix();
    const auto parent = compile(parse_policy("[HospA] AND ([Prof] OR [Yrs5])", *m), big_ring());
    Rng rng = Rng::from_seed(1);
    const auto plan = check_delegation(parent, ChildSpec{{{0, "Cardio"}, {1, "∅"}, {2, "∅"}}}, *m);
    const auto child = derive_child(parent, plan, {random_unit(rng, big_ring()), random_unit(rng, big_ring()),
                                                   random_unit(rng, big_ring())});
    for (const auto* s : {&parent, &child}) {
        ByteWriter w;
        s->encode(w);
        ByteReader r(w.bytes());
        EXPECT_EQ(AccessStructure::decode(r, big_ring()), *s);
        r.expect_end();
    }
    EXPECT_NE(parent.fingerprint(), child.fingerprint());
}

// Span-based satisfaction against boolean evaluation, every subset of leaves.
TEST(OracleEquivalence, ExhaustiveUpToFourLeaves) {
    const auto m = t::grid_matrix(1, 4);
    const auto leaves = t::all_vectors(*m, 1);
    std::size_t checked = 0;
    for (std::size_t n = 1; n <= 4; ++n)
        for (const auto& f : t::all_formulas(leaves, 0, n)) {
            const auto s = compile(f, big_ring());
            for (unsigned mask = 1; mask < (1u << n); ++mask) {
                std::vector<AttributeVector> set;
                for (std::size_t i = 0; i < n; ++i)
                    if (mask & (1u << i)) set.push_back(leaves[i]);
                ASSERT_EQ(satisfies(set_of(set), s), t::evaluate(f, set)) << f.to_string() << " mask " << mask;
                ++checked;
            }
        }
    // 1 + 2*3 + 8*7 + 40*15 formula/subset pairs.
    EXPECT_EQ(checked, 663u);
}

TEST(OracleEquivalence, RandomEightLeafFormulas) {
    const auto m = t::grid_matrix(2, 8);
    const auto pool = t::all_vectors(*m, 2);
    Rng rng = Rng::from_seed(8);
    for (int trial = 0; trial < 25; ++trial) {
        const auto leaves = t::pick(pool, 8, rng);
        const auto f = t::random_formula(leaves, 0, 8, rng);
        const auto s = compile(f, big_ring());
        for (unsigned mask = 1; mask < 256; ++mask) {
            std::vector<AttributeVector> set;
            for (std::size_t i = 0; i < 8; ++i)
                if (mask & (1u << i)) set.push_back(leaves[i]);
            ASSERT_EQ(satisfies(set_of(set), s), t::evaluate(f, set)) << f.to_string();
        }
    }
}

TEST(Reconstruction, RecoversTheSecretFromShares) {
    const auto m = t::grid_matrix(1, 6);
    const auto leaves = t::all_vectors(*m, 1);
    Rng rng = Rng::from_seed(9);
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = t::random_formula(leaves, 0, 6, rng);
        const auto s = compile(f, big_ring());
        ShareVector alpha;
        for (std::size_t j = 0; j < s.cols(); ++j) alpha.push_back(random_scalar(rng, big_ring()));
        const auto shares = mat_vec_mul(s.matrix(), alpha);
        const auto set = t::pick(leaves, 1 + rng.uniform(6), rng);
        const auto omega = try_reconstruction(set_of(set), s);
        ASSERT_EQ(omega.has_value(), t::evaluate(f, set));
        if (!omega) continue;
        Scalar acc = Scalar::zero(big_ring());
        for (const auto& [row, w] : *omega) {
            EXPECT_TRUE(std::find(set.begin(), set.end(), s.rho(row)) != set.end());
            acc += w * shares[row];
        }
        EXPECT_EQ(acc, alpha.front());
    }
}

TEST(Satisfies, Monotone) {
    const auto m = t::grid_matrix(1, 5);
    const auto leaves = t::all_vectors(*m, 1);
    Rng rng = Rng::from_seed(10);
    for (int trial = 0; trial < 30; ++trial) {
        const auto s = compile(t::random_formula(leaves, 0, 5, rng), big_ring());
        for (unsigned mask = 1; mask < 32; ++mask) {
            std::vector<AttributeVector> set;
            for (std::size_t i = 0; i < 5; ++i)
                if (mask & (1u << i)) set.push_back(leaves[i]);
            if (!satisfies(set_of(set), s)) continue;
            for (unsigned sup = mask; sup < 32; sup = (sup + 1) | mask) {
                std::vector<AttributeVector> bigger;
                for (std::size_t i = 0; i < 5; ++i)
                    if (sup & (1u << i)) bigger.push_back(leaves[i]);
                EXPECT_TRUE(satisfies(set_of(bigger), s));
            }
        }
    }
}
