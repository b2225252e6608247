#include <gtest/gtest.h>

#include "support.hpp"

using namespace aprabe;
namespace t = aprabe::testing;

namespace {

template <class G>
struct Fixture {
    G grp;
    std::shared_ptr<const AttributeMatrix> m = t::ehr_matrix();
    Rng rng = Rng::from_seed(21);
    std::pair<PublicKey<G>, MasterSecretKey> keys = setup(m, grp, rng);
    PublicKey<G>& pk = keys.first;
    MasterSecretKey& msk = keys.second;
    SecretKey<G> sk = delegate(
        pk, keygen(pk, msk, compile(parse_policy("[HospA] AND ([Prof] OR [Yrs5])", *m), grp.ring()), rng),
        ChildSpec{{{0, "Cardio"}, {1, "∅"}, {2, "∅"}}}, rng);
    Ciphertext<G> ct = encrypt(pk, parse_attribute_set("[HospA,Cardio];[Prof,∅]", *m), grp.random_gt(rng), rng);

    explicit Fixture(const BilinearParams& p) : grp(p) {}
};

template <class G>
class StoreTest : public ::testing::Test {
protected:
    static const BilinearParams& params() {
        if constexpr (std::is_same_v<G, DebugGroup>)
            return t::debug_params();
        else
            return t::curve_params();
    }
};

using Backends = ::testing::Types<DebugGroup, CurveGroup>;
TYPED_TEST_SUITE(StoreTest, Backends);

}  // namespace

TYPED_TEST(StoreTest, RoundTripsAreByteIdentical) {
    using G = TypeParam;
    Fixture<G> f(TestFixture::params());
    const Binding b = binding_of(f.pk);

    const Bytes pk_bytes = save_public_key(f.pk);
    EXPECT_EQ(save_public_key(load_public_key<G>(pk_bytes)), pk_bytes);

    const Bytes msk_bytes = save_master_key(f.msk, b);
    const auto msk = load_master_key(msk_bytes);
    EXPECT_EQ(msk.value, f.msk);
    EXPECT_EQ(save_master_key(msk.value, msk.binding), msk_bytes);

    const Bytes sk_bytes = save_secret_key(f.sk, f.grp, b);
    const auto sk = load_secret_key<G>(sk_bytes);
    EXPECT_EQ(sk.value, f.sk);
    EXPECT_EQ(save_secret_key(sk.value, f.grp, sk.binding), sk_bytes);

    const Bytes payload{9, 8, 7};
    const Bytes ct_bytes = save_ciphertext(f.ct, f.grp, b, payload);
    const auto ct = load_ciphertext<G>(ct_bytes);
    EXPECT_EQ(ct.value.ct, f.ct);
    EXPECT_EQ(ct.value.payload, payload);
    EXPECT_EQ(save_ciphertext(ct.value.ct, f.grp, ct.binding, ct.value.payload), ct_bytes);

    const Bytes params_bytes = save_params(f.grp.params());
    EXPECT_EQ(load_params(params_bytes), f.grp.params());
}

TYPED_TEST(StoreTest, LoadedKeysStillWork) {
    using G = TypeParam;
    Fixture<G> f(TestFixture::params());
    const auto pk = load_public_key<G>(save_public_key(f.pk));
    const auto sk = load_secret_key<G>(save_secret_key(f.sk, f.grp, binding_of(f.pk))).value;
    const auto msg = f.grp.random_gt(f.rng);
    const auto ct = encrypt(pk, parse_attribute_set("[HospA,Cardio];[Yrs5,∅]", *pk.matrix), msg, f.rng);
    EXPECT_TRUE(pk.group.gt_eq(decrypt(pk, sk, ct), msg));
}

TYPED_TEST(StoreTest, EveryTruncationIsRejected) {
    using G = TypeParam;
    Fixture<G> f(TestFixture::params());
    const Bytes bytes = save_secret_key(f.sk, f.grp, binding_of(f.pk));
    for (std::size_t len = 0; len < bytes.size(); ++len)
        EXPECT_THROW(load_secret_key<G>(std::span(bytes).first(len)), TruncatedError) << len;
}

TYPED_TEST(StoreTest, EverySingleByteCorruptionIsRejected) {
    using G = TypeParam;
    Fixture<G> f(TestFixture::params());
    const Bytes bytes = save_ciphertext(f.ct, f.grp, binding_of(f.pk));
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        Bytes bad = bytes;
        bad[i] ^= 0x5a;
        EXPECT_THROW(load_ciphertext<G>(bad), Error) << i;
    }
}

TEST(Store, HeaderChecks) {
    Fixture<DebugGroup> f(t::debug_params());
    const Bytes bytes = save_public_key(f.pk);
    Bytes bad = bytes;
    bad[0] = 'X';
    EXPECT_THROW(read_header(bad), FormatError);
    bad = bytes;
    bad[4] = 0x09;
    EXPECT_THROW(read_header(bad), FormatError);
    bad = bytes;
    bad[5] = 0x02;
    EXPECT_THROW(read_header(bad), FormatError);
    bad = bytes;
    bad.push_back(0);
    EXPECT_THROW(read_header(bad), FormatError);
    EXPECT_THROW(load_secret_key<DebugGroup>(bytes), FormatError);
    EXPECT_THROW(load_public_key<CurveGroup>(bytes), ParamsMismatch);
    const auto h = read_header(bytes);
    EXPECT_EQ(h.kind, ArtifactKind::PublicKey);
    EXPECT_EQ(h.backend, Backend::Debug);
}

TEST(Store, MismatchedMatrixIsRejected) {
    Fixture<DebugGroup> f(t::debug_params());
    const auto other_matrix = t::grid_matrix(2, 4);
    Rng rng = Rng::from_seed(2);
    auto [other_pk, other_msk] = setup(other_matrix, f.grp, rng);
    const auto sk = load_secret_key<DebugGroup>(save_secret_key(f.sk, f.grp, binding_of(f.pk)));
    EXPECT_THROW(require_compatible(other_pk, sk.binding), FingerprintMismatch);
    EXPECT_NO_THROW(require_compatible(f.pk, sk.binding));

    Rng rng2 = Rng::from_seed(3);
    const DebugGroup other_grp(gen_params(24, Backend::Debug, rng2));
    auto [pk2, msk2] = setup(f.m, other_grp, rng2);
    EXPECT_THROW(require_compatible(pk2, sk.binding), ParamsMismatch);
}

TEST(AtomicWrite, ReplacesAndLeavesNoTemporaries) {
    const auto dir = std::filesystem::temp_directory_path() / "aprabe_store_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto path = dir / "file.bin";
    write_file_atomic(path, Bytes{1, 2, 3});
    write_file_atomic(path, Bytes{4});
    EXPECT_EQ(read_file(path), Bytes{4});
    EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir), std::filesystem::directory_iterator{}), 1);
    EXPECT_THROW(write_file_atomic(dir / "missing" / "x.bin", Bytes{1}), IoError);
    EXPECT_THROW(read_file(dir / "absent"), IoError);
    std::filesystem::remove_all(dir);
}
