#pragma once

// Key-policy ABE over hierarchical attribute vectors with policy-redefining
// delegation: Setup, Encrypt, KeyGen, Delegate, Decrypt, plus a KEM/DEM
// wrapper for byte payloads.
//
// Keys live in G1 randomized by G3 elements; ciphertexts live in G1. The G3
// parts vanish in decryption because pairings across distinct prime-order
// subgroups are trivial.

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "aprabe/attrspace.hpp"
#include "aprabe/bilinear.hpp"
#include "aprabe/lsss.hpp"

namespace aprabe {

template <BilinearGroup G>
struct PublicKey {
    using Element = typename G::Element;
    using GtElement = typename G::GtElement;

    std::shared_ptr<const AttributeMatrix> matrix;
    G group;
    Element g;
    Element x3;
    std::vector<Element> v;  // one per matrix column, indexed by first-level column
    std::vector<Element> h;  // one per level
    GtElement omega;         // e(g,g)^alpha

    std::size_t levels() const { return h.size(); }
    std::size_t columns() const { return v.size(); }
    Digest fingerprint() const { return matrix->fingerprint(); }
};

struct MasterSecretKey {
    Scalar alpha;
    friend bool operator==(const MasterSecretKey&, const MasterSecretKey&) = default;
};

template <BilinearGroup G>
struct KeyRow {
    typename G::Element k0;
    typename G::Element k1;
    typename G::Element k2;
    std::vector<typename G::Element> tail;  // K_{k+1} .. K_L
    friend bool operator==(const KeyRow&, const KeyRow&) = default;
};

template <BilinearGroup G>
struct SecretKey {
    AccessStructure structure;
    std::vector<KeyRow<G>> rows;

    std::size_t depth() const { return structure.depth(); }
    friend bool operator==(const SecretKey&, const SecretKey&) = default;
};

template <BilinearGroup G>
struct CiphertextPair {
    typename G::Element c0;
    typename G::Element c1;
    friend bool operator==(const CiphertextPair&, const CiphertextPair&) = default;
};

template <BilinearGroup G>
struct Ciphertext {
    AttributeSet attributes;
    typename G::GtElement c;
    typename G::Element e;
    std::vector<CiphertextPair<G>> components;  // aligned with attributes

    std::size_t depth() const { return attributes.depth(); }
    friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

// Ephemeral randomness exposed for exponent-bookkeeping tests only.
struct EncryptTrace {
    std::optional<Scalar> s;
    std::vector<Scalar> t;
};
struct KeygenTrace {
    std::vector<Scalar> shares;  // lambda_i
    std::vector<Scalar> r;
};
struct DelegateTrace {
    std::vector<Scalar> gamma;
    std::vector<Scalar> delta;
};

namespace scheme_detail {

template <BilinearGroup G>
typename G::Element randomizer(const PublicKey<G>& pk, Rng& rng) {
    return pk.group.exp(pk.x3, random_scalar(rng, pk.group.ring()));
}

// (h_1^{u_1} ... h_k^{u_k})^e, computed as prod h_i^{u_i e}: k exponentiations.
template <BilinearGroup G>
typename G::Element vector_hash(const PublicKey<G>& pk, const AttributeVector& u, const Scalar& e) {
    const auto& grp = pk.group;
    auto acc = grp.identity();
    for (std::size_t level = 1; level <= u.depth(); ++level)
        acc = grp.mul(acc, grp.exp(pk.h[level - 1], encode_attr(u.at(level).name, level, grp.ring()) * e));
    return acc;
}

template <BilinearGroup G>
void check_vector(const PublicKey<G>& pk, const AttributeVector& u) {
    // Re-resolving catches labels that do not belong to this universe.
    const AttributeVector resolved = make_vector(*pk.matrix, u.names());
    if (resolved.first_column() != u.first_column() || u.first_column() == 0 || u.first_column() > pk.columns())
        throw ValidationError("attribute vector " + u.to_string() + " does not match the public key's matrix");
}

template <BilinearGroup G>
void check_shape(const PublicKey<G>& pk, const SecretKey<G>& sk) {
    if (sk.rows.size() != sk.structure.rows()) throw ValidationError("secret key: row count mismatch");
    if (sk.depth() > pk.levels()) throw ValidationError("secret key deeper than the attribute matrix");
    for (const auto& row : sk.rows)
        if (row.tail.size() != pk.levels() - sk.depth()) throw ValidationError("secret key: malformed row");
}

}  // namespace scheme_detail

// g, v_1..v_D, h_1..h_L random in G1, X3 random in G3, alpha random.
template <BilinearGroup G>
std::pair<PublicKey<G>, MasterSecretKey> setup(std::shared_ptr<const AttributeMatrix> matrix, G group, Rng& rng) {
    const auto& ring = group.ring();
    PublicKey<G> pk{std::move(matrix), group, group.random_subgroup(1, rng), group.random_subgroup(3, rng), {}, {}, {}};
    for (std::size_t i = 0; i < pk.matrix->columns(); ++i) pk.v.push_back(group.random_subgroup(1, rng));
    for (std::size_t j = 0; j < pk.matrix->levels(); ++j) pk.h.push_back(group.random_subgroup(1, rng));
    MasterSecretKey msk{random_scalar(rng, ring)};
    pk.omega = group.gt_exp(group.pair(pk.g, pk.g), msk.alpha);
    return {std::move(pk), std::move(msk)};
}

// C = M e(g,g)^{alpha s}, E = g^s and per vector u_j with first column x:
// C_{j,0} = v_x^s (h_1^{u_1}...h_k^{u_k})^{s t_j}, C_{j,1} = g^{s t_j}.
template <BilinearGroup G>
Ciphertext<G> encrypt(const PublicKey<G>& pk, const AttributeSet& set, const typename G::GtElement& message, Rng& rng,
                      EncryptTrace* trace = nullptr) {
    const auto& grp = pk.group;
    if (set.depth() > pk.levels()) throw ValidationError("attribute set deeper than the attribute matrix");
    for (const auto& u : set.vectors()) scheme_detail::check_vector(pk, u);
    const Scalar s = random_scalar(rng, grp.ring());
    Ciphertext<G> ct{set, grp.gt_mul(message, grp.gt_exp(pk.omega, s)), grp.exp(pk.g, s), {}};
    if (trace) trace->s = s;
    for (const auto& u : set.vectors()) {
        const Scalar t = random_scalar(rng, grp.ring());
        const Scalar st = s * t;
        auto c0 = grp.mul(grp.exp(pk.v[u.first_column() - 1], s), scheme_detail::vector_hash(pk, u, st));
        ct.components.push_back({std::move(c0), grp.exp(pk.g, st)});
        if (trace) trace->t.push_back(t);
    }
    return ct;
}

// lambda = A alpha_vec with alpha_vec = (alpha, s_2, ..., s_n); per row i:
// K0 = g^lambda v_x^r R, K1 = g^r R, K2 = (h_1^{u_1}...h_k^{u_k})^r R,
// K_j = h_j^r R for j = k+1..L.
template <BilinearGroup G>
SecretKey<G> keygen(const PublicKey<G>& pk, const MasterSecretKey& msk, const AccessStructure& structure, Rng& rng,
                    KeygenTrace* trace = nullptr) {
    const auto& grp = pk.group;
    const auto& ring = grp.ring();
    const std::size_t k = structure.depth();
    if (k > pk.levels()) throw ValidationError("policy depth exceeds the attribute matrix");
    if (!same_ring(structure.ring(), ring)) throw ParamsMismatch("access structure built over a different modulus");
    for (const auto& u : structure.labels()) scheme_detail::check_vector(pk, u);

    ShareVector alpha_vec{msk.alpha};
    for (std::size_t j = 1; j < structure.cols(); ++j) alpha_vec.push_back(random_scalar(rng, ring));
    const auto shares = mat_vec_mul(structure.matrix(), alpha_vec);

    SecretKey<G> sk{structure, {}};
    for (std::size_t i = 0; i < structure.rows(); ++i) {
        const auto& u = structure.rho(i);
        const Scalar r = random_scalar(rng, ring);
        KeyRow<G> row{
            grp.mul(grp.mul(grp.exp(pk.g, shares[i]), grp.exp(pk.v[u.first_column() - 1], r)),
                    scheme_detail::randomizer(pk, rng)),
            grp.mul(grp.exp(pk.g, r), scheme_detail::randomizer(pk, rng)),
            grp.mul(scheme_detail::vector_hash(pk, u, r), scheme_detail::randomizer(pk, rng)),
            {}};
        for (std::size_t j = k + 1; j <= pk.levels(); ++j)
            row.tail.push_back(grp.mul(grp.exp(pk.h[j - 1], r), scheme_detail::randomizer(pk, rng)));
        sk.rows.push_back(std::move(row));
        if (trace) {
            trace->shares.push_back(shares[i]);
            trace->r.push_back(r);
        }
    }
    return sk;
}

// For each child u = (u', u_{k+1}) of parent row i' with fresh unit gamma and
// random delta (implicitly r = gamma r' + delta):
// K0 = K0'^gamma v_x^delta R, K1 = K1'^gamma g^delta R,
// K2 = K2'^gamma K'_{k+1}^{gamma u_{k+1}} (h_1^{u_1}...h_{k+1}^{u_{k+1}})^delta R,
// K_j = K_j'^gamma h_j^delta R for j = k+2..L.
template <BilinearGroup G>
SecretKey<G> delegate(const PublicKey<G>& pk, const SecretKey<G>& parent, const ChildSpec& spec, Rng& rng,
                      DelegateTrace* trace = nullptr) {
    const auto& grp = pk.group;
    const auto& ring = grp.ring();
    scheme_detail::check_shape(pk, parent);
    const std::size_t k = parent.depth();
    const DelegationPlan plan = check_delegation(parent.structure, spec, *pk.matrix);

    std::vector<Scalar> gammas;
    std::vector<KeyRow<G>> rows;
    for (const auto& child : plan.children) {
        const auto& prow = parent.rows[child.parent_row];
        const auto& u = child.vector;
        const Scalar gamma = random_unit(rng, ring);
        const Scalar delta = random_scalar(rng, ring);
        const Scalar suffix = encode_attr(u.at(k + 1).name, k + 1, ring);

        KeyRow<G> row{
            grp.mul(grp.mul(grp.exp(prow.k0, gamma), grp.exp(pk.v[u.first_column() - 1], delta)),
                    scheme_detail::randomizer(pk, rng)),
            grp.mul(grp.mul(grp.exp(prow.k1, gamma), grp.exp(pk.g, delta)), scheme_detail::randomizer(pk, rng)),
            grp.mul(grp.mul(grp.mul(grp.exp(prow.k2, gamma), grp.exp(prow.tail[0], gamma * suffix)),
                            scheme_detail::vector_hash(pk, u, delta)),
                    scheme_detail::randomizer(pk, rng)),
            {}};
        for (std::size_t j = k + 2; j <= pk.levels(); ++j)
            row.tail.push_back(grp.mul(grp.mul(grp.exp(prow.tail[j - (k + 1)], gamma), grp.exp(pk.h[j - 1], delta)),
                                       scheme_detail::randomizer(pk, rng)));
        rows.push_back(std::move(row));
        gammas.push_back(gamma);
        if (trace) {
            trace->gamma.push_back(gamma);
            trace->delta.push_back(delta);
        }
    }
    return {derive_child(parent.structure, plan, gammas), std::move(rows)};
}

// M' = prod_{rho(i) in S} (e(E, K0) e(C_{j,1}, K2) / e(C_{j,0}, K1))^{omega_i};
// returns C / M'. Throws NotAuthorized when S does not satisfy the policy.
template <BilinearGroup G>
typename G::GtElement decrypt(const PublicKey<G>& pk, const SecretKey<G>& sk, const Ciphertext<G>& ct) {
    const auto& grp = pk.group;
    scheme_detail::check_shape(pk, sk);
    if (ct.components.size() != ct.attributes.size()) throw ValidationError("ciphertext: component count mismatch");
    const Reconstruction omega = reconstruction(ct.attributes, sk.structure);
    auto blinding = grp.gt_identity();
    for (const auto& [i, w] : omega) {
        const std::size_t j = *ct.attributes.index_of(sk.structure.rho(i));
        const auto& row = sk.rows[i];
        const auto& comp = ct.components[j];
        const auto num = grp.gt_mul(grp.pair(ct.e, row.k0), grp.pair(comp.c1, row.k2));
        const auto term = grp.gt_mul(num, grp.gt_inv(grp.pair(comp.c0, row.k1)));
        blinding = grp.gt_mul(blinding, grp.gt_exp(term, w));
    }
    return grp.gt_mul(ct.c, grp.gt_inv(blinding));
}

template <BilinearGroup G>
std::optional<typename G::GtElement> try_decrypt(const PublicKey<G>& pk, const SecretKey<G>& sk,
                                                 const Ciphertext<G>& ct) {
    try {
        return decrypt(pk, sk, ct);
    } catch (const NotAuthorized&) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// KEM/DEM: a random GT element is encapsulated; SHA-256 of its canonical
// encoding keys ChaCha20-Poly1305. Blob layout: nonce(12) || ciphertext || tag(16).

template <BilinearGroup G>
Digest kem_key(const G& group, const typename G::GtElement& m) {
    return Sha256().update(group.serialize(m)).finish();
}

template <BilinearGroup G>
std::pair<Ciphertext<G>, Bytes> kem_encrypt(const PublicKey<G>& pk, const AttributeSet& set,
                                            std::span<const std::uint8_t> payload, Rng& rng) {
    const auto m = pk.group.random_gt(rng);
    auto ct = encrypt(pk, set, m, rng);
    const Digest key = kem_key(pk.group, m);
    Bytes blob(kAeadNonceSize);
    rng.fill(blob);
    const Bytes sealed = aead_seal(key, std::span<const std::uint8_t>(blob), payload);
    blob.insert(blob.end(), sealed.begin(), sealed.end());
    return {std::move(ct), std::move(blob)};
}

template <BilinearGroup G>
Bytes kem_decrypt(const PublicKey<G>& pk, const SecretKey<G>& sk, const Ciphertext<G>& ct,
                  std::span<const std::uint8_t> blob) {
    const auto m = decrypt(pk, sk, ct);
    if (blob.size() < kAeadNonceSize + kAeadTagSize) throw IntegrityError("payload blob too short");
    const Digest key = kem_key(pk.group, m);
    return aead_open(key, blob.first(kAeadNonceSize), blob.subspan(kAeadNonceSize));
}

}  // namespace aprabe
