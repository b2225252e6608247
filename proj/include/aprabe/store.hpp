#pragma once

// Versioned binary artifact files.
//
//   "APR1" | kind:u8 | version:u8 | backend:u8 | body_length:u32 | body | sha256(all preceding bytes)
//
// Integers in bodies are u32-length-prefixed big-endian magnitudes; group
// elements use their fixed-width canonical encodings. Every body except
// PARAMS starts with the 32-byte attribute-matrix fingerprint followed by the
// group parameters, so each file is self-describing.

#include <array>
#include <sstream>

#include "aprabe/scheme.hpp"
#include "aprabe/wire.hpp"

namespace aprabe {

enum class ArtifactKind : std::uint8_t { PublicKey = 0x01, MasterKey = 0x02, SecretKey = 0x03, Ciphertext = 0x04, Params = 0x05 };

inline std::string kind_name(ArtifactKind k) {
    switch (k) {
        case ArtifactKind::PublicKey: return "public key";
        case ArtifactKind::MasterKey: return "master secret key";
        case ArtifactKind::SecretKey: return "secret key";
        case ArtifactKind::Ciphertext: return "ciphertext";
        case ArtifactKind::Params: return "group parameters";
    }
    return "unknown";
}

inline constexpr std::array<std::uint8_t, 4> kMagic = {'A', 'P', 'R', '1'};
inline constexpr std::uint8_t kFormatVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 11;
inline constexpr std::size_t kTrailerSize = 32;

struct ArtifactHeader {
    ArtifactKind kind;
    Backend backend;
    std::uint32_t body_length;
};

// What an artifact is bound to: the group and the attribute universe.
struct Binding {
    BilinearParams params;
    Digest fingerprint{};
};

template <class T>
struct Bound {
    Binding binding;
    T value;
};

template <BilinearGroup G>
Binding binding_of(const PublicKey<G>& pk) {
    return {pk.group.params(), pk.fingerprint()};
}

namespace store_detail {

inline ArtifactKind kind_from_byte(std::uint8_t b) {
    if (b < 0x01 || b > 0x05) throw FormatError("unknown artifact kind " + std::to_string(b));
    return static_cast<ArtifactKind>(b);
}

inline Bytes frame(ArtifactKind kind, Backend backend, const Bytes& body) {
    ByteWriter w;
    w.raw(kMagic);
    w.u8(static_cast<std::uint8_t>(kind));
    w.u8(kFormatVersion);
    w.u8(static_cast<std::uint8_t>(backend));
    if (body.size() > 0xffffffffu) throw Error("artifact body too large");
    w.u32(static_cast<std::uint32_t>(body.size()));
    w.raw(body);
    Bytes out = std::move(w).bytes();
    const Digest check = sha256(out);
    out.insert(out.end(), check.begin(), check.end());
    return out;
}

inline void begin_body(ByteWriter& w, const Binding& b) {
    w.raw(b.fingerprint);
    b.params.encode(w);
}

}  // namespace store_detail

// Validates magic, kind, version, length and checksum, in that order.
inline ArtifactHeader read_header(std::span<const std::uint8_t> data) {
    if (data.size() < kHeaderSize) throw TruncatedError("artifact shorter than its header");
    if (!std::equal(kMagic.begin(), kMagic.end(), data.begin())) throw FormatError("bad magic: not an APR1 artifact");
    const ArtifactKind kind = store_detail::kind_from_byte(data[4]);
    if (data[5] != kFormatVersion) throw FormatError("unsupported format version " + std::to_string(data[5]));
    const Backend backend = backend_from_id(data[6]);
    const std::uint32_t len = (std::uint32_t{data[7]} << 24) | (std::uint32_t{data[8]} << 16) |
                              (std::uint32_t{data[9]} << 8) | data[10];
    const std::size_t expected = kHeaderSize + std::size_t{len} + kTrailerSize;
    if (data.size() < expected) throw TruncatedError("artifact truncated");
    if (data.size() > expected) throw FormatError("trailing bytes after artifact");
    return {kind, backend, len};
}

// Body of a verified artifact of the expected kind.
inline std::span<const std::uint8_t> open_artifact(std::span<const std::uint8_t> data, ArtifactKind expected,
                                                   std::optional<Backend> backend = std::nullopt) {
    const ArtifactHeader h = read_header(data);
    const auto covered = data.first(kHeaderSize + h.body_length);
    const Digest check = sha256(covered);
    if (!std::equal(check.begin(), check.end(), data.begin() + static_cast<std::ptrdiff_t>(covered.size())))
        throw IntegrityError("artifact checksum mismatch");
    if (h.kind != expected)
        throw FormatError("expected a " + kind_name(expected) + " artifact, found a " + kind_name(h.kind));
    if (backend && h.backend != *backend)
        throw ParamsMismatch("artifact uses the " + backend_name(h.backend) + " backend, expected " +
                             backend_name(*backend));
    return covered.subspan(kHeaderSize);
}

namespace store_detail {

inline Binding read_binding(ByteReader& r, Backend header_backend) {
    Digest fp{};
    auto raw = r.raw(fp.size());
    std::copy(raw.begin(), raw.end(), fp.begin());
    BilinearParams params = [&] {
        try {
            return BilinearParams::decode(r);
        } catch (const FormatError&) {
            throw;
        } catch (const ValidationError& e) {
            throw FormatError(std::string("group parameters: ") + e.what());
        }
    }();
    if (params.backend != header_backend) throw FormatError("header backend disagrees with parameters");
    return {std::move(params), fp};
}

template <BilinearGroup G>
void write_element(ByteWriter& w, const G& grp, const typename G::Element& e) {
    w.raw(grp.serialize(e));
}
template <BilinearGroup G>
void write_gt(ByteWriter& w, const G& grp, const typename G::GtElement& e) {
    w.raw(grp.serialize(e));
}
template <BilinearGroup G>
typename G::Element read_element(ByteReader& r, const G& grp) {
    return grp.deserialize(r.raw(grp.element_size()));
}
template <BilinearGroup G>
typename G::GtElement read_gt(ByteReader& r, const G& grp) {
    return grp.deserialize_gt(r.raw(grp.gt_size()));
}

inline void write_scalar(ByteWriter& w, const Scalar& s) { w.integer(s.value()); }
inline Scalar read_scalar(ByteReader& r, const RingPtr& ring) {
    Int v = r.integer();
    if (v >= ring->modulus()) throw FormatError("scalar not reduced mod N");
    return {ring, v};
}

inline constexpr std::size_t kMaxCount = 1u << 16;

}  // namespace store_detail

// --- PARAMS ----------------------------------------------------------------

inline Bytes save_params(const BilinearParams& params) {
    ByteWriter w;
    params.encode(w);
    return store_detail::frame(ArtifactKind::Params, params.backend, w.bytes());
}

inline BilinearParams load_params(std::span<const std::uint8_t> data) {
    const auto h = read_header(data);
    ByteReader r(open_artifact(data, ArtifactKind::Params));
    BilinearParams p = [&] {
        try {
            return BilinearParams::decode(r);
        } catch (const FormatError&) {
            throw;
        } catch (const ValidationError& e) {
            throw FormatError(std::string("group parameters: ") + e.what());
        }
    }();
    if (p.backend != h.backend) throw FormatError("header backend disagrees with parameters");
    r.expect_end();
    return p;
}

// --- PK --------------------------------------------------------------------

template <BilinearGroup G>
Bytes save_public_key(const PublicKey<G>& pk) {
    ByteWriter w;
    store_detail::begin_body(w, binding_of(pk));
    w.text(pk.matrix->to_json());
    store_detail::write_element(w, pk.group, pk.g);
    store_detail::write_element(w, pk.group, pk.x3);
    w.u32(static_cast<std::uint32_t>(pk.v.size()));
    for (const auto& v : pk.v) store_detail::write_element(w, pk.group, v);
    w.u32(static_cast<std::uint32_t>(pk.h.size()));
    for (const auto& h : pk.h) store_detail::write_element(w, pk.group, h);
    store_detail::write_gt(w, pk.group, pk.omega);
    return store_detail::frame(ArtifactKind::PublicKey, G::kBackend, w.bytes());
}

template <BilinearGroup G>
PublicKey<G> load_public_key(std::span<const std::uint8_t> data) {
    const auto h = read_header(data);
    ByteReader r(open_artifact(data, ArtifactKind::PublicKey, G::kBackend));
    Binding b = store_detail::read_binding(r, h.backend);
    auto matrix = std::make_shared<const AttributeMatrix>(AttributeMatrix::from_json(r.text()));
    if (matrix->fingerprint() != b.fingerprint) throw FingerprintMismatch("public key: matrix fingerprint mismatch");
    G grp(b.params);
    PublicKey<G> pk{matrix, grp, store_detail::read_element(r, grp), store_detail::read_element(r, grp), {}, {}, {}};
    const std::size_t d = r.count(store_detail::kMaxCount);
    if (d != matrix->columns()) throw FormatError("public key: v count does not match matrix columns");
    for (std::size_t i = 0; i < d; ++i) pk.v.push_back(store_detail::read_element(r, grp));
    const std::size_t l = r.count(store_detail::kMaxCount);
    if (l != matrix->levels()) throw FormatError("public key: h count does not match matrix levels");
    for (std::size_t i = 0; i < l; ++i) pk.h.push_back(store_detail::read_element(r, grp));
    pk.omega = store_detail::read_gt(r, grp);
    r.expect_end();
    return pk;
}

// --- MSK -------------------------------------------------------------------

inline Bytes save_master_key(const MasterSecretKey& msk, const Binding& binding) {
    ByteWriter w;
    store_detail::begin_body(w, binding);
    store_detail::write_scalar(w, msk.alpha);
    return store_detail::frame(ArtifactKind::MasterKey, binding.params.backend, w.bytes());
}

inline Bound<MasterSecretKey> load_master_key(std::span<const std::uint8_t> data) {
    const auto h = read_header(data);
    ByteReader r(open_artifact(data, ArtifactKind::MasterKey));
    Binding b = store_detail::read_binding(r, h.backend);
    MasterSecretKey msk{store_detail::read_scalar(r, b.params.ring())};
    r.expect_end();
    return {std::move(b), std::move(msk)};
}

// --- SK --------------------------------------------------------------------

template <BilinearGroup G>
Bytes save_secret_key(const SecretKey<G>& sk, const G& grp, const Binding& binding) {
    if (!(grp.params() == binding.params)) throw ParamsMismatch("secret key: group differs from binding");
    ByteWriter w;
    store_detail::begin_body(w, binding);
    sk.structure.encode(w);
    w.u32(static_cast<std::uint32_t>(sk.rows.size()));
    for (const auto& row : sk.rows) {
        store_detail::write_element(w, grp, row.k0);
        store_detail::write_element(w, grp, row.k1);
        store_detail::write_element(w, grp, row.k2);
        w.u32(static_cast<std::uint32_t>(row.tail.size()));
        for (const auto& t : row.tail) store_detail::write_element(w, grp, t);
    }
    return store_detail::frame(ArtifactKind::SecretKey, G::kBackend, w.bytes());
}

template <BilinearGroup G>
Bound<SecretKey<G>> load_secret_key(std::span<const std::uint8_t> data) {
    const auto h = read_header(data);
    ByteReader r(open_artifact(data, ArtifactKind::SecretKey, G::kBackend));
    Binding b = store_detail::read_binding(r, h.backend);
    G grp(b.params);
    SecretKey<G> sk{AccessStructure::decode(r, grp.ring()), {}};
    const std::size_t l = r.count(store_detail::kMaxCount);
    if (l != sk.structure.rows()) throw FormatError("secret key: row count does not match its policy");
    for (std::size_t i = 0; i < l; ++i) {
        KeyRow<G> row{store_detail::read_element(r, grp), store_detail::read_element(r, grp),
                      store_detail::read_element(r, grp), {}};
        const std::size_t tail = r.count(255);
        for (std::size_t j = 0; j < tail; ++j) row.tail.push_back(store_detail::read_element(r, grp));
        sk.rows.push_back(std::move(row));
    }
    r.expect_end();
    return {std::move(b), std::move(sk)};
}

// --- CT --------------------------------------------------------------------

template <BilinearGroup G>
struct StoredCiphertext {
    Ciphertext<G> ct;
    Bytes payload;  // AEAD blob; empty for bare GT ciphertexts
};

template <BilinearGroup G>
Bytes save_ciphertext(const Ciphertext<G>& ct, const G& grp, const Binding& binding,
                      std::span<const std::uint8_t> payload = {}) {
    if (!(grp.params() == binding.params)) throw ParamsMismatch("ciphertext: group differs from binding");
    ByteWriter w;
    store_detail::begin_body(w, binding);
    w.u32(static_cast<std::uint32_t>(ct.attributes.size()));
    for (const auto& v : ct.attributes.vectors()) encode_vector(w, v);
    store_detail::write_gt(w, grp, ct.c);
    store_detail::write_element(w, grp, ct.e);
    w.u32(static_cast<std::uint32_t>(ct.components.size()));
    for (const auto& c : ct.components) {
        store_detail::write_element(w, grp, c.c0);
        store_detail::write_element(w, grp, c.c1);
    }
    w.blob(payload);
    return store_detail::frame(ArtifactKind::Ciphertext, G::kBackend, w.bytes());
}

template <BilinearGroup G>
Bound<StoredCiphertext<G>> load_ciphertext(std::span<const std::uint8_t> data) {
    const auto h = read_header(data);
    ByteReader r(open_artifact(data, ArtifactKind::Ciphertext, G::kBackend));
    Binding b = store_detail::read_binding(r, h.backend);
    G grp(b.params);
    const std::size_t count = r.count(store_detail::kMaxCount);
    std::vector<AttributeVector> vectors;
    for (std::size_t i = 0; i < count; ++i) vectors.push_back(decode_vector(r));
    AttributeSet set = [&] {
        try {
            return AttributeSet(std::move(vectors));
        } catch (const ValidationError& e) {
            throw FormatError(std::string("ciphertext attribute set: ") + e.what());
        }
    }();
    Ciphertext<G> ct{std::move(set), store_detail::read_gt(r, grp), store_detail::read_element(r, grp), {}};
    const std::size_t pairs = r.count(store_detail::kMaxCount);
    if (pairs != ct.attributes.size()) throw FormatError("ciphertext: component count mismatch");
    for (std::size_t i = 0; i < pairs; ++i)
        ct.components.push_back({store_detail::read_element(r, grp), store_detail::read_element(r, grp)});
    auto blob = r.blob();
    Bytes payload(blob.begin(), blob.end());
    r.expect_end();
    return {std::move(b), {std::move(ct), std::move(payload)}};
}

// Rejects artifacts produced for a different group or attribute matrix.
template <BilinearGroup G>
void require_compatible(const PublicKey<G>& pk, const Binding& b) {
    if (!(pk.group.params() == b.params)) throw ParamsMismatch("artifact was created under different group parameters");
    if (pk.fingerprint() != b.fingerprint)
        throw FingerprintMismatch("artifact was created under a different attribute matrix (fingerprint " +
                                  to_hex(b.fingerprint).substr(0, 16) + " vs " + to_hex(pk.fingerprint()).substr(0, 16) +
                                  ")");
}

}  // namespace aprabe
