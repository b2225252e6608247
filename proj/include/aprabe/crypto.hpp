#pragma once

// Thin RAII wrappers over the OpenSSL primitives the scheme fixes for
// interoperability: SHA-256 digests and ChaCha20-Poly1305 sealing.

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aprabe/error.hpp"

namespace aprabe {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline constexpr std::size_t kAeadNonceSize = 12;
inline constexpr std::size_t kAeadTagSize = 16;
inline constexpr std::size_t kAeadKeySize = 32;

namespace detail {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};
struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* ctx) const noexcept { EVP_CIPHER_CTX_free(ctx); }
};

}  // namespace detail

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
            throw Error("sha256: init failed");
    }

    Sha256& update(std::span<const std::uint8_t> data) {
        if (EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1)
            throw Error("sha256: update failed");
        return *this;
    }
    Sha256& update(std::string_view text) {
        return update({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
    }
    Sha256& update(std::uint8_t byte) { return update(std::span<const std::uint8_t>(&byte, 1)); }

    Digest finish() {
        Digest out{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), out.data(), &len) != 1 || len != out.size())
            throw Error("sha256: final failed");
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, detail::MdCtxDeleter> ctx_;
};

inline Digest sha256(std::span<const std::uint8_t> data) { return Sha256().update(data).finish(); }
inline Digest sha256(std::string_view text) { return Sha256().update(text).finish(); }

inline std::string to_hex(std::span<const std::uint8_t> data) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

inline void os_random_bytes(std::span<std::uint8_t> out) {
    if (out.empty()) return;
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) throw Error("OS entropy source failed");
}

// Output layout: ciphertext || 16-byte tag.
inline Bytes aead_seal(std::span<const std::uint8_t> key, std::span<const std::uint8_t> nonce,
                       std::span<const std::uint8_t> plaintext) {
    if (key.size() != kAeadKeySize || nonce.size() != kAeadNonceSize) throw Error("aead: bad key or nonce size");
    std::unique_ptr<EVP_CIPHER_CTX, detail::CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
    if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, key.data(), nonce.data()) != 1)
        throw Error("aead: init failed");
    Bytes out(plaintext.size() + kAeadTagSize);
    int len = 0;
    if (!plaintext.empty() &&
        EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(), static_cast<int>(plaintext.size())) != 1)
        throw Error("aead: encrypt failed");
    int tail = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &tail) != 1) throw Error("aead: finalize failed");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, static_cast<int>(kAeadTagSize),
                            out.data() + plaintext.size()) != 1)
        throw Error("aead: tag extraction failed");
    return out;
}

inline Bytes aead_open(std::span<const std::uint8_t> key, std::span<const std::uint8_t> nonce,
                       std::span<const std::uint8_t> sealed) {
    if (key.size() != kAeadKeySize || nonce.size() != kAeadNonceSize) throw Error("aead: bad key or nonce size");
    if (sealed.size() < kAeadTagSize) throw IntegrityError("aead: sealed payload shorter than tag");
    const std::size_t body = sealed.size() - kAeadTagSize;
    std::unique_ptr<EVP_CIPHER_CTX, detail::CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
    if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, key.data(), nonce.data()) != 1)
        throw Error("aead: init failed");
    Bytes out(body);
    int len = 0;
    if (body > 0 && EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(), static_cast<int>(body)) != 1)
        throw IntegrityError("aead: decrypt failed");
    Bytes tag(sealed.begin() + static_cast<std::ptrdiff_t>(body), sealed.end());
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, static_cast<int>(kAeadTagSize), tag.data()) != 1)
        throw Error("aead: tag setup failed");
    int tail = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &tail) != 1)
        throw IntegrityError("aead: authentication failed");
    return out;
}

}  // namespace aprabe
