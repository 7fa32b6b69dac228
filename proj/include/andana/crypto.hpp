#ifndef ANDANA_CRYPTO_HPP
#define ANDANA_CRYPTO_HPP

#include "andana/common.hpp"
#include "andana/random.hpp"

#include <array>
#include <optional>

namespace andana::crypto {

/// Security parameter in bits; symmetric keys are kappa/8 bytes.
constexpr std::size_t kKappa = 128;
constexpr std::size_t kSymKeySize = kKappa / 8;
constexpr std::size_t kDigestSize = 32;
constexpr std::size_t kIvSize = 16;
constexpr std::size_t kMacSize = 32;
constexpr std::size_t kMaxPkePlaintext = 1 << 20;
constexpr std::uint8_t kCiphertextVersion = 0x01;

using Digest = std::array<std::uint8_t, kDigestSize>;

/// The single failure every decryption reports, whatever went wrong.
class DecryptionFailed : public Error
{
public:
  DecryptionFailed()
    : Error("decryption failed")
  {
  }
};

/// A key was used outside its role (e.g. a signing key passed to pkeEncrypt).
class KeyRoleMismatch : public Error
{
public:
  using Error::Error;
};

class InvalidPublicValue : public Error
{
public:
  using Error::Error;
};

Digest
sha256(ByteView in);

Digest
hmacSha256(ByteView key, ByteView in);

class SymmetricKey
{
public:
  SymmetricKey() = default;

  explicit
  SymmetricKey(ByteView bytes);

  static SymmetricKey
  generate(RandomSource& rng);

  ByteView
  bytes() const
  {
    return m_bytes;
  }

  friend bool
  operator==(const SymmetricKey&, const SymmetricKey&) = default;

private:
  std::array<std::uint8_t, kSymKeySize> m_bytes{};
};

enum class KeyRole : std::uint8_t {
  Encryption = 1,
  Signing = 2,
};

/// RSA public key. Canonical encoding: ROLE(1) ‖ LEN(2) ‖ modulus ‖ exponent.
struct PublicKey
{
  KeyRole role = KeyRole::Encryption;
  Bytes modulus;   // big-endian, no leading zeros
  Bytes exponent;

  Bytes
  encode() const;

  static PublicKey
  decode(ByteView wire);

  std::size_t
  modulusBytes() const
  {
    return modulus.size();
  }

  friend bool
  operator==(const PublicKey&, const PublicKey&) = default;
};

struct PrivateKey
{
  PublicKey pub;
  Bytes d;
  Bytes p;
  Bytes q;
  Bytes dp;
  Bytes dq;
  Bytes qinv;
};

struct KeyPair
{
  PublicKey pk;
  PrivateKey sk;
  /// Expiry for encryption keys; signing keys are long-lived.
  std::optional<SimTime> notAfter;

  KeyRole
  role() const
  {
    return pk.role;
  }
};

/// Generates an RSA key pair (e = 65537). Deterministic for a deterministic `rng`.
KeyPair
generateKeyPair(KeyRole role, RandomSource& rng, std::size_t bits = 1024,
                std::optional<SimTime> notAfter = std::nullopt);

/// SHA-256 of the canonical public key encoding.
Digest
fingerprint(const PublicKey& pk);

/**
 * @brief Hybrid CCA-secure encryption.
 *
 * A fresh AES-128 key and HMAC-SHA-256 key are wrapped together under RSA-OAEP
 * (SHA-256, MGF1-SHA-256). The body is AES-CTR, followed by an HMAC over
 * everything before it. Framing:
 * VERSION(0x01) ‖ wrapped-len(2, BE) ‖ wrapped ‖ IV(16) ‖ body ‖ MAC(32).
 */
Bytes
pkeEncrypt(const PublicKey& pk, ByteView plaintext, RandomSource& rng);

/// Throws DecryptionFailed on any failure.
Bytes
pkeDecrypt(const PrivateKey& sk, ByteView ciphertext);

/// Size of pkeEncrypt output for a plaintext of `n` bytes.
std::size_t
pkeCiphertextSize(const PublicKey& pk, std::size_t n);

/// Encrypt-then-MAC with keys derived from `k`. Framing: IV(16) ‖ body ‖ MAC(32).
Bytes
symEncrypt(const SymmetricKey& k, ByteView plaintext, RandomSource& rng);

Bytes
symDecrypt(const SymmetricKey& k, ByteView ciphertext);

constexpr std::size_t
symCiphertextSize(std::size_t n)
{
  return kIvSize + n + kMacSize;
}

/// RSA-PSS (SHA-256, 32-byte salt).
Bytes
sign(const PrivateKey& sk, ByteView message, RandomSource& rng);

bool
verify(const PublicKey& pk, ByteView message, ByteView signature);

/// X25519 key agreement.
struct DhKeyPair
{
  std::array<std::uint8_t, 32> publicValue{};
  std::array<std::uint8_t, 32> secret{};
};

DhKeyPair
dhKeygen(RandomSource& rng);

/// SHA-256 of the shared secret, truncated to 16 bytes. Throws InvalidPublicValue
/// for low-order inputs that yield an all-zero secret.
SymmetricKey
dhAgree(const std::array<std::uint8_t, 32>& secret, ByteView peerPublic);

} // namespace andana::crypto

#endif // ANDANA_CRYPTO_HPP
