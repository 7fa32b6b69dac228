#include "andana/crypto.hpp"
#include "andana/tlv.hpp"

#include <gmpxx.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <memory>

namespace andana::crypto {

namespace {

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;
using PkeyPtr = std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)>;
using PkeyCtx = std::unique_ptr<EVP_PKEY_CTX, decltype(&EVP_PKEY_CTX_free)>;

mpz_class
toMpz(ByteView b)
{
  mpz_class r;
  if (!b.empty()) {
    mpz_import(r.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
  }
  return r;
}

Bytes
fromMpz(const mpz_class& v)
{
  std::size_t n = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  Bytes out(n);
  std::size_t written = 0;
  if (v != 0) {
    mpz_export(out.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
  }
  out.resize(written);
  return out;
}

/// I2OSP: fixed-length big-endian encoding. Returns false if `v` does not fit.
bool
toFixed(const mpz_class& v, std::size_t len, Bytes& out)
{
  auto raw = fromMpz(v);
  if (raw.size() > len) {
    return false;
  }
  out.assign(len - raw.size(), 0);
  append(out, raw);
  return true;
}

Bytes
mgf1(ByteView seed, std::size_t len)
{
  Bytes out;
  Bytes buf(seed.begin(), seed.end());
  buf.resize(seed.size() + 4);
  for (std::uint32_t counter = 0; out.size() < len; ++counter) {
    for (int i = 0; i < 4; ++i) {
      buf[seed.size() + i] = static_cast<std::uint8_t>(counter >> (24 - 8 * i));
    }
    auto d = sha256(buf);
    out.insert(out.end(), d.begin(), d.end());
  }
  out.resize(len);
  return out;
}

mpz_class
rsaPublic(const PublicKey& pk, const mpz_class& m)
{
  mpz_class r;
  auto n = toMpz(pk.modulus);
  auto e = toMpz(pk.exponent);
  mpz_powm(r.get_mpz_t(), m.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
  return r;
}

mpz_class
rsaPrivate(const PrivateKey& sk, const mpz_class& c)
{
  auto p = toMpz(sk.p);
  auto q = toMpz(sk.q);
  auto dp = toMpz(sk.dp);
  auto dq = toMpz(sk.dq);
  auto qinv = toMpz(sk.qinv);
  mpz_class m1, m2, h;
  mpz_powm(m1.get_mpz_t(), c.get_mpz_t(), dp.get_mpz_t(), p.get_mpz_t());
  mpz_powm(m2.get_mpz_t(), c.get_mpz_t(), dq.get_mpz_t(), q.get_mpz_t());
  h = (qinv * (m1 - m2)) % p;
  if (h < 0) {
    h += p;
  }
  return m2 + h * q;
}

const Digest&
emptyLabelHash()
{
  static const Digest h = sha256({});
  return h;
}

// RSAES-OAEP encoding with SHA-256/MGF1-SHA-256 and an empty label.
Bytes
oaepEncrypt(const PublicKey& pk, ByteView msg, RandomSource& rng)
{
  std::size_t k = pk.modulusBytes();
  if (msg.size() + 2 * kDigestSize + 2 > k) {
    throw Error("OAEP message too long for modulus");
  }
  Bytes db(emptyLabelHash().begin(), emptyLabelHash().end());
  db.resize(k - msg.size() - kDigestSize - 2, 0);
  db.push_back(0x01);
  append(db, msg);

  auto seed = rng.bytes(kDigestSize);
  auto dbMask = mgf1(seed, db.size());
  for (std::size_t i = 0; i < db.size(); ++i) {
    db[i] ^= dbMask[i];
  }
  auto seedMask = mgf1(db, kDigestSize);
  for (std::size_t i = 0; i < seed.size(); ++i) {
    seed[i] ^= seedMask[i];
  }
  Bytes em{0x00};
  append(em, seed);
  append(em, db);

  Bytes out;
  toFixed(rsaPublic(pk, toMpz(em)), k, out);
  return out;
}

std::optional<Bytes>
oaepDecrypt(const PrivateKey& sk, ByteView ct)
{
  std::size_t k = sk.pub.modulusBytes();
  if (ct.size() != k || k < 2 * kDigestSize + 2) {
    return std::nullopt;
  }
  auto c = toMpz(ct);
  if (c >= toMpz(sk.pub.modulus)) {
    return std::nullopt;
  }
  Bytes em;
  if (!toFixed(rsaPrivate(sk, c), k, em)) {
    return std::nullopt;
  }

  Bytes seed(em.begin() + 1, em.begin() + 1 + kDigestSize);
  Bytes db(em.begin() + 1 + kDigestSize, em.end());
  auto seedMask = mgf1(db, kDigestSize);
  for (std::size_t i = 0; i < seed.size(); ++i) {
    seed[i] ^= seedMask[i];
  }
  auto dbMask = mgf1(seed, db.size());
  for (std::size_t i = 0; i < db.size(); ++i) {
    db[i] ^= dbMask[i];
  }

  bool bad = em[0] != 0;
  bad |= CRYPTO_memcmp(db.data(), emptyLabelHash().data(), kDigestSize) != 0;
  std::size_t i = kDigestSize;
  while (i < db.size() && db[i] == 0) {
    ++i;
  }
  if (bad || i == db.size() || db[i] != 0x01) {
    return std::nullopt;
  }
  return Bytes(db.begin() + i + 1, db.end());
}

void
aesCtr(ByteView key, ByteView iv, ByteView in, Bytes& out)
{
  CipherCtx ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  std::size_t start = out.size();
  out.resize(start + in.size());
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ctr(), nullptr, key.data(), iv.data()) != 1 ||
      (!in.empty() &&
       EVP_EncryptUpdate(ctx.get(), out.data() + start, &len, in.data(), static_cast<int>(in.size())) != 1)) {
    throw Error("AES-CTR failed");
  }
}

struct DerivedKeys
{
  Bytes enc;
  Bytes mac;
};

DerivedKeys
deriveSymKeys(const SymmetricKey& k)
{
  Bytes in{0x01};
  append(in, k.bytes());
  auto e = sha256(in);
  in[0] = 0x02;
  auto m = sha256(in);
  return {Bytes(e.begin(), e.begin() + 16), Bytes(m.begin(), m.end())};
}

void
requireRole(const PublicKey& pk, KeyRole role)
{
  if (pk.role != role) {
    throw KeyRoleMismatch(role == KeyRole::Encryption ? "encryption requires an encryption key"
                                                      : "signing requires a signing key");
  }
}

} // namespace

Digest
sha256(ByteView in)
{
  Digest d;
  unsigned int len = 0;
  if (EVP_Digest(in.data(), in.size(), d.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  return d;
}

Digest
hmacSha256(ByteView key, ByteView in)
{
  Digest d;
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), in.data(), in.size(), d.data(),
           &len) == nullptr) {
    throw Error("HMAC-SHA-256 failed");
  }
  return d;
}

SymmetricKey::SymmetricKey(ByteView bytes)
{
  if (bytes.size() != kSymKeySize) {
    throw Error("symmetric key must be " + std::to_string(kSymKeySize) + " bytes");
  }
  std::copy(bytes.begin(), bytes.end(), m_bytes.begin());
}

SymmetricKey
SymmetricKey::generate(RandomSource& rng)
{
  SymmetricKey k;
  rng.fill(k.m_bytes);
  return k;
}

Bytes
PublicKey::encode() const
{
  Bytes out{static_cast<std::uint8_t>(role)};
  out.push_back(static_cast<std::uint8_t>(modulus.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(modulus.size()));
  append(out, modulus);
  append(out, exponent);
  return out;
}

PublicKey
PublicKey::decode(ByteView wire)
{
  if (wire.size() < 4) {
    throw tlv::DecodeError("public key too short");
  }
  PublicKey pk;
  if (wire[0] != static_cast<std::uint8_t>(KeyRole::Encryption) &&
      wire[0] != static_cast<std::uint8_t>(KeyRole::Signing)) {
    throw tlv::DecodeError("unknown key role");
  }
  pk.role = static_cast<KeyRole>(wire[0]);
  std::size_t n = (std::size_t{wire[1]} << 8) | wire[2];
  if (n == 0 || wire.size() < 3 + n + 1) {
    throw tlv::DecodeError("public key truncated");
  }
  pk.modulus.assign(wire.begin() + 3, wire.begin() + 3 + n);
  pk.exponent.assign(wire.begin() + 3 + n, wire.end());
  return pk;
}

KeyPair
generateKeyPair(KeyRole role, RandomSource& rng, std::size_t bits, std::optional<SimTime> notAfter)
{
  if (bits < 512 || bits % 16 != 0) {
    throw Error("unsupported RSA modulus size");
  }
  const mpz_class e = 65537;
  auto randomPrime = [&] {
    while (true) {
      auto raw = rng.bytes(bits / 16);
      raw[0] |= 0xc0; // top two bits set so p*q has exactly `bits` bits
      raw.back() |= 0x01;
      mpz_class p = toMpz(raw);
      mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
      if (mpz_sizeinbase(p.get_mpz_t(), 2) != bits / 2) {
        continue;
      }
      mpz_class g;
      mpz_class pm1 = p - 1;
      mpz_gcd(g.get_mpz_t(), pm1.get_mpz_t(), e.get_mpz_t());
      if (g == 1) {
        return p;
      }
    }
  };

  mpz_class p = randomPrime();
  mpz_class q;
  do {
    q = randomPrime();
  } while (q == p);
  if (p < q) {
    std::swap(p, q);
  }

  mpz_class n = p * q;
  mpz_class phi = (p - 1) * (q - 1);
  mpz_class d, qinv;
  mpz_invert(d.get_mpz_t(), e.get_mpz_t(), phi.get_mpz_t());
  mpz_invert(qinv.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());

  KeyPair kp;
  kp.pk.role = role;
  kp.pk.modulus = fromMpz(n);
  kp.pk.exponent = fromMpz(e);
  kp.sk.pub = kp.pk;
  kp.sk.d = fromMpz(d);
  kp.sk.p = fromMpz(p);
  kp.sk.q = fromMpz(q);
  kp.sk.dp = fromMpz(mpz_class(d % (p - 1)));
  kp.sk.dq = fromMpz(mpz_class(d % (q - 1)));
  kp.sk.qinv = fromMpz(qinv);
  if (role == KeyRole::Encryption) {
    kp.notAfter = notAfter;
  }
  return kp;
}

Digest
fingerprint(const PublicKey& pk)
{
  return sha256(pk.encode());
}

std::size_t
pkeCiphertextSize(const PublicKey& pk, std::size_t n)
{
  return 1 + 2 + pk.modulusBytes() + kIvSize + n + kMacSize;
}

Bytes
pkeEncrypt(const PublicKey& pk, ByteView plaintext, RandomSource& rng)
{
  requireRole(pk, KeyRole::Encryption);
  if (plaintext.size() > kMaxPkePlaintext) {
    throw Error("plaintext exceeds 1 MiB");
  }
  auto keys = rng.bytes(kSymKeySize + kDigestSize);
  ByteView aesKey(keys.data(), kSymKeySize);
  ByteView macKey(keys.data() + kSymKeySize, kDigestSize);
  auto wrapped = oaepEncrypt(pk, keys, rng);

  Bytes out{kCiphertextVersion};
  out.push_back(static_cast<std::uint8_t>(wrapped.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(wrapped.size()));
  append(out, wrapped);
  auto iv = rng.bytes(kIvSize);
  append(out, iv);
  aesCtr(aesKey, iv, plaintext, out);
  auto mac = hmacSha256(macKey, out);
  append(out, mac);
  return out;
}

Bytes
pkeDecrypt(const PrivateKey& sk, ByteView ct)
{
  requireRole(sk.pub, KeyRole::Encryption);
  if (ct.size() < 3 + kIvSize + kMacSize || ct[0] != kCiphertextVersion) {
    throw DecryptionFailed();
  }
  std::size_t wrappedLen = (std::size_t{ct[1]} << 8) | ct[2];
  if (ct.size() < 3 + wrappedLen + kIvSize + kMacSize) {
    throw DecryptionFailed();
  }
  auto keys = oaepDecrypt(sk, ct.subspan(3, wrappedLen));
  if (!keys || keys->size() != kSymKeySize + kDigestSize) {
    throw DecryptionFailed();
  }
  ByteView aesKey(keys->data(), kSymKeySize);
  ByteView macKey(keys->data() + kSymKeySize, kDigestSize);

  auto authed = ct.first(ct.size() - kMacSize);
  auto mac = hmacSha256(macKey, authed);
  if (CRYPTO_memcmp(mac.data(), ct.data() + authed.size(), kMacSize) != 0) {
    throw DecryptionFailed();
  }
  auto iv = ct.subspan(3 + wrappedLen, kIvSize);
  auto body = authed.subspan(3 + wrappedLen + kIvSize);
  Bytes out;
  aesCtr(aesKey, iv, body, out);
  return out;
}

Bytes
symEncrypt(const SymmetricKey& k, ByteView plaintext, RandomSource& rng)
{
  auto keys = deriveSymKeys(k);
  auto iv = rng.bytes(kIvSize);
  Bytes out = iv;
  aesCtr(keys.enc, iv, plaintext, out);
  auto mac = hmacSha256(keys.mac, out);
  append(out, mac);
  return out;
}

Bytes
symDecrypt(const SymmetricKey& k, ByteView ct)
{
  if (ct.size() < kIvSize + kMacSize) {
    throw DecryptionFailed();
  }
  auto keys = deriveSymKeys(k);
  auto authed = ct.first(ct.size() - kMacSize);
  auto mac = hmacSha256(keys.mac, authed);
  if (CRYPTO_memcmp(mac.data(), ct.data() + authed.size(), kMacSize) != 0) {
    throw DecryptionFailed();
  }
  Bytes out;
  aesCtr(keys.enc, ct.first(kIvSize), authed.subspan(kIvSize), out);
  return out;
}

// EMSA-PSS with SHA-256, MGF1-SHA-256, 32-byte salt.
Bytes
sign(const PrivateKey& sk, ByteView message, RandomSource& rng)
{
  requireRole(sk.pub, KeyRole::Signing);
  auto n = toMpz(sk.pub.modulus);
  std::size_t modBits = mpz_sizeinbase(n.get_mpz_t(), 2);
  std::size_t emBits = modBits - 1;
  std::size_t emLen = (emBits + 7) / 8;
  constexpr std::size_t sLen = kDigestSize;

  auto mHash = sha256(message);
  auto salt = rng.bytes(sLen);
  Bytes mPrime(8 + kDigestSize + sLen, 0);
  std::copy(mHash.begin(), mHash.end(), mPrime.begin() + 8);
  std::copy(salt.begin(), salt.end(), mPrime.begin() + 8 + kDigestSize);
  auto h = sha256(mPrime);

  Bytes db(emLen - sLen - kDigestSize - 2, 0);
  db.push_back(0x01);
  append(db, salt);
  auto mask = mgf1(h, db.size());
  for (std::size_t i = 0; i < db.size(); ++i) {
    db[i] ^= mask[i];
  }
  db[0] &= static_cast<std::uint8_t>(0xff >> (8 * emLen - emBits));
  Bytes em = db;
  append(em, h);
  em.push_back(0xbc);

  Bytes sig;
  toFixed(rsaPrivate(sk, toMpz(em)), sk.pub.modulusBytes(), sig);
  return sig;
}

bool
verify(const PublicKey& pk, ByteView message, ByteView signature)
{
  if (pk.role != KeyRole::Signing || signature.size() != pk.modulusBytes()) {
    return false;
  }
  auto n = toMpz(pk.modulus);
  auto s = toMpz(signature);
  if (s >= n) {
    return false;
  }
  std::size_t modBits = mpz_sizeinbase(n.get_mpz_t(), 2);
  std::size_t emBits = modBits - 1;
  std::size_t emLen = (emBits + 7) / 8;
  constexpr std::size_t sLen = kDigestSize;
  if (emLen < kDigestSize + sLen + 2) {
    return false;
  }

  Bytes em;
  if (!toFixed(rsaPublic(pk, s), emLen, em) || em.back() != 0xbc) {
    return false;
  }
  std::uint8_t topMask = static_cast<std::uint8_t>(0xff << (8 - (8 * emLen - emBits)));
  if (8 * emLen != emBits && (em[0] & topMask) != 0) {
    return false;
  }
  Bytes db(em.begin(), em.begin() + (emLen - kDigestSize - 1));
  ByteView h(em.data() + db.size(), kDigestSize);
  auto mask = mgf1(h, db.size());
  for (std::size_t i = 0; i < db.size(); ++i) {
    db[i] ^= mask[i];
  }
  db[0] &= static_cast<std::uint8_t>(0xff >> (8 * emLen - emBits));
  std::size_t psLen = emLen - kDigestSize - sLen - 2;
  for (std::size_t i = 0; i < psLen; ++i) {
    if (db[i] != 0) {
      return false;
    }
  }
  if (db[psLen] != 0x01) {
    return false;
  }

  auto mHash = sha256(message);
  Bytes mPrime(8 + kDigestSize + sLen, 0);
  std::copy(mHash.begin(), mHash.end(), mPrime.begin() + 8);
  std::copy(db.begin() + psLen + 1, db.end(), mPrime.begin() + 8 + kDigestSize);
  auto expected = sha256(mPrime);
  return CRYPTO_memcmp(expected.data(), h.data(), kDigestSize) == 0;
}

DhKeyPair
dhKeygen(RandomSource& rng)
{
  DhKeyPair kp;
  rng.fill(kp.secret);
  PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, kp.secret.data(), kp.secret.size()),
              &EVP_PKEY_free);
  std::size_t len = kp.publicValue.size();
  if (!key || EVP_PKEY_get_raw_public_key(key.get(), kp.publicValue.data(), &len) != 1) {
    throw Error("X25519 key generation failed");
  }
  return kp;
}

SymmetricKey
dhAgree(const std::array<std::uint8_t, 32>& secret, ByteView peerPublic)
{
  if (peerPublic.size() != 32) {
    throw InvalidPublicValue("X25519 public value must be 32 bytes");
  }
  PkeyPtr own(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, secret.data(), secret.size()),
              &EVP_PKEY_free);
  PkeyPtr peer(EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr, peerPublic.data(), peerPublic.size()),
               &EVP_PKEY_free);
  if (!own || !peer) {
    throw InvalidPublicValue("bad X25519 key material");
  }
  PkeyCtx ctx(EVP_PKEY_CTX_new(own.get(), nullptr), &EVP_PKEY_CTX_free);
  std::array<std::uint8_t, 32> shared{};
  std::size_t len = shared.size();
  // OpenSSL rejects peers whose shared secret is all zeros (low-order points).
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 || EVP_PKEY_derive_set_peer(ctx.get(), peer.get()) != 1 ||
      EVP_PKEY_derive(ctx.get(), shared.data(), &len) != 1) {
    throw InvalidPublicValue("X25519 agreement failed (low-order public value)");
  }
  if (std::all_of(shared.begin(), shared.end(), [] (auto b) { return b == 0; })) {
    throw InvalidPublicValue("X25519 shared secret is zero");
  }
  auto d = sha256(shared);
  return SymmetricKey(ByteView(d.data(), kSymKeySize));
}

} // namespace andana::crypto
