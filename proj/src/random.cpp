#include "andana/random.hpp"
#include "andana/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <memory>

namespace andana {

std::uint64_t
RandomSource::nextU64()
{
  std::array<std::uint8_t, 8> b;
  fill(b);
  return readU64(b);
}

std::uint64_t
RandomSource::uniform(std::uint64_t bound)
{
  if (bound == 0) {
    throw Error("uniform() bound must be nonzero");
  }
  // rejection sampling removes modulo bias
  std::uint64_t limit = max() - (max() % bound + 1) % bound;
  while (true) {
    auto v = nextU64();
    if (v <= limit) {
      return v % bound;
    }
  }
}

DeterministicRng::DeterministicRng(std::uint64_t seed)
  : DeterministicRng(seed, "")
{
}

DeterministicRng::DeterministicRng(std::uint64_t seed, std::string_view label)
{
  Bytes material;
  appendU64(material, seed);
  append(material, toBytes(label));
  auto digest = crypto::sha256(material);
  std::copy(digest.begin(), digest.end(), m_key.begin());
}

DeterministicRng
DeterministicRng::fork(std::string_view label)
{
  return DeterministicRng(nextU64(), label);
}

void
DeterministicRng::refill()
{
  // 16-byte IV for EVP_chacha20: 4-byte block counter (LE) then 12-byte nonce.
  // Each refill uses a fresh nonce, so the counter always starts at zero.
  std::array<std::uint8_t, 16> iv{};
  for (int i = 0; i < 8; ++i) {
    iv[4 + i] = static_cast<std::uint8_t>(m_counter >> (8 * i));
  }
  ++m_counter;

  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(EVP_CIPHER_CTX_new(),
                                                                       &EVP_CIPHER_CTX_free);
  std::array<std::uint8_t, 1024> zeros{};
  int outLen = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_chacha20(), nullptr, m_key.data(), iv.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), m_block.data(), &outLen, zeros.data(), zeros.size()) != 1) {
    throw Error("ChaCha20 keystream generation failed");
  }
  m_used = 0;
}

void
DeterministicRng::fill(std::span<std::uint8_t> out)
{
  std::size_t pos = 0;
  while (pos < out.size()) {
    if (m_used == m_block.size()) {
      refill();
    }
    std::size_t n = std::min(out.size() - pos, m_block.size() - m_used);
    std::copy_n(m_block.begin() + m_used, n, out.begin() + pos);
    m_used += n;
    pos += n;
  }
}

void
SystemRng::fill(std::span<std::uint8_t> out)
{
  if (!out.empty() && RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw Error("RAND_bytes failed");
  }
}

} // namespace andana
