#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "revlab/errors.hpp"

namespace revlab {

namespace detail {

inline std::string digest_hex(const EVP_MD* md, std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
  unsigned int out_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw DataError("digest: EVP_MD_CTX_new failed");
  int ok = EVP_DigestInit_ex(ctx, md, nullptr) &&
           EVP_DigestUpdate(ctx, data.data(), data.size()) &&
           EVP_DigestFinal_ex(ctx, out.data(), &out_len);
  EVP_MD_CTX_free(ctx);
  if (!ok) throw DataError("digest: EVP digest failed");
  static const char* hex = "0123456789abcdef";
  std::string result(out_len * 2, '0');
  for (unsigned int i = 0; i < out_len; ++i) {
    result[2 * i] = hex[out[i] >> 4];
    result[2 * i + 1] = hex[out[i] & 0xf];
  }
  return result;
}

}  // namespace detail

inline std::string sha256_hex(std::string_view data) {
  return detail::digest_hex(EVP_sha256(), data);
}

inline std::string sha1_hex(std::string_view data) {
  return detail::digest_hex(EVP_sha1(), data);
}

}  // namespace revlab
