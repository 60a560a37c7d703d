#include "iacsmell/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "iacsmell/error.hpp"

namespace iacsmell {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

std::string normalized_sha256_hex(std::string_view data) {
  std::string norm;
  norm.reserve(data.size());
  bool pending_space = false;
  for (char c : data) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
        c == '\v') {
      pending_space = !norm.empty();
      continue;
    }
    if (pending_space) norm.push_back(' ');
    pending_space = false;
    norm.push_back(c);
  }
  return sha256_hex(norm);
}

}  // namespace iacsmell
