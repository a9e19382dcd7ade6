/*
 * Copyright 2026 The CryptGraph Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Key files on disk. A key directory holds public.key and secret.key, both
// created with mode 0600.

#ifndef CRYPTGRAPH_HE_KEYFILES_HPP_
#define CRYPTGRAPH_HE_KEYFILES_HPP_

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "cryptgraph/he/serialization.hpp"

namespace cryptgraph {

inline constexpr const char* kPublicKeyFile = "public.key";
inline constexpr const char* kSecretKeyFile = "secret.key";

namespace internal {

inline void WritePrivateFile(const std::filesystem::path& path,
                             std::span<const std::uint8_t> bytes, bool force) {
  const int flags = O_WRONLY | O_CREAT | (force ? O_TRUNC : O_EXCL);
  const int fd = ::open(path.c_str(), flags, 0600);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw IoError("'" + path.string() + "' already exists (use --force to overwrite)");
    }
    throw IoError("cannot create '" + path.string() + "': " + std::strerror(errno));
  }
  // An overwritten file keeps its old mode otherwise.
  ::fchmod(fd, 0600);
  std::size_t done = 0;
  while (done < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      const int err = errno;
      ::close(fd);
      throw IoError("short write to '" + path.string() + "': " + std::strerror(err));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::close(fd) != 0) throw IoError("cannot close '" + path.string() + "'");
}

inline Bytes ReadKeyBytes(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError("key file '" + path.string() + "' not found");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open key file '" + path.string() + "'");
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace internal

inline void WriteKeyFiles(const std::string& dir, const KeyPair& keys, bool force) {
  const std::filesystem::path d(dir);
  std::error_code ec;
  if (!std::filesystem::is_directory(d, ec)) {
    throw IoError("key directory '" + dir + "' does not exist");
  }
  if (!force) {
    for (const char* name : {kPublicKeyFile, kSecretKeyFile}) {
      if (std::filesystem::exists(d / name, ec)) {
        throw IoError("'" + (d / name).string() + "' already exists (use --force to overwrite)");
      }
    }
  }
  internal::WritePrivateFile(d / kSecretKeyFile, SerializeSecretKey(keys.secret_key), force);
  internal::WritePrivateFile(d / kPublicKeyFile, SerializePublicKey(keys.public_key), force);
}

// `path` is a key directory or a key file. Never opens secret.key, and a
// secret key passed by file name is refused with PrivacyError.
inline PublicKey LoadPublicKey(const std::string& path) {
  std::filesystem::path p(path);
  std::error_code ec;
  if (std::filesystem::is_directory(p, ec)) p /= kPublicKeyFile;
  return DeserializePublicKey(internal::ReadKeyBytes(p));
}

// User side only. `dir` must hold both files, generated together.
inline KeyPair LoadKeyPair(const std::string& dir) {
  const std::filesystem::path d(dir);
  KeyPair kp;
  kp.secret_key = DeserializeSecretKey(internal::ReadKeyBytes(d / kSecretKeyFile));
  kp.public_key = DeserializePublicKey(internal::ReadKeyBytes(d / kPublicKeyFile));
  if (kp.secret_key.key_id != kp.public_key.key_id) {
    throw FingerprintError("public.key and secret.key in '" + dir + "' are not a pair");
  }
  // Both loads built their own context; share one so ciphertexts agree.
  kp.secret_key.context = kp.public_key.context;
  return kp;
}

}  // namespace cryptgraph

#endif  // CRYPTGRAPH_HE_KEYFILES_HPP_
