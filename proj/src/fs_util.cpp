#include "curricula/fs_util.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace curricula {

FileLock::FileLock(FileLock&& other) noexcept
    : lock_path_(std::move(other.lock_path_)) {
  other.lock_path_.clear();
}

FileLock& FileLock::operator=(FileLock&& other) noexcept {
  if (this != &other) {
    release();
    lock_path_ = std::move(other.lock_path_);
    other.lock_path_.clear();
  }
  return *this;
}

FileLock::~FileLock() { release(); }

void FileLock::release() {
  if (!lock_path_.empty()) {
    ::unlink(lock_path_.c_str());
    lock_path_.clear();
  }
}

FileLock FileLock::for_target(const std::filesystem::path& target,
                              std::chrono::seconds stale_after,
                              Status& status) {
  FileLock lock;
  const auto path = lock_path_for(target);
  for (int attempt = 0; attempt < 2; ++attempt) {
    int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd >= 0) {
      ::close(fd);
      lock.lock_path_ = path;
      status = Status::acquired;
      return lock;
    }
    if (errno != EEXIST) {
      status = Status::error;
      return lock;
    }
    struct stat st{};
    if (::stat(path.c_str(), &st) != 0) {
      // Holder released between open and stat; retry once.
      continue;
    }
    const auto age = ::time(nullptr) - st.st_mtime;
    if (age > stale_after.count()) {
      ::unlink(path.c_str());
      continue;
    }
    status = Status::held_fresh;
    return lock;
  }
  status = Status::error;
  return lock;
}

bool write_file_atomic(const std::filesystem::path& target,
                       std::string_view content) {
  namespace fs = std::filesystem;
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  std::string tmpl = (dir / (target.filename().string() + ".tmpXXXXXX")).string();
  std::string buf = tmpl;
  int fd = ::mkstemp(buf.data());
  if (fd < 0) return false;
  std::size_t written = 0;
  bool ok = true;
  while (written < content.size()) {
    ssize_t n = ::write(fd, content.data() + written, content.size() - written);
    if (n < 0) {
      ok = false;
      break;
    }
    written += static_cast<std::size_t>(n);
  }
  if (ok && ::fsync(fd) != 0) ok = false;
  ::close(fd);
  if (ok && ::rename(buf.c_str(), target.c_str()) != 0) ok = false;
  if (!ok) ::unlink(buf.c_str());
  return ok;
}

std::optional<std::string> read_file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

}  // namespace curricula
