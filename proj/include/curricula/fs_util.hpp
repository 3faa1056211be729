#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace curricula {

// Advisory lock as a sibling ".lock" file, created with O_CREAT|O_EXCL so
// acquisition is atomic. A lock older than stale_after is considered
// abandoned and is broken.
class FileLock {
 public:
  FileLock() = default;
  FileLock(FileLock&& other) noexcept;
  FileLock& operator=(FileLock&& other) noexcept;
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;
  ~FileLock();

  enum class Status { acquired, held_fresh, error };

  static FileLock for_target(const std::filesystem::path& target,
                             std::chrono::seconds stale_after,
                             Status& status);

  bool locked() const { return !lock_path_.empty(); }
  const std::filesystem::path& lock_path() const { return lock_path_; }
  void release();

 private:
  std::filesystem::path lock_path_;
};

inline std::filesystem::path lock_path_for(const std::filesystem::path& target) {
  return std::filesystem::path(target.string() + ".lock");
}

// Writes via a temp file in the same directory followed by rename, so readers
// never observe a half-written file. Returns false on any I/O failure.
bool write_file_atomic(const std::filesystem::path& target,
                       std::string_view content);

std::optional<std::string> read_file_bytes(const std::filesystem::path& p);

}  // namespace curricula
