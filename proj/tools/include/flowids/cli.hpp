#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace flowids::cli {

// key = value run configuration. Every key has a default; files may only
// override known keys.
class RunConfig {
 public:
  RunConfig();

  static RunConfig load(const std::filesystem::path& path);
  void set(const std::string& key, const std::string& value);

  const std::string& str(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  double real(const std::string& key) const;
  bool flag(const std::string& key) const;

  // Checks every value against the owning module's preconditions.
  void validate() const;
  // FNV-1a over the canonical "key=value\n" listing.
  std::uint64_t hash() const;
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ull);
std::string hex64(std::uint64_t v);
// Content hash of a file, or of every regular file under a directory in path order.
std::uint64_t hash_path(const std::filesystem::path& p);

// Runs one command line (argv[0] excluded). Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flowids::cli
