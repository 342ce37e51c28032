#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fcmarket {

// Splittable seed source. Every consumer derives its own stream from the
// root seed and a label, so adding a consumer never shifts another's draws.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t root) : root_(root) {}

  std::uint64_t root() const noexcept { return root_; }

  SeedTree child(std::string_view label) const;
  SeedTree child(std::uint64_t index) const;

  std::mt19937_64 engine() const { return std::mt19937_64(mix(root_)); }

  static std::uint64_t mix(std::uint64_t x) noexcept;

 private:
  std::uint64_t root_;
};

}  // namespace fcmarket
