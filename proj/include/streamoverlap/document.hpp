#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace streamoverlap {

enum class Category : std::uint8_t { celebrity, political, accidents_disasters, financial };

// Fixed order; classification ties resolve to the earliest entry.
inline constexpr std::array<Category, 4> kAllCategories = {
    Category::celebrity, Category::political, Category::accidents_disasters, Category::financial};

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view name);

struct Document {
  std::string id;
  std::string stream_id;
  std::int64_t timestamp = 0;
  std::string text;
  std::optional<Category> category;
};

}  // namespace streamoverlap
