#include "streamoverlap/document.hpp"

namespace streamoverlap {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::celebrity:
      return "celebrity";
    case Category::political:
      return "political";
    case Category::accidents_disasters:
      return "accidents_disasters";
    case Category::financial:
      return "financial";
  }
  return "unknown";
}

std::optional<Category> parse_category(std::string_view name) {
  for (const Category c : kAllCategories) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

}  // namespace streamoverlap
