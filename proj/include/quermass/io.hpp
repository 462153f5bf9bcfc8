#pragma once

#include <string>
#include <utility>
#include <vector>

#include "quermass/estimator.hpp"
#include "quermass/geom.hpp"
#include "quermass/model.hpp"

namespace quermass {

// CSV with header "x,y,r", 17 significant digits; round-trips bit-exactly.
void write_discs_csv(const std::string& path, const std::vector<Disc>& discs);
std::vector<Disc> read_discs_csv(const std::string& path);

// "key = value" lines with '#' comments; later keys override earlier ones.
class KeyValues {
 public:
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  const std::string& require(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_number(const std::string& key, double fallback) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  // Throws naming the first key outside `allowed`.
  void ensure_known(const std::vector<std::string>& allowed) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values_file(const std::string& path);

// Accepts the round-trippable forms "uniform(r_min,r_max)" and
// "discrete[(r,p),...]" produced by RadiusLaw::describe().
RadiusLaw parse_radius_law(const std::string& text);
Window parse_window(const std::string& text);  // "(x0,y0,x1,y1)"

std::string fit_to_json(const FitResult& fit);
std::string suite_to_json(const SuiteResult& suite, const std::vector<std::string>& context = {});

}  // namespace quermass
