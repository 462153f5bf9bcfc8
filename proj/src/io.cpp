#include "quermass/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace quermass {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (trim(text.substr(pos)).empty()) return v;
  } catch (const std::logic_error&) {
  }
  throw std::runtime_error("cannot parse " + what + " from '" + text + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_discs_csv(const std::string& path, const std::vector<Disc>& discs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x,y,r\n";
  for (const Disc& d : discs)
    out << format_double(d.cx) << "," << format_double(d.cy) << "," << format_double(d.r) << "\n";
  if (!out) throw std::runtime_error("short write on " + path);
}

std::vector<Disc> read_discs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,y,r")
    throw std::runtime_error(path + ": expected header 'x,y,r'");
  std::vector<Disc> discs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> parts = split(line, ',');
    if (parts.size() != 3)
      throw std::runtime_error(path + " line " + std::to_string(line_no) + ": expected x,y,r");
    std::string where = path + " line " + std::to_string(line_no);
    discs.push_back(Disc{parse_number(trim(parts[0]), where + " x"),
                         parse_number(trim(parts[1]), where + " y"),
                         parse_number(trim(parts[2]), where + " r")});
    if (discs.back().r < 0.0)
      throw std::runtime_error(where + ": negative radius");
  }
  return discs;
}

void KeyValues::set(const std::string& key, const std::string& value) {
  for (auto& e : entries_)
    if (e.first == key) {
      e.second = value;
      return;
    }
  entries_.emplace_back(key, value);
}

bool KeyValues::has(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return true;
  return false;
}

const std::string& KeyValues::require(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.first == key) return e.second;
  throw std::runtime_error("missing required key '" + key + "'");
}

std::string KeyValues::get(const std::string& key, const std::string& fallback) const {
  for (const auto& e : entries_)
    if (e.first == key) return e.second;
  return fallback;
}

double KeyValues::get_number(const std::string& key, double fallback) const {
  for (const auto& e : entries_)
    if (e.first == key) return parse_number(e.second, "key '" + key + "'");
  return fallback;
}

void KeyValues::ensure_known(const std::vector<std::string>& allowed) const {
  for (const auto& e : entries_) {
    bool ok = false;
    for (const std::string& k : allowed)
      if (e.first == k) ok = true;
    if (!ok) throw std::runtime_error("unknown config key '" + e.first + "'");
  }
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
    kv.set(key, trim(line.substr(eq + 1)));
  }
  return kv;
}

KeyValues read_key_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

RadiusLaw parse_radius_law(const std::string& text) {
  std::string s = trim(text);
  if (s.rfind("uniform(", 0) == 0 && s.back() == ')') {
    std::vector<std::string> parts = split(s.substr(8, s.size() - 9), ',');
    if (parts.size() != 2) throw std::runtime_error("radius_law: expected uniform(r_min,r_max)");
    return RadiusLaw::uniform_law(parse_number(trim(parts[0]), "uniform r_min"),
                                  parse_number(trim(parts[1]), "uniform r_max"));
  }
  if (s.rfind("discrete[", 0) == 0 && s.back() == ']') {
    std::string body = s.substr(9, s.size() - 10);
    std::vector<std::pair<double, double>> atoms;
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t open = body.find('(', pos);
      if (open == std::string::npos) break;
      std::size_t close = body.find(')', open);
      if (close == std::string::npos)
        throw std::runtime_error("radius_law: unbalanced parentheses in discrete[...]");
      std::vector<std::string> parts = split(body.substr(open + 1, close - open - 1), ',');
      if (parts.size() != 2) throw std::runtime_error("radius_law: expected (radius,probability)");
      atoms.emplace_back(parse_number(trim(parts[0]), "discrete radius"),
                         parse_number(trim(parts[1]), "discrete probability"));
      pos = close + 1;
    }
    if (atoms.empty()) throw std::runtime_error("radius_law: discrete[...] holds no atoms");
    return RadiusLaw::discrete_law(atoms);
  }
  throw std::runtime_error("radius_law: expected uniform(r_min,r_max) or discrete[(r,p),...]");
}

Window parse_window(const std::string& text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  std::vector<std::string> parts = split(s, ',');
  if (parts.size() != 4) throw std::runtime_error("window: expected (x0,y0,x1,y1)");
  Window w{parse_number(trim(parts[0]), "window x0"), parse_number(trim(parts[1]), "window y0"),
           parse_number(trim(parts[2]), "window x1"), parse_number(trim(parts[3]), "window y1")};
  if (!(w.x1 > w.x0) || !(w.y1 > w.y0))
    throw std::runtime_error("window: need x0 < x1 and y0 < y1");
  return w;
}

namespace {

nlohmann::ordered_json fit_json_object(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["z_hat"] = fit.z_hat;
  j["theta_hat"] = fit.theta_hat;
  j["free_mask"] = fit.free_mask;
  j["contrast"] = fit.total;
  j["refined"] = fit.refined;
  if (!fit.warning.empty()) j["warning"] = fit.warning;
  j["n_points"] = fit.n_points;
  j["seed"] = std::to_string(fit.seed);
  j["margin"] = fit.margin;
  j["test_functions"] = fit.spec_names;
  j["observed"] = fit.S;
  nlohmann::ordered_json minima = nlohmann::ordered_json::array();
  for (const GridMinimum& m : fit.grid_minima) {
    nlohmann::ordered_json mj;
    mj["theta"] = m.theta;
    mj["z"] = m.z;
    mj["contrast"] = m.total;
    minima.push_back(std::move(mj));
  }
  j["grid_minima"] = std::move(minima);
  return j;
}

}  // namespace

std::string fit_to_json(const FitResult& fit) {
  return fit_json_object(fit).dump(2) + "\n";
}

std::string suite_to_json(const SuiteResult& suite, const std::vector<std::string>& context) {
  nlohmann::ordered_json j;
  for (const std::string& line : context) {
    auto eq = line.find('=');
    if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  j["alphas"] = suite.alphas;
  nlohmann::ordered_json ests = nlohmann::ordered_json::array();
  for (const NamedEstimate& e : suite.estimates) {
    nlohmann::ordered_json ej;
    ej["name"] = e.name;
    ej["ok"] = e.ok;
    if (!e.ok)
      ej["error"] = e.error;
    else
      ej["fit"] = fit_json_object(e.fit);
    ests.push_back(std::move(ej));
  }
  j["estimates"] = std::move(ests);
  return j.dump(2) + "\n";
}

}  // namespace quermass
