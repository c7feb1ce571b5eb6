#pragma once

// Plain-text key/value configs:  `key = value` lines, '#' comments,
// list values whitespace separated. Used for both model files and
// experiment files.

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "smile/errors.hpp"
#include "smile/models.hpp"

namespace smile {

class Config {
 public:
  static Config parse(const std::string& text) {
    Config cfg;
    cfg.text_ = text;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") != std::string::npos)
          throw DomainError("config: malformed line: " + line);
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      if (key.empty() || val.empty())
        throw DomainError("config: empty key or value: " + line);
      cfg.kv_[key] = val;
    }
    return cfg;
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw DomainError("config: missing key: " + key);
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }

  double get_double(const std::string& key) const {
    return to_double(get_string(key), key);
  }

  double get_double(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : to_double(it->second, key);
  }

  std::vector<double> get_list(const std::string& key) const {
    std::istringstream in(get_string(key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_double(tok, key));
    if (out.empty()) throw DomainError("config: empty list: " + key);
    return out;
  }

  const std::string& text() const { return text_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }
  static double to_double(const std::string& s, const std::string& key) {
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw DomainError("config: bad number for " + key + ": " + s);
    }
    if (pos != s.size())
      throw DomainError("config: bad number for " + key + ": " + s);
    return v;
  }

  std::map<std::string, std::string> kv_;
  std::string text_;
};

/// Model from a config: `model = blackscholes|carrwu|merton|heston`
/// plus the named parameters.
inline ModelSpec model_from_config(const Config& cfg) {
  const std::string name = cfg.get_string("model");
  ModelSpec m;
  if (name == "blackscholes") {
    m = BlackScholesModel{cfg.get_double("sigma")};
  } else if (name == "carrwu") {
    m = CarrWuModel{cfg.get_double("sigma"), cfg.get_double("alpha")};
  } else if (name == "merton") {
    MertonModel j{cfg.get_double("sigma"), cfg.get_double("lambda"),
                  cfg.get_double("alpha_j"), cfg.get_double("delta"),
                  std::nullopt};
    if (cfg.has("mu")) j.mu_override = cfg.get_double("mu");
    m = j;
  } else if (name == "heston") {
    m = HestonModel{cfg.get_double("lambda_h"), cfg.get_double("theta"),
                    cfg.get_double("eta"), cfg.get_double("sigma0"),
                    cfg.get_double("rho")};
  } else {
    throw DomainError("config: unknown model: " + name);
  }
  validate(m);
  return m;
}

}  // namespace smile
