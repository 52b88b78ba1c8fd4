#include <fstream>
#include <sstream>

#include "fracskellam/validation.hpp"

namespace fracskellam {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  CheckConfig* current = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(lineno, "unterminated section");
      std::istringstream head(line.substr(1, line.size() - 2));
      std::string kind, name;
      head >> kind >> name;
      if (kind != "check" || name.empty())
        throw ConfigError(lineno, "expected [check <name>]");
      CheckConfig c;
      c.name = name;
      c.label = name;
      c.line = lineno;
      cfg.checks.push_back(std::move(c));
      current = &cfg.checks.back();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "empty key");

    if (current == nullptr) {
      if (key == "seed") {
        try {
          cfg.seed = std::stoull(value);
        } catch (const std::exception&) {
          throw ConfigError(lineno, "seed must be an unsigned integer");
        }
      } else if (key == "threads") {
        try {
          cfg.threads = std::stoi(value);
        } catch (const std::exception&) {
          throw ConfigError(lineno, "threads must be an integer");
        }
      } else if (key == "output") {
        cfg.output_dir = value;
      } else {
        throw ConfigError(lineno, "unknown global key '" + key + "'");
      }
      continue;
    }

    if (key == "label") {
      current->label = value;
    } else {
      if (current->params.count(key))
        throw ConfigError(lineno, "duplicate key '" + key + "'");
      current->params[key] = value;
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file: " + path);
  return parse(in);
}

}  // namespace fracskellam
