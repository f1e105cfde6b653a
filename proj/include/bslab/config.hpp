#pragma once

#include <map>
#include <string>
#include <vector>

#include "bslab/det.hpp"
#include "bslab/spectra.hpp"

namespace bslab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sectioned key-value configuration ([section] / key = value lines).
// Serialization is canonical (sections and keys sorted), so equal configs
// produce byte-identical text and hashes.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);
  std::string serialize() const;
  std::string params_hash() const;  // FNV-1a 64 of the canonical serialization

  bool has(const std::string& sec, const std::string& key) const;
  void set(const std::string& sec, const std::string& key, const std::string& value);

  std::string get_str(const std::string& sec, const std::string& key,
                      const std::string& dflt) const;
  double get_num(const std::string& sec, const std::string& key, double dflt) const;
  int get_int(const std::string& sec, const std::string& key, int dflt) const;
  bool get_bool(const std::string& sec, const std::string& key, bool dflt) const;
  std::vector<double> get_list(const std::string& sec, const std::string& key) const;

  Potential make_potential() const;
  NumericsConfig make_numerics() const;
  SpectraConfig make_spectra() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

uint64_t fnv1a64(const std::string& s);

}  // namespace bslab
