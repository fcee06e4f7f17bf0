#pragma once

// Named country groupings, loadable from a JSON object name -> [codes].

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eustab/accounting.hpp"
#include "eustab/dataset.hpp"
#include "eustab/error.hpp"

namespace eustab {

class RegionCatalog {
 public:
  RegionCatalog() = default;

  void add(RegionDefinition region) {
    const auto name = region.name();
    regions_.insert_or_assign(name, std::move(region));
  }

  [[nodiscard]] bool contains(const std::string& name) const { return regions_.count(name) != 0; }
  [[nodiscard]] const std::map<std::string, RegionDefinition>& all() const noexcept { return regions_; }

  [[nodiscard]] const RegionDefinition& at(const std::string& name) const {
    const auto it = regions_.find(name);
    if (it == regions_.end()) throw Error(errc::unknown_subject, "unknown region '" + name + "'");
    return it->second;
  }

  /// A catalog region, or a single country given by code or display name.
  [[nodiscard]] RegionDefinition resolve(const std::string& name, const Dataset& ds) const {
    if (const auto it = regions_.find(name); it != regions_.end()) return it->second;
    for (const auto& c : ds.countries()) {
      if (c == name || country_display_name(c) == name) {
        return RegionDefinition(country_display_name(c), {c});
      }
    }
    throw Error(errc::unknown_subject, "'" + name + "' is neither a region nor a country");
  }

  static RegionCatalog from_json(const std::string& text) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(errc::invalid_argument, std::string("regions file: ") + e.what());
    }
    if (!doc.is_object()) throw Error(errc::invalid_argument, "regions file must be a JSON object");
    RegionCatalog cat;
    for (const auto& [name, members] : doc.items()) {
      if (!members.is_array()) {
        throw Error(errc::invalid_argument, "region '" + name + "' must map to an array");
      }
      std::set<std::string> codes;
      for (const auto& m : members) {
        if (!m.is_string()) throw Error(errc::invalid_argument, "region '" + name + "': non-string code");
        codes.insert(m.get<std::string>());
      }
      cat.add(RegionDefinition(name, std::move(codes)));
    }
    return cat;
  }

  static RegionCatalog load(const std::filesystem::path& path) { return from_json(read_file(path)); }

  std::string to_json() const {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& [name, r] : regions_) {
      doc[name] = std::vector<std::string>(r.members().begin(), r.members().end());
    }
    return doc.dump(2) + "\n";
  }

 private:
  std::map<std::string, RegionDefinition> regions_;
};

/// The ten standard EU-27 groupings over 1995-2011 membership.
inline RegionCatalog default_regions() {
  const std::set<std::string> eu27 = {"AT", "BE", "BG", "CY", "CZ", "DE", "DK", "EE", "EL",
                                      "ES", "FI", "FR", "HU", "IE", "IT", "LT", "LU", "LV",
                                      "MT", "NL", "PL", "PT", "RO", "SE", "SI", "SK", "UK"};
  const RegionDefinition all("EU27", eu27);
  const RegionDefinition eurozone("Eurozone", {"AT", "BE", "CY", "DE", "EE", "EL", "ES", "FI", "FR",
                                               "IE", "IT", "LU", "MT", "NL", "PT", "SI", "SK"});
  const RegionDefinition surplus("EU9+", {"AT", "BE", "DE", "DK", "FI", "FR", "LU", "NL", "SE"});
  const RegionDefinition euro_surplus("Eurozone7+", {"AT", "BE", "DE", "FI", "FR", "LU", "NL"});
  const RegionDefinition germany("Germany", {"DE"});

  RegionCatalog cat;
  cat.add(all);
  cat.add(eurozone);
  cat.add(complement(eurozone, all, "EU10"));
  cat.add(surplus);
  cat.add(complement(surplus, all, "EU18-"));
  cat.add(complement(germany, all, "EU26"));
  cat.add(euro_surplus);
  cat.add(complement(germany, euro_surplus, "Eurozone6+"));
  cat.add(complement(euro_surplus, eurozone, "Eurozone10-"));
  cat.add(complement(germany, eurozone, "Eurozone16"));
  return cat;
}

}  // namespace eustab
