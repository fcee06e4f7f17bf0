#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eustab {

enum class errc {
  malformed_header,
  bad_numeric,
  duplicate_key,
  missing_gdp,
  invalid_record,
  empty_intersection,
  empty_region,
  not_subset,
  unknown_subject,
  degenerate_span,
  no_convergence,
  singular_jacobian,
  degenerate_total,
  no_intersection,
  root_not_bracketed,
  invalid_argument,
  io,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::malformed_header: return "MalformedHeader";
    case errc::bad_numeric: return "BadNumeric";
    case errc::duplicate_key: return "DuplicateKey";
    case errc::missing_gdp: return "MissingGdp";
    case errc::invalid_record: return "InvalidRecord";
    case errc::empty_intersection: return "EmptyIntersection";
    case errc::empty_region: return "EmptyRegion";
    case errc::not_subset: return "NotSubset";
    case errc::unknown_subject: return "UnknownSubject";
    case errc::degenerate_span: return "DegenerateSpan";
    case errc::no_convergence: return "NoConvergence";
    case errc::singular_jacobian: return "SingularJacobian";
    case errc::degenerate_total: return "DegenerateTotal";
    case errc::no_intersection: return "NoIntersection";
    case errc::root_not_bracketed: return "RootNotBracketed";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::io: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace eustab
