#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deforge/errors.hpp"

namespace deforge {

// Machine-readable result format, schema `deform-forge-report/1`.  Values are
// strings throughout (exact rationals in GQ literal form, verdicts as words)
// so that emit/parse round-trips are identity and reports diff cleanly.

inline constexpr const char* report_schema = "deform-forge-report/1";

struct ReportItem {
    std::string key;
    std::string value;
    std::string provenance;  // "", "paper", "derived", "external" or "trivial"

    bool operator==(const ReportItem&) const = default;
};

struct Report {
    std::string command;  // the invocation this report answers
    std::uint64_t seed = 0;
    std::vector<ReportItem> items;

    bool operator==(const Report&) const = default;

    // Appends an item; keys are unique within a report.
    void add(std::string key, std::string value, std::string provenance = "");
    bool has(const std::string& key) const;
    const std::string& value_of(const std::string& key) const;  // UnknownName if absent
};

// Deterministic serialization: same Report, same bytes.
std::string emit_report(const Report& r);

// Inverse of emit_report; ParseError on malformed input or schema mismatch.
Report parse_report(const std::string& text);

}  // namespace deforge
