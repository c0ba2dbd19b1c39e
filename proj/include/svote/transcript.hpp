#pragma once

#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "svote/field.hpp"

namespace svote {

// Why a value was made public. Every intentional disclosure carries one.
enum class Disclosure { ComparisonBit, ValidationVerdict, Evidence, Output };

inline const char* disclosure_name(Disclosure d) {
  switch (d) {
    case Disclosure::ComparisonBit: return "comparison_bit";
    case Disclosure::ValidationVerdict: return "validation_verdict";
    case Disclosure::Evidence: return "evidence";
    case Disclosure::Output: return "output";
  }
  return "?";
}

struct DisclosureEvent {
  std::uint32_t round = 0;
  Disclosure purpose = Disclosure::Output;
  std::string label;
  u64 value = 0;
};

// Line-oriented per-tallier session log:
//   round <r> opens=<n> masked=<n> mults=<n> deals=<n> sums=<n> bytes=<n>
//   open <r> <purpose> <label> <value>
//   note <text>
// Contains no timings, so equal seeds give byte-identical logs.
class Transcript {
 public:
  explicit Transcript(std::size_t tallier = 0) : tallier_(tallier) {}

  std::size_t tallier() const { return tallier_; }

  void round(std::uint32_t r, std::size_t opens, std::size_t masked, std::size_t mults, std::size_t deals,
             std::size_t sums, std::uint64_t bytes) {
    out_ << "round " << r << " opens=" << opens << " masked=" << masked << " mults=" << mults
         << " deals=" << deals << " sums=" << sums << " bytes=" << bytes << '\n';
  }

  void disclose(std::uint32_t r, Disclosure purpose, const std::string& label, u64 value) {
    events_.push_back({r, purpose, label, value});
    out_ << "open " << r << ' ' << disclosure_name(purpose) << ' ' << (label.empty() ? "-" : label) << ' '
         << value << '\n';
  }

  void note(const std::string& text) { out_ << "note " << text << '\n'; }

  const std::vector<DisclosureEvent>& disclosures() const { return events_; }
  std::string text() const { return out_.str(); }

 private:
  std::size_t tallier_;
  std::ostringstream out_;
  std::vector<DisclosureEvent> events_;
};

struct AuditReport {
  bool ok = true;
  std::vector<std::string> violations;
  std::size_t comparison_bits = 0;
  std::size_t verdicts = 0;
  std::size_t evidence = 0;
  std::size_t outputs = 0;
};

// Checks that a session disclosed nothing beyond comparison bits, validation
// verdict values, rejection evidence for the named voters, and outputs.
inline AuditReport audit_disclosures(const std::vector<DisclosureEvent>& events,
                                     const std::set<std::string>& rejected_voters = {}) {
  AuditReport report;
  for (const DisclosureEvent& e : events) {
    switch (e.purpose) {
      case Disclosure::ComparisonBit:
        ++report.comparison_bits;
        if (e.value > 1) report.violations.push_back("comparison opened to non-bit " + std::to_string(e.value));
        break;
      case Disclosure::ValidationVerdict: ++report.verdicts; break;
      case Disclosure::Evidence:
        ++report.evidence;
        if (!rejected_voters.count(e.label)) {
          report.violations.push_back("evidence opened for non-rejected voter '" + e.label + "'");
        }
        break;
      case Disclosure::Output: ++report.outputs; break;
      default: report.violations.push_back("unknown disclosure kind"); break;
    }
  }
  report.ok = report.violations.empty();
  return report;
}

}  // namespace svote
