#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace cylflow {

enum class Verdict { pass, fail, caveat, trend, skipped };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::caveat: return "horizon-violated";
    case Verdict::trend: return "trend";
    case Verdict::skipped: return "skipped";
  }
  return "?";
}

// One inequality check: worst case of lhs <= rhs over the checked index set.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  Verdict verdict = Verdict::skipped;
  std::string location;  // argmax: x1, t and/or window
  std::map<std::string, double> constants;
  bool horizon_ok = true;
  bool unconditional = true;  // a failure of an unconditional check fails verify
  std::string note;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;

  [[nodiscard]] bool failed() const { return verdict == Verdict::fail; }
};

inline bool within(double lhs, double rhs, double rel_tol = 1e-9, double abs_tol = 1e-12) {
  return lhs <= rhs * (1.0 + rel_tol) + abs_tol;
}

// Builds a report with the verdict rule lhs <= rhs (1 + rel) + abs. When the
// check relies on the periodic box emulating R and the horizon condition does
// not hold, the verdict becomes a caveat.
inline BoundReport make_report(std::string name, double lhs, double rhs, std::string location = {},
                               double rel_tol = 1e-9, double abs_tol = 1e-12, bool horizon_ok = true) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.location = std::move(location);
  r.rel_tol = rel_tol;
  r.abs_tol = abs_tol;
  r.horizon_ok = horizon_ok;
  const bool ok = std::isfinite(lhs) && std::isfinite(rhs) && within(lhs, rhs, rel_tol, abs_tol);
  if (!horizon_ok)
    r.verdict = Verdict::caveat;
  else
    r.verdict = ok ? Verdict::pass : Verdict::fail;
  return r;
}

}  // namespace cylflow
