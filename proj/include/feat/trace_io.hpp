#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "feat/feat.hpp"

namespace feat {

/// Shortest round-trip decimal form, stable for golden-file comparison.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

template <typename Range, typename Fn>
std::string bracket_list(const Range& r, Fn&& fmt) {
  std::string s = "[";
  bool first = true;
  for (const auto& item : r) {
    if (!first) s += ',';
    s += fmt(item);
    first = false;
  }
  return s + "]";
}

}  // namespace detail

/// One line per round, 1-based user and carrier ids:
///   round=1 alpha=0.5 ordering=[2,1] admissions=[2:3,1:1] removals=[] q=[1:0.7,2:1.2] qdiv=[]
/// followed by the assignment, the powers, alpha_star_1 and the round count.
inline void write_trace(const FeatOutput<double>& out, std::ostream& os) {
  for (const auto& rec : out.trace) {
    os << "round=" << rec.round << " alpha=" << format_number(rec.alpha_star) << " ordering="
       << detail::bracket_list(rec.ordering, [](Index u) { return std::to_string(u + 1); })
       << " admissions="
       << detail::bracket_list(rec.admissions,
                               [](const auto& a) {
                                 return std::to_string(a.first + 1) + ':' +
                                        std::to_string(a.second + 1);
                               })
       << " removals="
       << detail::bracket_list(rec.removals, [](Index u) { return std::to_string(u + 1); })
       << " q="
       << detail::bracket_list(rec.q_values,
                               [](const auto& q) {
                                 return std::to_string(q.first + 1) + ':' +
                                        format_number(q.second);
                               })
       << " qdiv="
       << detail::bracket_list(rec.q_divergent, [](Index u) { return std::to_string(u + 1); })
       << '\n';
  }
  os << "unassigned="
     << detail::bracket_list(out.assignment.unassigned,
                             [](Index k) { return std::to_string(k + 1); })
     << '\n';
  for (size_t n = 0; n < out.assignment.lists.size(); ++n)
    os << "assignment user=" << n + 1 << " carriers="
       << detail::bracket_list(out.assignment.lists[n],
                               [](Index k) { return std::to_string(k + 1); })
       << '\n';
  for (Index n = 0; n < out.powers.powers.rows(); ++n) {
    os << "powers user=" << n + 1 << " values=[";
    for (Index k = 0; k < out.powers.powers.cols(); ++k) {
      if (k) os << ',';
      os << format_number(out.powers.powers(n, k));
    }
    os << "]\n";
  }
  os << "alpha_star_1=" << format_number(out.alpha_star_1) << '\n';
  os << "rounds=" << out.rounds << '\n';
}

}  // namespace feat
