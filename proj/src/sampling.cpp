#include "qsopt/sampling.hpp"

#include <cmath>

#include "qsopt/error.hpp"

namespace qsopt {

std::string bits_to_string(Bits b, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int q = 0; q < n; ++q) {
    if (bit_of(b, q, n)) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

Bits bits_from_string(std::string_view s) {
  if (s.size() > kMaxPackedQubits) throw SimulationError("bitstring longer than 64 qubits");
  Bits b = 0;
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw SimulationError("bitstring may only contain '0' and '1'");
    b = (b << 1) | static_cast<Bits>(ch == '1');
  }
  return b;
}

Distribution OutcomeCounts::distribution() const {
  Distribution d;
  if (shots == 0) return d;
  for (const auto& [b, c] : counts) d[b] = static_cast<double>(c) / static_cast<double>(shots);
  return d;
}

double total_variation(const Distribution& p, const Distribution& q) {
  double sum = 0.0;
  auto i = p.begin();
  auto j = q.begin();
  while (i != p.end() || j != q.end()) {
    if (j == q.end() || (i != p.end() && i->first < j->first)) {
      sum += std::fabs(i->second);
      ++i;
    } else if (i == p.end() || j->first < i->first) {
      sum += std::fabs(j->second);
      ++j;
    } else {
      sum += std::fabs(i->second - j->second);
      ++i;
      ++j;
    }
  }
  return 0.5 * sum;
}

}  // namespace qsopt
