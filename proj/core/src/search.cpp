#include "popgame/verify.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace popgame {

namespace {

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && out > UINT64_MAX / base) {
      return UINT64_MAX;
    }
    out *= base;
  }
  return out;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) {
    return UINT64_MAX;
  }
  return a * b;
}

std::uint64_t table_count(std::size_t k) {
  return saturating_mul(checked_pow(k, k), checked_pow(std::uint64_t{k} * k, k * (k - 1) / 2));
}

std::uint64_t labelings_per_table(std::size_t k, std::size_t alphabet_size) {
  return saturating_mul(checked_pow(k, alphabet_size), checked_pow(2, k));
}

std::string state_label(std::size_t i) { return "s" + std::to_string(i); }

// Bottom-SCC supports (bitmask of occupied states) reachable from one initial
// configuration. A labeling passes on that input iff every support is inside
// the states whose output equals the expected value.
using Supports = std::vector<std::uint32_t>;

} // namespace

std::uint64_t search_space_size(std::size_t state_count, std::size_t alphabet_size) {
  return saturating_mul(table_count(state_count), labelings_per_table(state_count, alphabet_size));
}

std::vector<SearchFinding> search_pavlovian(std::size_t state_count, const PredicateExpr &predicate,
                                            SizeRange sizes, const SearchOptions &options,
                                            const std::function<void(const SearchFinding &)> &on_found) {
  if (state_count == 0 || state_count > 16) {
    throw std::invalid_argument("search supports 1 to 16 states");
  }
  if (sizes.min < 2 || sizes.max < sizes.min) {
    throw std::invalid_argument("population sizes must satisfy 2 <= min <= max");
  }
  std::vector<std::string> alphabet = options.alphabet;
  for (const auto &sym : symbols(predicate)) {
    if (std::find(alphabet.begin(), alphabet.end(), sym) == alphabet.end()) {
      alphabet.push_back(sym);
    }
  }
  if (alphabet.empty()) {
    throw std::invalid_argument("search needs a non-empty input alphabet");
  }

  const auto k = static_cast<StateId>(state_count);
  std::vector<std::string> names;
  for (StateId s = 0; s < k; ++s) {
    names.push_back(state_label(s));
  }

  // Input multisets and predicate values, shared by every candidate.
  std::vector<std::pair<std::vector<std::uint32_t>, bool>> inputs;
  for (std::uint32_t n = sizes.min; n <= sizes.max; ++n) {
    for (auto &counts : compositions(alphabet.size(), n)) {
      InputCounts named;
      for (std::size_t i = 0; i < alphabet.size(); ++i) {
        named[alphabet[i]] = counts[i];
      }
      inputs.emplace_back(std::move(counts), eval_predicate(predicate, named));
    }
  }

  // Mixed-radix digits: K diagonal choices, then K*K choices per unordered
  // off-diagonal pair.
  std::vector<StatePair> off_diagonal;
  for (StateId a = 0; a < k; ++a) {
    for (StateId b = a + 1; b < k; ++b) {
      off_diagonal.push_back({a, b});
    }
  }
  std::vector<std::uint32_t> radix(k, k);
  radix.insert(radix.end(), off_diagonal.size(), k * k);
  std::vector<std::uint32_t> digit(radix.size(), 0);

  const std::uint64_t per_table = labelings_per_table(state_count, alphabet.size());
  const std::uint64_t iota_count = checked_pow(k, alphabet.size());
  std::uint64_t used = 0;
  std::size_t found_index = 0;
  std::vector<SearchFinding> found;

  for (bool more = true; more;) {
    used = std::min(UINT64_MAX - per_table, used) + per_table;
    if (used > options.candidate_budget) {
      throw BudgetExceeded("search candidate budget exhausted", options.candidate_budget);
    }

    std::vector<Rule> rules;
    for (StateId q = 0; q < k; ++q) {
      rules.push_back({{q, q}, {digit[q], digit[q]}});
    }
    for (std::size_t i = 0; i < off_diagonal.size(); ++i) {
      const auto [a, b] = off_diagonal[i];
      const std::uint32_t d = digit[k + i];
      const StateId to_a = d / k;
      const StateId to_b = d % k;
      rules.push_back({{a, b}, {to_a, to_b}});
      rules.push_back({{b, a}, {to_b, to_a}});
    }
    const Protocol table("candidate", names, rules);

    const PavlovianResult pav = check_pavlovian(table, options.mode);
    if (const auto *witness = std::get_if<Witness>(&pav)) {
      std::map<Configuration, Supports> cache;
      auto supports_of = [&](const Configuration &init) -> const Supports & {
        auto it = cache.find(init);
        if (it != cache.end()) {
          return it->second;
        }
        const ConfigGraph graph = reachable(table, init, options.node_budget);
        Supports out;
        for (const auto &scc : bottom_sccs(graph)) {
          for (std::size_t node : scc) {
            std::uint32_t mask = 0;
            for (StateId s = 0; s < k; ++s) {
              mask |= graph.nodes[node][s] > 0 ? (1u << s) : 0u;
            }
            out.push_back(mask);
          }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return cache.emplace(init, std::move(out)).first->second;
      };

      for (std::uint64_t iota_code = 0; iota_code < iota_count; ++iota_code) {
        std::vector<StateId> iota(alphabet.size());
        for (std::uint64_t c = iota_code, i = 0; i < alphabet.size(); ++i, c /= k) {
          iota[i] = static_cast<StateId>(c % k);
        }
        std::vector<std::pair<const Supports *, bool>> per_input;
        for (const auto &[counts, expected] : inputs) {
          std::vector<std::uint32_t> init(k, 0);
          for (std::size_t i = 0; i < alphabet.size(); ++i) {
            init[iota[i]] += counts[i];
          }
          per_input.emplace_back(&supports_of(Configuration(std::move(init))), expected);
        }
        for (std::uint32_t ones = 0; ones < (1u << k); ++ones) {
          const bool ok = std::all_of(per_input.begin(), per_input.end(), [&](const auto &entry) {
            const auto &[supports, expected] = entry;
            return std::all_of(supports->begin(), supports->end(), [&](std::uint32_t mask) {
              return expected ? (mask & ~ones) == 0 : (mask & ones) == 0;
            });
          });
          if (!ok) {
            continue;
          }
          std::vector<std::pair<std::string, StateId>> input_map;
          for (std::size_t i = 0; i < alphabet.size(); ++i) {
            input_map.emplace_back(alphabet[i], iota[i]);
          }
          std::vector<std::uint8_t> outputs(k);
          for (StateId s = 0; s < k; ++s) {
            outputs[s] = (ones >> s) & 1u;
          }
          SearchFinding finding{table.with_name("pavlovian-k" + std::to_string(k) + "-" +
                                                std::to_string(found_index++))
                                    .with_inputs(std::move(input_map))
                                    .with_outputs(std::move(outputs)),
                                *witness};
          if (on_found) {
            on_found(finding);
          }
          found.push_back(std::move(finding));
        }
      }
    }

    more = false;
    for (std::size_t i = 0; i < digit.size(); ++i) {
      if (++digit[i] < radix[i]) {
        more = true;
        break;
      }
      digit[i] = 0;
    }
  }
  return found;
}

} // namespace popgame
