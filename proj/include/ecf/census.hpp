#pragma once

// Measurement harness over the class of odd square-free z-rough integers:
// segmented enumeration, a resumable sharded census that runs the factoring
// pipeline over every member and persists one JSONL record per n, and the
// two summary statistics reported alongside it (least non-residue growth
// and the density of members with two prime factors in the 3 mod 8 class).
//
// Census output is deterministic for a fixed seed: shards are processed by
// a worker pool but records are written strictly in shard order by a single
// writer, so a resumed run extends the file exactly where it stopped.
// Record timing fields are the one exception to byte-stable output.

#include "ecf/factoring.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace ecf {

// Membership predicate for the census class: odd, square-free, every prime
// factor above z, and 3 <= n <= N.
struct RoughSquareFreeFilter {
  Natural N;
  std::uint64_t z{2};

  bool accepts(const Natural& n) const {
    if (n < 3 || n > N || (n & 1) == 0) return false;
    if (trial_division(n, z)) return false;  // least prime factor <= z
    return is_squarefree(n);
  }
};

inline std::vector<std::uint64_t> small_primes_upto(std::uint64_t m) {
  std::vector<std::uint64_t> primes;
  if (m < 2) return primes;
  std::vector<bool> composite(m + 1, false);
  for (std::uint64_t p = 2; p <= m; ++p) {
    if (composite[p]) continue;
    primes.push_back(p);
    for (std::uint64_t q = p * p; q <= m; q += p) composite[q] = true;
  }
  return primes;
}

namespace detail {

// Members of the class inside [lo, hi].  base_primes must cover all primes
// up to sqrt(nmax); multiples of p <= z are struck for roughness and
// multiples of p^2 for square-freeness.  When z exceeds sqrt(nmax) the
// survivors are exactly the primes above sqrt(nmax), so the tail condition
// n > z finishes the roughness filter.
inline std::vector<std::uint64_t> class_segment(std::uint64_t lo, std::uint64_t hi,
                                                const Natural& nmax, std::uint64_t z,
                                                const std::vector<std::uint64_t>& base_primes) {
  std::vector<std::uint64_t> members;
  if (lo < 3) lo = 3;
  if (Natural(hi) > nmax) hi = static_cast<std::uint64_t>(nmax);
  if (lo > hi) return members;
  std::vector<bool> struck(hi - lo + 1, false);
  for (const std::uint64_t p : base_primes) {
    if (p <= z) {
      std::uint64_t start = ((lo + p - 1) / p) * p;
      for (std::uint64_t v = start; v <= hi; v += p) struck[v - lo] = true;
    }
    const std::uint64_t sq = p * p;
    if (sq > hi) continue;
    std::uint64_t start = ((lo + sq - 1) / sq) * sq;
    for (std::uint64_t v = start; v <= hi; v += sq) struck[v - lo] = true;
  }
  const bool need_tail = Natural(z) * z > nmax;
  for (std::uint64_t v = lo | 1; v <= hi; v += 2) {
    if (struck[v - lo]) continue;
    if (need_tail && v <= z) continue;
    members.push_back(v);
  }
  return members;
}

inline std::uint64_t sqrt_bound(const Natural& nmax) {
  std::uint64_t r = 2;
  while (Natural(r) * r <= nmax) ++r;
  return r - 1;
}

}  // namespace detail

// All members of the class, ascending.
inline std::vector<std::uint64_t> enumerate_class(const RoughSquareFreeFilter& f) {
  if (f.N < 1) throw std::invalid_argument("enumerate_class: N must be >= 1");
  if (f.N > (Natural(1) << 62))
    throw std::invalid_argument("enumerate_class: N exceeds the supported range");
  const auto base = small_primes_upto(detail::sqrt_bound(f.N));
  const std::uint64_t hi = static_cast<std::uint64_t>(f.N);
  std::vector<std::uint64_t> all;
  constexpr std::uint64_t kWidth = 1 << 16;
  for (std::uint64_t lo = 3; lo <= hi; lo += kWidth) {
    const std::uint64_t seg_hi = std::min(hi, lo + kWidth - 1);
    auto part = detail::class_segment(lo, seg_hi, f.N, f.z, base);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

struct CensusRecord {
  std::uint64_t n{0};
  FactorOutcome outcome;
  std::uint64_t oracle_queries{0};
  std::uint64_t elapsed_ns{0};
};

namespace detail {

inline const char* outcome_tag(FactorOutcome::Kind k) {
  switch (k) {
    case FactorOutcome::Kind::Factored: return "factored";
    case FactorOutcome::Kind::InputIsPrime: return "input_is_prime";
    case FactorOutcome::Kind::Exceptional: return "exceptional";
    case FactorOutcome::Kind::Invalid: return "invalid";
  }
  return "invalid";
}

inline const char* reason_tag(FailReason r) {
  switch (r) {
    case FailReason::NoFactorFound: return "no_factor_found";
    case FailReason::NotSquareFree: return "not_square_free";
    case FailReason::None: break;
  }
  return "none";
}

// One JSONL line; every integer is rendered as a decimal string.
inline std::string record_line(const CensusRecord& r) {
  std::ostringstream out;
  out << "{\"n\":\"" << r.n << "\",\"outcome\":\"" << outcome_tag(r.outcome.kind) << '"';
  if (r.outcome.kind == FactorOutcome::Kind::Factored) {
    const FactorWitness& w = *r.outcome.witness;
    out << ",\"divisor\":\"" << w.divisor.str() << '"';
    if (w.b_used) out << ",\"b_used\":\"" << w.b_used->str() << '"';
    out << ",\"source\":\"" << witness_source_name(w.source) << '"';
  } else if (r.outcome.kind == FactorOutcome::Kind::Exceptional) {
    out << ",\"reason\":\"" << reason_tag(r.outcome.reason) << '"';
  }
  out << ",\"oracle_queries\":\"" << r.oracle_queries << "\",\"elapsed_ns\":\""
      << r.elapsed_ns << "\"}";
  return out.str();
}

inline std::optional<std::string> json_string_field(const std::string& line,
                                                    const std::string& key) {
  const std::string needle = "\"" + key + "\":\"";
  const auto pos = line.find(needle);
  if (pos == std::string::npos) return std::nullopt;
  const auto start = pos + needle.size();
  const auto end = line.find('"', start);
  if (end == std::string::npos) return std::nullopt;
  return line.substr(start, end - start);
}

}  // namespace detail

struct CensusSummary {
  std::uint64_t total{0};
  std::uint64_t factored{0};
  std::uint64_t input_is_prime{0};
  std::uint64_t exceptional{0};
  std::map<std::string, std::uint64_t> by_source;
  double wall_time_s{0.0};

  // Inputs the curve sweep could have acted on: everything but primes.
  std::uint64_t eligible() const { return total - input_is_prime; }
  double exceptional_fraction() const {
    return eligible() ? static_cast<double>(exceptional) / static_cast<double>(eligible())
                      : 0.0;
  }

  static const char* csv_header() { return "total,factored,exceptional,fraction,wall_time_s"; }
  std::string csv_line() const {
    std::ostringstream out;
    out << total << ',' << factored << ',' << exceptional << ','
        << exceptional_fraction() << ',' << wall_time_s;
    return out.str();
  }
};

// Refusal to clobber an existing record file; mapped to the I/O exit code.
struct OutputConflictError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CensusConfig {
  RoughSquareFreeFilter filter;
  AlgoParams params;
  OracleConfig oracle;
  std::string out_path;
  unsigned workers{0};  // 0 = hardware concurrency
  bool resume{false};
  bool force{false};
  std::function<void(std::uint64_t, std::uint64_t)> on_progress;  // (done, total) shards
};

// Largest n recorded in an existing JSONL file, if any.
inline std::optional<std::uint64_t> last_recorded_n(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  if (last.empty()) return std::nullopt;
  const auto n = detail::json_string_field(last, "n");
  if (!n) return std::nullopt;
  return std::stoull(*n);
}

namespace detail {

struct ShardOutput {
  std::vector<std::string> lines;
};

// Recount the whole record file so a resumed run's summary covers the
// prefix written by earlier runs as well; divisor soundness is re-checked
// line by line.
inline CensusSummary summarize_record_file(const std::string& path) {
  CensusSummary s;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto outcome = json_string_field(line, "outcome");
    if (!outcome) throw std::runtime_error("census records: malformed line: " + line);
    ++s.total;
    if (*outcome == "factored") {
      ++s.factored;
      const auto n = json_string_field(line, "n");
      const auto d = json_string_field(line, "divisor");
      if (!n || !d) throw std::runtime_error("census records: factored line lacks divisor");
      const Natural nv(*n), dv(*d);
      if (dv <= 1 || dv >= nv || nv % dv != 0)
        throw std::logic_error("census records: unsound divisor in: " + line);
      const auto src = json_string_field(line, "source");
      ++s.by_source[src ? *src : "unknown"];
    } else if (*outcome == "input_is_prime") {
      ++s.input_is_prime;
    } else if (*outcome == "exceptional") {
      ++s.exceptional;
    } else {
      throw std::runtime_error("census records: unknown outcome in: " + line);
    }
  }
  return s;
}

}  // namespace detail

// Run the configured sweep over every class member, appending JSONL records
// to cfg.out_path in increasing n order.  Returns a summary over the whole
// file (including any resumed prefix).
inline CensusSummary run_census(const CensusConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.out_path.empty())
    throw std::invalid_argument("run_census: output path must be set");
  if (cfg.filter.N < 1 || cfg.filter.N > (Natural(1) << 62))
    throw std::invalid_argument("run_census: N out of range");

  const bool exists = std::filesystem::exists(cfg.out_path);
  if (exists && !cfg.resume && !cfg.force)
    throw OutputConflictError("run_census: " + cfg.out_path +
                              " exists; pass resume to continue it or force to overwrite");
  std::optional<std::uint64_t> floor;
  if (exists && cfg.resume) floor = last_recorded_n(cfg.out_path);

  std::ofstream out(cfg.out_path,
                    cfg.resume ? std::ios::app : std::ios::trunc | std::ios::out);
  if (!out) throw std::runtime_error("run_census: cannot open " + cfg.out_path);

  AlgoParams params = cfg.params;
  if (params.N < cfg.filter.N) params.N = cfg.filter.N;

  const auto base = small_primes_upto(detail::sqrt_bound(cfg.filter.N));
  const std::uint64_t hi = static_cast<std::uint64_t>(cfg.filter.N);
  constexpr std::uint64_t kShardWidth = 1 << 13;
  const std::uint64_t total_shards = hi < 3 ? 0 : (hi - 3) / kShardWidth + 1;

  std::atomic<std::uint64_t> next_shard{0};
  std::mutex mu;
  std::condition_variable cv;
  std::map<std::uint64_t, detail::ShardOutput> ready;
  std::uint64_t written_shards = 0;
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;

  auto record_failure = [&](std::exception_ptr e) {
    std::lock_guard<std::mutex> lk(mu);
    if (!first_error) first_error = e;
    failed.store(true);
    cv.notify_all();
  };

  auto worker = [&]() {
    try {
      MultEllSimulator sim(cfg.oracle);
      for (;;) {
        if (failed.load()) return;
        const std::uint64_t idx = next_shard.fetch_add(1);
        if (idx >= total_shards) return;
        const std::uint64_t lo = 3 + idx * kShardWidth;
        const std::uint64_t seg_hi = std::min(hi, lo + kShardWidth - 1);
        detail::ShardOutput shard;
        for (const std::uint64_t n :
             detail::class_segment(lo, seg_hi, cfg.filter.N, cfg.filter.z, base)) {
          if (floor && n <= *floor) continue;
          CensusRecord rec;
          rec.n = n;
          const std::uint64_t q0 = sim.ledger().queries.load();
          const auto s0 = std::chrono::steady_clock::now();
          rec.outcome = factor_pipeline(Natural(n), params, sim);
          rec.elapsed_ns = static_cast<std::uint64_t>(
              std::chrono::duration_cast<std::chrono::nanoseconds>(
                  std::chrono::steady_clock::now() - s0)
                  .count());
          rec.oracle_queries = sim.ledger().queries.load() - q0;
          shard.lines.push_back(detail::record_line(rec));
        }
        {
          std::lock_guard<std::mutex> lk(mu);
          ready.emplace(idx, std::move(shard));
        }
        cv.notify_all();
      }
    } catch (...) {
      record_failure(std::current_exception());
    }
  };

  unsigned nworkers = cfg.workers ? cfg.workers : std::thread::hardware_concurrency();
  if (nworkers == 0) nworkers = 1;
  std::vector<std::thread> pool;
  pool.reserve(nworkers);
  for (unsigned i = 0; i < nworkers; ++i) pool.emplace_back(worker);

  {
    std::unique_lock<std::mutex> lk(mu);
    while (written_shards < total_shards) {
      cv.wait(lk, [&] { return failed.load() || ready.count(written_shards) > 0; });
      if (failed.load() && ready.count(written_shards) == 0) break;
      auto node = ready.extract(written_shards);
      lk.unlock();
      for (const std::string& line : node.mapped().lines) out << line << '\n';
      out.flush();
      if (!out) {
        record_failure(std::make_exception_ptr(std::runtime_error(
            "run_census: write failure after shard " + std::to_string(written_shards))));
        lk.lock();
        break;
      }
      ++written_shards;
      if (cfg.on_progress) cfg.on_progress(written_shards, total_shards);
      lk.lock();
    }
  }
  failed.store(true);  // stops idle workers if the writer bailed out
  cv.notify_all();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  out.close();
  CensusSummary summary = detail::summarize_record_file(cfg.out_path);
  summary.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summary;
}

// Least non-residue statistics over odd square-free n <= N: each member's
// least coprime b with Jacobi symbol -1 is found by forward scan, then
// re-verified (symbol value, minimality, square-freeness) before it is
// aggregated.  rows[i] counts members whose value exceeds thresholds[i].
struct NnStatistics {
  std::uint64_t total{0};
  std::uint64_t max_value{0};
  std::uint64_t argmax{0};
  std::vector<std::pair<std::uint64_t, std::uint64_t>> rows;
};

inline NnStatistics nn_statistics(const Natural& nmax,
                                  const std::vector<std::uint64_t>& thresholds) {
  if (nmax < 3) throw std::invalid_argument("nn_statistics: N must be >= 3");
  if (nmax > (Natural(1) << 62))
    throw std::invalid_argument("nn_statistics: N exceeds the supported range");
  NnStatistics stats;
  for (const std::uint64_t t : thresholds) stats.rows.emplace_back(t, 0);
  const auto base = small_primes_upto(detail::sqrt_bound(nmax));
  const std::uint64_t hi = static_cast<std::uint64_t>(nmax);
  constexpr std::uint64_t kWidth = 1 << 16;
  for (std::uint64_t lo = 3; lo <= hi; lo += kWidth) {
    const std::uint64_t seg_hi = std::min(hi, lo + kWidth - 1);
    for (const std::uint64_t n : detail::class_segment(lo, seg_hi, nmax, 2, base)) {
      std::uint64_t s = 0;
      for (std::uint64_t b = 2; b < n; ++b) {
        if (detail::jacobi_u64(b, n) == -1) {
          s = b;
          break;
        }
      }
      if (s == 0) throw std::logic_error("nn_statistics: no non-residue below n");
      // independent re-verification through the arbitrary-precision path
      if (jacobi(Natural(s), Natural(n)) != -1)
        throw std::logic_error("nn_statistics: symbol mismatch at n = " + std::to_string(n));
      for (std::uint64_t b = 2; b < s; ++b)
        if (jacobi(Natural(b), Natural(n)) == -1)
          throw std::logic_error("nn_statistics: minimality failure at n = " +
                                 std::to_string(n));
      if (!is_squarefree(Natural(n)))
        throw std::logic_error("nn_statistics: non-square-free n = " + std::to_string(n));
      ++stats.total;
      if (s > stats.max_value) {
        stats.max_value = s;
        stats.argmax = n;
      }
      for (auto& [t, count] : stats.rows)
        if (s > t) ++count;
    }
  }
  return stats;
}

struct Ratio {
  std::uint64_t numerator{0};
  std::uint64_t denominator{0};
  double value() const {
    return denominator ? static_cast<double>(numerator) / static_cast<double>(denominator)
                       : 0.0;
  }
};

// Fraction of class members having at least two distinct prime factors in
// the residue class 3 mod 8 (the shape the per-curve sweep provably
// factors).
inline Ratio two_3mod8_prime_fraction(const Natural& nmax, std::uint64_t z) {
  if (z < 2) throw std::invalid_argument("two_3mod8_prime_fraction: z must be >= 2");
  if (nmax < 3 || nmax > (Natural(1) << 62))
    throw std::invalid_argument("two_3mod8_prime_fraction: N out of range");
  Ratio r;
  const auto base = small_primes_upto(detail::sqrt_bound(nmax));
  const std::uint64_t hi = static_cast<std::uint64_t>(nmax);
  constexpr std::uint64_t kWidth = 1 << 16;
  for (std::uint64_t lo = 3; lo <= hi; lo += kWidth) {
    const std::uint64_t seg_hi = std::min(hi, lo + kWidth - 1);
    for (const std::uint64_t n : detail::class_segment(lo, seg_hi, nmax, z, base)) {
      ++r.denominator;
      unsigned hits = 0;
      for (const auto& [p, e] : factorize(Natural(n)).factors)
        if (p % 8 == 3) ++hits;
      if (hits >= 2) ++r.numerator;
    }
  }
  return r;
}

}  // namespace ecf
